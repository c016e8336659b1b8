#include "fracprox/instances.hpp"

#include "fracprox/error.hpp"
#include "fracprox/prox.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace fracprox {

namespace {

void require_symmetric(const Matrix& M, const char* name) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw Error(ErrorCode::InvalidShape, std::string(name) + " must be square and nonempty");
  }
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::InvalidParam, std::string(name) + " must be symmetric");
  }
}

Vector eigenvalues_of(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Spectrum of a symmetric positive definite matrix; throws otherwise.
Vector require_positive_definite(const Matrix& M, const char* name) {
  require_symmetric(M, name);
  const Vector ev = eigenvalues_of(M);
  if (!(ev[0] > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                std::string(name) + " has lambda_min = " + std::to_string(ev[0]));
  }
  return ev;
}

Vector require_psd(const Matrix& M, const char* name) {
  require_symmetric(M, name);
  const Vector ev = eigenvalues_of(M);
  const double scale = std::max(1.0, std::abs(ev[ev.size() - 1]));
  if (ev[0] < -1e-12 * scale) {
    throw Error(ErrorCode::NotPSD,
                std::string(name) + " has lambda_min = " + std::to_string(ev[0]));
  }
  return ev;
}

}  // namespace

std::string to_string(InstanceSpec::Kind kind) {
  switch (kind) {
    case InstanceSpec::Kind::Ep: return "ep";
    case InstanceSpec::Kind::Fqp: return "fqp";
    case InstanceSpec::Kind::Gep: return "gep";
    case InstanceSpec::Kind::Geps: return "geps";
  }
  return "unknown";
}

InstanceSpec::Kind instance_kind_from_string(const std::string& name) {
  if (name == "ep") return InstanceSpec::Kind::Ep;
  if (name == "fqp") return InstanceSpec::Kind::Fqp;
  if (name == "gep") return InstanceSpec::Kind::Gep;
  if (name == "geps") return InstanceSpec::Kind::Geps;
  throw Error(ErrorCode::InvalidParam, "unknown instance kind '" + name + "'");
}

FractionalProblem build_ep(std::size_t m, double gamma) {
  if (m < 1) throw Error(ErrorCode::InvalidParam, "EP needs m >= 1");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidParam, "EP needs gamma > 0");

  RatioTerm term;
  term.f_value = [gamma](const Vector& x) { return gamma * (x[0] + 1.0); };
  term.f_subgrad = [gamma](const Vector&) { return Vector::Constant(1, gamma); };
  term.g_value = [](const Vector& x) { return x[0] * x[0] + 2.0 * x[0] + 5.0; };
  term.g_subgrad = [](const Vector& x) { return Vector::Constant(1, 2.0 * x[0] + 2.0); };
  term.alpha = kEpAlpha;
  term.beta = kEpBeta;

  const auto mm = static_cast<double>(m);
  Coupling h;
  h.kind = "ep_product";
  h.is_zero = false;
  h.value = [mm](const BlockVector& x) {
    double sum = 0.0, prod = 1.0;
    for (std::size_t j = 0; j < x.num_blocks(); ++j) {
      sum += x.block(j)[0];
      prod *= x.block(j)[0];
    }
    return (mm + 1.0 - sum) * prod;
  };
  // h restricted to block i is x_i (m + 1 - s - x_i) p, a concave quadratic
  // for p >= 0, so the box-constrained maximizer is the clamped vertex.
  h.block_prox = [mm](std::size_t i, const BlockVector& x, const Vector& center, double tau) {
    double s = 0.0, p = 1.0;
    for (std::size_t j = 0; j < x.num_blocks(); ++j) {
      if (j == i) continue;
      s += x.block(j)[0];
      p *= x.block(j)[0];
    }
    const double c = center[0];
    const double curvature = tau + p;
    if (curvature > 0.0) {
      const double vertex = (2.0 * tau * c + (mm + 1.0 - s) * p) / (2.0 * curvature);
      return Vector::Constant(1, std::clamp(vertex, 0.0, kEpUpper));
    }
    // Convex or linear case: the maximum sits on an endpoint.
    auto objective = [&](double t) { return t * (mm + 1.0 - s - t) * p - tau * (t - c) * (t - c); };
    const double best = objective(0.0) >= objective(kEpUpper) ? 0.0 : kEpUpper;
    return Vector::Constant(1, best);
  };

  std::vector<RatioTerm> terms(m, term);
  std::vector<FeasibleSet> sets(m, FeasibleSet::box(1, 0.0, kEpUpper));
  std::vector<BlockBounds> bounds(m, BlockBounds{gamma * (kEpUpper + 1.0), 5.0});
  return FractionalProblem(std::move(terms), std::move(sets), std::move(h), std::move(bounds));
}

RatioTerm quadratic_ratio(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw Error(ErrorCode::InvalidShape, "A and B must have the same shape");
  }
  require_psd(A, "A");
  const Vector evB = require_positive_definite(B, "B");

  auto a = std::make_shared<const Matrix>(A);
  auto b = std::make_shared<const Matrix>(B);
  RatioTerm t;
  t.f_value = [a](const Vector& x) { return x.dot(*a * x); };
  t.f_subgrad = [a](const Vector& x) -> Vector { return 2.0 * (*a * x); };
  t.g_value = [b](const Vector& x) { return x.dot(*b * x); };
  t.g_subgrad = [b](const Vector& x) -> Vector { return 2.0 * (*b * x); };
  t.alpha = 0.0;
  t.beta = 2.0 * evB[evB.size() - 1];
  return t;
}

namespace {

std::vector<BlockBounds> rayleigh_bounds(const Matrix& A, const Matrix& B) {
  const Vector evA = eigenvalues_of(A);
  const Vector evB = eigenvalues_of(B);
  return {BlockBounds{std::max(0.0, evA[evA.size() - 1]), evB[0]}};
}

}  // namespace

FractionalProblem build_gep(const Matrix& A, const Matrix& B, double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidParam, "lambda must be nonnegative");
  RatioTerm term = quadratic_ratio(A, B);
  const auto d = static_cast<std::size_t>(A.rows());

  Coupling h;
  h.kind = "l0_penalty";
  h.is_zero = false;
  h.value = [lambda](const BlockVector& x) {
    return -lambda * static_cast<double>(count_nonzeros(x.block(0)));
  };
  // On the sphere, -tau ||x - c||^2 = 2 tau <c, x> + const.
  h.block_prox = [lambda](std::size_t, const BlockVector&, const Vector& center, double tau) {
    return prox_l0_sphere(2.0 * tau * center, lambda).point;
  };
  return FractionalProblem({std::move(term)}, {FeasibleSet::sphere(d)}, std::move(h),
                           rayleigh_bounds(A, B));
}

FractionalProblem build_geps(const Matrix& A, const Matrix& B, std::size_t r) {
  const auto d = static_cast<std::size_t>(A.rows());
  if (r < 1 || r > d) throw Error(ErrorCode::InvalidParam, "sparsity level must lie in [1, d]");
  RatioTerm term = quadratic_ratio(A, B);
  return FractionalProblem({std::move(term)}, {FeasibleSet::sphere_sparsity(d, r)},
                           Coupling::zero(), rayleigh_bounds(A, B));
}

SphereQuadraticSolver::SphereQuadraticSolver(const Matrix& Q) {
  require_symmetric(Q, "Q");
  Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

Vector SphereQuadraticSolver::maximize(const Vector& b) const {
  const Eigen::Index n = eigenvalues_.size();
  if (b.size() != n) throw Error(ErrorCode::DimensionMismatch, "linear term size mismatch");

  // Stationarity: (mu I - Q) x = b / 2 with mu >= lambda_max.
  const Vector beta = eigenvectors_.transpose() * b;
  const double lmax = eigenvalues_[n - 1];
  const double spread = std::max(1.0, eigenvalues_.cwiseAbs().maxCoeff());
  const double tie_tol = 1e-12 * spread;

  Eigen::Index top_first = n - 1;
  while (top_first > 0 && lmax - eigenvalues_[top_first - 1] <= tie_tol) --top_first;

  double top_weight = 0.0;
  for (Eigen::Index j = top_first; j < n; ++j) top_weight += beta[j] * beta[j];

  auto coords_at = [&](double mu) {
    Vector xi(n);
    for (Eigen::Index j = 0; j < n; ++j) xi[j] = beta[j] / (2.0 * (mu - eigenvalues_[j]));
    return xi;
  };

  const double bnorm = b.norm();
  if (std::sqrt(top_weight) <= 1e-14 * std::max(1.0, bnorm)) {
    // Possible hard case: the multiplier sits at lambda_max.
    Vector xi = Vector::Zero(n);
    double mass = 0.0;
    for (Eigen::Index j = 0; j < top_first; ++j) {
      xi[j] = beta[j] / (2.0 * (lmax - eigenvalues_[j]));
      mass += xi[j] * xi[j];
    }
    if (mass <= 1.0) {
      xi[top_first] = std::sqrt(1.0 - mass);
      return eigenvectors_ * xi;
    }
  }

  // Easy case: ||xi(mu)|| is decreasing on (lambda_max, inf) and at most 1 at
  // mu = lambda_max + ||b|| / 2.
  double lo = lmax;
  double hi = lmax + 0.5 * bnorm;
  for (int it = 0; it < 200 && hi > lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (coords_at(mid).squaredNorm() > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Vector xi = coords_at(hi);
  xi /= xi.norm();
  return eigenvectors_ * xi;
}

FractionalProblem build_fqp(const Matrix& A0, const Vector& a0,
                            const std::vector<Matrix>& A_list,
                            const std::vector<Matrix>& B_list) {
  if (A_list.empty() || A_list.size() != B_list.size()) {
    throw Error(ErrorCode::InvalidShape, "need matching nonempty A and B lists");
  }
  std::vector<std::size_t> dims;
  std::vector<Eigen::Index> offsets;
  Eigen::Index total = 0;
  for (const auto& Ai : A_list) {
    offsets.push_back(total);
    dims.push_back(static_cast<std::size_t>(Ai.rows()));
    total += Ai.rows();
  }
  require_symmetric(A0, "A0");
  if (A0.rows() != total || a0.size() != total) {
    throw Error(ErrorCode::InvalidShape, "A0 and a0 must match the total dimension");
  }

  std::vector<RatioTerm> terms;
  std::vector<FeasibleSet> sets;
  std::vector<BlockBounds> bounds;
  for (std::size_t i = 0; i < A_list.size(); ++i) {
    require_positive_definite(A_list[i], "A_i");
    terms.push_back(quadratic_ratio(A_list[i], B_list[i]));
    sets.push_back(FeasibleSet::sphere(dims[i]));
    const Vector evA = eigenvalues_of(A_list[i]);
    const Vector evB = eigenvalues_of(B_list[i]);
    bounds.push_back({evA[evA.size() - 1], evB[0]});
  }

  auto A0p = std::make_shared<const Matrix>(A0);
  auto a0p = std::make_shared<const Vector>(a0);
  auto solvers = std::make_shared<std::vector<SphereQuadraticSolver>>();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const auto n = static_cast<Eigen::Index>(dims[i]);
    solvers->emplace_back(A0.block(offsets[i], offsets[i], n, n));
  }

  Coupling h;
  h.kind = "quadratic";
  h.is_zero = false;
  h.value = [A0p, a0p](const BlockVector& x) {
    const Vector flat = x.flatten();
    return flat.dot(*A0p * flat) + a0p->dot(flat);
  };
  h.block_prox = [A0p, a0p, solvers, offsets](std::size_t i, const BlockVector& x,
                                               const Vector& center, double tau) {
    // x_i'Q x_i + (2 A0[i, other] x_other + a0_i)'x_i; the proximal term
    // contributes 2 tau <c, x_i> on the sphere.
    const Vector flat = x.flatten();
    const Eigen::Index off = offsets[i];
    const Eigen::Index n = center.size();
    const Matrix rows = A0p->middleRows(off, n);
    Vector linear = 2.0 * (rows * flat) - 2.0 * (rows.middleCols(off, n) * flat.segment(off, n));
    linear += a0p->segment(off, n) + 2.0 * tau * center;
    return (*solvers)[i].maximize(linear);
  };
  return FractionalProblem(std::move(terms), std::move(sets), std::move(h), std::move(bounds));
}

FractionalProblem build(const InstanceSpec& spec) {
  switch (spec.kind) {
    case InstanceSpec::Kind::Ep: return build_ep(spec.m, spec.gamma);
    case InstanceSpec::Kind::Fqp: return build_fqp(spec.A0, spec.a0, spec.A_list, spec.B_list);
    case InstanceSpec::Kind::Gep: return build_gep(spec.A, spec.B, spec.lambda);
    case InstanceSpec::Kind::Geps: return build_geps(spec.A, spec.B, spec.r);
  }
  throw Error(ErrorCode::InvalidParam, "unknown instance kind");
}

InstanceSpec random_fqp(std::size_t m, std::size_t dim, std::uint64_t seed) {
  CounterRng rng(seed);
  const auto n = static_cast<Eigen::Index>(dim);
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix G(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) G(i, j) = rng.normal();
    return G;
  };
  InstanceSpec spec;
  spec.kind = InstanceSpec::Kind::Fqp;
  for (std::size_t i = 0; i < m; ++i) {
    const Matrix Ga = gaussian(n, n);
    const Matrix Gb = gaussian(n, n);
    spec.A_list.push_back(Ga.transpose() * Ga / static_cast<double>(dim) +
                          0.1 * Matrix::Identity(n, n));
    spec.B_list.push_back(Gb.transpose() * Gb / static_cast<double>(dim) +
                          Matrix::Identity(n, n));
  }
  const auto total = static_cast<Eigen::Index>(m * dim);
  const Matrix G0 = gaussian(total, total);
  spec.A0 = 0.25 * (G0 + G0.transpose()) / std::sqrt(static_cast<double>(total));
  spec.a0 = 0.5 * gaussian(total, 1).col(0);
  return spec;
}

BlockVector canonical_start(const FractionalProblem& problem) {
  std::vector<Vector> blocks;
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    const auto& s = problem.set(i);
    if (s.kind() == FeasibleSet::Kind::Box) {
      blocks.push_back(0.5 * (s.lower() + s.upper()));
    } else {
      blocks.push_back(s.project(Vector::Zero(static_cast<Eigen::Index>(s.dim()))).point);
    }
  }
  return BlockVector(std::move(blocks));
}

Vector sparse_start(std::size_t d, std::size_t r) {
  if (r < 1 || r > d) throw Error(ErrorCode::InvalidParam, "sparsity level must lie in [1, d]");
  Vector x = Vector::Zero(static_cast<Eigen::Index>(d));
  x.head(static_cast<Eigen::Index>(r)).setConstant(1.0 / std::sqrt(static_cast<double>(r)));
  return x;
}

SfdaPreset sfda_preset(const std::string& name, std::optional<std::size_t> d) {
  SfdaPreset p;
  p.name = name;
  if (name == "desk") {
    p.d = 200;
    p.r = 10;
    p.p1 = p.p2 = 100;
  } else if (name == "paper-scale") {
    p.d = 2000;
    p.r = 50;
    p.p1 = p.p2 = 500;
  } else {
    throw Error(ErrorCode::InvalidParam, "unknown preset '" + name + "'");
  }
  if (d) p.d = *d;
  p.lambda = kSfdaLambda;
  return p;
}

}  // namespace fracprox
