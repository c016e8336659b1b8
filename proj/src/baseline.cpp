#include "fracprox/baseline.hpp"

#include "fracprox/error.hpp"
#include "fracprox/prox.hpp"

#include <chrono>
#include <cmath>

namespace fracprox {

namespace {

double lambda_max(const Matrix& M) {
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly).eigenvalues();
  return ev[ev.size() - 1];
}

void check_feasible(const Vector& x, std::size_t r) {
  if (std::abs(x.norm() - 1.0) > 1e-10 || count_nonzeros(x) > r) {
    throw Error(ErrorCode::InvalidParam, "TRFM iterate must be an r-sparse unit vector");
  }
}

}  // namespace

void TrfmConfig::validate() const {
  if (!(eta > 0.0)) throw Error(ErrorCode::InvalidParam, "eta must be positive");
  if (r < 1) throw Error(ErrorCode::InvalidParam, "r must be at least 1");
  if (max_iter < 1) throw Error(ErrorCode::InvalidParam, "max_iter must be at least 1");
  if (!(step_tol >= 0.0)) throw Error(ErrorCode::InvalidParam, "step_tol must be nonnegative");
}

double rayleigh_quotient(const Matrix& V_b, const Matrix& V_w, const Vector& x) {
  const double den = x.dot(V_w * x);
  if (!(den > 0.0)) throw Error(ErrorCode::NonpositiveDenominator, "x'V_w x <= 0");
  return x.dot(V_b * x) / den;
}

Vector trfm_step(const Matrix& V_b, const Matrix& V_w, const Vector& x,
                 const TrfmConfig& config, double lambda_max_w) {
  const Vector Bx = V_w * x;
  const double den = x.dot(Bx);
  if (!(den > 0.0)) throw Error(ErrorCode::NonpositiveDenominator, "x'V_w x <= 0");
  const Vector Ax = V_b * x;
  const double rho = x.dot(Ax) / den;
  const Vector grad = (2.0 / den) * (Ax - rho * Bx);
  return project_sphere_sparsity(x + (config.eta / lambda_max_w) * grad, config.r).point;
}

Vector trfm_step(const Matrix& V_b, const Matrix& V_w, const Vector& x,
                 const TrfmConfig& config) {
  config.validate();
  return trfm_step(V_b, V_w, x, config, lambda_max(V_w));
}

SolverResult trfm_solve(const Matrix& V_b, const Matrix& V_w, const Vector& x0,
                        const TrfmConfig& config) {
  config.validate();
  if (V_b.rows() != x0.size() || V_w.rows() != x0.size()) {
    throw Error(ErrorCode::DimensionMismatch, "matrices and x0 disagree in size");
  }
  check_feasible(x0, config.r);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const double lmax = lambda_max(V_w);
  const double tau = lmax / config.eta;

  SolverResult result;
  result.status = SolverStatus::MaxIterReached;
  result.max_tau = tau;
  Vector x = x0;
  if (config.record_iterates) result.iterates.emplace_back(std::vector<Vector>{x});

  std::size_t n = 0;
  while (n < config.max_iter) {
    const Vector next = trfm_step(V_b, V_w, x, config, lmax);
    IterateRecord rec;
    rec.n = n;
    rec.F = rayleigh_quotient(V_b, V_w, x);
    rec.theta = rec.F;
    rec.step_norm = (next - x).norm();
    rec.tau = tau;
    rec.elapsed = seconds();
    result.trace.push_back(rec);
    x = next;
    ++n;
    if (config.record_iterates) result.iterates.emplace_back(std::vector<Vector>{x});
    if (rec.step_norm < config.step_tol) {
      result.status = SolverStatus::StepTolReached;
      break;
    }
  }

  IterateRecord last;
  last.n = n;
  last.F = rayleigh_quotient(V_b, V_w, x);
  last.theta = last.F;
  last.tau = tau;
  last.elapsed = seconds();
  result.trace.push_back(last);
  result.residual = (trfm_step(V_b, V_w, x, config, lmax) - x).norm();
  result.x_final = BlockVector(std::vector<Vector>{x});
  result.elapsed = seconds();
  return result;
}

}  // namespace fracprox
