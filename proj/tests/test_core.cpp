#include "doctest.h"
#include "oracles.hpp"

#include "fracprox/error.hpp"
#include "fracprox/instances.hpp"
#include "fracprox/problem.hpp"

#include <cmath>

using namespace fracprox;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

// One scalar block with user-supplied f, g on a box.
FractionalProblem scalar_problem(std::function<double(double)> f, std::function<double(double)> df,
                                 std::function<double(double)> g, std::function<double(double)> dg,
                                 double alpha, double beta, double lo = -5.0, double hi = 5.0) {
  RatioTerm t;
  t.f_value = [f](const Vector& x) { return f(x[0]); };
  t.f_subgrad = [df](const Vector& x) { return vec({df(x[0])}); };
  t.g_value = [g](const Vector& x) { return g(x[0]); };
  t.g_subgrad = [dg](const Vector& x) { return vec({dg(x[0])}); };
  t.alpha = alpha;
  t.beta = beta;
  return FractionalProblem({t}, {FeasibleSet::box(1, lo, hi)});
}

BlockVector scalar(double x) { return BlockVector(std::vector<Vector>{vec({x})}); }

}  // namespace

TEST_CASE("BlockVector layout and round trip") {
  BlockVector x(std::vector<Vector>{vec({1, 2}), vec({3}), vec({4, 5, 6})});
  CHECK(x.num_blocks() == 3);
  CHECK(x.total_dim() == 6);
  CHECK(x.dims() == std::vector<std::size_t>{2, 1, 3});

  const Vector flat = x.flatten();
  CHECK(flat == vec({1, 2, 3, 4, 5, 6}));
  const BlockVector back = BlockVector::unflatten(flat, x.dims());
  for (std::size_t i = 0; i < 3; ++i) CHECK(back.block(i) == x.block(i));

  CHECK_THROWS_AS(BlockVector::unflatten(flat, {2, 2}), Error);
  CHECK_THROWS_AS(x.set_block(1, vec({1, 2})), Error);
  x.set_block(1, vec({9}));
  CHECK(x.block(1)[0] == 9.0);

  BlockVector y = BlockVector::zeros(x.dims());
  CHECK(y.same_layout(x));
  CHECK(x.squared_distance(y) == doctest::Approx(x.flatten().squaredNorm()));
}

TEST_CASE("BlockVector round trip on random layouts") {
  CounterRng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> dims;
    const auto m = 1 + rng.below(6);
    for (std::uint64_t i = 0; i < m; ++i) dims.push_back(1 + rng.below(5));
    std::size_t total = 0;
    for (auto d : dims) total += d;
    Vector flat(static_cast<Eigen::Index>(total));
    for (Eigen::Index j = 0; j < flat.size(); ++j) flat[j] = rng.normal() * 1e3;
    CHECK(BlockVector::unflatten(flat, dims).flatten() == flat);
  }
}

TEST_CASE("BlockVector rejects non-finite entries via all_finite") {
  BlockVector x(std::vector<Vector>{vec({1.0, std::nan("")})});
  CHECK_FALSE(x.all_finite());
}

TEST_CASE("evaluate_F examples") {
  SUBCASE("EP at the global solution") {
    const auto P = build_ep(2, 10.0);
    CHECK(evaluate_F(P, BlockVector::unflatten(vec({1, 1}), {1, 1})) == doctest::Approx(6.0).epsilon(1e-14));
  }
  SUBCASE("zero numerators and zero coupling") {
    const auto P = scalar_problem([](double) { return 0.0; }, [](double) { return 0.0; },
                                  [](double x) { return x * x + 1; }, [](double x) { return 2 * x; },
                                  0, 2);
    CHECK(evaluate_F(P, scalar(0.3)) == 0.0);
  }
  SUBCASE("Rayleigh quotient by hand") {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 2;
    const auto P = build_gep(A, Matrix::Identity(2, 2), 0.0);
    CHECK(evaluate_F(P, BlockVector(std::vector<Vector>{vec({1, 0})})) == doctest::Approx(2.0));
  }
  SUBCASE("errors") {
    const auto P = scalar_problem([](double) { return 1.0; }, [](double) { return 0.0; },
                                  [](double x) { return x; }, [](double) { return 1.0; }, 0, 0);
    try {
      evaluate_F(P, scalar(-1.0));
      FAIL("expected NonpositiveDenominator");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonpositiveDenominator);
      CHECK(e.block() == 0);
    }
    CHECK_THROWS_AS(evaluate_F(P, BlockVector::unflatten(vec({1, 1}), {2})), Error);
  }
}

TEST_CASE("compute_y examples") {
  SUBCASE("zero numerator gives zero") {
    const auto P = scalar_problem([](double x) { return x * x; }, [](double x) { return 2 * x; },
                                  [](double x) { return x * x + 1; }, [](double x) { return 2 * x; },
                                  1, 2);
    CHECK(compute_y(P, scalar(0.0))[0] == 0.0);
  }
  SUBCASE("EP scalar evaluation") {
    const auto P = build_ep(1, 10.0);
    CHECK(compute_y(P, scalar(1.0))[0] == doctest::Approx(std::sqrt(20.0) / 8.0).epsilon(1e-15));
  }
  SUBCASE("GEP with A = B on the sphere") {
    const auto P = build_gep(Matrix::Identity(3, 3), Matrix::Identity(3, 3), 0.1);
    Vector x = vec({1, 2, 2}) / 3.0;
    CHECK(compute_y(P, BlockVector(std::vector<Vector>{x}))[0] == doctest::Approx(1.0));
  }
  SUBCASE("negative numerator is reported") {
    const auto P = scalar_problem([](double x) { return x; }, [](double) { return 1.0; },
                                  [](double) { return 1.0; }, [](double) { return 0.0; }, 0, 0);
    try {
      compute_y(P, scalar(-0.5));
      FAIL("expected NegativeNumerator");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NegativeNumerator);
    }
  }
}

TEST_CASE("compute_w examples") {
  SUBCASE("zero numerator gives zero block") {
    const auto P = scalar_problem([](double x) { return x * x; }, [](double x) { return 2 * x; },
                                  [](double x) { return x * x + 1; }, [](double x) { return 2 * x; },
                                  1, 2);
    const auto x = scalar(0.0);
    CHECK(compute_w(P, x, compute_y(P, x)).block(0)[0] == 0.0);
  }
  SUBCASE("constant ratio on the sphere") {
    const auto P = build_geps(Matrix::Identity(3, 3), Matrix::Identity(3, 3), 3);
    const BlockVector x(std::vector<Vector>{vec({1, 0, 0})});
    CHECK(compute_w(P, x, compute_y(P, x)).block(0).norm() == doctest::Approx(0.0));
  }
  SUBCASE("scalar calculus cross-check") {
    const auto P = scalar_problem([](double x) { return x * x; }, [](double x) { return 2 * x; },
                                  [](double x) { return x * x + 1; }, [](double x) { return 2 * x; },
                                  1, 2);
    const auto x = scalar(1.0);
    const Vector y = compute_y(P, x);
    CHECK(compute_w(P, x, y).block(0)[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(compute_w(P, x, y, WConvention::Half).block(0)[0] == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("EP closed form") {
    const double gamma = 10.0;
    const auto P = build_ep(1, gamma);
    for (double t : {0.0, 0.5, 1.0, 3.0, 10.0}) {
      const auto x = scalar(t);
      const double g = t * t + 2 * t + 5;
      const double expected = gamma * (-t * t - 2 * t + 3) / (g * g);
      CHECK(compute_w(P, x, compute_y(P, x)).block(0)[0] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("oracle failures are wrapped") {
    RatioTerm t;
    t.f_value = [](const Vector&) { return 1.0; };
    t.f_subgrad = [](const Vector&) -> Vector { throw std::runtime_error("boom"); };
    t.g_value = [](const Vector&) { return 1.0; };
    t.g_subgrad = [](const Vector& x) { return Vector::Zero(x.size()).eval(); };
    const FractionalProblem P({t}, {FeasibleSet::box(1, 0, 1)});
    const auto x = scalar(0.5);
    try {
      compute_w(P, x, compute_y(P, x));
      FAIL("expected OracleFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OracleFailure);
    }
  }
}

TEST_CASE("compute_w matches a finite-difference gradient of f/g") {
  CounterRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = random_fqp(1, 4, 100 + static_cast<std::uint64_t>(trial));
    const Matrix& A = spec.A_list[0];
    const Matrix& B = spec.B_list[0];
    const auto P = build_geps(A, B, 4);
    Vector x(4);
    for (Eigen::Index j = 0; j < 4; ++j) x[j] = rng.normal();
    x /= x.norm();
    const BlockVector bx(std::vector<Vector>{x});
    const Vector w = compute_w(P, bx, compute_y(P, bx)).block(0);
    const Vector fd = oracles::central_difference(
        [&](const Vector& v) { return v.dot(A * v) / v.dot(B * v); }, x);
    CHECK((w - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("evaluate_H examples and the reformulation identity") {
  SUBCASE("y = 0") {
    const auto P = build_ep(2, 10.0);
    CHECK(evaluate_H(P, BlockVector::unflatten(vec({3, 4}), {1, 1}), Vector::Zero(2)) == 0.0);
  }
  SUBCASE("scalar evaluation") {
    const auto P = scalar_problem([](double) { return 4.0; }, [](double) { return 0.0; },
                                  [](double) { return 2.0; }, [](double) { return 0.0; }, 0, 0);
    CHECK(evaluate_H(P, scalar(0.0), vec({0.5})) == doctest::Approx(1.5));
  }
  SUBCASE("identity on random EP points") {
    const auto P = build_ep(3, 10.0);
    CounterRng rng(3);
    for (int k = 0; k < 200; ++k) {
      const auto x = BlockVector::unflatten(
          vec({rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10)}), {1, 1, 1});
      const double F = evaluate_F(P, x);
      const double lifted = P.h(x) + evaluate_H(P, x, compute_y(P, x));
      CHECK(std::abs(F - lifted) <= 1e-12 * std::max(1.0, std::abs(F)));
    }
  }
}

TEST_CASE("compute_y is nonnegative and finite on feasible inputs") {
  const auto P = build_ep(4, 10.0);
  CounterRng rng(5);
  for (int k = 0; k < 500; ++k) {
    std::vector<Vector> blocks;
    for (int i = 0; i < 4; ++i) blocks.push_back(P.set(static_cast<std::size_t>(i)).sample(rng));
    const Vector y = compute_y(P, BlockVector(blocks));
    CHECK(y.allFinite());
    CHECK(y.minCoeff() >= 0.0);
  }
}

TEST_CASE("FractionalProblem validation") {
  RatioTerm t = quadratic_ratio(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  CHECK_THROWS_AS(FractionalProblem({}, {}), Error);
  CHECK_THROWS_AS(FractionalProblem({t, t}, {FeasibleSet::sphere(2)}), Error);
  RatioTerm bad = t;
  bad.alpha = -1.0;
  CHECK_THROWS_AS(FractionalProblem({bad}, {FeasibleSet::sphere(2)}), Error);
  CHECK_THROWS_AS(FractionalProblem({t}, {FeasibleSet::sphere(2)}, Coupling::zero(),
                                    std::vector<BlockBounds>{{1.0, 0.0}}),
                  Error);
  Coupling broken;
  broken.is_zero = false;
  CHECK_THROWS_AS(FractionalProblem({t}, {FeasibleSet::sphere(2)}, broken), Error);
}

TEST_CASE("zero tolerance scales with the numerator bound") {
  const auto P = build_ep(1, 10.0);
  CHECK(P.zero_tolerance(0) == doctest::Approx(1e-14 * 110.0));
  const FractionalProblem Q({quadratic_ratio(Matrix::Identity(2, 2), Matrix::Identity(2, 2))},
                            {FeasibleSet::sphere(2)});
  CHECK(Q.zero_tolerance(0) == 1e-14);
}

TEST_CASE("validate_assumptions") {
  SUBCASE("convex sqrt(f) and Lipschitz g give a clean report") {
    const auto spec = random_fqp(1, 5, 42);
    const auto P = build_geps(spec.A_list[0], spec.B_list[0], 5);
    const auto report = validate_assumptions(P, default_sampler(P), 2000, 1e-10, 1);
    CHECK(report.pairs_checked == 2000);
    CHECK(report.ok());
    CHECK_FALSE(report.certified);
  }
  SUBCASE("negative control: alpha = 0 for a concave sqrt(f)") {
    // sqrt(1 + sin^2 x) is not convex on [-3, 3].
    const auto P = scalar_problem([](double x) { return 1.0 + std::sin(x) * std::sin(x); },
                                  [](double x) { return std::sin(2 * x); },
                                  [](double) { return 1.0; }, [](double) { return 0.0; }, 0.0,
                                  0.0, -3.0, 3.0);
    const auto report = validate_assumptions(P, default_sampler(P), 2000, 1e-10, 2);
    CHECK_FALSE(report.ok());
    bool saw_a = false;
    for (const auto& v : report.violations) saw_a = saw_a || v.inequality == 'a';
    CHECK(saw_a);
  }
  SUBCASE("negative control: beta too small") {
    const auto P = scalar_problem([](double) { return 1.0; }, [](double) { return 0.0; },
                                  [](double x) { return x * x + 1; }, [](double x) { return 2 * x; },
                                  0.0, 0.5);
    const auto report = validate_assumptions(P, default_sampler(P), 500, 1e-10, 3);
    CHECK_FALSE(report.ok());
    CHECK(report.violations.front().inequality == 'b');
  }
  SUBCASE("EP with gamma = 10: the stored alpha = 1/4 is below the true modulus") {
    // The modulus of sqrt(gamma (x + 1)) on [0, 10] is sqrt(gamma) / 4, so
    // alpha = 1/4 is exact only for gamma = 1.
    const auto P10 = build_ep(1, 10.0);
    CHECK_FALSE(validate_assumptions(P10, default_sampler(P10), 2000, 1e-10, 4).ok());
    const auto P1 = build_ep(1, 1.0);
    CHECK(validate_assumptions(P1, default_sampler(P1), 2000, 1e-10, 4).ok());
  }
}
