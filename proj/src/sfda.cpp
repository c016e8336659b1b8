#include "fracprox/error.hpp"
#include "fracprox/instances.hpp"
#include "fracprox/rng.hpp"

#include <cmath>
#include <string>

namespace fracprox {

namespace {

constexpr int kMaxResamples = 16;

Matrix toeplitz_block(Eigen::Index n, double rho) {
  Matrix T(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      T(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  return T;
}

// Observations as rows: class 1 first, then class 2.
Matrix sample_observations(std::size_t d, std::size_t p1, std::size_t p2, CounterRng& rng) {
  const auto n = static_cast<Eigen::Index>(d);
  const Eigen::Index block = n / 5;
  const Matrix L = Eigen::LLT<Matrix>(toeplitz_block(block, 0.8)).matrixL();

  Vector mu2 = Vector::Zero(n);
  for (Eigen::Index j = 1; j < 40; j += 2) mu2[j] = 0.5;

  const auto p = static_cast<Eigen::Index>(p1 + p2);
  Matrix Z(p, n);
  Vector xi(block);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index b = 0; b < 5; ++b) {
      for (Eigen::Index j = 0; j < block; ++j) xi[j] = rng.normal();
      Z.row(i).segment(b * block, block) = (L * xi).transpose();
    }
    if (i >= static_cast<Eigen::Index>(p1)) Z.row(i) += mu2.transpose();
  }
  return Z;
}

}  // namespace

SfdaData generate_sfda(std::size_t d, std::size_t p1, std::size_t p2, std::uint64_t seed) {
  if (d < 40 || d % 5 != 0) {
    throw Error(ErrorCode::InvalidShape, "d must be a multiple of 5 and at least 40");
  }
  if (p1 < 1 || p2 < 1) throw Error(ErrorCode::InvalidShape, "each class needs a sample");

  const auto n = static_cast<Eigen::Index>(d);
  const auto p = static_cast<double>(p1 + p2);
  const auto n1 = static_cast<Eigen::Index>(p1);
  const auto n2 = static_cast<Eigen::Index>(p2);
  // Centered data has rank at most p - 2.
  const bool structurally_singular = p1 + p2 < d + 2;

  CounterRng rng(seed);
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const Matrix Z = sample_observations(d, p1, p2, rng);
    const Vector mu1 = Z.topRows(n1).colwise().mean().transpose();
    const Vector mu2 = Z.bottomRows(n2).colwise().mean().transpose();

    Matrix centered = Z;
    centered.topRows(n1).rowwise() -= mu1.transpose();
    centered.bottomRows(n2).rowwise() -= mu2.transpose();

    SfdaData out;
    out.seed = seed;
    out.d = d;
    out.p1 = p1;
    out.p2 = p2;
    out.mu1_hat = mu1;
    out.mu2_hat = mu2;
    Matrix Vw = centered.transpose() * centered / p;
    out.V_w = 0.5 * (Vw + Vw.transpose());
    const Matrix Vb = (static_cast<double>(p1) * (mu1 * mu1.transpose()) +
                       static_cast<double>(p2) * (mu2 * mu2.transpose())) /
                      p;
    out.V_b = 0.5 * (Vb + Vb.transpose());

    const Vector ev =
        Eigen::SelfAdjointEigenSolver<Matrix>(out.V_w, Eigen::EigenvaluesOnly).eigenvalues();
    out.lambda_max_w = ev[n - 1];
    out.lambda_min_w = ev[0];
    if (structurally_singular) {
      out.ridge = kSfdaRidge * out.lambda_max_w;
      out.V_w.diagonal().array() += out.ridge;
      out.lambda_max_w += out.ridge;
      out.lambda_min_w += out.ridge;
      return out;
    }
    if (out.lambda_min_w > 1e-12 * out.lambda_max_w) return out;
  }
  throw Error(ErrorCode::NotPositiveDefinite,
              "within-class covariance stayed singular after resampling");
}

}  // namespace fracprox
