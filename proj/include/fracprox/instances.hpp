#pragma once

#include "fracprox/block_vector.hpp"
#include "fracprox/problem.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fracprox {

/// Parameters of one of the structured test problems.
///  Ep:   max (m+1 - sum x) prod x + gamma sum (x_i+1)/(x_i^2+2x_i+5) on [0,10]^m
///  Fqp:  max x'A0x + a0'x + sum x_i'A_i x_i / x_i'B_i x_i  with ||x_i|| = 1
///  Gep:  max x'Ax / x'Bx - lambda ||x||_0  with ||x|| = 1
///  Geps: max x'Ax / x'Bx  with ||x|| = 1, ||x||_0 <= r
struct InstanceSpec {
  enum class Kind { Ep, Fqp, Gep, Geps };

  Kind kind = Kind::Ep;
  // Ep
  std::size_t m = 2;
  double gamma = 10.0;
  // Fqp
  Matrix A0;
  Vector a0;
  std::vector<Matrix> A_list;
  std::vector<Matrix> B_list;
  // Gep / Geps
  Matrix A;
  Matrix B;
  double lambda = 0.0;
  std::size_t r = 1;
};

std::string to_string(InstanceSpec::Kind kind);
InstanceSpec::Kind instance_kind_from_string(const std::string& name);

/// Modulus of sqrt(f) used for the Ep ratios.
inline constexpr double kEpAlpha = 0.25;
inline constexpr double kEpBeta = 2.0;
inline constexpr double kEpUpper = 10.0;

FractionalProblem build_ep(std::size_t m, double gamma);
FractionalProblem build_gep(const Matrix& A, const Matrix& B, double lambda);
FractionalProblem build_geps(const Matrix& A, const Matrix& B, std::size_t r);
FractionalProblem build_fqp(const Matrix& A0, const Vector& a0,
                            const std::vector<Matrix>& A_list,
                            const std::vector<Matrix>& B_list);
FractionalProblem build(const InstanceSpec& spec);

/// f = x'Ax (alpha = 0), g = x'Bx (beta = 2 lambda_max(B)). Throws NotPSD /
/// NotPositiveDefinite.
RatioTerm quadratic_ratio(const Matrix& A, const Matrix& B);

/// Global maximizer of x'Qx + b'x over the unit sphere (eigendecomposition of
/// Q plus a bisection on the secular equation, with the hard case handled
/// explicitly).
class SphereQuadraticSolver {
 public:
  explicit SphereQuadraticSolver(const Matrix& Q);
  Vector maximize(const Vector& b) const;
  std::size_t dim() const { return static_cast<std::size_t>(eigenvalues_.size()); }

 private:
  Vector eigenvalues_;  // ascending
  Matrix eigenvectors_;
};

/// Random Fqp instance with m blocks of dimension `dim`: A_i, B_i positive
/// definite, A0 symmetric indefinite, a0 Gaussian.
InstanceSpec random_fqp(std::size_t m, std::size_t dim, std::uint64_t seed);

/// First standard basis vector in every Sphere block; midpoint for boxes.
BlockVector canonical_start(const FractionalProblem& problem);

/// (1/sqrt(r), ..., 1/sqrt(r), 0, ..., 0) in R^d.
Vector sparse_start(std::size_t d, std::size_t r);

/// Within-class and between-class covariance matrices of a two-class
/// Gaussian sample. `ridge` is the multiple of the identity added to V_w
/// when the sample size forces it to be singular (zero otherwise).
struct SfdaData {
  Matrix V_w;
  Matrix V_b;
  Vector mu1_hat;  // sample class means
  Vector mu2_hat;
  std::uint64_t seed = 0;
  std::size_t d = 0;
  std::size_t p1 = 0;
  std::size_t p2 = 0;
  double ridge = 0.0;
  double lambda_min_w = 0.0;
  double lambda_max_w = 0.0;
};

/// Relative size of the ridge added to a rank-deficient V_w.
inline constexpr double kSfdaRidge = 1e-6;

/// Samples p1 points from N(0, Sigma) and p2 from N(mu_2, Sigma), where
/// mu_2 has 0.5 on the even coordinates 2, 4, ..., 40 (1-based) and Sigma is
/// block diagonal with five Toeplitz blocks 0.8^|j-j'|. Deterministic per
/// seed. Throws InvalidShape unless d >= 40, 5 | d, p1, p2 >= 1.
SfdaData generate_sfda(std::size_t d, std::size_t p1, std::size_t p2, std::uint64_t seed);

struct SfdaPreset {
  std::string name;
  std::size_t d = 200;
  std::size_t r = 10;
  std::size_t p1 = 100;
  std::size_t p2 = 100;
  double lambda = 0.035;
};

/// Cardinality weight shared by every preset, independent of d.
inline constexpr double kSfdaLambda = 0.035;

/// "desk" (d=200, r=10, p1=p2=100) or "paper-scale" (d=2000, r=50,
/// p1=p2=500). `d` overrides the dimension only.
SfdaPreset sfda_preset(const std::string& name, std::optional<std::size_t> d = std::nullopt);

}  // namespace fracprox
