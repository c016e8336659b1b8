#pragma once

#include "fracprox/block_vector.hpp"
#include "fracprox/feasible_set.hpp"
#include "fracprox/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fracprox {

using ScalarOracle = std::function<double(const Vector&)>;
using VectorOracle = std::function<Vector(const Vector&)>;

/// One ratio f_i / g_i together with the moduli alpha_i (weak convexity of
/// sqrt(f_i)) and beta_i (upper quadratic model of g_i) that drive the
/// step-size rule. Subgradient oracles return a single element.
struct RatioTerm {
  ScalarOracle f_value;
  VectorOracle f_subgrad;
  ScalarOracle g_value;
  VectorOracle g_subgrad;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Coupling term h and its block-wise proximal oracle
///   block_prox(i, x, c, tau) = argmax_{x_i in S_i} h_i(x_i) - tau * ||x_i - c||^2
/// where h_i freezes every block of x except i.
struct Coupling {
  using ValueFn = std::function<double(const BlockVector&)>;
  using BlockProxFn =
      std::function<Vector(std::size_t, const BlockVector&, const Vector&, double)>;

  std::string kind = "zero";
  ValueFn value;
  BlockProxFn block_prox;
  bool is_zero = true;

  static Coupling zero() { return Coupling{}; }
};

/// M_i = max f_i on S_i and m_i = min g_i on S_i.
struct BlockBounds {
  double f_max = 0.0;
  double g_min = 0.0;
};

/// Problem (P): maximize h(x) + sum_i f_i(x_i) / g_i(x_i) over S_1 x ... x S_m.
/// Immutable after construction.
class FractionalProblem {
 public:
  FractionalProblem(std::vector<RatioTerm> terms, std::vector<FeasibleSet> sets,
                    Coupling coupling = Coupling::zero(),
                    std::optional<std::vector<BlockBounds>> bounds = std::nullopt);

  std::size_t num_blocks() const { return terms_.size(); }
  std::vector<std::size_t> dims() const;
  std::size_t total_dim() const;

  const RatioTerm& term(std::size_t i) const { return terms_.at(i); }
  const FeasibleSet& set(std::size_t i) const { return sets_.at(i); }
  const Coupling& coupling() const { return coupling_; }
  const std::optional<std::vector<BlockBounds>>& bounds() const { return bounds_; }

  /// h(x); zero when the coupling is identically zero.
  double h(const BlockVector& x) const;

  /// Solves the block subproblem. With a zero coupling this is the
  /// projection of `center` onto S_i.
  Vector block_prox(std::size_t i, const BlockVector& x, const Vector& center,
                    double tau) const;

  /// Throws DimensionMismatch if x does not have this problem's layout.
  void check_layout(const BlockVector& x) const;
  bool is_feasible(const BlockVector& x, double tol = 1e-12) const;

  /// Threshold below which f_i(x_i) is treated as exactly zero.
  double zero_tolerance(std::size_t i) const;

 private:
  std::vector<RatioTerm> terms_;
  std::vector<FeasibleSet> sets_;
  Coupling coupling_;
  std::optional<std::vector<BlockBounds>> bounds_;
};

/// Which scaling of w_i is used in the block update.
///  Full: y u / sqrt(f) - y^2 v, the gradient of f/g for smooth terms.
///  Half: one half of Full, the variant printed for the Rayleigh-quotient
///        experiments (w = f/g^2 [ (g/f) A x - B x ] for quadratics).
enum class WConvention { Full, Half };

/// F(x) = h(x) + sum_i f_i(x_i) / g_i(x_i).
double evaluate_F(const FractionalProblem& problem, const BlockVector& x);

/// y_i = sqrt(f_i(x_i)) / g_i(x_i).
Vector compute_y(const FractionalProblem& problem, const BlockVector& x);

/// w_i = y_i u_i / sqrt(f_i(x_i)) - y_i^2 v_i, or 0 when f_i(x_i) vanishes.
BlockVector compute_w(const FractionalProblem& problem, const BlockVector& x,
                      const Vector& y, WConvention convention = WConvention::Full);

/// H(x, y) = sum_i [2 y_i sqrt(f_i(x_i)) - y_i^2 g_i(x_i)].
double evaluate_H(const FractionalProblem& problem, const BlockVector& x, const Vector& y);

struct AssumptionViolation {
  std::size_t block = 0;
  char inequality = 'a';  // 'a': sqrt(f) lower model, 'b': g upper model
  Vector x, z;
  double excess = 0.0;
};

/// Sampled check of the two modulus inequalities. A clean report does not
/// certify them: they quantify over all pairs and sampling can only
/// falsify.
struct AssumptionReport {
  std::size_t pairs_checked = 0;
  std::vector<AssumptionViolation> violations;
  bool certified = false;
  bool ok() const { return violations.empty(); }
};

using BlockSampler = std::function<Vector(std::size_t, CounterRng&)>;

/// Draws n_pairs feasible pairs (x_i, z_i) per block and checks
///   <u / (2 sqrt f(x)), z - x> <= sqrt f(z) - sqrt f(x) + alpha/2 ||z - x||^2   (f(x) > 0)
///   <v, z - x> >= g(z) - g(x) - beta/2 ||z - x||^2
/// up to tol * (1 + magnitude of the compared terms).
AssumptionReport validate_assumptions(const FractionalProblem& problem,
                                      const BlockSampler& sampler, std::size_t n_pairs,
                                      double tol, std::uint64_t seed = 0);

/// Sampler drawing from each block's FeasibleSet::sample.
BlockSampler default_sampler(const FractionalProblem& problem);

}  // namespace fracprox
