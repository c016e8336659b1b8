#pragma once

#include "fracprox/block_vector.hpp"
#include "fracprox/solver.hpp"

#include <cstddef>

namespace fracprox {

/// Truncated Rayleigh flow: projected ascent on rho(x) = x'V_b x / x'V_w x
/// over the r-sparse unit sphere. Reconstructed from its published
/// description; step-size schedule and truncation order of the original
/// method are not reproduced.
struct TrfmConfig {
  double eta = 1.0;
  std::size_t r = 1;
  std::size_t max_iter = 6000;
  double step_tol = 1e-6;
  bool record_iterates = false;

  void validate() const;
};

/// x' = P_{sphere and r-sparse}(x + (eta / lambda_max(V_w)) g), with
/// g = (2 / x'V_w x)(V_b x - rho V_w x) the gradient of rho.
Vector trfm_step(const Matrix& V_b, const Matrix& V_w, const Vector& x,
                 const TrfmConfig& config);
Vector trfm_step(const Matrix& V_b, const Matrix& V_w, const Vector& x,
                 const TrfmConfig& config, double lambda_max_w);

/// Generalized Rayleigh quotient x'V_b x / x'V_w x.
double rayleigh_quotient(const Matrix& V_b, const Matrix& V_w, const Vector& x);

/// Iterates trfm_step with the solver's stopping rule. Trace rows use the
/// solver schema with F = theta = rho(x_n), tau = lambda_max(V_w) / eta and
/// nu = 0.
SolverResult trfm_solve(const Matrix& V_b, const Matrix& V_w, const Vector& x0,
                        const TrfmConfig& config);

}  // namespace fracprox
