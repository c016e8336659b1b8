#include "fracprox/problem.hpp"

#include "fracprox/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracprox {

namespace {

double checked_denominator(const RatioTerm& term, const Vector& xi, std::size_t i) {
  const double g = term.g_value(xi);
  if (!(g > 0.0)) {
    throw Error(ErrorCode::NonpositiveDenominator,
                "g_" + std::to_string(i) + " = " + std::to_string(g), static_cast<int>(i));
  }
  return g;
}

double checked_numerator(const FractionalProblem& problem, const Vector& xi, std::size_t i) {
  const double f = problem.term(i).f_value(xi);
  if (std::isnan(f) || f < -problem.zero_tolerance(i)) {
    throw Error(ErrorCode::NegativeNumerator,
                "f_" + std::to_string(i) + " = " + std::to_string(f), static_cast<int>(i));
  }
  return std::max(f, 0.0);
}

Vector call_subgrad(const VectorOracle& oracle, const Vector& xi, std::size_t i,
                    const char* name) {
  Vector out;
  try {
    out = oracle(xi);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::OracleFailure, std::string(name) + " oracle threw: " + e.what(),
                static_cast<int>(i));
  }
  if (out.size() != xi.size() || !out.allFinite()) {
    throw Error(ErrorCode::OracleFailure,
                std::string(name) + " oracle returned a malformed subgradient",
                static_cast<int>(i));
  }
  return out;
}

}  // namespace

FractionalProblem::FractionalProblem(std::vector<RatioTerm> terms,
                                     std::vector<FeasibleSet> sets, Coupling coupling,
                                     std::optional<std::vector<BlockBounds>> bounds)
    : terms_(std::move(terms)),
      sets_(std::move(sets)),
      coupling_(std::move(coupling)),
      bounds_(std::move(bounds)) {
  if (terms_.empty()) throw Error(ErrorCode::InvalidParam, "problem needs at least one block");
  if (terms_.size() != sets_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one feasible set per ratio term required");
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (!t.f_value || !t.f_subgrad || !t.g_value || !t.g_subgrad) {
      throw Error(ErrorCode::InvalidParam, "ratio term is missing an oracle",
                  static_cast<int>(i));
    }
    if (!(t.alpha >= 0.0) || !(t.beta >= 0.0)) {
      throw Error(ErrorCode::InvalidParam, "alpha and beta must be nonnegative",
                  static_cast<int>(i));
    }
  }
  if (!coupling_.is_zero && (!coupling_.value || !coupling_.block_prox)) {
    throw Error(ErrorCode::InvalidParam, "nonzero coupling needs value and block_prox");
  }
  if (bounds_) {
    if (bounds_->size() != terms_.size()) {
      throw Error(ErrorCode::DimensionMismatch, "one bound pair per block required");
    }
    for (std::size_t i = 0; i < bounds_->size(); ++i) {
      const auto& b = (*bounds_)[i];
      if (!(b.f_max >= 0.0) || !(b.g_min > 0.0)) {
        throw Error(ErrorCode::InvalidParam, "bounds need M_i >= 0 and m_i > 0",
                    static_cast<int>(i));
      }
    }
  }
}

std::vector<std::size_t> FractionalProblem::dims() const {
  std::vector<std::size_t> out;
  out.reserve(sets_.size());
  for (const auto& s : sets_) out.push_back(s.dim());
  return out;
}

std::size_t FractionalProblem::total_dim() const {
  std::size_t d = 0;
  for (const auto& s : sets_) d += s.dim();
  return d;
}

double FractionalProblem::h(const BlockVector& x) const {
  return coupling_.is_zero ? 0.0 : coupling_.value(x);
}

Vector FractionalProblem::block_prox(std::size_t i, const BlockVector& x,
                                     const Vector& center, double tau) const {
  if (coupling_.is_zero) return sets_.at(i).project(center).point;
  return coupling_.block_prox(i, x, center, tau);
}

void FractionalProblem::check_layout(const BlockVector& x) const {
  if (x.num_blocks() != sets_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(sets_.size()) + " blocks, got " +
                    std::to_string(x.num_blocks()));
  }
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    if (static_cast<std::size_t>(x.block(i).size()) != sets_[i].dim()) {
      throw Error(ErrorCode::DimensionMismatch, "block dimension mismatch",
                  static_cast<int>(i));
    }
  }
}

bool FractionalProblem::is_feasible(const BlockVector& x, double tol) const {
  if (x.num_blocks() != sets_.size()) return false;
  for (std::size_t i = 0; i < sets_.size(); ++i)
    if (!sets_[i].contains(x.block(i), tol)) return false;
  return true;
}

double FractionalProblem::zero_tolerance(std::size_t i) const {
  const double scale = bounds_ ? std::max(1.0, (*bounds_)[i].f_max) : 1.0;
  return 1e-14 * scale;
}

double evaluate_F(const FractionalProblem& problem, const BlockVector& x) {
  problem.check_layout(x);
  double total = problem.h(x);
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    const auto& xi = x.block(i);
    const double g = checked_denominator(problem.term(i), xi, i);
    total += problem.term(i).f_value(xi) / g;
  }
  return total;
}

Vector compute_y(const FractionalProblem& problem, const BlockVector& x) {
  problem.check_layout(x);
  const auto m = problem.num_blocks();
  Vector y(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const auto& xi = x.block(i);
    const double f = checked_numerator(problem, xi, i);
    const double g = checked_denominator(problem.term(i), xi, i);
    y[static_cast<Eigen::Index>(i)] = std::sqrt(f) / g;
  }
  return y;
}

BlockVector compute_w(const FractionalProblem& problem, const BlockVector& x,
                      const Vector& y, WConvention convention) {
  problem.check_layout(x);
  if (static_cast<std::size_t>(y.size()) != problem.num_blocks()) {
    throw Error(ErrorCode::DimensionMismatch, "y must have one entry per block");
  }
  const double scale = convention == WConvention::Half ? 0.5 : 1.0;
  BlockVector w = BlockVector::zeros(problem.dims());
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    const auto& xi = x.block(i);
    const auto& term = problem.term(i);
    const double f = checked_numerator(problem, xi, i);
    if (f <= problem.zero_tolerance(i)) continue;
    const double yi = y[static_cast<Eigen::Index>(i)];
    const Vector u = call_subgrad(term.f_subgrad, xi, i, "f_subgrad");
    const Vector v = call_subgrad(term.g_subgrad, xi, i, "g_subgrad");
    w.set_block(i, scale * ((yi / std::sqrt(f)) * u - yi * yi * v));
  }
  return w;
}

double evaluate_H(const FractionalProblem& problem, const BlockVector& x, const Vector& y) {
  problem.check_layout(x);
  if (static_cast<std::size_t>(y.size()) != problem.num_blocks()) {
    throw Error(ErrorCode::DimensionMismatch, "y must have one entry per block");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    const auto& xi = x.block(i);
    const double f = checked_numerator(problem, xi, i);
    const double g = checked_denominator(problem.term(i), xi, i);
    const double yi = y[static_cast<Eigen::Index>(i)];
    total += 2.0 * yi * std::sqrt(f) - yi * yi * g;
  }
  return total;
}

BlockSampler default_sampler(const FractionalProblem& problem) {
  return [&problem](std::size_t i, CounterRng& rng) { return problem.set(i).sample(rng); };
}

AssumptionReport validate_assumptions(const FractionalProblem& problem,
                                      const BlockSampler& sampler, std::size_t n_pairs,
                                      double tol, std::uint64_t seed) {
  AssumptionReport report;
  CounterRng rng(seed);
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    const auto& term = problem.term(i);
    for (std::size_t k = 0; k < n_pairs; ++k) {
      const Vector x = sampler(i, rng);
      const Vector z = sampler(i, rng);
      const double dist2 = (z - x).squaredNorm();
      ++report.pairs_checked;

      const double fx = std::max(term.f_value(x), 0.0);
      const double fz = std::max(term.f_value(z), 0.0);
      if (fx > problem.zero_tolerance(i)) {
        const Vector u = term.f_subgrad(x);
        const double lhs = u.dot(z - x) / (2.0 * std::sqrt(fx));
        const double rhs = std::sqrt(fz) - std::sqrt(fx) + 0.5 * term.alpha * dist2;
        const double excess = lhs - rhs;
        const double scale = 1.0 + std::abs(lhs) + std::sqrt(fz) + std::sqrt(fx);
        if (excess > tol * scale) report.violations.push_back({i, 'a', x, z, excess});
      }

      const double gx = term.g_value(x);
      const double gz = term.g_value(z);
      const Vector v = term.g_subgrad(x);
      const double lhs = v.dot(z - x);
      const double rhs = gz - gx - 0.5 * term.beta * dist2;
      const double excess = rhs - lhs;
      const double scale = 1.0 + std::abs(lhs) + std::abs(gz) + std::abs(gx);
      if (excess > tol * scale) report.violations.push_back({i, 'b', x, z, excess});
    }
  }
  return report;
}

}  // namespace fracprox
