#pragma once

/**
 * @file qso.hpp
 * @brief (G, mu)-quadratic stochastic operators.
 *
 * The heredity coefficients are p_{ij,k} = mu_{k-i-j}, so the operator is
 *
 *     V(x)_k = sum_i sum_l mu_l x_i x_{k-l-i}  =  (mu * x * x)_k
 *
 * with * the additive convolution over G. `apply` evaluates the two
 * convolutions; `apply_oracle` evaluates the triple sum over (i, j, k)
 * straight from the coefficients and exists to cross-check the fast path.
 */

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmqso/abelian.hpp"
#include "gmqso/scalar.hpp"
#include "gmqso/simplex.hpp"

namespace gmqso {

struct IterationLimits {
  std::size_t max_steps = 10000;
  /// Rational backend only: fail once any denominator grows past this.
  std::size_t max_denominator_bits = 4096;
};

struct CoefficientViolation {
  GroupElement i;
  GroupElement j;
  std::string reason;
};

struct StochasticityReport {
  bool ok = true;
  std::vector<CoefficientViolation> violations;
};

/// Checks p_{ij,k} >= 0, p_{ij,k} = p_{ji,k} and sum_k p_{ij,k} = 1 for the
/// coefficients induced by raw weights `mu`. Throws ValidationError naming
/// the offending (i, j) pairs.
template <Scalar T>
StochasticityReport check_stochasticity(const GroupSpec& spec, std::span<const T> mu) {
  using tr = scalar_traits<T>;
  if (mu.size() != spec.order()) throw StructuralError("heredity measure has wrong length for " + spec.to_string());
  const std::size_t m = spec.order();
  StochasticityReport report;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      T row = tr::zero();
      bool negative = false, asymmetric = false;
      for (std::size_t k = 0; k < m; ++k) {
        const T& pij = mu[spec.sub_index(spec.sub_index(k, i), j)];
        const T& pji = mu[spec.sub_index(spec.sub_index(k, j), i)];
        if (tr::sign(pij) < 0) negative = true;
        if (pij != pji) asymmetric = true;
        row += pij;
      }
      bool normalized;
      if constexpr (tr::exact) normalized = row == tr::one();
      else normalized = std::abs(row - 1.0) <= kFloatSumTolerance;
      std::string reason;
      if (negative) reason += "negative coefficient; ";
      if (asymmetric) reason += "p_ij != p_ji; ";
      if (!normalized) reason += "row sum " + tr::format(row) + " != 1; ";
      if (!reason.empty()) {
        report.ok = false;
        report.violations.push_back({spec.element_at(i), spec.element_at(j), reason});
      }
    }
  }
  if (!report.ok) {
    std::string msg = "heredity coefficients are not stochastic at";
    std::size_t shown = 0;
    for (const auto& v : report.violations) {
      if (shown++ == 8) {
        msg += " ...";
        break;
      }
      msg += " (" + to_string(v.i) + "," + to_string(v.j) + "): " + v.reason;
    }
    throw ValidationError(msg);
  }
  return report;
}

template <Scalar T>
class QsoOperator {
 public:
  explicit QsoOperator(SimplexPoint<T> mu) : mu_(std::move(mu)) {}

  const GroupSpec& spec() const { return mu_.spec(); }
  const SimplexPoint<T>& mu() const { return mu_; }

  friend bool operator==(const QsoOperator&, const QsoOperator&) = default;

 private:
  SimplexPoint<T> mu_;
};

template <Scalar T>
StochasticityReport check_stochasticity(const QsoOperator<T>& op) {
  return check_stochasticity<T>(op.spec(), op.mu().weights());
}

/// p_{ij,k} = mu_{k-i-j}.
template <Scalar T>
T coefficient(const QsoOperator<T>& op, const GroupElement& i, const GroupElement& j, const GroupElement& k) {
  const auto& spec = op.spec();
  return op.mu().weight(spec.subtract(spec.subtract(k, i), j));
}

/// (a * b)_k = sum_i a_i b_{k-i}. Zero entries of `a` are skipped.
template <Scalar T>
std::vector<T> convolve(const GroupSpec& spec, std::span<const T> a, std::span<const T> b) {
  using tr = scalar_traits<T>;
  const std::size_t m = spec.order();
  std::vector<T> out(m, tr::zero());
  for (std::size_t i = 0; i < m; ++i) {
    if (tr::sign(a[i]) == 0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (tr::sign(b[j]) == 0) continue;
      out[spec.add_index(i, j)] += a[i] * b[j];
    }
  }
  return out;
}

template <Scalar T>
SimplexPoint<T> apply(const QsoOperator<T>& op, const SimplexPoint<T>& x) {
  require_same_group(op.spec(), x.spec());
  const auto& spec = op.spec();
  std::vector<T> xx = convolve<T>(spec, x.weights(), x.weights());
  std::vector<T> next = convolve<T>(spec, op.mu().weights(), xx);
  if constexpr (!scalar_traits<T>::exact) {
    // The total mass maps as s -> s^2, so rounding drift away from 1 grows
    // geometrically unless removed.
    T total = 0;
    for (const T& v : next) total += v;
    if (total > 0)
      for (T& v : next) v /= total;
  }
  return SimplexPoint<T>::assume_valid(spec, std::move(next));
}

/// x'_k = sum_{i,j} p_{ij,k} x_i x_j, evaluated literally. O(m^3).
template <Scalar T>
SimplexPoint<T> apply_oracle(const QsoOperator<T>& op, const SimplexPoint<T>& x) {
  require_same_group(op.spec(), x.spec());
  using tr = scalar_traits<T>;
  const auto& spec = op.spec();
  const auto elems = spec.elements();
  std::vector<T> next(spec.order(), tr::zero());
  for (std::size_t k = 0; k < elems.size(); ++k)
    for (std::size_t i = 0; i < elems.size(); ++i)
      for (std::size_t j = 0; j < elems.size(); ++j)
        next[k] += coefficient(op, elems[i], elems[j], elems[k]) * x[i] * x[j];
  return SimplexPoint<T>::assume_valid(spec, std::move(next));
}

template <Scalar T>
struct Trajectory {
  QsoOperator<T> op;
  /// states[0] is the initial point; states[n+1] = apply(op, states[n]).
  std::vector<SimplexPoint<T>> states;

  const SimplexPoint<T>& initial() const { return states.front(); }
  std::size_t steps() const { return states.size() - 1; }
};

namespace detail {

template <Scalar T>
void check_precision(const SimplexPoint<T>& x, std::size_t step, const IterationLimits& limits) {
  if constexpr (scalar_traits<T>::exact) {
    for (const auto& v : x.weights()) {
      if (scalar_traits<T>::denominator_bits(v) > limits.max_denominator_bits)
        throw CapacityError("rational denominators exceed " + std::to_string(limits.max_denominator_bits) +
                            " bits at step " + std::to_string(step) + "; use the float backend");
    }
  }
}

inline void check_steps(std::size_t n, const IterationLimits& limits) {
  if (n > limits.max_steps)
    throw CapacityError("requested " + std::to_string(n) + " iterations, budget is " +
                        std::to_string(limits.max_steps));
}

}  // namespace detail

/// Calls visit(step, state) for step = 0..n without storing the history.
template <Scalar T, class Visitor>
SimplexPoint<T> for_each_state(const QsoOperator<T>& op, const SimplexPoint<T>& x0, std::size_t n, Visitor&& visit,
                               const IterationLimits& limits = {}) {
  detail::check_steps(n, limits);
  require_same_group(op.spec(), x0.spec());
  SimplexPoint<T> cur = x0;
  visit(std::size_t{0}, std::as_const(cur));
  for (std::size_t step = 1; step <= n; ++step) {
    cur = apply(op, cur);
    detail::check_precision(cur, step, limits);
    visit(step, std::as_const(cur));
  }
  return cur;
}

/// V^n(x0), keeping only the current state.
template <Scalar T>
SimplexPoint<T> advance(const QsoOperator<T>& op, const SimplexPoint<T>& x0, std::size_t n,
                        const IterationLimits& limits = {}) {
  return for_each_state(op, x0, n, [](std::size_t, const SimplexPoint<T>&) {}, limits);
}

template <Scalar T>
Trajectory<T> iterate(const QsoOperator<T>& op, const SimplexPoint<T>& x0, std::size_t n,
                      const IterationLimits& limits = {}) {
  detail::check_steps(n, limits);
  Trajectory<T> traj{op, {}};
  traj.states.reserve(n + 1);
  for_each_state(op, x0, n, [&](std::size_t, const SimplexPoint<T>& s) { traj.states.push_back(s); }, limits);
  return traj;
}

}  // namespace gmqso
