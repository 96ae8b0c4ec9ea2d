#pragma once

/**
 * @file analysis.hpp
 * @brief Structural theory of (G, mu)-QSOs.
 *
 * Supports evolve by s(Vx) = s(x) + s(x) + s(mu), independently of the
 * actual weights. Support sizes grow until the support becomes a coset of
 * an s(mu)-invariant subgroup U (|U + s(mu)| = |U|); from then on the
 * support cycles through cosets of U and the state converges, double
 * exponentially, to the uniform distributions on those cosets.
 *
 * The exact set-level forecast drives the numeric routines below, so the
 * float backend never has to decide which tiny weights count as support
 * after the first step.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gmqso/abelian.hpp"
#include "gmqso/errors.hpp"
#include "gmqso/qso.hpp"
#include "gmqso/scalar.hpp"
#include "gmqso/simplex.hpp"

namespace gmqso {

/// Iteration budget ran out before the requested tolerance was met.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> series)
      : Error(what), series_(std::move(series)) {}
  const std::vector<double>& distance_series() const { return series_; }

 private:
  std::vector<double> series_;
};

/// |U + A| = |U|. Cross-checked against "A lies in one coset of U".
inline bool is_invariant(const Subgroup& u, const ElementSet& a) {
  require_same_group(u.spec(), a.spec());
  if (a.empty()) throw DomainError("invariance needs a nonempty set");
  const bool by_size = sumset(u.members(), a).size() == u.order();
  const auto& spec = a.spec();
  const std::size_t first = a.indices().front();
  bool by_coset = true;
  for (auto i : a.indices())
    if (!u.contains_index(spec.sub_index(i, first))) by_coset = false;
  if (by_size != by_coset) throw std::logic_error("invariance criteria disagree for " + a.to_string());
  return by_size;
}

inline std::vector<Subgroup> invariant_subgroups(const GroupSpec& spec, const ElementSet& a,
                                                 std::size_t bound = kDefaultExhaustiveBound) {
  require_same_group(spec, a.spec());
  if (a.empty()) throw DomainError("invariance needs a nonempty set");
  std::vector<Subgroup> out;
  for (auto& u : enumerate_subgroups(spec, bound))
    if (is_invariant(u, a)) out.push_back(std::move(u));
  return out;
}

/// B as b1 + U when |B + B| = |B|, where b1 is the smallest member of B.
inline std::optional<Coset> is_coset(const ElementSet& b) {
  if (b.empty()) throw DomainError("coset test on an empty set");
  if (sumset(b, b).size() != b.size()) return std::nullopt;
  const GroupElement b1 = b.front();
  auto u = Subgroup::from_members(translate(b, b.spec().negate(b1)));
  if (!u) throw std::logic_error("|B+B| = |B| but B - b1 is not a subgroup: " + b.to_string());
  return Coset(b1, std::move(*u));
}

/// Set-level trajectory S_{n+1} = S_n + S_n + s(mu).
struct SupportForecast {
  /// First n with |S_{n+1}| = |S_n|; sizes strictly increase before it.
  std::size_t n0 = 0;
  Subgroup stabilized_subgroup;
  /// S_0, ..., S_{cycle_start + period - 1}.
  std::vector<ElementSet> sets;
  /// First step of the eventual cycle; cycle_start >= n0.
  std::size_t cycle_start = 0;
  /// S_{cycle_start}, ..., one full period, as cosets of stabilized_subgroup.
  std::vector<Coset> coset_sequence;

  std::size_t period() const { return coset_sequence.size(); }

  const ElementSet& set_at(std::size_t n) const {
    if (n < sets.size()) return sets[n];
    return sets[cycle_start + (n - cycle_start) % period()];
  }
};

inline SupportForecast predict_support_dynamics(const ElementSet& s_x, const ElementSet& s_mu) {
  require_same_group(s_x.spec(), s_mu.spec());
  if (s_x.empty() || s_mu.empty()) throw DomainError("support forecast needs nonempty supports");
  std::map<std::vector<std::size_t>, std::size_t> first_seen;
  std::vector<ElementSet> sets;
  ElementSet cur = s_x;
  while (!first_seen.count(cur.indices())) {
    first_seen.emplace(cur.indices(), sets.size());
    sets.push_back(cur);
    cur = sumset(sumset(cur, cur), s_mu);
  }
  const std::size_t cycle_start = first_seen.at(cur.indices());

  std::size_t n0 = 0;
  while (n0 + 1 < sets.size() && sets[n0 + 1].size() != sets[n0].size()) ++n0;
  auto stabilized = is_coset(sets[n0]);
  if (!stabilized) throw std::logic_error("stabilized support is not a coset: " + sets[n0].to_string());

  std::vector<Coset> cosets;
  for (std::size_t n = cycle_start; n < sets.size(); ++n) {
    auto c = is_coset(sets[n]);
    if (!c || !(c->subgroup() == stabilized->subgroup()))
      throw std::logic_error("cycle set is not a coset of the stabilized subgroup");
    cosets.push_back(std::move(*c));
  }
  return SupportForecast{n0, stabilized->subgroup(), std::move(sets), cycle_start, std::move(cosets)};
}

template <Scalar T>
SupportForecast predict_support_dynamics(const QsoOperator<T>& op, const SimplexPoint<T>& x0,
                                         double threshold = kSupportThreshold) {
  return predict_support_dynamics(support(x0, threshold), support(op.mu(), threshold));
}

enum class LimitKind { fixed_point, periodic };

template <Scalar T>
struct LimitProfile {
  SupportForecast forecast;
  LimitKind kind = LimitKind::fixed_point;
  std::size_t period = 1;
  /// u(C) for each coset C of one period of the forecast cycle.
  std::vector<SimplexPoint<T>> limit_states;
  /// d_n = ||V^n x - u(s(V^n x))||_max for n = 0 .. converged_at.
  std::vector<double> distance_series;
  std::size_t converged_at = 0;
};

namespace detail {

template <Scalar T>
double distance_to_forecast(const SimplexPoint<T>& x, const SupportForecast& f, std::size_t n) {
  return scalar_traits<T>::to_double(distance(x, uniform<T>(f.set_at(n)), Norm::max));
}

}  // namespace detail

/// Runs the trajectory until d_n <= tol on a stabilized support.
/// Throws NonConvergenceError (carrying the series) if `budget` steps do not
/// suffice, CapacityError if rational denominators blow up first.
template <Scalar T>
LimitProfile<T> limit_profile(const QsoOperator<T>& op, const SimplexPoint<T>& x0, double tol = 1e-10,
                              std::size_t budget = 200, const IterationLimits& limits = {}) {
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  detail::check_steps(budget, limits);
  LimitProfile<T> out{predict_support_dynamics(op, x0), LimitKind::fixed_point, 1, {}, {}, 0};
  const auto& f = out.forecast;
  out.period = f.period();
  out.kind = out.period == 1 ? LimitKind::fixed_point : LimitKind::periodic;
  for (const auto& c : f.coset_sequence) out.limit_states.push_back(uniform<T>(c.elements()));

  SimplexPoint<T> cur = x0;
  for (std::size_t n = 0;; ++n) {
    const double d = detail::distance_to_forecast(cur, f, n);
    out.distance_series.push_back(d);
    if (n >= f.n0 && d <= tol) {
      out.converged_at = n;
      return out;
    }
    if (n == budget) break;
    cur = apply(op, cur);
    detail::check_precision(cur, n + 1, limits);
  }
  throw NonConvergenceError("distance to the forecast limit stayed above " + scalar_traits<double>::format(tol) +
                                " for " + std::to_string(budget) + " iterations",
                            std::move(out.distance_series));
}

struct PeriodicOrbit {
  Subgroup subgroup;
  /// Cosets in dynamical order: orbit[n+1] is the support of V(u(orbit[n])).
  std::vector<Coset> orbit;
  std::size_t minimal_period = 1;
};

/// Every orbit u(2^n g - a + U), n >= 0, for s(mu)-invariant U, a in s(mu)
/// and g with purely periodic doubling, deduplicated. Each orbit is rotated
/// to start at its smallest coset.
template <Scalar T>
std::vector<PeriodicOrbit> periodic_orbits(const QsoOperator<T>& op, std::size_t bound = kDefaultExhaustiveBound) {
  const auto& spec = op.spec();
  require_within_bound(spec, bound);
  const ElementSet s_mu = support(op.mu());
  std::vector<PeriodicOrbit> out;
  std::map<std::pair<std::vector<std::size_t>, std::vector<std::vector<std::size_t>>>, bool> seen;
  for (const auto& u : invariant_subgroups(spec, s_mu, bound)) {
    for (std::size_t a : s_mu.indices()) {
      for (std::size_t g = 0; g < spec.order(); ++g) {
        if (doubling_orbit(spec, spec.element_at(g)).preperiod != 0) continue;
        std::vector<ElementSet> cycle;
        std::size_t h = g;
        for (;;) {
          ElementSet c = translate(u.members(), spec.element_at(spec.sub_index(h, a)));
          if (!cycle.empty() && c == cycle.front()) break;
          cycle.push_back(std::move(c));
          h = spec.add_index(h, h);
        }
        auto smallest = std::min_element(cycle.begin(), cycle.end());
        std::rotate(cycle.begin(), smallest, cycle.end());
        std::vector<std::vector<std::size_t>> key;
        for (const auto& c : cycle) key.push_back(c.indices());
        std::sort(key.begin(), key.end());
        if (!seen.emplace(std::make_pair(u.members().indices(), key), true).second) continue;
        PeriodicOrbit orbit{u, {}, cycle.size()};
        for (const auto& c : cycle) orbit.orbit.emplace_back(c.front(), u);
        out.push_back(std::move(orbit));
      }
    }
  }
  return out;
}

struct RegularityWitness {
  Subgroup subgroup;
  GroupElement g;
};

struct RegularityVerdict {
  bool regular = true;
  std::optional<RegularityWitness> witness;
};

/// Regular iff for every s(mu)-invariant U and every g some 2^n g lies in U.
/// n = 0..m suffices: the doubling orbit has at most m distinct elements.
/// Subgroups are scanned smallest first, so a witness uses the smallest
/// invariant subgroup.
template <Scalar T>
RegularityVerdict is_regular(const QsoOperator<T>& op, std::size_t bound = kDefaultExhaustiveBound) {
  const auto& spec = op.spec();
  require_within_bound(spec, bound);
  for (const auto& u : invariant_subgroups(spec, support(op.mu()), bound)) {
    for (std::size_t g = 0; g < spec.order(); ++g) {
      bool enters = false;
      std::size_t h = g;
      for (std::size_t n = 0; n <= spec.order() && !enters; ++n) {
        enters = u.contains_index(h);
        h = spec.add_index(h, h);
      }
      if (!enters) return RegularityVerdict{false, RegularityWitness{u, spec.element_at(g)}};
    }
  }
  return RegularityVerdict{true, std::nullopt};
}

struct RateSample {
  std::size_t n = 0;
  double distance = 0;
  /// (1/n) log(log(1/d_n)) when n >= 1 and 0 < d_n < 1.
  std::optional<double> rate;
  /// log(log(1/d_n) / log(1/d_{n-1})): per-step doubling exponent estimate,
  /// which approaches log 2 much faster than `rate`.
  std::optional<double> local_exponent;
  /// d_n == 0: exact hit or underflow; the series stops here.
  bool terminal = false;
};

/// Samples d_n for n = 0..n_max (stopping early at d_n == 0).
///
/// Once the support has stabilized on a coset C_n of an s(mu)-invariant
/// subgroup, the deviation e_n = V^n x - u(C_n) sums to zero on C_n, the cross
/// terms u(C_n) * e_n vanish, and e_{n+1} = mu * (e_n * e_n) exactly. Tracking
/// e_n instead of the state keeps d_n accurate down to underflow rather than
/// to the ~1e-16 cancellation floor of x - u(C_n).
inline std::vector<RateSample> convergence_rate(const QsoOperator<double>& op, const SimplexPoint<double>& x0,
                                                std::size_t n_max) {
  if (n_max < 2) throw DomainError("convergence rate needs n_max >= 2");
  const auto& spec = op.spec();
  const SupportForecast f = predict_support_dynamics(op, x0);
  std::vector<RateSample> out;
  SimplexPoint<double> cur = x0;
  std::vector<double> dev;
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) {
      if (!dev.empty()) {
        const auto sq = convolve<double>(spec, dev, dev);
        dev = convolve<double>(spec, op.mu().weights(), sq);
      } else {
        cur = apply(op, cur);
      }
    }
    if (dev.empty() && n >= f.n0) {
      const auto target = uniform<double>(f.set_at(n));
      dev.resize(spec.order());
      for (std::size_t i = 0; i < dev.size(); ++i) dev[i] = cur[i] - target[i];
    }
    RateSample s;
    s.n = n;
    if (dev.empty()) {
      s.distance = detail::distance_to_forecast(cur, f, n);
    } else {
      for (double v : dev) s.distance = std::max(s.distance, std::abs(v));
    }
    if (s.distance == 0) {
      s.terminal = true;
      out.push_back(s);
      break;
    }
    if (n >= 1 && s.distance < 1) {
      s.rate = std::log(-std::log(s.distance)) / static_cast<double>(n);
      const double prev = out.back().distance;
      if (prev > 0 && prev < 1) s.local_exponent = std::log(std::log(s.distance) / std::log(prev));
    }
    out.push_back(s);
  }
  return out;
}

/// (1/n) sum_{k<n} V^k(x0).
template <Scalar T>
SimplexPoint<T> ergodic_average(const QsoOperator<T>& op, const SimplexPoint<T>& x0, std::size_t n,
                                const IterationLimits& limits = {}) {
  if (n < 1) throw DomainError("ergodic average needs n >= 1");
  using tr = scalar_traits<T>;
  std::vector<T> acc(op.spec().order(), tr::zero());
  for_each_state(
      op, x0, n - 1,
      [&](std::size_t, const SimplexPoint<T>& s) {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s[i];
      },
      limits);
  const T scale = tr::ratio(1, static_cast<long>(n));
  for (auto& v : acc) v *= scale;
  return SimplexPoint<T>::assume_valid(op.spec(), std::move(acc));
}

}  // namespace gmqso
