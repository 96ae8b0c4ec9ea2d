#pragma once

/**
 * @file simplex.hpp
 * @brief Probability vectors indexed by the elements of a finite Abelian group.
 */

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmqso/abelian.hpp"
#include "gmqso/scalar.hpp"

namespace gmqso {

template <Scalar T>
class SimplexPoint {
 public:
  using traits = scalar_traits<T>;

  /// Validates nonnegativity and normalization (exact for rationals, within
  /// kFloatSumTolerance for floats).
  static SimplexPoint make(GroupSpec spec, std::vector<T> weights) {
    validate(spec, weights);
    return SimplexPoint(std::move(spec), std::move(weights));
  }

  /// Skips validation. For results of operations that preserve the simplex.
  static SimplexPoint assume_valid(GroupSpec spec, std::vector<T> weights) {
    return SimplexPoint(std::move(spec), std::move(weights));
  }

  static SimplexPoint point_mass(const GroupSpec& spec, const GroupElement& g) {
    std::vector<T> w(spec.order(), traits::zero());
    w[spec.index_of(g)] = traits::one();
    return SimplexPoint(spec, std::move(w));
  }

  static void validate(const GroupSpec& spec, const std::vector<T>& weights) {
    if (weights.size() != spec.order())
      throw StructuralError("weight vector has " + std::to_string(weights.size()) + " entries, group " +
                            spec.to_string() + " has " + std::to_string(spec.order()) + " elements");
    T total = traits::zero();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!traits::finite(weights[i]) || traits::sign(weights[i]) < 0)
        throw ValidationError("weight at " + to_string(spec.element_at(i)) + " is negative: " +
                              traits::format(weights[i]));
      total += weights[i];
    }
    if constexpr (traits::exact) {
      if (total != traits::one())
        throw ValidationError("weights must sum to 1, got " + traits::format(total));
    } else {
      if (!(std::abs(total - 1.0) <= kFloatSumTolerance))
        throw ValidationError("weights must sum to 1 within 1e-12, got " + traits::format(total));
    }
  }

  const GroupSpec& spec() const { return spec_; }
  std::span<const T> weights() const { return weights_; }
  const std::vector<T>& weight_vector() const { return weights_; }
  const T& operator[](std::size_t idx) const { return weights_[idx]; }
  const T& weight(const GroupElement& g) const { return weights_[spec_.index_of(g)]; }
  std::size_t size() const { return weights_.size(); }

  friend bool operator==(const SimplexPoint& a, const SimplexPoint& b) {
    return a.spec_ == b.spec_ && a.weights_ == b.weights_;
  }

 private:
  SimplexPoint(GroupSpec spec, std::vector<T> weights) : spec_(std::move(spec)), weights_(std::move(weights)) {}

  GroupSpec spec_;
  std::vector<T> weights_;
};

using Support = ElementSet;

/// s(x). Exact positivity for rationals; weight > threshold for floats.
template <Scalar T>
ElementSet support(const SimplexPoint<T>& x, double threshold = kSupportThreshold) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (scalar_traits<T>::positive(x[i], threshold)) idx.push_back(i);
  return ElementSet::from_indices(x.spec(), std::move(idx));
}

/// u(B): mass 1/|B| on each member of B.
template <Scalar T>
SimplexPoint<T> uniform(const ElementSet& b) {
  if (b.empty()) throw DomainError("uniform distribution on an empty set");
  using tr = scalar_traits<T>;
  std::vector<T> w(b.spec().order(), tr::zero());
  const T mass = tr::ratio(1, static_cast<long>(b.size()));
  for (auto i : b.indices()) w[i] = mass;
  return SimplexPoint<T>::assume_valid(b.spec(), std::move(w));
}

enum class Norm { max, sum };

template <Scalar T>
T distance(const SimplexPoint<T>& x, const SimplexPoint<T>& y, Norm norm = Norm::max) {
  require_same_group(x.spec(), y.spec());
  using tr = scalar_traits<T>;
  T acc = tr::zero();
  for (std::size_t i = 0; i < x.size(); ++i) {
    T d = tr::abs(T(x[i] - y[i]));
    if (norm == Norm::sum) acc += d;
    else if (d > acc) acc = d;
  }
  return acc;
}

inline SimplexPoint<double> to_float(const SimplexPoint<Rational>& x) {
  std::vector<double> w;
  w.reserve(x.size());
  for (const auto& v : x.weights()) w.push_back(v.get_d());
  return SimplexPoint<double>::assume_valid(x.spec(), std::move(w));
}

/// Smallest weight over s(x).
template <Scalar T>
T min_on_support(const SimplexPoint<T>& x, const ElementSet& s) {
  require_same_group(x.spec(), s.spec());
  if (s.empty()) throw DomainError("minimum over an empty support");
  T best = x[s.indices().front()];
  for (auto i : s.indices())
    if (x[i] < best) best = x[i];
  return best;
}

}  // namespace gmqso
