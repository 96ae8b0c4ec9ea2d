#pragma once

// Seeded random points. Only raw 64-bit draws from mt19937_64 are used
// (the engine's output sequence is fixed by the standard), so the same seed
// gives the same points on every platform.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gmqso/abelian.hpp"
#include "gmqso/scalar.hpp"
#include "gmqso/simplex.hpp"

namespace gmqso {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1}.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      std::uint64_t v = engine_();
      if (v < limit) return v % n;
    }
  }

  /// Symmetric Dirichlet(1, ..., 1) on the members of `s`: uniform on that face.
  SimplexPoint<double> dirichlet(const ElementSet& s) {
    std::vector<double> w(s.spec().order(), 0.0);
    double total = 0;
    for (auto i : s.indices()) {
      w[i] = -std::log1p(-uniform01());
      total += w[i];
    }
    if (total == 0) return uniform<double>(s);
    for (auto& v : w) v /= total;
    return SimplexPoint<double>::make(s.spec(), std::move(w));
  }

  SimplexPoint<double> dirichlet(const GroupSpec& spec) { return dirichlet(ElementSet::whole(spec)); }

  /// Nonempty subset; each element kept with probability 1/2.
  ElementSet subset(const GroupSpec& spec) {
    for (;;) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < spec.order(); ++i)
        if (engine_() & 1) idx.push_back(i);
      if (!idx.empty()) return ElementSet::from_indices(spec, std::move(idx));
    }
  }

  /// Integer weights in [1, max_weight] on `s`, normalized exactly.
  SimplexPoint<Rational> rational(const ElementSet& s, long max_weight = 9) {
    std::vector<Rational> w(s.spec().order(), Rational(0));
    Rational total = 0;
    for (auto i : s.indices()) {
      w[i] = Rational(static_cast<long>(1 + below(static_cast<std::uint64_t>(max_weight))));
      total += w[i];
    }
    for (auto& v : w) v /= total;
    return SimplexPoint<Rational>::make(s.spec(), std::move(w));
  }

  /// Random support and random integer weights.
  SimplexPoint<Rational> rational(const GroupSpec& spec, long max_weight = 9) {
    return rational(subset(spec), max_weight);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gmqso
