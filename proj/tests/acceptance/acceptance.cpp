// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gmqso/gmqso.hpp"
#include "oracles.hpp"

using namespace gmqso;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string failure;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) failure = what;
    pass = pass && ok;
  }
};

QsoOperator<Rational> delta0(const GroupSpec& spec) {
  return QsoOperator<Rational>(SimplexPoint<Rational>::point_mass(spec, spec.zero()));
}

struct Instance {
  QsoOperator<Rational> op;
  SimplexPoint<Rational> x;
};

std::vector<Instance> exact_instances() {
  Sampler rng(1001);
  std::vector<Instance> out;
  for (const GroupSpec& spec : {GroupSpec{2}, GroupSpec{3}, GroupSpec{4}, GroupSpec{2, 2}, GroupSpec{6}})
    for (int t = 0; t < 200; ++t) {
      QsoOperator<Rational> op(rng.rational(spec));
      out.push_back({op, rng.rational(spec)});
    }
  return out;
}

struct FloatInstance {
  QsoOperator<double> op;
  SimplexPoint<double> x;
};

std::vector<FloatInstance> float_instances() {
  Sampler rng(3003);
  std::vector<FloatInstance> out;
  for (const GroupSpec& spec : {GroupSpec{5}, GroupSpec{6}, GroupSpec{8}, GroupSpec{2, 4}})
    for (int m = 0; m < 3; ++m) {
      QsoOperator<double> op(rng.dirichlet(rng.subset(spec)));
      for (int t = 0; t < 50; ++t) out.push_back({op, rng.dirichlet(spec)});
    }
  return out;
}

Outcome oracle_equivalence(const std::vector<Instance>& cases) {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t agree = 0;
  for (const auto& c : cases) agree += apply(c.op, c.x) == apply_oracle(c.op, c.x);
  const double t = seconds_since(t0);
  o.require(agree == cases.size(), "apply and apply_oracle differ");
  o.require(t < 10, "runtime over 10 s");
  o.detail << agree << "/" << cases.size() << " exact matches, " << t << " s (limit 10 s)";
  return o;
}

Outcome support_law(const std::vector<Instance>& cases) {
  Outcome o;
  std::size_t agree = 0;
  for (const auto& c : cases) {
    const auto sx = support(c.x);
    agree += support(apply(c.op, c.x)) == sumset(sumset(sx, sx), support(c.op.mu()));
  }
  o.require(agree == cases.size(), "support law violated");
  o.detail << agree << "/" << cases.size() << " instances";
  return o;
}

Outcome key_convergence(const std::vector<FloatInstance>& cases) {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t converged = 0, worst_n = 0;
  for (const auto& c : cases) {
    try {
      const auto p = limit_profile(c.op, c.x, 1e-10, 200);
      ++converged;
      worst_n = std::max(worst_n, p.converged_at);
    } catch (const NonConvergenceError&) {
    }
  }
  const double t = seconds_since(t0);
  o.require(converged == cases.size(), "d_n stayed above 1e-10 for 200 iterations");
  o.require(t < 30, "runtime over 30 s");
  o.detail << converged << "/" << cases.size() << " reach d_n <= 1e-10, slowest at n = " << worst_n << ", " << t
           << " s (limit 30 s)";
  return o;
}

Outcome double_exponential_rate() {
  Outcome o;
  GroupSpec z2{2};
  QsoOperator<double> op(SimplexPoint<double>::point_mass(z2, {0}));
  const auto series = convergence_rate(op, SimplexPoint<double>::make(z2, {0.9, 0.1}), 12);
  double worst_rel = 0;
  std::size_t matched = 0;
  std::ostringstream rates, local;
  for (const auto& s : series) {
    const double closed = std::pow(0.8, std::pow(2.0, static_cast<double>(s.n))) / 2;
    if (closed > 1e-300) {
      worst_rel = std::max(worst_rel, std::abs(s.distance - closed) / closed);
      ++matched;
    }
    if (s.n >= 5 && s.n <= 8) {
      const bool in = s.rate && *s.rate >= 0.60 && *s.rate <= 0.6932;
      o.require(in, "r_" + std::to_string(s.n) + " outside [0.60, 0.6932]");
      rates << " r_" << s.n << "=" << (s.rate ? *s.rate : NAN);
      local << " " << (s.local_exponent ? *s.local_exponent : NAN);
    }
  }
  o.require(matched >= 12 && worst_rel <= 1e-6, "d_n deviates from 0.8^(2^n)/2");
  o.detail << "closed form matched for n = 0.." << matched - 1 << " (max rel err " << worst_rel << ");" << rates.str()
           << "; local exponent n=5..8:" << local.str();
  return o;
}

Outcome regularity() {
  Outcome o;
  Sampler rng(5005);
  std::size_t regular = 0, total = 0;
  for (const GroupSpec& spec : {GroupSpec{2}, GroupSpec{4}, GroupSpec{8}, GroupSpec{2, 2}, GroupSpec{2, 4}})
    for (int t = 0; t < 20; ++t, ++total) regular += is_regular(QsoOperator<Rational>(rng.rational(spec))).regular;
  o.require(regular == total, "a power-of-two group was judged non-regular");
  o.detail << regular << "/" << total << " regular on 2-groups; witnesses:";
  for (const GroupSpec& spec : {GroupSpec{3}, GroupSpec{5}, GroupSpec{6}, GroupSpec{7}}) {
    const auto op = delta0(spec);
    const auto v = is_regular(op);
    o.require(!v.regular && v.witness.has_value(), spec.to_string() + " judged regular");
    if (!v.witness) continue;
    const auto& w = *v.witness;
    bool never = true;
    auto h = w.g;
    for (std::size_t n = 0; n <= spec.order(); ++n, h = spec.add(h, h)) never = never && !w.subgroup.contains(h);
    const auto start = SimplexPoint<Rational>::point_mass(spec, w.g);
    const std::size_t period = predict_support_dynamics(op, start).period();
    // The exact trajectory from delta_g settles into a cycle of that period.
    const auto f = predict_support_dynamics(op, start);
    const auto traj = iterate(op, start, f.cycle_start + 2 * period);
    bool cycles = !(traj.states[f.cycle_start] == traj.states[f.cycle_start + 1]);
    for (std::size_t j = 0; j < period; ++j)
      cycles = cycles && traj.states[f.cycle_start + j] == traj.states[f.cycle_start + period + j];
    o.require(never && period >= 2 && cycles, spec.to_string() + " witness does not verify");
    o.detail << " " << spec.to_string() << " (U=" << w.subgroup.members().to_string() << ", g=" << to_string(w.g)
             << ", period " << period << ")";
  }
  return o;
}

Outcome periodic_orbit_check() {
  Outcome o;
  const std::vector<std::pair<GroupSpec, std::size_t>> cases = {{GroupSpec{3}, 2}, {GroupSpec{7}, 3}};
  std::size_t reproduced = 0, orbits_total = 0;
  for (const auto& [spec, expected] : cases) {
    const auto op = delta0(spec);
    const auto orbits = periodic_orbits(op);
    bool found = false;
    for (const auto& orb : orbits) {
      ++orbits_total;
      const std::size_t p = orb.orbit.size();
      bool ok = p == orb.minimal_period;
      for (std::size_t n = 0; n < p && ok; ++n)
        ok = apply(op, uniform<Rational>(orb.orbit[n].elements())) == uniform<Rational>(orb.orbit[(n + 1) % p].elements());
      reproduced += ok;
      if (orb.subgroup == Subgroup::trivial(spec) && orb.orbit[0].elements() == ElementSet::singleton(spec, {1}))
        found = orb.minimal_period == expected;
    }
    o.require(found, "delta_1 orbit on " + spec.to_string() + " missing or wrong period");
    o.detail << spec.to_string() << ": " << orbits.size() << " orbits, delta_1 period " << expected << "; ";
  }
  o.require(reproduced == orbits_total, "an orbit does not reproduce under apply");
  o.detail << reproduced << "/" << orbits_total << " reproduce exactly";
  return o;
}

Outcome center_and_reduction() {
  Outcome o;
  Sampler rng(7007);
  const std::vector<GroupSpec> groups = {{2}, {3}, {4}, {2, 2}, {5}, {6}, {7}, {8}, {2, 3}, {2, 4}, {3, 3}, {12}};
  std::size_t fixed = 0, reduced = 0, total = 0, rtotal = 0;
  for (const auto& spec : groups) {
    const auto center = uniform<Rational>(ElementSet::whole(spec));
    for (int t = 0; t < 10; ++t, ++total) fixed += apply(QsoOperator<Rational>(rng.rational(spec)), center) == center;
    const auto op = delta0(spec);
    for (int t = 0; t < 10; ++t, ++rtotal) {
      const auto x = rng.rational(spec);
      reduced += apply(op, x).weight_vector() == oracle::doubling_square(spec, x.weight_vector());
    }
  }
  o.require(fixed == total, "center moved");
  o.require(reduced == rtotal, "delta_0 operator differs from sum_{i+j=k} x_i x_j");
  o.detail << "center fixed " << fixed << "/" << total << ", delta_0 reduction " << reduced << "/" << rtotal;
  return o;
}

Outcome ergodicity(const std::vector<FloatInstance>& cases) {
  Outcome o;
  double worst = 0;
  std::size_t checked = 0;
  auto check = [&](const QsoOperator<double>& op, const SimplexPoint<double>& x) {
    const double d = distance(ergodic_average(op, x, 100), ergodic_average(op, x, 200));
    worst = std::max(worst, d);
    ++checked;
    o.require(d <= 0.02, "Cesaro averages at 100 and 200 differ by " + std::to_string(d));
  };
  for (const auto& c : cases) check(c.op, c.x);
  Sampler rng(8008);
  for (const GroupSpec& spec : {GroupSpec{3}, GroupSpec{7}}) {
    QsoOperator<double> op(SimplexPoint<double>::point_mass(spec, spec.zero()));
    for (const auto& g : spec.elements()) check(op, SimplexPoint<double>::point_mass(spec, g));
    for (int t = 0; t < 10; ++t) check(op, rng.dirichlet(rng.subset(spec)));
  }
  o.detail << checked << " instances, max difference " << worst << " (limit 0.02)";
  return o;
}

Outcome min_entry_monotonicity() {
  Outcome o;
  Sampler rng(9009);
  const std::vector<GroupSpec> groups = {{2}, {3}, {4}, {2, 2}, {5}, {6}, {2, 3}};
  std::size_t steps = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const auto& spec = groups[static_cast<std::size_t>(inst) % groups.size()];
    QsoOperator<Rational> op(rng.rational(spec));
    const auto subs = invariant_subgroups(spec, support(op.mu()));
    const auto& u = subs[rng.below(subs.size())];
    const auto coset = translate(u.members(), spec.element_at(rng.below(spec.order())));
    auto y = rng.rational(coset, 5);
    const Rational k(static_cast<long>(coset.size()));
    for (int n = 0; n < 6; ++n) {
      const auto s = support(y);
      if (y == uniform<Rational>(s)) break;
      Rational eps = 0;
      for (auto i : s.indices()) eps = std::max(eps, Rational(abs(y[i] - 1 / k)));
      const auto next = apply(op, y);
      const auto s2 = support(next);
      Rational eps2 = 0;
      for (auto i : s2.indices()) eps2 = std::max(eps2, Rational(abs(next[i] - 1 / k)));
      o.require(s2.size() == s.size(), "support size changed on a stabilized trajectory");
      o.require(min_on_support(next, s2) > min_on_support(y, s), "minimum weight did not increase");
      o.require(eps2 <= eps * eps * k, "|(Vy)_j - 1/k| > eps^2 k");
      y = next;
      ++steps;
    }
  }
  o.detail << "50 instances, " << steps << " checked steps";
  return o;
}

}  // namespace

int main() {
  const auto exact = exact_instances();
  const auto floats = float_instances();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", [&] { return oracle_equivalence(exact); }},
      {"support law", [&] { return support_law(exact); }},
      {"key convergence", [&] { return key_convergence(floats); }},
      {"double-exponential rate", double_exponential_rate},
      {"regularity", regularity},
      {"periodic orbits", periodic_orbit_check},
      {"center fixed point and delta_0 reduction", center_and_reduction},
      {"ergodicity", [&] { return ergodicity(floats); }},
      {"min-entry monotonicity", min_entry_monotonicity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str());
    if (!o.pass) std::printf("     first failure: %s\n", o.failure.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
