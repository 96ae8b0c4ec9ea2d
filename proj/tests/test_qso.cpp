#include <gtest/gtest.h>

#include "gmqso/analysis.hpp"
#include "gmqso/qso.hpp"
#include "gmqso/sampling.hpp"
#include "oracles.hpp"

using namespace gmqso;

namespace {

Rational q(long p, long d) { return scalar_traits<Rational>::ratio(p, d); }

QsoOperator<Rational> delta0(const GroupSpec& spec) {
  return QsoOperator<Rational>(SimplexPoint<Rational>::point_mass(spec, spec.zero()));
}

SimplexPoint<Rational> rpoint(const GroupSpec& spec, std::vector<Rational> w) {
  return SimplexPoint<Rational>::make(spec, std::move(w));
}

const std::vector<GroupSpec>& test_groups() {
  static const std::vector<GroupSpec> g = {{2}, {3}, {4}, {2, 2}, {5}, {6}, {7}, {8}, {2, 3}, {2, 4}, {3, 3}, {12}, {2, 6}};
  return g;
}

}  // namespace

TEST(CoefficientTest, Examples) {
  GroupSpec z3{3};
  auto op = delta0(z3);
  EXPECT_EQ(coefficient(op, {1}, {1}, {2}), 1);
  EXPECT_EQ(coefficient(op, {1}, {1}, {0}), 0);

  GroupSpec z2{2};
  QsoOperator<Rational> op2(rpoint(z2, {q(1, 3), q(2, 3)}));
  // k - i - j = 0 - 0 - 1 = 1.
  EXPECT_EQ(coefficient(op2, {0}, {1}, {0}), q(2, 3));
}

TEST(StochasticityTest, AnyMuPasses) {
  Sampler rng(1);
  for (const auto& spec : test_groups()) {
    for (int t = 0; t < 5; ++t) {
      QsoOperator<Rational> op(rng.rational(spec));
      auto report = check_stochasticity(op);
      EXPECT_TRUE(report.ok);
      EXPECT_TRUE(report.violations.empty());
    }
  }
}

TEST(StochasticityTest, RejectsUnnormalizedMu) {
  GroupSpec z2{2};
  std::vector<double> mu{0.9, 0.0};
  try {
    check_stochasticity<double>(z2, mu);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("([0],[0])"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row sum"), std::string::npos) << msg;
  }
  std::vector<Rational> neg{q(3, 2), q(-1, 2)};
  EXPECT_THROW(check_stochasticity<Rational>(z2, neg), ValidationError);
  EXPECT_THROW(SimplexPoint<Rational>::make(z2, neg), ValidationError);
}

TEST(ApplyTest, Examples) {
  GroupSpec z2{2};
  auto op = delta0(z2);
  auto x = rpoint(z2, {q(9, 10), q(1, 10)});
  EXPECT_EQ(apply(op, x).weight_vector(), (std::vector<Rational>{q(82, 100), q(18, 100)}));

  QsoOperator<double> opf(SimplexPoint<double>::point_mass(z2, {0}));
  auto y = apply(opf, SimplexPoint<double>::make(z2, {0.9, 0.1}));
  EXPECT_NEAR(y[0], 0.82, 1e-15);
  EXPECT_NEAR(y[1], 0.18, 1e-15);

  GroupSpec z3{3};
  EXPECT_EQ(apply(delta0(z3), SimplexPoint<Rational>::point_mass(z3, {1})), SimplexPoint<Rational>::point_mass(z3, {2}));
}

TEST(ApplyTest, CenterIsFixed) {
  Sampler rng(2);
  for (const auto& spec : test_groups()) {
    auto center = uniform<Rational>(ElementSet::whole(spec));
    for (int t = 0; t < 5; ++t) EXPECT_EQ(apply(QsoOperator<Rational>(rng.rational(spec)), center), center);
  }
}

TEST(ApplyTest, OracleEquivalenceExact) {
  Sampler rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto& spec = test_groups()[rng.below(test_groups().size())];
    ASSERT_LE(spec.order(), 12u);
    QsoOperator<Rational> op(rng.rational(spec));
    auto x = rng.rational(spec);
    EXPECT_EQ(apply(op, x), apply_oracle(op, x)) << spec.to_string();
  }
}

TEST(ApplyTest, OracleExamples) {
  GroupSpec z2{2};
  EXPECT_EQ(apply_oracle(delta0(z2), rpoint(z2, {q(9, 10), q(1, 10)})).weight_vector(),
            (std::vector<Rational>{q(82, 100), q(18, 100)}));
  GroupSpec spec{2, 3};
  for (const auto& g : spec.elements()) {
    for (const auto& a : spec.elements()) {
      QsoOperator<Rational> op(SimplexPoint<Rational>::point_mass(spec, a));
      auto expect = SimplexPoint<Rational>::point_mass(spec, spec.add(spec.add(g, g), a));
      EXPECT_EQ(apply_oracle(op, SimplexPoint<Rational>::point_mass(spec, g)), expect);
      EXPECT_EQ(apply(op, SimplexPoint<Rational>::point_mass(spec, g)), expect);
    }
  }
}

TEST(ApplyTest, MismatchedGroups) {
  EXPECT_THROW(apply(delta0(GroupSpec{2}), uniform<Rational>(ElementSet::whole(GroupSpec{3}))), StructuralError);
}

TEST(ApplyTest, SimplexPreservationAndSupportLaw) {
  Sampler rng(4);
  for (const auto& spec : test_groups()) {
    for (int t = 0; t < 20; ++t) {
      QsoOperator<Rational> op(rng.rational(spec));
      auto x = rng.rational(spec);
      auto y = apply(op, x);
      EXPECT_NO_THROW(SimplexPoint<Rational>::validate(spec, y.weight_vector()));
      auto sx = oracle::to_set(support(x));
      auto expected = oracle::sumset(spec, oracle::sumset(spec, sx, sx), oracle::to_set(support(op.mu())));
      EXPECT_EQ(oracle::to_set(support(y)), expected);
      EXPECT_GE(support(y).size(), support(x).size());
    }
  }
}

TEST(ApplyTest, DeltaZeroIsPlainSquaring) {
  Sampler rng(5);
  for (const auto& spec : test_groups()) {
    auto op = delta0(spec);
    for (int t = 0; t < 10; ++t) {
      auto x = rng.rational(spec);
      EXPECT_EQ(apply(op, x).weight_vector(), oracle::doubling_square(spec, x.weight_vector()));
    }
  }
}

TEST(ApplyTest, MinEntryGrowsOnStabilizedSupport) {
  Sampler rng(6);
  int checked = 0;
  for (const auto& spec : test_groups()) {
    for (int t = 0; t < 10; ++t) {
      QsoOperator<Rational> op(rng.rational(spec));
      const auto subs = invariant_subgroups(spec, support(op.mu()));
      const auto& u = subs[rng.below(subs.size())];
      const auto coset = translate(u.members(), spec.element_at(rng.below(spec.order())));
      auto x = rng.rational(coset);
      if (x == uniform<Rational>(coset)) continue;
      auto y = apply(op, x);
      EXPECT_GT(min_on_support(y, support(y)), min_on_support(x, coset));
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(IterateTest, Examples) {
  GroupSpec z3{3};
  auto t0 = iterate(delta0(z3), SimplexPoint<Rational>::point_mass(z3, {1}), 0);
  ASSERT_EQ(t0.states.size(), 1u);
  EXPECT_EQ(t0.initial(), SimplexPoint<Rational>::point_mass(z3, {1}));

  auto t2 = iterate(delta0(z3), SimplexPoint<Rational>::point_mass(z3, {1}), 2);
  ASSERT_EQ(t2.states.size(), 3u);
  EXPECT_EQ(t2.states[1], SimplexPoint<Rational>::point_mass(z3, {2}));
  EXPECT_EQ(t2.states[2], SimplexPoint<Rational>::point_mass(z3, {1}));

  GroupSpec z2{2};
  auto tz = iterate(delta0(z2), rpoint(z2, {q(9, 10), q(1, 10)}), 2);
  EXPECT_EQ(tz.states[1].weight_vector(), (std::vector<Rational>{q(82, 100), q(18, 100)}));
  EXPECT_EQ(tz.states[2].weight_vector(), (std::vector<Rational>{q(7048, 10000), q(2952, 10000)}));
}

TEST(IterateTest, StatesFollowApply) {
  Sampler rng(7);
  GroupSpec spec{2, 3};
  QsoOperator<Rational> op(rng.rational(spec));
  auto traj = iterate(op, rng.rational(spec), 4);
  for (std::size_t n = 0; n + 1 < traj.states.size(); ++n) EXPECT_EQ(traj.states[n + 1], apply(op, traj.states[n]));
  EXPECT_EQ(advance(op, traj.initial(), 4), traj.states.back());
}

TEST(IterateTest, Budgets) {
  GroupSpec z2{2};
  QsoOperator<double> op(SimplexPoint<double>::point_mass(z2, {0}));
  auto x = SimplexPoint<double>::make(z2, {0.9, 0.1});
  EXPECT_THROW(iterate(op, x, 10001), CapacityError);
  EXPECT_NO_THROW(advance(op, x, 10000));
  // Squaring doubles denominator size every step: 10^(2^n) passes 4096 bits at n = 11.
  EXPECT_THROW(iterate(delta0(z2), rpoint(z2, {q(9, 10), q(1, 10)}), 20), CapacityError);
  EXPECT_NO_THROW(iterate(delta0(z2), rpoint(z2, {q(9, 10), q(1, 10)}), 8));
}
