#include "dimcurse/bounds_audit.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "dimcurse/meta_engine.hpp"
#include "gtest/gtest.h"

namespace dimcurse {
namespace {

EvaluationLog hand_trace_log() {
  const auto e = objectives::cone("cone", {0.25, 0.75});
  return run(e.objective, BudgetSchedule({2, 2}), OptimizerKind::kPiyavskiiShubert);
}

ConditionalOracle hand_trace_oracle() { return make_exact_oracle(objectives::cone("cone", {0.25, 0.75})); }

TEST(RegretTest, Examples) {
  const std::vector<double> one{0.7};
  EXPECT_EQ(average_regret(one, 0.7), 0.0);
  const std::vector<double> trace{1.0, 0.5, 1.5, 1.0};
  EXPECT_DOUBLE_EQ(average_regret(trace, 0.0), 1.0);
  const std::vector<double> flat(9, 0.4);
  EXPECT_DOUBLE_EQ(average_regret(flat, 0.1), 0.3);
  EXPECT_THROW(average_regret(std::vector<double>{}, 0.0), ContractError);
}

TEST(RegretTest, PseudoRegret) {
  const std::vector<double> v{1.0, 0.5};
  const std::vector<double> noisy{1.1, 0.5};
  EXPECT_DOUBLE_EQ(average_regret(v, 0.0), 0.75);
  EXPECT_DOUBLE_EQ(pseudo_regret(noisy, 0.0), 0.8);
  EXPECT_DOUBLE_EQ(pseudo_regret(v, 0.0), average_regret(v, 0.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> a(1 + rng() % 20);
    for (auto& x : a) x = u(rng);
    const double eps = 0.3 * u(rng);
    std::vector<double> shifted = a;
    for (auto& x : shifted) x += eps;
    EXPECT_NEAR(pseudo_regret(shifted, 0.0), average_regret(a, 0.0) + eps, 1e-12);
    std::vector<double> inflated = a;
    for (auto& x : inflated) x += eps * u(rng);
    EXPECT_GE(pseudo_regret(inflated, 0.0), average_regret(a, 0.0) - 1e-15);
  }
}

TEST(BoundFormulaTest, Values) {
  EXPECT_DOUBLE_EQ(strong_bound(1, 3.0, 0.2), 0.2);
  EXPECT_DOUBLE_EQ(strong_bound(2, 0.5, 0.1), 0.3);
  EXPECT_DOUBLE_EQ(strong_bound(3, 0.0, 0.1), 0.3);
  EXPECT_DOUBLE_EQ(weak_bound(1, 5.0, 0.2), 0.2);
  EXPECT_DOUBLE_EQ(weak_bound(2, 1.0, 0.1), 0.3);
  EXPECT_DOUBLE_EQ(weak_bound(2, 2.0, 0.1), 0.6);
  EXPECT_THROW(weak_bound(2, 0.5, 0.1), DomainError);
  EXPECT_THROW(strong_bound(2, -0.5, 0.1), DomainError);
  EXPECT_THROW(strong_bound(0, 0.5, 0.1), DomainError);
}

TEST(BoundFormulaTest, MonotoneAndOrdered) {
  for (std::size_t d = 1; d <= 8; ++d) {
    for (double a = 0.0; a <= 3.0; a += 0.25) {
      EXPECT_GE(strong_bound(d, a, 1.0), static_cast<double>(d));
      EXPECT_GE(weak_bound(d, a + 1.0, 1.0), static_cast<double>(d));
      EXPECT_LE(strong_bound(d, a, 1.0), strong_bound(d, a + 0.25, 1.0));
      EXPECT_LE(strong_bound(d, a, 1.0), strong_bound(d + 1, a, 1.0));
      // A strong guarantee implies the weak one with beta = alpha + 1.
      EXPECT_LE(strong_bound(d, a, 1.0), weak_bound(d, a + 1.0, 1.0) * (1 + 1e-12));
    }
  }
}

TEST(BoundFormulaTest, CumulativeAndUnknownHorizon) {
  const BoundFactor f2{RobustnessKind::kStrong, 2, 5, 0.5};
  EXPECT_DOUBLE_EQ(cumulative_bound(30, 2, f2, 0.1), 18.0);
  EXPECT_EQ(cumulative_bound(30, 2, f2, 0.0), 0.0);
  const BoundFactor f1{RobustnessKind::kStrong, 1, 1, 0.0};
  EXPECT_DOUBLE_EQ(unknown_horizon_bound(1, 1, f1, 0.3), 2.0 * 0.3);
  const BoundFactor f8{RobustnessKind::kStrong, 1, 8, 0.0};
  EXPECT_DOUBLE_EQ(unknown_horizon_bound(8, 1, f8, 0.1), 8.0 * 0.1);
  EXPECT_EQ(unknown_horizon_bound(8, 1, f8, 0.0), 0.0);
  const BoundFactor wrong{RobustnessKind::kStrong, 2, 6, 0.5};
  EXPECT_THROW(cumulative_bound(30, 2, wrong, 0.1), ContractError);
  const BoundFactor weak{RobustnessKind::kWeak, 2, 5, 2.0};
  EXPECT_DOUBLE_EQ(weak.value(), 6.0);
}

TEST(NoiseGapTest, HandTrace) {
  const auto g = noise_gap(hand_trace_log(), hand_trace_oracle());
  EXPECT_NEAR(g.value, 0.25, 1e-12);
  EXPECT_EQ(g.oracle_error, 0.0);
}

TEST(NoiseGapTest, DenseInnerBudgetHitsArgmin) {
  // Uniform grid with T_2 = 2 visits z = 0.75 = c_2 in every block.
  const auto e = objectives::cone("c", {0.25, 0.75});
  const auto log = run(e.objective, BudgetSchedule({2, 2}), OptimizerKind::kUniformGrid);
  EXPECT_NEAR(noise_gap(log, make_exact_oracle(e)).value, 0.0, 1e-15);
}

TEST(NoiseGapTest, NonnegativeAndRejectsOneDimension) {
  for (const char* name : {"pyramid_2", "cone_2", "pyramid_3", "cone_3"}) {
    const auto e = *find_objective(name);
    const std::size_t d = e.objective.dimension();
    const auto log = run(e.objective, split_budget(64, d), OptimizerKind::kPiyavskiiShubert);
    for (std::size_t s = 1; s < d; ++s) EXPECT_GE(noise_gap(log, make_exact_oracle(e), s).value, 0.0);
  }
  const auto v = *find_objective("vee");
  const auto log1 = run(v.objective, BudgetSchedule({4}), OptimizerKind::kPiyavskiiShubert);
  EXPECT_THROW(noise_gap(log1, make_exact_oracle(v)), ContractError);
}

TEST(DecompositionAuditTest, HandTraceHoldsWithEquality) {
  const auto rep = audit_decomposition(hand_trace_log(), hand_trace_oracle(), {0.0, 0.0});
  EXPECT_NEAR(rep.lhs, 1.0, 1e-12);
  EXPECT_NEAR(rep.rhs, 1.0, 1e-12);
  EXPECT_NEAR(rep.margin, 0.0, 1e-12);
  EXPECT_EQ(rep.verdict, Verdict::kHolds);
}

TEST(DecompositionAuditTest, HoldsOnCatalogRuns) {
  for (const char* name : {"pyramid_2", "cone_2", "pyramid_3", "cone_3"}) {
    const auto e = *find_objective(name);
    const std::size_t d = e.objective.dimension();
    for (std::uint64_t T : {4u, 27u, 100u}) {
      const auto log = run(e.objective, split_budget(T, d), OptimizerKind::kPiyavskiiShubert);
      for (std::size_t s = 1; s < d; ++s) {
        const auto rep = audit_decomposition(log, make_exact_oracle(e), {0.0, 0.0}, s);
        EXPECT_NE(rep.verdict, Verdict::kViolated) << name << " T=" << T << " split=" << s;
        EXPECT_LE(rep.lhs, rep.rhs + kAuditTolerance);
      }
    }
  }
}

TEST(DecompositionAuditTest, CoarseOracleIsInconclusive) {
  const auto e = objectives::cone("cone", {0.25, 0.75});
  const auto rep = audit_decomposition(hand_trace_log(), make_grid_oracle(e.objective, 2), {0.0, 0.0});
  EXPECT_EQ(rep.verdict, Verdict::kInconclusive);
}

TEST(DecompositionAuditTest, RejectsIncompleteLog) {
  const auto e = objectives::cone("cone", {0.25, 0.75});
  const auto log = run(e.objective, BudgetSchedule({2, 2}), OptimizerKind::kPiyavskiiShubert, 3);
  EXPECT_THROW(audit_decomposition(log, hand_trace_oracle(), {0.0, 0.0}), ContractError);
}

TEST(BoundCheckTest, Tolerance) {
  EXPECT_TRUE(make_bound_check("a", 1.0, 1.0).satisfied);
  EXPECT_FALSE(make_bound_check("a", 1.0, 1.001).satisfied);
}

}  // namespace
}  // namespace dimcurse
