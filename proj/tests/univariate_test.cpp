#include "dimcurse/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "dimcurse/bench_oracle.hpp"
#include "gtest/gtest.h"

namespace dimcurse {
namespace {

OptimizerConfig ps(std::size_t T, double L = 1.0) { return {T, 0.0, L, OptimizerKind::kPiyavskiiShubert}; }
OptimizerConfig grid(std::size_t T) { return {T, 0.0, 1.0, OptimizerKind::kUniformGrid}; }

// Dense-sampling oracle for the envelope minimum; the true minimum lies within
// L/(2 (n-1)) of the best sample.
double brute_envelope_min(const std::vector<double>& xs, const std::vector<double>& vs, double L,
                          std::size_t n = 200001) {
  double best = INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(n - 1);
    double f = -INFINITY;
    for (std::size_t j = 0; j < xs.size(); ++j) f = std::max(f, vs[j] - L * std::abs(x - xs[j]));
    best = std::min(best, f);
  }
  return best;
}

TEST(ProposeTest, PiyavskiiInitialQueries) {
  const std::vector<double> none;
  EXPECT_EQ(propose(ps(8), {none, none}, 1), 0.0);
  const std::vector<double> q{0.0};
  const std::vector<double> v{0.3};
  EXPECT_EQ(propose(ps(8), {q, v}, 2), 1.0);
}

TEST(ProposeTest, PiyavskiiSymmetricPair) {
  const std::vector<double> q{0.0, 1.0};
  const std::vector<double> v{0.5, 0.5};
  EXPECT_DOUBLE_EQ(propose(ps(8), {q, v}, 3), 0.5);
}

TEST(ProposeTest, UniformGridFormula) {
  const std::vector<double> q{0.125};
  const std::vector<double> v{1.0};
  EXPECT_DOUBLE_EQ(propose(grid(4), {q, v}, 2), 0.375);
}

TEST(ProposeTest, Errors) {
  const std::vector<double> none;
  EXPECT_THROW(propose(ps(8), {none, none}, 2), ContractError);
  const std::vector<double> q{0.0, 1.0};
  const std::vector<double> v{0.0, 0.0};
  EXPECT_THROW(propose(ps(2), {q, v}, 3), ContractError);
  EXPECT_THROW(propose(ps(0), {none, none}, 1), DomainError);
}

TEST(EnvelopeMinTest, Examples) {
  const std::vector<double> q{0.0, 1.0};
  std::vector<double> v{0.5, 0.5};
  auto m = envelope_min({q, v}, 1.0);
  EXPECT_DOUBLE_EQ(m.x, 0.5);
  EXPECT_DOUBLE_EQ(m.value, 0.0);

  v = {0.0, 1.0};
  m = envelope_min({q, v}, 1.0);
  EXPECT_DOUBLE_EQ(m.x, 0.0);
  EXPECT_DOUBLE_EQ(m.value, 0.0);

  for (double L : {0.1, 1.0, 7.5}) {
    v = {0.8, 0.8};
    EXPECT_NEAR(envelope_min({q, v}, L).value, 0.8 - L / 2.0, 1e-15);
  }
}

TEST(EnvelopeMinTest, Errors) {
  const std::vector<double> q{0.0, 1.0};
  const std::vector<double> v{0.0, 0.0};
  EXPECT_THROW(envelope_min({q, v}, 0.0), DomainError);
  const std::vector<double> q1{0.4, 0.4};
  EXPECT_THROW(envelope_min({q1, v}, 1.0), ContractError);
}

TEST(EnvelopeMinTest, MatchesDenseSampling) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 8;
    const double L = 0.2 + 3.0 * u(rng);
    std::vector<double> xs{0.0, 1.0};
    while (xs.size() < n) xs.push_back(u(rng));
    std::vector<double> vs;
    for (std::size_t k = 0; k < n; ++k) vs.push_back(u(rng));  // arbitrary, not L-consistent
    const auto m = envelope_min({xs, vs}, L);
    EXPECT_NEAR(m.value, envelope_value({xs, vs}, L, m.x), 1e-12);
    const double brute = brute_envelope_min(xs, vs, L, 20001);
    EXPECT_LE(m.value, brute + 1e-12);
    EXPECT_GE(m.value, brute - L / 20000.0 - 1e-12);
  }
}

// F_t <= f on every 1D catalog entry, with and without noise; F_t is
// nondecreasing in t for exact observations.
TEST(EnvelopeTest, ValidAndMonotoneOnCatalog) {
  for (const auto& e : catalog()) {
    if (e.objective.dimension() != 1) continue;
    const double L = e.objective.lipschitz_constant();
    const auto f = e.axis_profiles[0].f;
    for (double eps : {0.0, 0.05}) {
      const auto noise = eps > 0.0 ? make_noise(NoisePattern::kAlternating, eps) : NoiseSchedule{};
      const auto tr = run_univariate(ps(64, L), f, noise);
      std::vector<double> prev(1025, -INFINITY);
      for (std::size_t t = 1; t <= tr.queries.size(); ++t) {
        const UnivariateHistory h{std::span(tr.queries).first(t), std::span(tr.observed).first(t)};
        for (std::size_t k = 0; k < 1025; ++k) {
          const double x = static_cast<double>(k) / 1024.0;
          const double F = envelope_value(h, L, x);
          ASSERT_LE(F, f(x) + eps + 1e-9) << e.name << " t=" << t << " x=" << x;
          ASSERT_GE(F, prev[k]);
          prev[k] = F;
        }
      }
    }
  }
}

TEST(EnvelopeTest, CsvHasHeaderAndPoints) {
  const std::vector<double> q{0.0, 1.0};
  const std::vector<double> v{0.5, 0.5};
  std::ostringstream out;
  write_envelope_csv(out, {q, v}, 1.0, 5);
  EXPECT_EQ(out.str(), "x,F(x)\n0,0.5\n0.25,0.25\n0.5,0\n0.75,0.25\n1,0.5\n");
}

TEST(UniformGridTest, IgnoresObservationsSoNoiseIsHarmless) {
  const auto f = objectives::vee_profile(0.3);
  for (std::size_t T : {1u, 4u, 33u}) {
    const auto est = measure_robustness(grid(T), f, RobustnessProbe{});
    EXPECT_DOUBLE_EQ(est.profile.alpha, 0.0);
    EXPECT_DOUBLE_EQ(est.profile.beta, 1.0);
  }
}

TEST(UniformGridTest, RegretMatchesIntegralWithinMidpointError) {
  // Midpoint rule on an L-Lipschitz f: |mean f(x_t) - integral f| <= L / (4T).
  // For |x - c| the integral is (c^2 + (1-c)^2) / 2.
  for (double c : {0.5, 0.3, 0.0}) {
    const double integral = (c * c + (1 - c) * (1 - c)) / 2.0;
    for (std::size_t T = 1; T <= 200; ++T) {
      const auto tr = run_univariate(grid(T), objectives::vee_profile(c).f);
      double mean = 0.0;
      double best = INFINITY;
      for (double v : tr.values) {
        mean += v / static_cast<double>(T);
        best = std::min(best, v);
      }
      ASSERT_LE(std::abs(mean - integral), 1.0 / (4.0 * T) + 1e-12) << "T=" << T;
      ASSERT_LE(best, 1.0 / (2.0 * T) + 1e-12);
    }
  }
}

TEST(RobustnessTest, ZeroEpsilonFlagsUndefined) {
  const auto est = measure_robustness(ps(16), objectives::vee_profile(0.3), RobustnessProbe{0.0});
  EXPECT_TRUE(est.coefficients_undefined);
  EXPECT_EQ(est.profile.alpha, 0.0);
  EXPECT_EQ(est.profile.beta, 1.0);
  EXPECT_TRUE(est.trials.empty());
}

// Queries 0, 1, then 0.3 forever: clean regret (0.3 + 0.7) / 32.
TEST(RobustnessTest, PiyavskiiOnSkewVeeFrozen) {
  const auto est = measure_robustness(ps(32), objectives::vee_profile(0.3), RobustnessProbe{0.05});
  EXPECT_FALSE(est.coefficients_undefined);
  EXPECT_TRUE(std::isfinite(est.profile.alpha));
  EXPECT_TRUE(est.profile.admissible());
  EXPECT_GE(est.profile.beta, est.profile.alpha);
  EXPECT_NEAR(est.profile.base_regret, 0.03125, 1e-12);
  EXPECT_NEAR(est.profile.alpha, 0.093749999999999944, 1e-12);
  EXPECT_NEAR(est.profile.beta, 1.0, 1e-12);
}

}  // namespace
}  // namespace dimcurse
