#include "dimcurse/bench_oracle.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"

namespace dimcurse {
namespace {

TEST(GridOracleTest, VeeAtResolutionTwo) {
  const auto e = *find_objective("vee");
  const auto m = grid_minimum(e.objective, 2);
  EXPECT_DOUBLE_EQ(m.value, 0.25);
  EXPECT_DOUBLE_EQ(m.error, 0.25);
  EXPECT_LE(m.value - m.error, 0.0);
}

TEST(GridOracleTest, ConstantFunction) {
  ObjectiveSpec c("c", 2, [](std::span<const double>) { return 3.5; }, 0.0);
  for (std::size_t r : {1u, 3u, 17u}) EXPECT_EQ(grid_minimum(c, r).value, 3.5);
}

TEST(GridOracleTest, ConeTwoAtSixtyFourFrozen) {
  // Centers (k + 1/2)/64 sit 1/128 from 0.25 and 0.75 on each axis.
  const auto e = *find_objective("cone_2");
  const auto m = grid_minimum(e.objective, 64);
  EXPECT_DOUBLE_EQ(m.value, 2.0 / 128.0);
  EXPECT_DOUBLE_EQ(m.error, 2.0 / 128.0);
}

TEST(GridOracleTest, RippleFineGridFrozen) {
  const auto e = *find_objective("ripple");
  const auto m = grid_minimum(e.objective, 1u << 16);
  // Nearest centers to 0.5 are 0.5 -+ 2^-17; f there = 0.5 h + 0.125 (1 - cos 4 pi h).
  const double h = std::ldexp(1.0, -17);
  const double expected = 0.5 * h + 0.125 * (1.0 - std::cos(4.0 * std::numbers::pi * h));
  EXPECT_NEAR(m.value, expected, 1e-15);
  EXPECT_EQ(m.value, 3.8152717522083046e-06);
  EXPECT_LE(m.value - m.error, 0.0);
}

TEST(GridOracleTest, AnalyticMinimumInsideErrorInterval) {
  for (const auto& e : catalog()) {
    const std::size_t res = e.objective.dimension() == 1 ? 1024 : e.objective.dimension() == 2 ? 128 : 32;
    const auto m = grid_minimum(e.objective, res);
    ASSERT_TRUE(e.analytic_minimum.has_value());
    EXPECT_LE(m.value - m.error, *e.analytic_minimum + 1e-15) << e.name;
    EXPECT_GE(m.value, *e.analytic_minimum) << e.name;
    EXPECT_DOUBLE_EQ(e.objective(*e.argmin), *e.analytic_minimum) << e.name;
  }
}

// Cell-center grids are nested under r -> 3r (every center of r is a center of
// 3r), so refinement can only lower the estimate.
TEST(GridOracleTest, TriadicRefinementIsMonotone) {
  for (const auto& e : catalog()) {
    if (e.objective.dimension() > 2) continue;
    double prev = INFINITY;
    for (std::size_t r = 1; r <= 243; r *= 3) {
      const double v = grid_minimum(e.objective, r).value;
      EXPECT_LE(v, prev) << e.name << " r=" << r;
      prev = v;
    }
  }
}

TEST(GridOracleTest, DoublingIsNotNested) {
  const auto f = objectives::vee("v", 0.25).objective;
  EXPECT_EQ(grid_minimum(f, 2).value, 0.0);
  EXPECT_EQ(grid_minimum(f, 4).value, 0.125);
}

TEST(ConditionalOracleTest, ConeTwoPrefixes) {
  const auto e = *find_objective("cone_2");
  const auto exact = make_exact_oracle(e);
  const double zero = 0.0;
  const double one = 1.0;
  EXPECT_DOUBLE_EQ(exact(std::span(&zero, 1)).value, 0.25);
  EXPECT_DOUBLE_EQ(exact(std::span(&one, 1)).value, 0.75);
  // 1D enumeration cross-check: centers (k + 1/2)/512 include 0.75 + 1/1024.
  const auto g = conditional_minimum(e.objective, std::span(&zero, 1), 512);
  EXPECT_NEAR(g.value, 0.25 + 1.0 / 1024.0, 1e-15);
  EXPECT_LE(g.value - g.error, 0.25);

  const Point argmin{0.25};
  EXPECT_EQ(exact(argmin).value, 0.0);
}

TEST(ConditionalOracleTest, EmptyPrefixIsGridMinimum) {
  const auto e = *find_objective("pyramid_2");
  EXPECT_EQ(conditional_minimum(e.objective, {}, 40).value, grid_minimum(e.objective, 40).value);
}

TEST(ConditionalOracleTest, ExactMatchesFineGrid) {
  for (const auto& e : catalog()) {
    const std::size_t d = e.objective.dimension();
    if (d < 2) continue;
    const auto exact = make_exact_oracle(e);
    for (double y : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      const Point p(d - 1, y);
      for (std::size_t k = 1; k < d; ++k) {
        const std::span<const double> prefix(p.data(), k);
        const double ex = exact(prefix).value;
        const auto g = conditional_minimum(e.objective, prefix, d - k == 1 ? 4096 : 64);
        EXPECT_LE(g.value - g.error, ex + 1e-12) << e.name;
        EXPECT_GE(g.value, ex - 1e-12) << e.name;
      }
    }
  }
}

TEST(ConditionalOracleTest, Errors) {
  const auto e = *find_objective("cone_2");
  const Point full{0.1, 0.2};
  EXPECT_THROW(conditional_minimum(e.objective, full, 4), ContractError);
  EXPECT_THROW(grid_minimum(e.objective, 0), DomainError);
  EXPECT_THROW(grid_minimum(e.objective, 4000), SizeError);
  EXPECT_THROW(make_exact_oracle(CatalogEntry{"x", e.objective, {}, {}, {}, {}, {}}), ContractError);
}

TEST(CatalogTest, LookupAndShape) {
  EXPECT_FALSE(find_objective("nope").has_value());
  for (const auto& e : catalog()) {
    EXPECT_EQ(e.axis_profiles.size(), e.objective.dimension()) << e.name;
    EXPECT_TRUE(e.exact_conditional_minimum) << e.name;
  }
}

TEST(OracleCacheTest, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "dimcurse_cache_test.json";
  std::filesystem::remove(path);
  const auto e = *find_objective("cone_2");
  {
    OracleCache cache(path);
    EXPECT_EQ(cache.size(), 0u);
    const auto v = grid_minimum_cached(cache, e.objective, 64);
    EXPECT_EQ(cache.size(), 1u);
    cache.save();
    EXPECT_EQ(v.value, grid_minimum(e.objective, 64).value);
  }
  OracleCache again(path);
  const auto hit = again.get("cone_2", 64);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->value, 2.0 / 128.0);
  EXPECT_EQ(hit->error, 2.0 / 128.0);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace dimcurse
