#include "mann/scalar_map.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

namespace mann {
namespace {

// Plain bisection on cos(x) - x, independent of the library's bisection.
double cosine_root_oracle() {
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (std::cos(mid) - mid > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(BenchmarkMapTest, BranchValues) {
  EXPECT_DOUBLE_EQ(eval_benchmark_map(0.0), 0.5);
  EXPECT_NEAR(eval_benchmark_map(1.0 / 3.0), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(eval_benchmark_map(0.5), 1.0);
  EXPECT_DOUBLE_EQ(eval_benchmark_map(1.0), 0.5);
}

TEST(BenchmarkMapTest, AdjacentBranchesAgreeAtBreakpoints) {
  EXPECT_DOUBLE_EQ(2.0 * (0.25 - 0.25), 4.0 * (0.25 - 0.25));
  EXPECT_DOUBLE_EQ(4.0 * (0.5 - 0.25), 4.0 * (0.75 - 0.5));
  EXPECT_DOUBLE_EQ(4.0 * (0.75 - 0.75), 2.0 * (0.75 - 0.75));
  EXPECT_DOUBLE_EQ(eval_benchmark_map(0.25), 0.0);
  EXPECT_DOUBLE_EQ(eval_benchmark_map(0.5), 1.0);
  EXPECT_DOUBLE_EQ(eval_benchmark_map(0.75), 0.0);
}

TEST(BenchmarkMapTest, RejectsOutsideUnitInterval) {
  EXPECT_THROW(eval_benchmark_map(-1e-9), DomainError);
  EXPECT_THROW(eval_benchmark_map(1.0 + 1e-9), DomainError);
  EXPECT_THROW(eval_benchmark_map(std::nan("")), DomainError);
  EXPECT_THROW(benchmark_map()(2.0), DomainError);
}

TEST(BenchmarkMapTest, RangeConfinementAndLipschitz) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = u(gen);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double y = eval_benchmark_map(xs[i]);
    ASSERT_GE(y, 0.0);
    ASSERT_LE(y, 1.0);
    if (i > 0) {
      const double dy = std::abs(y - eval_benchmark_map(xs[i - 1]));
      ASSERT_LE(dy, 4.0 * (xs[i] - xs[i - 1]) + 1e-15);
    }
  }
}

TEST(BenchmarkMapTest, KnotInterpolationMatchesBranchFormula) {
  const ScalarMap bench = benchmark_map();
  const ScalarMap interp = piecewise_linear_map(std::get<PiecewiseLinear>(bench.kind()).knots);
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    EXPECT_NEAR(bench(x), interp(x), 1e-14) << x;
  }
}

TEST(ResidualTest, Examples) {
  const ScalarMap bench = benchmark_map();
  EXPECT_NEAR(residual(bench, 1.0 / 6.0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(residual(bench, 0.0), 0.5);
  EXPECT_EQ(residual(identity_map(), 0.7), 0.0);
  EXPECT_THROW(residual(bench, 1.5), DomainError);
}

TEST(ResidualTest, SignChangeAcrossEachFixedPoint) {
  const ScalarMap bench = benchmark_map();
  for (double p : {1.0 / 6.0, 1.0 / 3.0, 3.0 / 5.0}) {
    EXPECT_LT(residual(bench, p - 1e-3) * residual(bench, p + 1e-3), 0.0) << p;
  }
}

TEST(EnumerateFixedPointsTest, BenchmarkHasThreeFixedPoints) {
  const auto roots = enumerate_fixed_points(benchmark_map());
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(roots[1], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(roots[2], 3.0 / 5.0, 1e-15);
  for (double r : roots) EXPECT_LE(std::abs(residual(benchmark_map(), r)), 1e-12);
}

TEST(EnumerateFixedPointsTest, ConstantAndDecreasingLine) {
  const auto c = enumerate_fixed_points(constant_map(0.3));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0], 0.3, 1e-15);

  const auto tent = enumerate_fixed_points(piecewise_linear_map({{0.0, 1.0}, {1.0, 0.0}}));
  ASSERT_EQ(tent.size(), 1u);
  EXPECT_DOUBLE_EQ(tent[0], 0.5);
}

TEST(EnumerateFixedPointsTest, RootAtKnotIsDeduplicated) {
  // Fixed point exactly at the shared knot x = 0.5.
  const auto roots =
      enumerate_fixed_points(piecewise_linear_map({{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.0}}));
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_DOUBLE_EQ(roots[0], 0.5);
}

TEST(EnumerateFixedPointsTest, DiagonalSegmentIsReported) {
  const ScalarMap m = piecewise_linear_map({{0.0, 0.2}, {0.2, 0.2}, {0.6, 0.6}, {1.0, 0.6}});
  EXPECT_THROW(enumerate_fixed_points(m), DegenerateSegmentError);
  EXPECT_THROW(enumerate_fixed_points(identity_map()), std::invalid_argument);
}

TEST(PiecewiseLinearTest, KnotValidation) {
  EXPECT_THROW(piecewise_linear_map({{0.0, 0.5}}), std::invalid_argument);
  EXPECT_THROW(piecewise_linear_map({{0.1, 0.5}, {1.0, 0.5}}), std::invalid_argument);
  EXPECT_THROW(piecewise_linear_map({{0.0, 0.5}, {0.9, 0.5}}), std::invalid_argument);
  EXPECT_THROW(piecewise_linear_map({{0.0, 0.5}, {0.5, 0.2}, {0.5, 0.3}, {1.0, 0.5}}),
               std::invalid_argument);
  EXPECT_THROW(piecewise_linear_map({{0.0, 1.5}, {1.0, 0.5}}), std::invalid_argument);
}

TEST(UniqueFixedPointMapTest, CosineFixture) {
  const ScalarMap m = unique_fixed_point_map();
  EXPECT_DOUBLE_EQ(m(0.0), 1.0);
  ASSERT_TRUE(m.known_fixed_points());
  ASSERT_EQ(m.known_fixed_points()->size(), 1u);
  const double p = m.known_fixed_points()->front();
  EXPECT_NEAR(p, cosine_root_oracle(), 1e-9);
  EXPECT_NEAR(p, 0.7390851, 1e-7);
  EXPECT_LE(std::abs(m(p) - p), 1e-9);
}

TEST(ScalarMapTest, RejectsWrongKnownFixedPoint) {
  EXPECT_THROW(ScalarMap([](double x) { return x * x; }, Analytic{"square"},
                         std::vector<double>{0.5}),
               std::invalid_argument);
}

TEST(KnotFileTest, LoadsAndResolves) {
  const auto path = std::filesystem::temp_directory_path() / "mann_knots_test.txt";
  {
    std::ofstream out(path);
    out << "# tent\n0 1\n\n1 0\n";
  }
  const ScalarMap m = resolve_map(path.string());
  EXPECT_DOUBLE_EQ(m(0.25), 0.75);
  EXPECT_EQ(enumerate_fixed_points(m), std::vector<double>{0.5});

  {
    std::ofstream out(path);
    out << "0 1\n0.5 oops\n1 0\n";
  }
  try {
    load_knot_file(path);
    FAIL() << "expected a parse error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST(RegistryTest, Names) {
  EXPECT_DOUBLE_EQ(resolve_map("paper-sec4")(0.0), 0.5);
  EXPECT_DOUBLE_EQ(resolve_map("cosine")(0.0), 1.0);
  EXPECT_DOUBLE_EQ(resolve_map("constant:0.25")(0.9), 0.25);
  EXPECT_THROW(resolve_map("constant:abc"), std::invalid_argument);
  EXPECT_THROW(resolve_map("constant:1.5"), DomainError);
  EXPECT_THROW(resolve_map("no-such-map"), std::invalid_argument);
}

}  // namespace
}  // namespace mann
