#include <gtest/gtest.h>

#include <chrono>

#include "test_util.hpp"

using namespace qcensus;
using namespace qtest;

TEST(EnumerateZeros, UnitBoxCount)
{
  auto f = split4();
  int want = 0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        for (int d = -1; d <= 1; ++d) want += a * b + c * d == 0;
  EXPECT_EQ(want, 33);
  for (auto s : {EnumStrategy::generic_backtrack, EnumStrategy::split_divisor, EnumStrategy::automatic})
    EXPECT_EQ(enumerate_zeros(f, 1, s).points.size(), 33u) << strategy_name(s);
}

TEST(EnumerateZeros, DefiniteFormHasOnlyOrigin)
{
  auto f = forms::diagonal({2, 4, 2, 6});
  for (i64 R : {1, 7, 40}) {
    auto z = enumerate_zeros(f, R);
    ASSERT_EQ(z.points.size(), 1u);
    EXPECT_EQ(z.points[0], IntVec(4, 0));
  }
}

TEST(EnumerateZeros, PointsAreZerosAndUnique)
{
  for (const auto& [name, f] : battery()) {
    auto z = enumerate_zeros(f, f.n() == 6 ? 4 : 12);
    std::set<IntVec> seen(z.points.begin(), z.points.end());
    EXPECT_EQ(seen.size(), z.points.size()) << name;
    EXPECT_TRUE(seen.count(IntVec(f.n(), 0))) << name;
    EXPECT_TRUE(std::is_sorted(z.points.begin(), z.points.end()));
    for (const auto& p : z.points) EXPECT_EQ(evaluate(f, p), 0) << name;
  }
}

TEST(EnumerateZeros, BacktrackIsComplete)
{
  // compare against plain enumeration of the box
  auto f = mixed4();
  const i64 R = 6;
  std::size_t want = 0;
  IntVec x(4, -R);
  while (true) {
    want += evaluate(f, x) == 0;
    int t = 3;
    while (t >= 0 && ++x[t] > R) x[t--] = -R;
    if (t < 0) break;
  }
  EXPECT_EQ(enumerate_zeros(f, R, EnumStrategy::generic_backtrack).points.size(), want);
  EXPECT_EQ(enumerate_zeros(f, R, EnumStrategy::split_divisor).points.size(), want);
}

TEST(EnumerateZeros, StrategiesAgree)
{
  for (i64 R : {20, 50}) {
    auto f = split4();
    EXPECT_EQ(enumerate_zeros(f, R, EnumStrategy::generic_backtrack).points, enumerate_zeros(f, R, EnumStrategy::split_divisor).points) << R;
  }
  auto g = split6();
  EXPECT_EQ(enumerate_zeros(g, 15, EnumStrategy::generic_backtrack).points, enumerate_zeros(g, 15, EnumStrategy::split_divisor).points);
}

TEST(EnumerateZeros, SplitDivisorNeedsHyperbolicPair)
{
  EXPECT_THROW(enumerate_zeros(sum_of_squares4(), 3, EnumStrategy::split_divisor), UnsupportedError);
}

TEST(EnumerateZeros, BudgetExceeded)
{
  try {
    enumerate_zeros(split4(), 30, EnumStrategy::automatic, 100);
    FAIL();
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("100"), std::string::npos);
  }
}

TEST(EnumerateZeros, GrowthExponent)
{
  auto f = split4();
  std::vector<double> R, N;
  for (i64 r : {8, 16, 32, 64}) {
    R.push_back(static_cast<double>(r));
    N.push_back(static_cast<double>(enumerate_zeros(f, r).points.size()));
  }
  auto fit = fit_log_slope(R, N);
  EXPECT_NEAR(fit.slope, 2, 0.3);
}

TEST(EnumerateDualZeros, Examples)
{
  for (const auto& [name, f] : battery()) {
    auto d = enumerate_dual_zeros(f, 6);
    EXPECT_TRUE(std::binary_search(d.points.begin(), d.points.end(), IntVec(f.n(), 0))) << name;
    for (const auto& p : d.points) EXPECT_EQ(dual_evaluate(f, p), 0) << name;
  }
  EXPECT_EQ(enumerate_dual_zeros(split4(), 10).points, enumerate_zeros(split4(), 10).points);
  EXPECT_EQ(enumerate_dual_zeros(sum_of_squares4(), 10).points, enumerate_zeros(sum_of_squares4(), 10).points);
}

TEST(SmoothedCount, SmallXIsOrigin)
{
  auto f = split4();
  auto c = smoothed_count(f, ArchSpec::identity(4), 0.3);
  EXPECT_NEAR(c.value, 1, 1e-8);
}

TEST(SmoothedCount, Monotone)
{
  for (const auto& [name, f] : battery()) {
    if (f.n() != 4) continue;
    double prev = 0;
    for (double X : {10.0, 20.0, 40.0}) {
      double v = smoothed_count(f, ArchSpec::identity(4), X).value;
      EXPECT_GT(v, prev) << name;
      prev = v;
    }
  }
}

TEST(SmoothedCount, StrategiesAgreeAtFifty)
{
  auto f = split4();
  auto spec = ArchSpec::identity(4);
  auto a = smoothed_count(f, spec, 50, CountMethod::enumerate);
  auto b = smoothed_count(f, spec, 50, CountMethod::block_convolution);
  EXPECT_NEAR(a.value, b.value, 1e-8 * a.value);
  EXPECT_LE(a.truncation_error, 1e-8 * std::max(1.0, a.value));
  EXPECT_EQ(a.radius, b.radius);
}

TEST(SmoothedCount, StrategiesAgreeOnBattery)
{
  for (const auto& [name, f] : battery()) {
    auto spec = ArchSpec::identity(f.n());
    const double X = f.n() == 6 ? 3 : 8;
    auto a = smoothed_count(f, spec, X, CountMethod::enumerate);
    auto b = smoothed_count(f, spec, X, CountMethod::block_convolution);
    EXPECT_NEAR(a.value, b.value, 1e-9 * a.value) << name;
  }
}

TEST(SmoothedCount, UnimodularInvariance)
{
  std::mt19937_64 rng(19);
  for (const auto& [name, f] : battery()) {
    if (f.n() != 4) continue;
    auto spec = ArchSpec::identity(4);
    for (int i = 0; i < 3; ++i) {
      auto U = random_unimodular(rng, 4, 4);
      auto g = f.transformed(U);
      Eigen::MatrixXd M = to_matrix(U);
      ArchSpec s2 = spec;
      s2.A = M.transpose() * spec.A * M;
      const double X = 2.5;
      double a = smoothed_count(f, spec, X).value;
      double b = smoothed_count(g, s2, X, CountMethod::enumerate).value;
      EXPECT_NEAR(a, b, 1e-8 * a) << name;
    }
  }
}

TEST(SmoothedCount, RejectsBadInput)
{
  auto f = split4();
  EXPECT_THROW(smoothed_count(f, ArchSpec::identity(4), -1), ArgumentError);
  EXPECT_THROW(smoothed_count(f, ArchSpec::identity(6), 5), ArgumentError);
  ArchSpec skew = ArchSpec::identity(4);
  skew.A(0, 2) = skew.A(2, 0) = 0.1;
  EXPECT_THROW(smoothed_count(f, skew, 5, CountMethod::block_convolution), UnsupportedError);
  EXPECT_NO_THROW(smoothed_count(f, skew, 3));
}
