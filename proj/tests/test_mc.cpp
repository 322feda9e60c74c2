#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cylevy/mc/estimators.hpp"
#include "cylevy/mc/parallel.hpp"
#include "cylevy/mc/rng.hpp"

using namespace cylevy;
using namespace cylevy::mc;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngStream, SameSeedReplaysBitExactly) {
  auto a = make_streams(42, 3);
  auto b = make_streams(42, 3);
  for (std::size_t s = 0; s < 3; ++s)
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a[s](), b[s]());
  EXPECT_EQ(a[1].counter(), 500u);

  RngStream r(7, 2);
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 17; ++i) first.push_back(r());
  r.reset();
  for (int i = 0; i < 17; ++i) EXPECT_EQ(r(), first[i]);
}

TEST(RngStream, SingleStreamEqualsDirectSeeding) {
  auto streams = make_streams(99, 1);
  ASSERT_EQ(streams.size(), 1u);
  RngStream direct(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(streams[0](), direct());
}

TEST(RngStream, DistinctStreamsAreUncorrelated) {
  RngStream s0(2024, 0), s1(2024, 1);
  const int n = 1'000'000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s0.uniform_open(), y = s1.uniform_open();
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double r = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  EXPECT_LT(std::abs(r), 0.005);
  EXPECT_NEAR(sx / n, 0.5, 0.002);
}

TEST(RngStream, UniformOpenNeverHitsEndpoints) {
  RngStream r(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(EstimatePMoment, Constants) {
  std::vector<double> twos(50, 2.0);
  const auto e = estimate_p_moment(twos, 2.0);
  EXPECT_DOUBLE_EQ(e.value, 4.0);
  EXPECT_EQ(e.standard_error, 0.0);
  EXPECT_EQ(e.n_samples, 50u);
}

TEST(EstimatePMoment, RademacherHasUnitMoments) {
  RngStream r(3);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = (r() >> 63) ? 1.0 : -1.0;
  for (double p : {0.5, 1.0, 1.7, 2.0}) {
    const auto e = estimate_p_moment(xs, p);
    EXPECT_DOUBLE_EQ(e.value, 1.0);
    EXPECT_EQ(e.standard_error, 0.0);
  }
}

TEST(EstimatePMoment, HalfNormalMean) {
  RngStream r(12345);
  std::normal_distribution<double> n01;
  std::vector<double> xs(200000);
  for (auto& x : xs) x = n01(r);
  const auto e = estimate_p_moment(xs, 1.0);
  EXPECT_NEAR(e.value, std::sqrt(2.0 / std::numbers::pi), 3.0 * e.standard_error);
}

TEST(EstimatePMoment, RejectsEmptyInput) {
  std::vector<double> none;
  EXPECT_THROW(estimate_p_moment(none, 1.0), ConfigError);
}

TEST(EstimatePMoment, StandardErrorShrinksLikeInverseRoot) {
  RngStream r(5);
  std::normal_distribution<double> n01;
  std::vector<double> xs(400000);
  for (auto& x : xs) x = n01(r);
  const auto small = estimate_p_moment(std::span<const double>(xs.data(), 10000), 1.5);
  const auto big = estimate_p_moment(std::span<const double>(xs.data(), 400000), 1.5);
  EXPECT_NEAR(small.standard_error / big.standard_error, std::sqrt(40.0), 0.1 * std::sqrt(40.0));
}

TEST(MomentAccumulator, MergeMatchesSinglePass) {
  RngStream r(8);
  std::vector<double> xs(10001);
  for (auto& x : xs) x = r.uniform_open() * 10.0 - 3.0;
  MomentAccumulator all;
  for (double x : xs) all.add(x);
  for (std::size_t chunks : {2u, 3u, 7u, 64u}) {
    std::vector<MomentAccumulator> parts(chunks);
    for (std::size_t i = 0; i < xs.size(); ++i) parts[i * chunks / xs.size()].add(xs[i]);
    MomentAccumulator merged;
    for (const auto& part : parts) merged.merge(part);
    EXPECT_EQ(merged.count(), all.count());
    EXPECT_NEAR(merged.mean(), all.mean(), 1e-13 * std::abs(all.mean()));
    EXPECT_NEAR(merged.sample_variance(), all.sample_variance(), 1e-12 * all.sample_variance());
  }
}

TEST(ParallelMap, ResultIndependentOfWorkerCount) {
  const auto run = [](unsigned workers) {
    return parallel_map(1000, workers, [](std::size_t i) {
      RngStream r(77, i);
      return r.uniform_open();
    });
  };
  const auto one = run(1);
  EXPECT_EQ(one, run(3));
  EXPECT_EQ(one, run(8));
}

TEST(FitLogLog, ExactPowers) {
  std::vector<std::pair<double, double>> half, third;
  for (double n : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    half.emplace_back(n, std::sqrt(n));
    third.emplace_back(n, 7.5 * std::cbrt(n));
  }
  const auto f = fit_loglog_slope(half);
  EXPECT_NEAR(f.slope, 0.5, 1e-12);
  EXPECT_NEAR(f.max_residual, 0.0, 1e-12);
  const auto g = fit_loglog_slope(third);
  EXPECT_NEAR(g.slope, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(std::exp(g.intercept), 7.5, 1e-10);
}

TEST(FitLogLog, Errors) {
  std::vector<std::pair<double, double>> two{{1, 1}, {2, 2}};
  EXPECT_THROW(fit_loglog_slope(two), ConfigError);
  std::vector<std::pair<double, double>> neg{{1, 1}, {2, -2}, {3, 3}};
  EXPECT_THROW(fit_loglog_slope(neg), ConfigError);
  std::vector<std::pair<double, double>> unsorted{{1, 1}, {3, 2}, {2, 3}};
  EXPECT_THROW(fit_loglog_slope(unsorted), ConfigError);
}

TEST(BoundVerdict, PolicyArithmetic) {
  MomentEstimate e{1.0, 0.1, 100, 2.0};
  EXPECT_TRUE(make_verdict(e, 0.71).pass);   // 1.0 <= 0.71 + 0.3
  EXPECT_FALSE(make_verdict(e, 0.69).pass);  // 1.0 >  0.69 + 0.3
  EXPECT_TRUE(make_verdict({0.0, 0.0, 1, 1.0}, 0.0).pass);
}

TEST(KsTwoSample, SameLawAcceptedShiftRejected) {
  RngStream r(12);
  std::normal_distribution<double> n01;
  std::vector<double> a(20000), b(20000), c(20000);
  for (auto& x : a) x = n01(r);
  for (auto& x : b) x = n01(r);
  for (auto& x : c) x = n01(r) + 0.1;
  EXPECT_GT(ks_two_sample(a, b).p_value, 1e-3);
  EXPECT_LT(ks_two_sample(a, c).p_value, 1e-3);
}
