#include <gtest/gtest.h>

#include <cmath>

#include "aoisched/aoi.hpp"
#include "aoisched/rng.hpp"

namespace aoisched {
namespace {

std::vector<Age> ages_of(const AoiLedger& l) { return {l.ages().begin(), l.ages().end()}; }

TEST(AoiLedger, StartsAtOne) {
  AoiLedger l(3);
  EXPECT_EQ(ages_of(l), (std::vector<Age>{1, 1, 1}));
  EXPECT_EQ(l.round(), 0);
}

TEST(AoiLedger, UpdateExamples) {
  AoiLedger full(2);
  full.update_set(std::vector<int>{0, 1});
  EXPECT_EQ(ages_of(full), (std::vector<Age>{1, 1}));

  AoiLedger none(2);
  none.update_set(std::vector<int>{});
  EXPECT_EQ(ages_of(none), (std::vector<Age>{2, 2}));

  AoiLedger mixed(2);
  mixed.update_set(std::vector<int>{});
  mixed.update_set(std::vector<int>{1});  // ages (3, 1)
  ASSERT_EQ(ages_of(mixed), (std::vector<Age>{3, 1}));
  mixed.update_set(std::vector<int>{0});
  EXPECT_EQ(ages_of(mixed), (std::vector<Age>{1, 2}));
  EXPECT_EQ(mixed.round(), 3);
}

TEST(AoiLedger, VarianceTraceAndTotals) {
  AoiLedger l(2);
  l.update(std::vector<std::uint8_t>{1, 0});  // (1, 2)
  l.update(std::vector<std::uint8_t>{1, 0});  // (1, 3)
  ASSERT_EQ(l.variance_trace().size(), 2u);
  EXPECT_DOUBLE_EQ(l.variance_trace()[0], 0.5);
  EXPECT_DOUBLE_EQ(l.variance_trace()[1], 2.0);
  EXPECT_DOUBLE_EQ(l.cumulative_variance(), 2.5);
  EXPECT_EQ(l.age_total(), 4);
  EXPECT_EQ(l.cumulative_age_sum(), 7);
  EXPECT_THROW(l.update(std::vector<std::uint8_t>{1}), std::invalid_argument);
  EXPECT_THROW(l.update_set(std::vector<int>{2}), std::out_of_range);
}

TEST(AgeVariance, SumOfSquaredDeviations) {
  EXPECT_DOUBLE_EQ(age_variance(std::vector<Age>{1, 3}), 2.0);
  EXPECT_DOUBLE_EQ(age_variance(std::vector<Age>{4, 4, 4}), 0.0);
}

TEST(AoiRegret, Examples) {
  const AgeTrace same{{1, 2}, {2, 1}};
  EXPECT_EQ(aoi_regret(same, same), (std::vector<Age>{0, 0}));
  AgeTrace policy(5, {2, 2}), oracle(5, {1, 1});
  const auto r = aoi_regret(policy, oracle);
  for (std::size_t t = 0; t < r.size(); ++t) EXPECT_EQ(r[t], 2 * static_cast<Age>(t + 1));
  EXPECT_THROW(aoi_regret(policy, AgeTrace(4, {1, 1})), std::invalid_argument);
  EXPECT_THROW(aoi_regret(policy, AgeTrace(5, {1})), std::invalid_argument);
}

TEST(RegretAccumulator, Telescopes) {
  RegretAccumulator acc;
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto p = static_cast<Age>(rng.index(10));
    const auto o = static_cast<Age>(rng.index(10));
    const Age before = acc.final_regret();
    acc.record(p, o);
    EXPECT_EQ(acc.final_regret() - before, p - o);
  }
  EXPECT_EQ(acc.curve().size(), 200u);
}

TEST(ExpectedAoiStationary, ClosedForm) {
  EXPECT_DOUBLE_EQ(expected_aoi_stationary(1.0), 0.0);
  EXPECT_DOUBLE_EQ(expected_aoi_stationary(0.5), 1.0);
  EXPECT_DOUBLE_EQ(expected_aoi_stationary(0.2), 4.0);
  EXPECT_THROW(expected_aoi_stationary(0.0), std::domain_error);
  EXPECT_THROW(expected_aoi_stationary(1.5), std::invalid_argument);
}

TEST(ExpectedAoiStationary, MatchesSeriesSum) {
  for (double mu : {0.1, 0.3, 0.75}) {
    double series = 0.0, prod = 1.0;
    for (int tau = 0; tau < 5000; ++tau) {
      prod *= 1.0 - mu;
      series += prod;
    }
    EXPECT_NEAR(expected_aoi_stationary(mu), series, 1e-9);
  }
}

TEST(MeanAoiUniform, ClosedForm) {
  const auto v = mean_aoi_uniform(4, 2);
  EXPECT_DOUBLE_EQ(v.per_client, 2.0);
  EXPECT_DOUBLE_EQ(v.total, 8.0);
  EXPECT_DOUBLE_EQ(mean_aoi_uniform(5, 5).per_client, 1.0);
  EXPECT_THROW(mean_aoi_uniform(4, 0), std::domain_error);
  EXPECT_THROW(mean_aoi_uniform(4, 5), std::invalid_argument);
}

TEST(MeanAoiUniform, MonteCarlo) {
  const int m = 6, s = 2;
  AoiLedger l(m);
  Rng rng(3);
  std::vector<int> idx(m);
  double sum = 0.0;
  const int rounds = 100000;
  for (int t = 0; t < rounds; ++t) {
    for (int i = 0; i < m; ++i) idx[i] = i;
    rng.shuffle(std::span<int>(idx));
    l.update_set(std::span<const int>(idx.data(), s));
    sum += static_cast<double>(l.age_total()) / m;
  }
  EXPECT_NEAR(sum / rounds, mean_aoi_uniform(m, s).per_client, 0.05 * 3.0);
}

}  // namespace
}  // namespace aoisched
