#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "aoisched/env.hpp"

namespace aoisched {
namespace {

TEST(StateMatrix, RoundsAreOneBased) {
  StateMatrix m(2, 3);
  m.set(1, 3, 1);
  EXPECT_EQ(m.at(1, 3), 1);
  EXPECT_EQ(m.at(0, 1), 0);
  EXPECT_EQ(m.row(1)[2], 1);
}

TEST(MakePiecewise, ZeroBreakpointsIsStationary) {
  auto env = make_piecewise(2, 100, {}, {{0.9, 0.1}});
  EXPECT_EQ(env.breakpoint_count(), 0);
  EXPECT_EQ(env.true_means(1), (std::vector<double>{0.9, 0.1}));
  EXPECT_EQ(env.true_means(100), (std::vector<double>{0.9, 0.1}));
}

TEST(MakePiecewise, FullSizeConfig) {
  const auto bps = equal_breakpoints(20000, 6);
  ASSERT_EQ(bps.size(), 5u);
  Rng rng(1);
  auto env = make_piecewise(5, 20000, bps, draw_segment_means(5, 6, 0.1, 0.9, rng));
  EXPECT_EQ(env.breakpoint_count(), 5);
  EXPECT_EQ(env.n_channels(), 5);
}

TEST(MakePiecewise, RejectsBadInput) {
  EXPECT_THROW(make_piecewise(1, 100, {10, 5}, {{0.1}, {0.2}, {0.3}}), std::invalid_argument);
  EXPECT_THROW(make_piecewise(1, 100, {1}, {{0.1}, {0.2}}), std::invalid_argument);
  EXPECT_THROW(make_piecewise(1, 100, {101}, {{0.1}, {0.2}}), std::invalid_argument);
  EXPECT_THROW(make_piecewise(2, 100, {}, {{0.1}}), std::invalid_argument);
  EXPECT_THROW(make_piecewise(1, 100, {}, {{1.5}}), std::invalid_argument);
  EXPECT_THROW(make_piecewise(1, 100, {50}, {{0.5}}), std::invalid_argument);
}

TEST(MakeStationary, SameMeansEveryRound) {
  auto env = make_stationary({0.3, 0.7}, 50);
  EXPECT_EQ(env.kind(), ChannelKind::kStationary);
  for (Round t = 1; t <= 50; ++t) EXPECT_EQ(env.true_means(t), (std::vector<double>{0.3, 0.7}));
}

TEST(TrueMeans, SwitchesAtBreakpoint) {
  auto env = make_piecewise(2, 100, {40}, {{0.2, 0.8}, {0.9, 0.1}});
  EXPECT_EQ(env.true_means(39), (std::vector<double>{0.2, 0.8}));
  EXPECT_EQ(env.true_means(40), (std::vector<double>{0.9, 0.1}));
  EXPECT_THROW(env.true_means(0), std::out_of_range);
  EXPECT_THROW(env.true_means(101), std::out_of_range);
}

TEST(TrueMeans, CountsReads) {
  auto env = make_stationary({0.5}, 10);
  EXPECT_EQ(env.true_means_reads(), 0u);
  env.true_means(1);
  env.true_means(2);
  EXPECT_EQ(env.true_means_reads(), 2u);
}

TEST(Adversarial, SaturatedMatrices) {
  StateMatrix ones(3, 20);
  for (int k = 0; k < 3; ++k)
    for (Round t = 1; t <= 20; ++t) ones.set(k, t, 1);
  auto env = make_adversarial(ones);
  Rng rng(1);
  for (Round t = 1; t <= 20; ++t) {
    const auto r = env.sample_round(t, rng);
    EXPECT_EQ(r.states, (std::vector<std::uint8_t>{1, 1, 1}));
    EXPECT_EQ(env.true_means(t), (std::vector<double>{1.0, 1.0, 1.0}));
  }
  auto zeros = make_adversarial(StateMatrix(2, 5));
  EXPECT_EQ(zeros.sample_round(3, rng).states, (std::vector<std::uint8_t>{0, 0}));
}

TEST(Adversarial, RejectsNonBinary) {
  StateMatrix m(1, 2);
  m.set(0, 1, 2);
  EXPECT_THROW(make_adversarial(m), std::invalid_argument);
}

TEST(Adversarial, ReplayDoesNotConsumeRng) {
  auto env = make_adversarial(gen_adversarial_flips(2, 10, 0.3, 7));
  Rng a(5), b(5);
  env.sample_round(1, a);
  EXPECT_EQ(a.engine()(), b.engine()());
}

TEST(FlipGenerator, EdgeProbabilities) {
  const auto constant = gen_adversarial_flips(3, 50, 0.0, 1);
  for (int k = 0; k < 3; ++k)
    for (Round t = 2; t <= 50; ++t) EXPECT_EQ(constant.at(k, t), constant.at(k, 1));
  const auto alternating = gen_adversarial_flips(3, 50, 1.0, 1);
  for (int k = 0; k < 3; ++k)
    for (Round t = 2; t <= 50; ++t) EXPECT_NE(alternating.at(k, t), alternating.at(k, t - 1));
  EXPECT_THROW(gen_adversarial_flips(1, 5, 1.5, 1), std::invalid_argument);
}

TEST(FlipGenerator, FlipRateAndDeterminism) {
  // 1e5 transitions per channel: the rate's standard error is 3e-4.
  const Round horizon = 100001;
  const auto m = gen_adversarial_flips(3, horizon, 0.01, 42);
  for (int k = 0; k < 3; ++k) {
    int flips = 0;
    for (Round t = 2; t <= horizon; ++t) flips += m.at(k, t) != m.at(k, t - 1);
    EXPECT_NEAR(flips / 1e5, 0.01, 0.0012);
  }
  EXPECT_EQ(gen_adversarial_flips(3, 200, 0.2, 7), gen_adversarial_flips(3, 200, 0.2, 7));
  auto e1 = make_adversarial(gen_adversarial_flips(3, 200, 0.2, 7));
  auto e2 = make_adversarial(gen_adversarial_flips(3, 200, 0.2, 7));
  Rng r1(0), r2(0);
  for (Round t = 1; t <= 200; ++t) EXPECT_EQ(e1.sample_round(t, r1).states, e2.sample_round(t, r2).states);
}

TEST(SampleRound, CertainChannel) {
  auto env = make_stationary({1.0, 0.0}, 100);
  Rng rng(3);
  for (Round t = 1; t <= 100; ++t) {
    EXPECT_EQ(env.sample_round(t, rng).states, (std::vector<std::uint8_t>{1, 0}));
  }
}

TEST(SampleRound, FrequencyMatchesMean) {
  const Round n = 100000;
  auto env = make_stationary({0.5}, n);
  Rng rng(11);
  double ones = 0;
  for (Round t = 1; t <= n; ++t) ones += env.sample_round(t, rng).states[0];
  EXPECT_NEAR(ones / n, 0.5, 0.01);
}

TEST(SampleRound, FrequencyOnEachSideOfBreakpoint) {
  const Round w = 20000;
  auto env = make_piecewise(1, 2 * w, {w + 1}, {{0.2}, {0.7}});
  Rng rng(5);
  double before = 0, after = 0;
  for (Round t = 1; t <= 2 * w; ++t) (t <= w ? before : after) += env.sample_round(t, rng).states[0];
  const double band = [&](double mu) { return 3 * std::sqrt(mu * (1 - mu) / w); }(0.2);
  EXPECT_NEAR(before / w, 0.2, band);
  EXPECT_NEAR(after / w, 0.7, 3 * std::sqrt(0.7 * 0.3 / w));
}

TEST(SampleRound, DeterministicForSeed) {
  Rng g(9);
  auto env = make_piecewise(4, 500, {100, 300}, draw_segment_means(4, 3, 0.0, 1.0, g));
  Rng a(77), b(77);
  for (Round t = 1; t <= 500; ++t) EXPECT_EQ(env.sample_round(t, a).states, env.sample_round(t, b).states);
  EXPECT_THROW(env.sample_round(501, a), std::out_of_range);
}

TEST(StateMatrixCsv, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "aoisched_states_test.csv";
  const auto m = gen_adversarial_flips(3, 40, 0.3, 2);
  save_state_matrix_csv(m, path);
  EXPECT_EQ(load_state_matrix_csv(path), m);
  {
    std::ofstream bad(path);
    bad << "0,1\n1,2\n";
  }
  EXPECT_THROW(load_state_matrix_csv(path), std::invalid_argument);
  std::filesystem::remove(path);
}

TEST(EqualBreakpoints, Spacing) {
  EXPECT_EQ(equal_breakpoints(100, 4), (std::vector<Round>{26, 51, 76}));
  EXPECT_TRUE(equal_breakpoints(100, 1).empty());
}

}  // namespace
}  // namespace aoisched
