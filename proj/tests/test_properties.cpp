#include <gtest/gtest.h>

#include <algorithm>
#include <cfloat>
#include <numeric>
#include <set>

#include "aoisched/bandit_sim.hpp"
#include "aoisched/match.hpp"

namespace aoisched {
namespace {

constexpr int kCases = 1000;

template <typename F>
void for_cases(std::uint64_t seed, F&& body) {
  Rng rng(seed);
  for (int c = 0; c < kCases; ++c) {
    SCOPED_TRACE("case " + std::to_string(c));
    body(rng);
    if (::testing::Test::HasFatalFailure()) return;
  }
}

int draw_int(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.index(hi - lo + 1)); }

std::vector<double> draw_means(Rng& rng, int n) {
  std::vector<double> mu(n);
  for (double& m : mu) m = rng.uniform();
  return mu;
}

bool injective(const Assignment& a, int n) {
  std::set<int> seen;
  for (int k : a.channel_of()) {
    if (k < 0 || k >= n || !seen.insert(k).second) return false;
  }
  return true;
}

TEST(Property, SchedulersProduceInjectiveAssignments) {
  for_cases(1, [](Rng& rng) {
    const int n = draw_int(rng, 1, 8);
    const int m = draw_int(rng, 1, n);
    const Round t = draw_int(rng, 1, 1000);
    EXPECT_TRUE(injective(random_select(n, m, rng), n));
    EXPECT_TRUE(injective(oracle_select(draw_means(rng, n), m, t), n));

    GlrCucb cucb(n, m, {rng.uniform() * 0.5, 0.01});
    for (Round r = 1; r <= 5; ++r) {
      const auto sel = cucb.select(r, rng);
      ASSERT_EQ(static_cast<int>(sel.ranked.size()), m);
      EXPECT_TRUE(injective(sel.assignment, n));
      std::vector<ChannelFeedback> fb;
      for (int k : sel.ranked) fb.push_back({k, static_cast<std::uint8_t>(rng.bernoulli(0.5))});
      cucb.update(fb, r);
    }

    MExp3 exp3(n, m, 0.1 + 0.9 * rng.uniform());
    const auto draw = exp3.select(rng, t);
    EXPECT_TRUE(injective(draw.assignment, n));
    std::set<int> combo(exp3.combos()[draw.super_arm].begin(), exp3.combos()[draw.super_arm].end());
    EXPECT_EQ(combo, std::set<int>(draw.assignment.channel_of().begin(),
                                   draw.assignment.channel_of().end()));
  });
}

TEST(Property, MExp3StaysOnTheSimplexAboveTheFloor) {
  for_cases(2, [](Rng& rng) {
    const int n = draw_int(rng, 2, 6);
    const int m = draw_int(rng, 1, n - 1);
    const double gamma = 0.01 + 0.99 * rng.uniform();
    MExp3 s(n, m, gamma);
    const double floor = gamma / s.combo_count();
    const int steps = draw_int(rng, 1, 40);
    for (int i = 0; i < steps; ++i) {
      const auto d = s.select(rng, i + 1);
      std::vector<ChannelFeedback> fb;
      for (int k : s.combos()[d.super_arm]) {
        fb.push_back({k, static_cast<std::uint8_t>(rng.bernoulli(0.7))});
      }
      s.update(d.super_arm, fb);
    }
    const auto p = s.probabilities();
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (double v : p) EXPECT_GE(v, floor * (1 - 1e-12));
    for (double w : s.weights()) {
      EXPECT_GE(w, DBL_MIN);
      EXPECT_LE(w, 1.0);
    }
  });
}

TEST(Property, AggregationWeightsOnTheSimplex) {
  for_cases(3, [](Rng& rng) {
    const int m = draw_int(rng, 1, 12);
    std::vector<double> c(m);
    std::vector<std::uint8_t> s(m);
    for (int i = 0; i < m; ++i) {
      c[i] = rng.bernoulli(0.2) ? 0.0 : rng.uniform();
      s[i] = rng.bernoulli(0.6);
    }
    s[rng.index(m)] = 1;
    const auto z = aggregation_weights(c, s);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      EXPECT_GE(z[i], 0.0);
      if (!s[i]) EXPECT_EQ(z[i], 0.0);
      total += z[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  });
}

TEST(Property, KlAndGlrStatisticNonNegative) {
  for_cases(4, [](Rng& rng) {
    const double p = rng.bernoulli(0.1) ? 0.0 : rng.uniform();
    const double q = rng.bernoulli(0.1) ? 1.0 : rng.uniform();
    EXPECT_GE(kl_bernoulli(p, q), 0.0);
    // q is clamped 1e-9 away from {0, 1}, so kl(p, p) is ~1e-9 at the ends.
    EXPECT_NEAR(kl_bernoulli(p, p), 0.0, 2e-9);
    GlrDetector d(0.01);
    const int n = draw_int(rng, 1, 60);
    const double mu = rng.uniform();
    for (int i = 0; i < n; ++i) d.push(rng.bernoulli(mu));
    EXPECT_GE(d.statistic(), -1e-12);
    EXPECT_GT(d.threshold(), 0.0);
  });
}

TEST(Property, AgeResetIsExclusive) {
  for_cases(5, [](Rng& rng) {
    const int m = draw_int(rng, 1, 10);
    AoiLedger ledger(m);
    const int rounds = draw_int(rng, 1, 30);
    for (int r = 0; r < rounds; ++r) {
      std::vector<Age> before(ledger.ages().begin(), ledger.ages().end());
      std::vector<std::uint8_t> s(m);
      for (auto& v : s) v = rng.bernoulli(0.4);
      ledger.update(s);
      for (int i = 0; i < m; ++i) {
        EXPECT_EQ(ledger.age(i), s[i] ? 1 : before[i] + 1);
        EXPECT_GE(ledger.age(i), 1);
      }
    }
    EXPECT_EQ(ledger.round(), rounds);
  });
}

TEST(Property, FairnessNormalizationAndPriorityBounds) {
  for_cases(6, [](Rng& rng) {
    const int m = draw_int(rng, 1, 8);
    FairnessState f(rng.uniform());
    const int rounds = draw_int(rng, 1, 20);
    for (int r = 0; r < rounds; ++r) {
      std::vector<Age> ages(m);
      for (auto& a : ages) a = draw_int(rng, 1, 50);
      const auto b = f.blend(ages);
      EXPECT_GE(b.normalized_variance, 0.0);
      EXPECT_LE(b.normalized_variance, 1.0);
      EXPECT_GE(b.beta_t, 0.0);
      EXPECT_LE(b.beta_t, f.beta());
      std::vector<double> c(m);
      for (double& v : c) v = rng.uniform();
      const auto l = priority(c, b.normalized_ages, b.beta_t);
      for (int i = 0; i < m; ++i) {
        EXPECT_GE(b.normalized_ages[i], 0.0);
        EXPECT_LE(b.normalized_ages[i], 1.0);
        EXPECT_GE(l[i], std::min(c[i], b.normalized_ages[i]) - 1e-15);
        EXPECT_LE(l[i], std::max(c[i], b.normalized_ages[i]) + 1e-15);
      }
    }
  });
}

TEST(Property, MatchingIsMonotoneAndEquivariant) {
  for_cases(7, [](Rng& rng) {
    const int n = draw_int(rng, 2, 10);
    const int m = draw_int(rng, 1, n);
    std::vector<int> channels(n);
    std::iota(channels.begin(), channels.end(), 0);
    rng.shuffle(std::span<int>(channels));
    channels.resize(m);
    ChannelRanking ranking{channels, std::vector<double>(m, 0.0)};
    std::vector<double> lambda(m);
    for (double& v : lambda) v = rng.uniform();
    const auto a = match_clients(ranking, lambda, n);
    ASSERT_TRUE(injective(a, n));
    auto rank_of = [&](int channel) {
      return std::find(channels.begin(), channels.end(), channel) - channels.begin();
    };
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (lambda[i] > lambda[j]) EXPECT_LT(rank_of(a.channel(i)), rank_of(a.channel(j)));
      }
    }
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<int>(perm));
    std::vector<double> permuted(m);
    for (int i = 0; i < m; ++i) permuted[perm[i]] = lambda[i];
    const auto b = match_clients(ranking, permuted, n);
    for (int i = 0; i < m; ++i) EXPECT_EQ(b.channel(perm[i]), a.channel(i));
  });
}

TEST(Property, FairnessResponsiveness) {
  for_cases(8, [](Rng& rng) {
    const int m = draw_int(rng, 2, 6);
    std::vector<Age> ages(m);
    for (auto& a : ages) a = draw_int(rng, 1, 20);
    const double beta = 0.1 + 0.9 * rng.uniform();
    // Same history for both, then one client is older in the second.
    FairnessState f1(beta), f2(beta);
    std::vector<Age> warm(m, 1);
    warm[0] = 100;
    f1.blend(warm);
    f2.blend(warm);
    auto older = ages;
    const int i = static_cast<int>(rng.index(m));
    older[i] += draw_int(rng, 1, 10);
    const auto b1 = f1.blend(ages);
    const auto b2 = f2.blend(older);
    if (b1.beta_t > 0 && b2.beta_t >= b1.beta_t) {
      std::vector<double> c(m, rng.uniform());
      const auto l1 = priority(c, b1.normalized_ages, b2.beta_t);
      const auto l2 = priority(c, b2.normalized_ages, b2.beta_t);
      EXPECT_GE(l2[i], l1[i] - 1e-15);
    }
  });
}

TEST(Property, RegretTelescopes) {
  for_cases(9, [](Rng& rng) {
    RegretAccumulator acc;
    const int rounds = draw_int(rng, 1, 50);
    Age running = 0;
    for (int r = 0; r < rounds; ++r) {
      const Age p = draw_int(rng, 1, 40), o = draw_int(rng, 1, 40);
      acc.record(p, o);
      running += p - o;
      EXPECT_EQ(acc.curve().back(), running);
    }
  });
}

TEST(Property, SimulationIsDeterministic) {
  Rng meta(10);
  for (int c = 0; c < kCases; ++c) {
    const int n = draw_int(meta, 2, 5);
    const int m = draw_int(meta, 1, n);
    auto env = make_stationary(draw_means(meta, n), 40);
    PolicySpec spec;
    spec.kind = static_cast<PolicyKind>(draw_int(meta, 1, 3));
    spec.aoi_aware = spec.kind != PolicyKind::kRandom && meta.bernoulli(0.5);
    const auto seed = meta.engine()();
    const auto a = simulate_bandit(env, spec, m, seed);
    const auto b = simulate_bandit(env, spec, m, seed);
    ASSERT_EQ(a.regret, b.regret) << "case " << c;
    ASSERT_EQ(a.variance, b.variance) << "case " << c;
  }
}

}  // namespace
}  // namespace aoisched
