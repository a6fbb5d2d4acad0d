// Copyright 2026 The rbpe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "rbpe/policy.hpp"
#include "support/chi_square.hpp"
#include "support/corpora.hpp"

namespace rbpe {
namespace {

PairCounts counts_of(std::initializer_list<std::pair<SymbolPair, Count>> items) {
  PairCounts::Map m;
  for (const auto& [p, c] : items) m[p] = c;
  return PairCounts(std::move(m));
}

double prob_of(const SelectionDistribution& d, const SymbolPair& p) {
  for (std::size_t i = 0; i < d.pairs.size(); ++i) {
    if (d.pairs[i] == p) return d.probs[i];
  }
  return -1.0;
}

// Oracle: linear scan for the highest count, keeping the first (smallest)
// pair on ties.
SymbolPair brute_force_argmax(const PairCounts& counts) {
  SymbolPair best;
  Count best_count = 0;
  for (const auto& [pair, c] : counts.by_pair()) {
    if (c > best_count) {
      best = pair;
      best_count = c;
    }
  }
  return best;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

TEST(SelectionProbabilities, CountPropNormalizes) {
  const auto d = selection_probabilities(counts_of({{{"a", "b"}, 3}, {{"c", "d"}, 1}}),
                                         SamplingMethod::kCountProp);
  EXPECT_DOUBLE_EQ(prob_of(d, {"a", "b"}), 0.75);
  EXPECT_DOUBLE_EQ(prob_of(d, {"c", "d"}), 0.25);
}

TEST(SelectionProbabilities, SoftmaxMatchesDirectFormula) {
  const auto d = selection_probabilities(counts_of({{{"a", "b"}, 3}, {{"c", "d"}, 1}}),
                                         SamplingMethod::kSoftmax);
  const double e2 = std::exp(2.0);
  EXPECT_NEAR(prob_of(d, {"a", "b"}), e2 / (e2 + 1.0), 1e-12);
  EXPECT_NEAR(prob_of(d, {"a", "b"}), 0.8807970779778825, 1e-12);
  EXPECT_NEAR(prob_of(d, {"c", "d"}), 1.0 / (e2 + 1.0), 1e-12);
}

TEST(SelectionProbabilities, UniformIgnoresCounts) {
  const auto d = selection_probabilities(
      counts_of({{{"a", "b"}, 9}, {{"c", "d"}, 1}, {{"e", "f"}, 4}, {{"g", "h"}, 2}}),
      SamplingMethod::kUniform);
  for (double p : d.probs) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(SelectionProbabilities, StandardIsPointMassOnTieBrokenArgmax) {
  const auto d = selection_probabilities(
      counts_of({{{"l", "o"}, 3}, {{"o", "w"}, 3}, {{"w", "</w>"}, 2}}),
      SamplingMethod::kStandard);
  EXPECT_EQ(prob_of(d, {"l", "o"}), 1.0);
  EXPECT_EQ(prob_of(d, {"o", "w"}), 0.0);
  EXPECT_EQ(prob_of(d, {"w", "</w>"}), 0.0);
}

TEST(SelectionProbabilities, EmptyCountsThrow) {
  EXPECT_THROW(selection_probabilities(PairCounts{}, SamplingMethod::kUniform),
               NoPairsError);
  RandomSource rng(1);
  EXPECT_THROW(choose_pair(PairCounts{}, SamplingMethod::kStandard, rng), NoPairsError);
}

TEST(SelectionProbabilities, SoftmaxSurvivesHugeCounts) {
  const auto d = selection_probabilities(
      counts_of({{{"a", "b"}, 5'000'000}, {{"c", "d"}, 4'999'999}, {{"e", "f"}, 3}}),
      SamplingMethod::kSoftmax);
  const double e = std::exp(1.0);
  EXPECT_NEAR(prob_of(d, {"a", "b"}), e / (e + 1.0), 1e-12);
  EXPECT_EQ(prob_of(d, {"e", "f"}), 0.0);
}

TEST(SelectionProbabilities, CanonicalOrder) {
  const auto d = selection_probabilities(
      counts_of({{{"b", "a"}, 1}, {{"a", "z"}, 1}, {{"a", "b"}, 1}}),
      SamplingMethod::kUniform);
  EXPECT_EQ(d.pairs, (std::vector<SymbolPair>{{"a", "b"}, {"a", "z"}, {"b", "a"}}));
}

TEST(SampleCategorical, DegenerateDistribution) {
  SelectionDistribution d{{{"x", "y"}}, {1.0}};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource rng(seed);
    EXPECT_EQ(sample_categorical(d, rng), SymbolPair("x", "y"));
    EXPECT_EQ(rng.draws(), 1u);
  }
}

TEST(SampleCategorical, CountPropEmpiricalFrequency) {
  const auto d = selection_probabilities(counts_of({{{"a", "b"}, 3}, {{"c", "d"}, 1}}),
                                         SamplingMethod::kCountProp);
  int heavy = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    RandomSource rng(seed);
    if (sample_categorical(d, rng) == SymbolPair("a", "b")) ++heavy;
  }
  const double freq = heavy / 10000.0;
  EXPECT_GE(freq, 0.737);
  EXPECT_LE(freq, 0.763);
}

TEST(SampleCategorical, FixedSeedIsStable) {
  const auto d = selection_probabilities(
      counts_of({{{"a", "b"}, 3}, {{"c", "d"}, 1}, {{"e", "f"}, 2}}),
      SamplingMethod::kCountProp);
  RandomSource a(42), b(42);
  EXPECT_EQ(sample_categorical(d, a), sample_categorical(d, b));
}

TEST(RandomSource, MatchesPublishedSplitmix64Stream) {
  // Reference outputs of splitmix64 seeded with 1234567.
  RandomSource rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.next(), 3203168211198807973ULL);
  EXPECT_EQ(rng.next(), 9817491932198370423ULL);
  EXPECT_EQ(rng.next(), 4593380528125082431ULL);
  EXPECT_EQ(rng.next(), 16408922859458223821ULL);
}

TEST(RandomSource, DoublesInUnitInterval) {
  RandomSource rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(ChoosePair, StandardIgnoresSeedAndDraws) {
  const auto c = counts_of({{{"l", "o"}, 3}, {{"o", "w"}, 3}});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource rng(seed);
    EXPECT_EQ(choose_pair(c, SamplingMethod::kStandard, rng), SymbolPair("l", "o"));
    EXPECT_EQ(rng.draws(), 0u);
  }
}

TEST(ChoosePair, UniformIgnoresMagnitudes) {
  const auto c = counts_of({{{"a", "b"}, 1'000'000}, {{"c", "d"}, 1}});
  int rare = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    RandomSource rng(seed);
    if (choose_pair(c, SamplingMethod::kUniform, rng) == SymbolPair("c", "d")) ++rare;
  }
  EXPECT_GE(rare / 10000.0, 0.485);
  EXPECT_LE(rare / 10000.0, 0.515);
}

TEST(ChoosePair, SoftmaxNearGreedy) {
  const auto c = counts_of({{{"a", "b"}, 10}, {{"c", "d"}, 5}});
  const auto d = selection_probabilities(c, SamplingMethod::kSoftmax);
  EXPECT_NEAR(prob_of(d, {"a", "b"}), std::exp(5.0) / (std::exp(5.0) + 1.0), 1e-9);
  EXPECT_NEAR(prob_of(d, {"a", "b"}), 0.9933071490757152, 1e-9);
}

TEST(ChoosePair, AgreesWithSampleCategoricalComposition) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto counts = count_symbol_pairs(testing::random_corpus(seed, 5, 15, 6));
    for (auto m : kAllMethods) {
      RandomSource a(seed * 31 + 1), b(seed * 31 + 1);
      const auto d = selection_probabilities(counts, m);
      const SymbolPair expected = m == SamplingMethod::kStandard
                                      ? d.pairs[detail::inverse_cdf(d.probs, 0.5)]
                                      : sample_categorical(d, a);
      EXPECT_EQ(choose_pair(counts, m, b), expected);
    }
  }
}

// ---- Properties ------------------------------------------------------------

TEST(PolicyProperties, DistributionInvariants) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto counts = count_symbol_pairs(testing::random_corpus(seed, 6, 30, 20));
    for (auto m : kAllMethods) {
      const auto d = selection_probabilities(counts, m);
      EXPECT_NEAR(sum(d.probs), 1.0, 1e-9);
      for (std::size_t i = 0; i < d.probs.size(); ++i) {
        ASSERT_GE(d.probs[i], 0.0);
        ASSERT_LE(d.probs[i], 1.0);
        if (i > 0) {
          ASSERT_LT(d.pairs[i - 1], d.pairs[i]);
        }
      }
    }
  }
}

TEST(PolicyProperties, SoftmaxShiftInvariance) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto counts = count_symbol_pairs(testing::random_corpus(seed));
    for (Count k : {1ULL, 17ULL, 1'000'000ULL}) {
      PairCounts::Map shifted;
      for (const auto& [p, c] : counts) shifted[p] = c + k;
      const auto a = selection_probabilities(counts, SamplingMethod::kSoftmax);
      const auto b = selection_probabilities(PairCounts(shifted), SamplingMethod::kSoftmax);
      ASSERT_EQ(a.pairs, b.pairs);
      for (std::size_t i = 0; i < a.probs.size(); ++i) {
        ASSERT_NEAR(a.probs[i], b.probs[i], 1e-12);
      }
    }
  }
}

TEST(PolicyProperties, CountPropScaleInvariance) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto counts = count_symbol_pairs(testing::random_corpus(seed));
    for (Count k : {2ULL, 7ULL, 12345ULL}) {
      PairCounts::Map scaled;
      for (const auto& [p, c] : counts) scaled[p] = c * k;
      const auto a = selection_probabilities(counts, SamplingMethod::kCountProp);
      const auto b = selection_probabilities(PairCounts(scaled), SamplingMethod::kCountProp);
      for (std::size_t i = 0; i < a.probs.size(); ++i) {
        ASSERT_NEAR(a.probs[i], b.probs[i], 1e-12);
      }
    }
  }
}

TEST(PolicyProperties, ArgmaxAgreement) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    // Low frequencies make ties common.
    const auto counts = count_symbol_pairs(testing::random_corpus(seed, 4, 10, 2));
    RandomSource rng(seed);
    ASSERT_EQ(choose_pair(counts, SamplingMethod::kStandard, rng),
              brute_force_argmax(counts));
  }
}

TEST(PolicyProperties, UniformUnchangedByPermutedCounts) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto counts = count_symbol_pairs(testing::random_corpus(seed));
    std::vector<Count> values;
    for (const auto& [p, c] : counts) values.push_back(c);
    std::reverse(values.begin(), values.end());
    PairCounts::Map permuted;
    std::size_t i = 0;
    for (const auto& [p, c] : counts) permuted[p] = values[i++];
    EXPECT_EQ(selection_probabilities(counts, SamplingMethod::kUniform).probs,
              selection_probabilities(PairCounts(permuted), SamplingMethod::kUniform).probs);
  }
}

TEST(PolicyProperties, GoodnessOfFitPerMethod) {
  const auto counts = counts_of({{{"a", "b"}, 3}, {{"b", "c"}, 2}, {{"c", "d"}, 2},
                                 {{"d", "e"}, 1}, {{"e", "f"}, 4}});
  for (auto m : {SamplingMethod::kSoftmax, SamplingMethod::kCountProp,
                 SamplingMethod::kUniform}) {
    const auto d = selection_probabilities(counts, m);
    std::vector<std::uint64_t> observed(d.pairs.size(), 0);
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      RandomSource rng(seed);
      const auto& p = sample_categorical(d, rng);
      const auto idx = std::find(d.pairs.begin(), d.pairs.end(), p) - d.pairs.begin();
      ++observed[static_cast<std::size_t>(idx)];
    }
    const auto r = testing::chi_square_test(observed, d.probs, 0.001);
    EXPECT_TRUE(r.passes()) << to_string(m) << " chi2=" << r.statistic
                            << " critical=" << r.critical;
  }
}

TEST(PolicyProperties, ChiSquareOracleCriticalValue) {
  // Upper 0.001 quantile of chi-square with 3 degrees of freedom.
  const auto r = testing::chi_square_test({2500, 2500, 2500, 2500},
                                          {0.25, 0.25, 0.25, 0.25}, 0.001);
  EXPECT_NEAR(r.critical, 16.26623619623813, 1e-9);
  EXPECT_EQ(r.statistic, 0.0);
}

TEST(InverseCdf, FallsBackToLastPositiveOutcome) {
  const std::vector<double> probs = {0.5, 0.49999999, 0.0};
  EXPECT_EQ(detail::inverse_cdf(probs, 0.9999999999), 1u);
  EXPECT_EQ(detail::inverse_cdf(probs, 0.0), 0u);
}

TEST(SamplingMethodNames, RoundTrip) {
  for (auto m : kAllMethods) EXPECT_EQ(parse_sampling_method(to_string(m)), m);
  EXPECT_FALSE(parse_sampling_method("greedy").has_value());
}

}  // namespace
}  // namespace rbpe
