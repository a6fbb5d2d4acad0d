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

// Merge selection policies: turn pair counts into a selection distribution
// and draw one pair from it.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rbpe/core.hpp"
#include "rbpe/random.hpp"

namespace rbpe {

enum class SamplingMethod { kStandard, kSoftmax, kCountProp, kUniform };

inline constexpr std::array<SamplingMethod, 4> kAllMethods = {
    SamplingMethod::kStandard, SamplingMethod::kSoftmax,
    SamplingMethod::kCountProp, SamplingMethod::kUniform};

inline std::string_view to_string(SamplingMethod m) {
  switch (m) {
    case SamplingMethod::kStandard: return "standard";
    case SamplingMethod::kSoftmax: return "softmax";
    case SamplingMethod::kCountProp: return "countprop";
    case SamplingMethod::kUniform: return "uniform";
  }
  return "standard";
}

inline std::optional<SamplingMethod> parse_sampling_method(std::string_view s) {
  for (auto m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

// Pairs in canonical (lexicographic) order with parallel probabilities.
struct SelectionDistribution {
  std::vector<SymbolPair> pairs;
  std::vector<double> probs;
};

namespace detail {

// Probabilities over counts.by_pair() in iteration order.
inline std::vector<double> probabilities(const PairCounts& counts,
                                         SamplingMethod method) {
  std::vector<double> probs;
  probs.reserve(counts.size());
  switch (method) {
    case SamplingMethod::kStandard: {
      const SymbolPair& best = counts.top();
      for (const auto& [pair, c] : counts) {
        probs.push_back(pair == best ? 1.0 : 0.0);
      }
      break;
    }
    case SamplingMethod::kSoftmax: {
      // exp(c - c_max); the difference is taken in integers.
      const Count max = counts.max_count();
      double sum = 0.0;
      for (const auto& [pair, c] : counts) {
        const double w = std::exp(-static_cast<double>(max - c));
        probs.push_back(w);
        sum += w;
      }
      for (double& p : probs) p /= sum;
      break;
    }
    case SamplingMethod::kCountProp: {
      const double total = static_cast<double>(counts.total());
      for (const auto& [pair, c] : counts) {
        probs.push_back(static_cast<double>(c) / total);
      }
      break;
    }
    case SamplingMethod::kUniform: {
      const double p = 1.0 / static_cast<double>(counts.size());
      probs.assign(counts.size(), p);
      break;
    }
  }
  return probs;
}

// First index whose cumulative probability exceeds u. If rounding leaves
// the total below u, the last outcome with positive mass is returned.
inline std::size_t inverse_cdf(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

}  // namespace detail

// Standard puts all mass on the argmax (count descending, then pair
// ascending). Softmax is applied to raw counts without a temperature, so
// large count gaps make it nearly greedy.
inline SelectionDistribution selection_probabilities(const PairCounts& counts,
                                                     SamplingMethod method) {
  if (counts.empty()) throw NoPairsError();
  SelectionDistribution dist;
  dist.probs = detail::probabilities(counts, method);
  dist.pairs.reserve(counts.size());
  for (const auto& [pair, c] : counts) dist.pairs.push_back(pair);
  return dist;
}

// Inverse-CDF sampling over the canonical order; consumes one draw.
inline const SymbolPair& sample_categorical(const SelectionDistribution& dist,
                                            RandomSource& rng) {
  const double u = rng.next_double();
  return dist.pairs.at(detail::inverse_cdf(dist.probs, u));
}

// Same result as sample_categorical(selection_probabilities(...)) without
// copying the pairs. Standard consumes no draw.
inline SymbolPair choose_pair(const PairCounts& counts, SamplingMethod method,
                              RandomSource& rng) {
  if (counts.empty()) throw NoPairsError();
  if (method == SamplingMethod::kStandard) return counts.top();
  const std::vector<double> probs = detail::probabilities(counts, method);
  const std::size_t index = detail::inverse_cdf(probs, rng.next_double());
  return std::next(counts.begin(), static_cast<std::ptrdiff_t>(index))->first;
}

}  // namespace rbpe
