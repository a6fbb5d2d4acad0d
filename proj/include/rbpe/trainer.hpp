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

// BPE training loop: choose a pair, record the rule, update the corpus and
// the pair counts, until the merge budget is spent or no pairs remain.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rbpe/core.hpp"
#include "rbpe/policy.hpp"
#include "rbpe/random.hpp"

namespace rbpe {

struct Provenance {
  SamplingMethod method = SamplingMethod::kStandard;
  std::uint64_t seed = 0;
  std::uint64_t requested = 0;
  bool early_stopped = false;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Ordered list of learned merges. Ranks equal positions. Provenance is empty
// when a table was loaded without its metadata record.
struct MergeTable {
  std::vector<MergeRule> rules;
  std::optional<Provenance> provenance;

  std::size_t size() const { return rules.size(); }
  bool empty() const { return rules.empty(); }
  bool early_stopped() const {
    return provenance.has_value() && provenance->early_stopped;
  }

  void append(Symbol left, Symbol right) {
    rules.emplace_back(std::move(left), std::move(right), rules.size());
  }

  MergeTable prefix(std::size_t k) const {
    MergeTable t;
    t.rules.assign(rules.begin(),
                   rules.begin() + static_cast<std::ptrdiff_t>(
                                       std::min(k, rules.size())));
    t.provenance = provenance;
    return t;
  }

  friend bool operator==(const MergeTable&, const MergeTable&) = default;
};

enum class CountingMode {
  kIncremental,
  // Recount every pair after each merge. Slow; kept as the reference.
  kFullRecount,
};

struct TrainingResult {
  MergeTable table;
  WordTypeCorpus final_corpus;
  std::uint64_t draws = 0;
};

namespace detail {

using PairDelta = std::map<SymbolPair, std::int64_t>;

// Net change in pair occurrences when `before` becomes `after`.
inline void word_pair_delta(const Word& before, const Word& after,
                            PairDelta& delta) {
  for (std::size_t i = 0; i + 1 < before.size(); ++i) {
    --delta[{before[i], before[i + 1]}];
  }
  for (std::size_t i = 0; i + 1 < after.size(); ++i) {
    ++delta[{after[i], after[i + 1]}];
  }
}

inline void apply_delta(const PairDelta& delta, Count freq,
                        PairCounts& counts) {
  for (const auto& [pair, d] : delta) {
    if (d > 0) {
      counts.add(pair, static_cast<Count>(d) * freq);
    } else if (d < 0) {
      counts.subtract(pair, static_cast<Count>(-d) * freq);
    }
  }
}

// Training state for the incremental route: word types with an inverted
// index from pair to the words that (may) contain it. Index entries can be
// stale; merge_in_place reports whether a word really changed.
class IncrementalState {
 public:
  explicit IncrementalState(const WordTypeCorpus& corpus) {
    PairCounts::Map initial;
    for (const auto& [word, freq] : corpus) {
      const auto id = static_cast<std::uint32_t>(words_.size());
      words_.push_back(word);
      freqs_.push_back(freq);
      add_word_pairs(word, freq, initial);
      for (std::size_t i = 0; i + 1 < word.size(); ++i) {
        index_[{word[i], word[i + 1]}].push_back(id);
      }
    }
    for (auto& [pair, ids] : index_) dedupe(ids);
    counts_ = PairCounts(std::move(initial));
  }

  const PairCounts& counts() const { return counts_; }

  void apply(const MergeRule& rule) {
    auto node = index_.extract(rule.pair());
    if (node.empty()) return;
    std::vector<std::uint32_t> ids = std::move(node.mapped());
    dedupe(ids);
    for (const std::uint32_t id : ids) {
      Word& word = words_[id];
      Word before = word;
      if (!merge_in_place(word, rule)) continue;
      PairDelta delta;
      word_pair_delta(before, word, delta);
      apply_delta(delta, freqs_[id], counts_);
      for (const auto& [pair, d] : delta) {
        if (d > 0) index_[pair].push_back(id);
      }
    }
  }

  WordTypeCorpus corpus() const {
    WordTypeCorpus out;
    for (std::size_t i = 0; i < words_.size(); ++i) out.add(words_[i], freqs_[i]);
    return out;
  }

 private:
  static void dedupe(std::vector<std::uint32_t>& ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }

  std::vector<Word> words_;
  std::vector<Count> freqs_;
  std::unordered_map<SymbolPair, std::vector<std::uint32_t>, PairHash> index_;
  PairCounts counts_;
};

}  // namespace detail

// Counts after applying `rule`, touching only word types that contain the
// merged pair. Precondition: counts == count_symbol_pairs(corpus).
inline PairCounts update_counts_incremental(const PairCounts& counts,
                                            const WordTypeCorpus& corpus,
                                            const MergeRule& rule) {
  PairCounts out = counts;
  if (counts.count(rule.pair()) == 0) return out;
  for (const auto& [word, freq] : corpus) {
    Word after = word;
    if (!merge_in_place(after, rule)) continue;
    detail::PairDelta delta;
    detail::word_pair_delta(word, after, delta);
    detail::apply_delta(delta, freq, out);
  }
  return out;
}

// Learns up to `merges` rules. One RandomSource seeded once; each sampled
// iteration consumes one draw, standard consumes none. Stops early, with
// provenance.early_stopped set, when no pairs remain.
inline TrainingResult train(const WordTypeCorpus& corpus, std::uint64_t merges,
                            SamplingMethod method, std::uint64_t seed,
                            CountingMode mode = CountingMode::kIncremental) {
  TrainingResult result;
  MergeTable& table = result.table;
  table.provenance = Provenance{method, seed, merges, false};
  RandomSource rng(seed);

  auto record = [&](const PairCounts& counts) -> std::optional<MergeRule> {
    if (counts.empty()) {
      table.provenance->early_stopped = true;
      return std::nullopt;
    }
    SymbolPair chosen = choose_pair(counts, method, rng);
    table.append(std::move(chosen.first), std::move(chosen.second));
    return table.rules.back();
  };

  if (mode == CountingMode::kIncremental) {
    detail::IncrementalState state(corpus);
    while (table.size() < merges) {
      auto rule = record(state.counts());
      if (!rule) break;
      state.apply(*rule);
    }
    result.final_corpus = state.corpus();
  } else {
    WordTypeCorpus current = corpus;
    while (table.size() < merges) {
      auto rule = record(count_symbol_pairs(current));
      if (!rule) break;
      current = apply_rule(current, *rule);
    }
    result.final_corpus = std::move(current);
  }
  result.draws = rng.draws();
  return result;
}

inline MergeTable train_bpe(const WordTypeCorpus& corpus, std::uint64_t merges,
                            SamplingMethod method, std::uint64_t seed,
                            CountingMode mode = CountingMode::kIncremental) {
  return train(corpus, merges, method, seed, mode).table;
}

}  // namespace rbpe
