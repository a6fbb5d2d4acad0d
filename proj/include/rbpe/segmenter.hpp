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

// Applies a learned merge table to tokenized text and inverts the
// joiner-marked output.

#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rbpe/core.hpp"
#include "rbpe/trainer.hpp"

namespace rbpe {

struct JoinerConvention {
  std::string joiner = "@@";

  void validate() const {
    if (joiner.empty()) throw ValidationError("joiner must not be empty");
    for (char c : joiner) {
      if (is_space(c)) throw ValidationError("joiner contains whitespace");
    }
    if (joiner.find(kEndOfWord) != std::string::npos ||
        std::string(kEndOfWord).find(joiner) != std::string::npos) {
      throw ValidationError("joiner collides with the end-of-word marker");
    }
  }
};

// Reference segmentation: every rule, in rank order, over the word.
inline Word segment_word(std::string_view token, const MergeTable& table) {
  Word word = initial_word(token);
  for (const auto& rule : table.rules) {
    if (word.size() < 2) break;
    merge_in_place(word, rule);
  }
  return word;
}

// Output subwords of one segmented word: the marker is stripped and every
// non-final subword carries the joiner.
inline std::vector<std::string> render_subwords(const Word& word,
                                                const JoinerConvention& conv) {
  std::vector<std::string> out(word.begin(), word.end());
  if (!out.empty() && out.back() == kEndOfWord) out.pop_back();
  if (out.empty()) return out;
  std::string& last = out.back();
  if (last.size() >= kEndOfWord.size() &&
      std::string_view(last).substr(last.size() - kEndOfWord.size()) ==
          kEndOfWord) {
    last.resize(last.size() - kEndOfWord.size());
  }
  for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] += conv.joiner;
  return out;
}

// Rank-priority segmenter. Instead of scanning every rule per word it
// repeatedly applies the lowest-ranked present rule whose rank exceeds the
// last one applied, which visits exactly the rules the rank-order scan
// would fire. Results are cached per token. Not thread-safe.
class Segmenter {
 public:
  explicit Segmenter(const MergeTable& table) {
    for (const auto& rule : table.rules) {
      ranks_[rule.pair()].push_back(rule.rank);
      merged_.push_back(rule.merged);
      pairs_.push_back(rule.pair());
    }
  }

  Word segment_word(std::string_view token) const {
    Word word = initial_word(token);
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::size_t current = kNone;
    while (word.size() > 1) {
      std::size_t best = kNone;
      for (std::size_t i = 0; i + 1 < word.size(); ++i) {
        auto it = ranks_.find({word[i], word[i + 1]});
        if (it == ranks_.end()) continue;
        // Ranks per pair are ascending; take the first one after `current`.
        const auto& ranks = it->second;
        auto r = current == kNone
                     ? ranks.begin()
                     : std::upper_bound(ranks.begin(), ranks.end(), current);
        if (r != ranks.end() && (best == kNone || *r < best)) best = *r;
      }
      if (best == kNone) break;
      merge_in_place(word, pairs_[best].first, pairs_[best].second,
                     merged_[best]);
      current = best;
    }
    return word;
  }

  const std::vector<std::string>& subwords(std::string_view token,
                                           const JoinerConvention& conv) {
    auto it = cache_.find(std::string(token));
    if (it == cache_.end()) {
      it = cache_
               .emplace(std::string(token),
                        render_subwords(segment_word(token), conv))
               .first;
    }
    return it->second;
  }

  std::string segment_line(std::string_view line,
                           const JoinerConvention& conv) {
    if (conv.joiner != cache_joiner_) {
      cache_.clear();
      cache_joiner_ = conv.joiner;
    }
    std::string out;
    for (auto token : split_tokens(line)) {
      for (const auto& sub : subwords(token, conv)) {
        if (!out.empty()) out += ' ';
        out += sub;
      }
    }
    return out;
  }

 private:
  std::unordered_map<SymbolPair, std::vector<std::size_t>, PairHash> ranks_;
  std::vector<SymbolPair> pairs_;
  std::vector<Symbol> merged_;
  std::unordered_map<std::string, std::vector<std::string>> cache_;
  std::string cache_joiner_;
};

// Reference route for a single line, without the cache.
inline std::string segment_line(std::string_view line, const MergeTable& table,
                                const JoinerConvention& conv = {}) {
  std::string out;
  for (auto token : split_tokens(line)) {
    for (const auto& sub : render_subwords(segment_word(token, table), conv)) {
      if (!out.empty()) out += ' ';
      out += sub;
    }
  }
  return out;
}

// Removes every joiner immediately followed by a space.
inline std::string desegment_line(std::string_view line,
                                  const JoinerConvention& conv = {}) {
  const std::string pattern = conv.joiner + ' ';
  std::string out;
  out.reserve(line.size());
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = line.find(pattern, pos);
    if (hit == std::string_view::npos) {
      out.append(line.substr(pos));
      break;
    }
    out.append(line.substr(pos, hit - pos));
    pos = hit + pattern.size();
  }
  return out;
}

}  // namespace rbpe
