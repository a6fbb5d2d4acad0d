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

// Core data model for byte pair encoding: symbols, the frequency-weighted
// word-type corpus, adjacent pair counts and single-rule application.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rbpe/error.hpp"

namespace rbpe {

inline constexpr std::string_view kEndOfWord = "</w>";

using Count = std::uint64_t;
using Symbol = std::string;
using SymbolPair = std::pair<Symbol, Symbol>;
// Segmentation state of one word type.
using Word = std::vector<Symbol>;

struct PairHash {
  std::size_t operator()(const SymbolPair& p) const noexcept {
    std::size_t h = std::hash<std::string>{}(p.first);
    return h ^ (std::hash<std::string>{}(p.second) + 0x9e3779b97f4a7c15ULL +
                (h << 6) + (h >> 2));
  }
};

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

// Splits on runs of ASCII whitespace; empty fields are dropped.
inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// Length of the UTF-8 sequence starting with `lead`. Malformed or truncated
// sequences degrade to single bytes.
inline std::size_t utf8_length(std::string_view s, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  std::size_t n = 1;
  if (lead >= 0xF0 && lead < 0xF8) {
    n = 4;
  } else if (lead >= 0xE0) {
    n = lead < 0xF0 ? 3 : 1;
  } else if (lead >= 0xC0) {
    n = 2;
  }
  if (pos + n > s.size()) return 1;
  for (std::size_t k = 1; k < n; ++k) {
    if ((static_cast<unsigned char>(s[pos + k]) & 0xC0) != 0x80) return 1;
  }
  return n;
}

inline std::vector<Symbol> utf8_characters(std::string_view text) {
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t n = utf8_length(text, i);
    out.emplace_back(text.substr(i, n));
    i += n;
  }
  return out;
}

inline bool is_single_character(std::string_view s) {
  return !s.empty() && utf8_length(s, 0) == s.size();
}

inline void check_not_reserved(std::string_view token) {
  if (token.find(kEndOfWord) != std::string_view::npos) {
    throw ReservedMarkerError(token);
  }
}

// Characters of `token` followed by a standalone end-of-word marker.
inline Word initial_word(std::string_view token) {
  check_not_reserved(token);
  Word w = utf8_characters(token);
  w.emplace_back(kEndOfWord);
  return w;
}

// Inverse of initial_word: the concatenated symbols with the marker removed.
inline std::string surface_form(const Word& word) {
  std::string out;
  for (const auto& s : word) out += s;
  if (out.size() >= kEndOfWord.size() &&
      std::string_view(out).substr(out.size() - kEndOfWord.size()) ==
          kEndOfWord) {
    out.resize(out.size() - kEndOfWord.size());
  }
  return out;
}

struct MergeRule {
  Symbol left;
  Symbol right;
  Symbol merged;
  std::size_t rank = 0;

  MergeRule() = default;
  MergeRule(Symbol l, Symbol r, std::size_t rank_)
      : left(std::move(l)), right(std::move(r)), merged(left + right),
        rank(rank_) {}

  SymbolPair pair() const { return {left, right}; }
  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

// Replaces left-to-right non-overlapping occurrences of (left, right) by the
// merged symbol. Returns whether anything changed.
inline bool merge_in_place(Word& word, std::string_view left,
                           std::string_view right, const Symbol& merged) {
  if (word.size() < 2) return false;
  std::size_t out = 0;
  bool changed = false;
  for (std::size_t i = 0; i < word.size();) {
    if (i + 1 < word.size() && word[i] == left && word[i + 1] == right) {
      word[out++] = merged;
      i += 2;
      changed = true;
    } else {
      if (out != i) word[out] = std::move(word[i]);
      ++out;
      ++i;
    }
  }
  word.resize(out);
  return changed;
}

inline bool merge_in_place(Word& word, const MergeRule& rule) {
  return merge_in_place(word, rule.left, rule.right, rule.merged);
}

// Frequency-weighted map from word types to counts. Iteration order is the
// lexicographic order of the symbol sequences.
class WordTypeCorpus {
 public:
  using Map = std::map<Word, Count>;

  void add(Word word, Count freq) {
    if (freq == 0) return;
    entries_[std::move(word)] += freq;
  }

  Count frequency(const Word& word) const {
    auto it = entries_.find(word);
    return it == entries_.end() ? 0 : it->second;
  }

  Count total_tokens() const {
    Count total = 0;
    for (const auto& [w, f] : entries_) total += f;
    return total;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }
  const Map& entries() const { return entries_; }

  friend bool operator==(const WordTypeCorpus&, const WordTypeCorpus&) = default;

 private:
  Map entries_;
};

// Builds a corpus from token frequencies.
inline WordTypeCorpus init_corpus(
    const std::unordered_map<std::string, Count>& token_counts) {
  WordTypeCorpus corpus;
  for (const auto& [token, freq] : token_counts) {
    corpus.add(initial_word(token), freq);
  }
  return corpus;
}

inline void count_line_tokens(std::string_view line,
                              std::unordered_map<std::string, Count>& counts) {
  for (auto tok : split_tokens(line)) {
    check_not_reserved(tok);
    ++counts[std::string(tok)];
  }
}

inline WordTypeCorpus init_corpus(std::istream& lines) {
  std::unordered_map<std::string, Count> counts;
  std::string line;
  while (std::getline(lines, line)) count_line_tokens(line, counts);
  return init_corpus(counts);
}

inline WordTypeCorpus init_corpus(const std::vector<std::string>& lines) {
  std::unordered_map<std::string, Count> counts;
  for (const auto& line : lines) count_line_tokens(line, counts);
  return init_corpus(counts);
}

// Occurrence counts of adjacent symbol pairs. Zero counts are never stored.
// Besides the canonical (lexicographic) view it keeps a ranking by count
// descending, then pair ascending, so the greedy argmax is O(1).
class PairCounts {
 public:
  using Map = std::map<SymbolPair, Count>;

  PairCounts() = default;
  explicit PairCounts(Map counts) : counts_(std::move(counts)) {
    for (auto it = counts_.begin(); it != counts_.end();) {
      if (it->second == 0) {
        it = counts_.erase(it);
      } else {
        ranking_.insert({it->second, &it->first});
        ++it;
      }
    }
  }
  PairCounts(const PairCounts& other) : PairCounts(other.counts_) {}
  PairCounts& operator=(const PairCounts& other) {
    if (this != &other) *this = PairCounts(other.counts_);
    return *this;
  }
  PairCounts(PairCounts&&) noexcept = default;
  PairCounts& operator=(PairCounts&&) noexcept = default;

  void add(const SymbolPair& pair, Count n) {
    if (n == 0) return;
    auto [it, inserted] = counts_.try_emplace(pair, 0);
    if (!inserted) ranking_.erase({it->second, &it->first});
    it->second += n;
    ranking_.insert({it->second, &it->first});
  }

  // Throws std::logic_error when n exceeds the stored count.
  void subtract(const SymbolPair& pair, Count n) {
    if (n == 0) return;
    auto it = counts_.find(pair);
    if (it == counts_.end() || it->second < n) {
      throw std::logic_error("pair count underflow for (" + pair.first + ", " +
                             pair.second + ")");
    }
    ranking_.erase({it->second, &it->first});
    it->second -= n;
    if (it->second == 0) {
      counts_.erase(it);
    } else {
      ranking_.insert({it->second, &it->first});
    }
  }

  Count count(const SymbolPair& pair) const {
    auto it = counts_.find(pair);
    return it == counts_.end() ? 0 : it->second;
  }

  bool empty() const { return counts_.empty(); }
  std::size_t size() const { return counts_.size(); }

  Count total() const {
    Count t = 0;
    for (const auto& [p, c] : counts_) t += c;
    return t;
  }

  // Highest count; ties go to the lexicographically smallest pair.
  // Precondition: !empty().
  const SymbolPair& top() const { return *ranking_.begin()->pair; }
  Count max_count() const { return ranking_.begin()->count; }

  Map::const_iterator begin() const { return counts_.begin(); }
  Map::const_iterator end() const { return counts_.end(); }
  const Map& by_pair() const { return counts_; }

  friend bool operator==(const PairCounts& a, const PairCounts& b) {
    return a.counts_ == b.counts_;
  }

 private:
  struct Ranked {
    Count count;
    const SymbolPair* pair;
  };
  struct ByCountDesc {
    bool operator()(const Ranked& a, const Ranked& b) const {
      if (a.count != b.count) return a.count > b.count;
      return *a.pair < *b.pair;
    }
  };

  Map counts_;
  std::set<Ranked, ByCountDesc> ranking_;
};

inline void add_word_pairs(const Word& word, Count freq,
                           PairCounts::Map& counts) {
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    counts[{word[i], word[i + 1]}] += freq;
  }
}

// Every adjacent position counts once, weighted by the word's frequency.
// Overlapping positions (a a a) count separately.
inline PairCounts count_symbol_pairs(const WordTypeCorpus& corpus) {
  PairCounts::Map counts;
  for (const auto& [word, freq] : corpus) add_word_pairs(word, freq, counts);
  return PairCounts(std::move(counts));
}

// Word types that collide after merging have their frequencies summed.
inline WordTypeCorpus apply_rule(const WordTypeCorpus& corpus,
                                 const MergeRule& rule) {
  WordTypeCorpus out;
  for (const auto& [word, freq] : corpus) {
    Word w = word;
    merge_in_place(w, rule);
    out.add(std::move(w), freq);
  }
  return out;
}

}  // namespace rbpe
