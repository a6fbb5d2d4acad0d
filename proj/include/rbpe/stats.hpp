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

// Corpus and segmentation diagnostics.

#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "rbpe/core.hpp"
#include "rbpe/segmenter.hpp"

namespace rbpe {

struct CorpusStats {
  Count sentences = 0;
  Count tokens = 0;
  Count types = 0;
  // Empty when there are no tokens.
  std::optional<double> type_token_ratio;
};

inline CorpusStats corpus_stats(std::istream& lines) {
  CorpusStats s;
  std::unordered_set<std::string> types;
  std::string line;
  while (std::getline(lines, line)) {
    ++s.sentences;
    for (auto tok : split_tokens(line)) {
      ++s.tokens;
      types.emplace(tok);
    }
  }
  s.types = types.size();
  if (s.tokens > 0) {
    s.type_token_ratio =
        static_cast<double>(s.types) / static_cast<double>(s.tokens);
  }
  return s;
}

struct SegmentationReport {
  Count subword_tokens = 0;
  Count original_tokens = 0;
  // Joiner-suffixed forms are distinct entries from word-final forms.
  std::map<std::string, Count> subword_vocab;

  std::optional<double> fertility() const {
    if (original_tokens == 0) return std::nullopt;
    return static_cast<double>(subword_tokens) /
           static_cast<double>(original_tokens);
  }

  // One original token and its subwords, `freq` times.
  void add_word(std::span<const std::string> subwords, Count freq = 1) {
    original_tokens += freq;
    subword_tokens += subwords.size() * freq;
    for (const auto& s : subwords) subword_vocab[s] += freq;
  }
};

// Number of original words in a segmented line: subwords not ending in the
// joiner.
inline std::size_t count_joined_words(
    const std::vector<std::string_view>& subwords,
    const JoinerConvention& conv) {
  std::size_t words = 0;
  for (auto s : subwords) {
    if (!s.ends_with(conv.joiner)) ++words;
  }
  return words;
}

inline SegmentationReport segmentation_report(std::istream& original,
                                              std::istream& segmented,
                                              const JoinerConvention& conv = {}) {
  SegmentationReport r;
  std::string orig_line;
  std::string seg_line;
  std::size_t line_no = 0;
  while (true) {
    const bool have_orig = static_cast<bool>(std::getline(original, orig_line));
    const bool have_seg = static_cast<bool>(std::getline(segmented, seg_line));
    if (!have_orig && !have_seg) break;
    ++line_no;
    if (have_orig != have_seg) {
      throw AlignmentError(line_no, have_orig ? "segmented stream ended early"
                                              : "original stream ended early");
    }
    const auto orig_tokens = split_tokens(orig_line);
    const auto subwords = split_tokens(seg_line);
    if (count_joined_words(subwords, conv) != orig_tokens.size()) {
      throw AlignmentError(line_no, "word count differs between streams");
    }
    r.original_tokens += orig_tokens.size();
    r.subword_tokens += subwords.size();
    for (auto s : subwords) ++r.subword_vocab[std::string(s)];
  }
  return r;
}

// Report of running `table` over every token of `corpus`, without
// materializing text.
inline SegmentationReport segmentation_report(const WordTypeCorpus& corpus,
                                              const MergeTable& table,
                                              const JoinerConvention& conv = {}) {
  SegmentationReport r;
  Segmenter segmenter(table);
  for (const auto& [word, freq] : corpus) {
    const std::string token = surface_form(word);
    r.add_word(segmenter.subwords(token, conv), freq);
  }
  return r;
}

struct CoverageReport {
  Count threshold = 100;
  double fraction_at_or_above = 0.0;
  bool passes95 = false;
};

inline CoverageReport coverage(const SegmentationReport& report,
                               Count threshold = 100) {
  if (report.subword_vocab.empty()) {
    throw ValidationError("coverage of an empty vocabulary");
  }
  std::size_t hits = 0;
  for (const auto& [s, f] : report.subword_vocab) {
    if (f >= threshold) ++hits;
  }
  CoverageReport c;
  c.threshold = threshold;
  c.fraction_at_or_above = static_cast<double>(hits) /
                           static_cast<double>(report.subword_vocab.size());
  c.passes95 = c.fraction_at_or_above >= 0.95;
  return c;
}

struct ReplicationSummary {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Standard error uses the (n-1) sample standard deviation.
inline ReplicationSummary mean_std_error(std::span<const double> values) {
  if (values.size() < 2) {
    throw ValidationError("standard error needs at least 2 values");
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n), values.size()};
}

// Length ratio b / a over the same original stream.
inline double compare_reports(const SegmentationReport& a,
                              const SegmentationReport& b) {
  if (a.original_tokens != b.original_tokens) {
    throw ComparabilityError("reports cover different original streams (" +
                             std::to_string(a.original_tokens) + " vs " +
                             std::to_string(b.original_tokens) + " tokens)");
  }
  if (a.subword_tokens == 0) {
    throw ComparabilityError("baseline report has no subword tokens");
  }
  return static_cast<double>(b.subword_tokens) /
         static_cast<double>(a.subword_tokens);
}

// ---- Report output ---------------------------------------------------------

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Shortest round-trippable form.
inline std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v,
                                   int digits = -1) {
  if (!v) return "undefined";
  return digits < 0 ? format_full(*v) : format_fixed(*v, digits);
}

enum class ReportFormat { kText, kKeyValue };

// Aligned `label  value` rows.
inline void write_rows(
    std::ostream& out,
    const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) {
    out << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  }
}

inline void write_report(std::ostream& out, const CorpusStats& s,
                         ReportFormat format) {
  if (format == ReportFormat::kKeyValue) {
    out << "sentences=" << s.sentences << '\n'
        << "tokens=" << s.tokens << '\n'
        << "types=" << s.types << '\n'
        << "typeTokenRatio=" << format_optional(s.type_token_ratio) << '\n';
  } else {
    write_rows(out, {{"sentences", std::to_string(s.sentences)},
                     {"tokens", std::to_string(s.tokens)},
                     {"types", std::to_string(s.types)},
                     {"type-token ratio", format_optional(s.type_token_ratio, 2)}});
  }
}

inline void write_report(std::ostream& out, const SegmentationReport& r,
                         ReportFormat format) {
  if (format == ReportFormat::kKeyValue) {
    out << "originalTokens=" << r.original_tokens << '\n'
        << "subwordTokens=" << r.subword_tokens << '\n'
        << "fertility=" << format_optional(r.fertility()) << '\n'
        << "subwordVocab=" << r.subword_vocab.size() << '\n';
  } else {
    write_rows(out, {{"original tokens", std::to_string(r.original_tokens)},
                     {"subword tokens", std::to_string(r.subword_tokens)},
                     {"fertility", format_optional(r.fertility(), 4)},
                     {"subword vocab", std::to_string(r.subword_vocab.size())}});
  }
}

inline void write_report(std::ostream& out, const CoverageReport& c,
                         ReportFormat format) {
  if (format == ReportFormat::kKeyValue) {
    out << "threshold=" << c.threshold << '\n'
        << "fractionAtOrAbove=" << format_full(c.fraction_at_or_above) << '\n'
        << "passes95=" << (c.passes95 ? "true" : "false") << '\n';
  } else {
    write_rows(out, {{"threshold", std::to_string(c.threshold)},
                     {"fraction at or above", format_fixed(c.fraction_at_or_above, 4)},
                     {"passes 95%", c.passes95 ? "yes" : "no"}});
  }
}

}  // namespace rbpe
