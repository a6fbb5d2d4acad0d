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

// Merge file serialization.
//
// Layout: the header line `#version: 0.2`, then one `left right` line per
// rule in rank order, LF terminated. Provenance goes to a sidecar
// `<mergefile>.meta` with one key=value per line.

#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "rbpe/core.hpp"
#include "rbpe/policy.hpp"
#include "rbpe/trainer.hpp"

namespace rbpe {

inline constexpr std::string_view kMergeFileHeader = "#version: 0.2";
inline constexpr std::string_view kSidecarSuffix = ".meta";

// Every operand must be a single character, the end-of-word marker, or the
// merged symbol of a strictly lower-ranked rule.
inline void validate_constructible(const MergeTable& table) {
  std::unordered_set<std::string> known;
  auto constructible = [&](const Symbol& s) {
    return s == kEndOfWord || is_single_character(s) || known.count(s) > 0;
  };
  for (std::size_t i = 0; i < table.rules.size(); ++i) {
    const MergeRule& rule = table.rules[i];
    if (rule.rank != i) {
      throw RankValidationError(i, "rank does not match position");
    }
    if (rule.merged != rule.left + rule.right) {
      throw RankValidationError(i, "merged symbol is not left+right");
    }
    for (const Symbol* s : {&rule.left, &rule.right}) {
      if (s->empty()) throw RankValidationError(i, "empty symbol");
      if (!constructible(*s)) {
        throw RankValidationError(i, "symbol '" + *s +
                                         "' is not constructible from "
                                         "lower-ranked rules");
      }
    }
    known.insert(rule.merged);
  }
}

inline void write_merges(const MergeTable& table, std::ostream& out) {
  out << kMergeFileHeader << '\n';
  for (const auto& rule : table.rules) {
    out << rule.left << ' ' << rule.right << '\n';
  }
  if (!out) throw IoError("failed to write merge file");
}

inline void write_sidecar(const MergeTable& table, std::ostream& out) {
  if (!table.provenance) {
    throw ValidationError("merge table has no provenance to record");
  }
  const Provenance& p = *table.provenance;
  out << "method=" << to_string(p.method) << '\n'
      << "seed=" << p.seed << '\n'
      << "requested=" << p.requested << '\n'
      << "learned=" << table.rules.size() << '\n'
      << "earlyStopped=" << (p.early_stopped ? "true" : "false") << '\n';
  if (!out) throw IoError("failed to write sidecar");
}

// Ranks come from line order. The header is optional; blank lines and
// lines without exactly two fields are parse errors.
inline MergeTable read_merges(std::istream& in) {
  MergeTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("#version:", 0) == 0) {
      if (line != kMergeFileHeader) {
        throw ParseError(line_no, "unsupported header '" + line + "'");
      }
      continue;
    }
    const auto fields = split_tokens(line);
    if (fields.size() != 2 ||
        line.size() != fields[0].size() + 1 + fields[1].size()) {
      throw ParseError(line_no, "expected 'left right', got '" + line + "'");
    }
    table.append(std::string(fields[0]), std::string(fields[1]));
  }
  if (in.bad()) throw IoError("failed to read merge file");
  validate_constructible(table);
  return table;
}

namespace detail {

inline std::uint64_t parse_u64(std::string_view value, std::size_t line_no) {
  std::uint64_t v = 0;
  if (value.empty()) throw ParseError(line_no, "empty number");
  for (char c : value) {
    if (c < '0' || c > '9') {
      throw ParseError(line_no, "invalid number '" + std::string(value) + "'");
    }
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace detail

inline Provenance read_sidecar(std::istream& in, std::size_t learned_rules) {
  Provenance p;
  std::optional<std::uint64_t> learned;
  bool have_method = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected key=value, got '" + line + "'");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "method") {
      auto m = parse_sampling_method(value);
      if (!m) throw ParseError(line_no, "unknown method '" + value + "'");
      p.method = *m;
      have_method = true;
    } else if (key == "seed") {
      p.seed = detail::parse_u64(value, line_no);
    } else if (key == "requested") {
      p.requested = detail::parse_u64(value, line_no);
    } else if (key == "learned") {
      learned = detail::parse_u64(value, line_no);
    } else if (key == "earlyStopped") {
      if (value != "true" && value != "false") {
        throw ParseError(line_no, "earlyStopped must be true or false");
      }
      p.early_stopped = value == "true";
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  if (!have_method) throw ValidationError("sidecar has no method");
  if (learned && *learned != learned_rules) {
    throw ValidationError("sidecar records " + std::to_string(*learned) +
                          " learned rules, merge file has " +
                          std::to_string(learned_rules));
  }
  return p;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& merges) {
  return merges.string() + std::string(kSidecarSuffix);
}

inline void save_merge_file(const std::filesystem::path& path,
                            const MergeTable& table) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_merges(table, out);
  }
  if (table.provenance) {
    const auto meta = sidecar_path(path);
    std::ofstream out(meta, std::ios::binary);
    if (!out) throw IoError("cannot open '" + meta.string() + "' for writing");
    write_sidecar(table, out);
  }
}

// A missing sidecar leaves the provenance unknown.
inline MergeTable load_merge_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  MergeTable table = read_merges(in);
  const auto meta = sidecar_path(path);
  std::ifstream meta_in(meta, std::ios::binary);
  if (meta_in) table.provenance = read_sidecar(meta_in, table.size());
  return table;
}

inline std::string to_merge_file_bytes(const MergeTable& table) {
  std::ostringstream out;
  write_merges(table, out);
  return out.str();
}

}  // namespace rbpe
