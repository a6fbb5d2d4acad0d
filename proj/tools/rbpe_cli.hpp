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

// Command-line front end: train / apply / desegment / stats / compare /
// sweep. Kept in a header so the tests can drive it in-process.

#pragma once

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "rbpe/rbpe.hpp"

namespace rbpe::cli {

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

// Holds either a file stream or a borrowed standard stream ("-").
class InputFile {
 public:
  InputFile(const std::string& path, std::istream& stdin_stream) {
    if (path == "-") {
      stream_ = &stdin_stream;
    } else {
      file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file_) throw IoError("cannot open '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::istream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* stream_ = nullptr;
};

class OutputFile {
 public:
  OutputFile(const std::string& path, std::ostream& stdout_stream) {
    if (path == "-") {
      stream_ = &stdout_stream;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw IoError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  void flush() {
    stream_->flush();
    if (!*stream_) throw IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::uint64_t parse_count(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError(0, "expected a non-negative integer, got '" + s + "'");
  }
  return std::stoull(s);
}

// "0..9" (inclusive) or "1,5,7".
inline std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const auto lo = parse_count(spec.substr(0, dots));
    const auto hi = parse_count(spec.substr(dots + 2));
    if (hi < lo) throw ParseError(0, "empty seed range '" + spec + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  } else {
    for (const auto& item : split_list(spec)) seeds.push_back(parse_count(item));
  }
  return seeds;
}

inline std::vector<SamplingMethod> parse_methods(const std::string& spec) {
  std::vector<SamplingMethod> methods;
  for (const auto& item : split_list(spec)) {
    auto m = parse_sampling_method(item);
    if (!m) throw ParseError(0, "unknown method '" + item + "'");
    methods.push_back(*m);
  }
  return methods;
}

inline ReportFormat parse_format(const std::string& s) {
  if (s == "text") return ReportFormat::kText;
  if (s == "kv") return ReportFormat::kKeyValue;
  throw ParseError(0, "unknown format '" + s + "'");
}

struct SweepCell {
  SamplingMethod method;
  std::uint64_t merges;
  std::vector<double> fertility;
  std::vector<double> vocab;
  std::vector<double> coverage;
};

inline std::string cell_text(std::span<const double> values) {
  const auto s = mean_std_error(values);
  return format_fixed(s.mean, 4) + " (" + format_fixed(s.std_error, 4) + ")";
}

// Runs every (method, merges, seed) cell; cells are independent and each
// owns its RandomSource, so they run on a small worker pool.
inline std::vector<SweepCell> run_sweep(const WordTypeCorpus& train_corpus,
                                        const WordTypeCorpus& eval_corpus,
                                        const std::vector<SamplingMethod>& methods,
                                        const std::vector<std::uint64_t>& merges,
                                        const std::vector<std::uint64_t>& seeds,
                                        Count threshold, const JoinerConvention& conv,
                                        unsigned jobs) {
  std::vector<SweepCell> cells;
  for (auto m : methods) {
    for (auto k : merges) {
      cells.push_back({m, k, std::vector<double>(seeds.size()),
                       std::vector<double>(seeds.size()),
                       std::vector<double>(seeds.size())});
    }
  }
  const std::size_t runs = cells.size() * seeds.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      SweepCell& cell = cells[i / seeds.size()];
      const std::size_t s = i % seeds.size();
      const MergeTable table =
          train_bpe(train_corpus, cell.merges, cell.method, seeds[s]);
      const SegmentationReport report =
          segmentation_report(eval_corpus, table, conv);
      cell.fertility[s] = report.fertility().value_or(0.0);
      cell.vocab[s] = static_cast<double>(report.subword_vocab.size());
      cell.coverage[s] = report.subword_vocab.empty()
                             ? 0.0
                             : coverage(report, threshold).fraction_at_or_above;
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(runs)));
  std::vector<std::jthread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  pool.clear();
  return cells;
}

inline void write_sweep(std::ostream& out, const std::vector<SweepCell>& cells,
                        const std::vector<SamplingMethod>& methods,
                        const std::vector<std::uint64_t>& merges,
                        Count threshold, ReportFormat format) {
  struct Metric {
    std::string name;
    std::vector<double> SweepCell::*values;
  };
  const std::vector<Metric> metrics = {
      {"fertility", &SweepCell::fertility},
      {"subwordVocab", &SweepCell::vocab},
      {"coverage" + std::to_string(threshold), &SweepCell::coverage}};

  if (format == ReportFormat::kKeyValue) {
    for (const auto& metric : metrics) {
      for (const auto& cell : cells) {
        const auto s = mean_std_error(cell.*metric.values);
        const std::string key = metric.name + "." +
                                std::string(to_string(cell.method)) + "." +
                                std::to_string(cell.merges);
        out << key << ".mean=" << format_full(s.mean) << '\n'
            << key << ".se=" << format_full(s.std_error) << '\n'
            << key << ".n=" << s.n << '\n';
      }
    }
    return;
  }

  for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
    const auto& metric = metrics[mi];
    if (mi > 0) out << '\n';
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header = {metric.name};
    for (auto k : merges) header.push_back(std::to_string(k));
    grid.push_back(header);
    for (std::size_t r = 0; r < methods.size(); ++r) {
      std::vector<std::string> row = {std::string(to_string(methods[r]))};
      for (std::size_t c = 0; c < merges.size(); ++c) {
        row.push_back(cell_text(cells[r * merges.size() + c].*metric.values));
      }
      grid.push_back(row);
    }
    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& row : grid) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        widths[c] = std::max(widths[c], row[c].size());
      }
    }
    for (const auto& row : grid) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const std::string pad(widths[c] - row[c].size(), ' ');
        line += c == 0 ? row[c] + pad : "  " + pad + row[c];
      }
      out << line << '\n';
    }
  }
}

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return 2;
    case ErrorKind::kIo: return 3;
    case ErrorKind::kValidation:
    case ErrorKind::kReservedMarker:
    case ErrorKind::kNoPairs: return 4;
    case ErrorKind::kAlignment:
    case ErrorKind::kComparability: return 5;
  }
  return 1;
}

// `args` excludes the program name.
inline int run(const std::vector<std::string>& args, Streams io) {
  CLI::App app{"Byte pair encoding with randomized merge selection", "rbpe"};
  app.require_subcommand(1);

  std::string input = "-";
  std::string output = "-";
  std::string codes;
  std::string joiner = "@@";
  std::string method_name = "standard";
  std::string format_name = "text";
  std::uint64_t merges = 0;
  std::uint64_t seed = 0;
  std::uint64_t threshold = 100;
  bool threshold_given = false;

  const std::string method_help = "standard, softmax, countprop or uniform";
  const std::string format_help = "text or kv";

  auto* train_cmd = app.add_subcommand("train", "Learn a merge table");
  train_cmd->add_option("--input,-i", input, "Tokenized corpus ('-' = stdin)");
  train_cmd->add_option("--output,-o", output, "Merge file to write")->required();
  train_cmd->add_option("--merges,-m", merges, "Number of merges to learn")
      ->required()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--method", method_name, method_help);
  train_cmd->add_option("--seed", seed, "Random seed");

  auto* apply_cmd = app.add_subcommand("apply", "Segment text with a merge table");
  apply_cmd->add_option("--codes,-c", codes, "Merge file")->required();
  apply_cmd->add_option("--input,-i", input, "Tokenized text ('-' = stdin)");
  apply_cmd->add_option("--output,-o", output, "Segmented text ('-' = stdout)");
  apply_cmd->add_option("--joiner", joiner, "Suffix marking non-final subwords");

  auto* deseg_cmd = app.add_subcommand("desegment", "Undo segmentation");
  deseg_cmd->add_option("--input,-i", input, "Segmented text ('-' = stdin)");
  deseg_cmd->add_option("--output,-o", output, "Restored text ('-' = stdout)");
  deseg_cmd->add_option("--joiner", joiner, "Suffix marking non-final subwords");

  auto* stats_cmd = app.add_subcommand("stats", "Corpus and segmentation statistics");
  stats_cmd->require_subcommand(1);
  auto* stats_corpus = stats_cmd->add_subcommand("corpus", "Sentence/token/type counts");
  stats_corpus->add_option("--input,-i", input, "Tokenized corpus ('-' = stdin)");
  stats_corpus->add_option("--format", format_name, format_help);

  std::string original;
  std::string segmented;
  auto* stats_seg = stats_cmd->add_subcommand("segmentation", "Fertility and subword vocabulary");
  stats_seg->add_option("--original", original, "Original tokenized text")->required();
  stats_seg->add_option("--segmented", segmented, "Segmented text")->required();
  stats_seg->add_option("--joiner", joiner, "Suffix marking non-final subwords");
  stats_seg->add_option("--format", format_name, format_help);
  auto* threshold_opt =
      stats_seg->add_option("--threshold", threshold, "Also report coverage at this frequency");

  std::string baseline;
  std::string candidate;
  auto* compare_cmd = app.add_subcommand("compare", "Length ratio of two segmentations");
  compare_cmd->add_option("--original", original, "Original tokenized text")->required();
  compare_cmd->add_option("--baseline,-a", baseline, "First segmented file")->required();
  compare_cmd->add_option("--candidate,-b", candidate, "Second segmented file")->required();
  compare_cmd->add_option("--joiner", joiner, "Suffix marking non-final subwords");
  compare_cmd->add_option("--format", format_name, format_help);

  std::string eval_path;
  std::string methods_spec = "standard,softmax,countprop,uniform";
  std::string merges_spec;
  std::string seeds_spec = "0..9";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep_cmd = app.add_subcommand("sweep", "Methods x merge budgets x seeds grid");
  sweep_cmd->add_option("--input,-i", input, "Training corpus ('-' = stdin)");
  sweep_cmd->add_option("--eval", eval_path, "Evaluation corpus (default: training corpus)");
  sweep_cmd->add_option("--methods", methods_spec, "Comma-separated methods");
  sweep_cmd->add_option("--merges", merges_spec, "Comma-separated merge budgets")->required();
  sweep_cmd->add_option("--seeds", seeds_spec, "Seed range 'a..b' or list");
  sweep_cmd->add_option("--threshold", threshold, "Coverage frequency threshold");
  sweep_cmd->add_option("--joiner", joiner, "Suffix marking non-final subwords");
  sweep_cmd->add_option("--format", format_name, format_help);
  sweep_cmd->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    const std::string msg = e.what();
    io.err << "rbpe: parse error: " << msg.substr(0, msg.find('\n')) << '\n';
    return exit_code(ErrorKind::kParse);
  }
  threshold_given = threshold_opt->count() > 0;

  try {
    const JoinerConvention conv{joiner};
    conv.validate();

    if (*train_cmd) {
      auto method = parse_sampling_method(method_name);
      if (!method) throw ParseError(0, "unknown method '" + method_name + "'");
      InputFile in(input, io.in);
      const WordTypeCorpus corpus = init_corpus(in.get());
      const MergeTable table = train_bpe(corpus, merges, *method, seed);
      save_merge_file(output, table);
      io.out << "learned=" << table.size() << '\n';
      if (table.early_stopped()) {
        io.err << "rbpe: warning: pair set exhausted after " << table.size()
               << " of " << merges << " merges\n";
      }
    } else if (*apply_cmd) {
      const MergeTable table = load_merge_file(codes);
      Segmenter segmenter(table);
      InputFile in(input, io.in);
      OutputFile out(output, io.out);
      std::string line;
      while (std::getline(in.get(), line)) {
        out.get() << segmenter.segment_line(line, conv) << '\n';
      }
      out.flush();
    } else if (*deseg_cmd) {
      InputFile in(input, io.in);
      OutputFile out(output, io.out);
      std::string line;
      while (std::getline(in.get(), line)) {
        out.get() << desegment_line(line, conv) << '\n';
      }
      out.flush();
    } else if (*stats_corpus) {
      const ReportFormat format = parse_format(format_name);
      InputFile in(input, io.in);
      write_report(io.out, corpus_stats(in.get()), format);
    } else if (*stats_seg) {
      const ReportFormat format = parse_format(format_name);
      InputFile orig(original, io.in);
      InputFile seg(segmented, io.in);
      const SegmentationReport report =
          segmentation_report(orig.get(), seg.get(), conv);
      write_report(io.out, report, format);
      if (threshold_given) {
        write_report(io.out, coverage(report, threshold), format);
      }
    } else if (*compare_cmd) {
      const ReportFormat format = parse_format(format_name);
      auto report_for = [&](const std::string& path) {
        InputFile orig(original, io.in);
        InputFile seg(path, io.in);
        return segmentation_report(orig.get(), seg.get(), conv);
      };
      const SegmentationReport a = report_for(baseline);
      const SegmentationReport b = report_for(candidate);
      const double ratio = compare_reports(a, b);
      if (format == ReportFormat::kKeyValue) {
        io.out << "lengthRatio=" << format_full(ratio) << '\n'
               << "baselineFertility=" << format_optional(a.fertility()) << '\n'
               << "candidateFertility=" << format_optional(b.fertility()) << '\n';
      } else {
        write_rows(io.out, {{"length ratio", format_fixed(ratio, 4)},
                            {"baseline fertility", format_optional(a.fertility(), 4)},
                            {"candidate fertility", format_optional(b.fertility(), 4)}});
      }
    } else if (*sweep_cmd) {
      const ReportFormat format = parse_format(format_name);
      const auto methods = parse_methods(methods_spec);
      std::vector<std::uint64_t> budgets;
      for (const auto& item : split_list(merges_spec)) {
        budgets.push_back(parse_count(item));
      }
      const auto seeds = parse_seeds(seeds_spec);
      if (methods.empty() || budgets.empty()) {
        throw ValidationError("sweep needs at least one method and budget");
      }
      if (seeds.size() < 2) {
        throw ValidationError("sweep needs at least 2 seeds for standard errors");
      }
      InputFile in(input, io.in);
      const WordTypeCorpus train_corpus = init_corpus(in.get());
      WordTypeCorpus eval_corpus = train_corpus;
      if (!eval_path.empty()) {
        InputFile eval_in(eval_path, io.in);
        eval_corpus = init_corpus(eval_in.get());
      }
      const auto cells = run_sweep(train_corpus, eval_corpus, methods, budgets,
                                   seeds, threshold, conv, jobs);
      write_sweep(io.out, cells, methods, budgets, threshold, format);
    }
  } catch (const Error& e) {
    io.err << "rbpe: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    io.err << "rbpe: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rbpe::cli
