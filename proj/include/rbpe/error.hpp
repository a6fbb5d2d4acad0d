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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rbpe {

enum class ErrorKind {
  kParse,
  kIo,
  kValidation,
  kAlignment,
  kReservedMarker,
  kNoPairs,
  kComparability,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kAlignment: return "alignment";
    case ErrorKind::kReservedMarker: return "reserved-marker";
    case ErrorKind::kNoPairs: return "no-pairs";
    case ErrorKind::kComparability: return "comparability";
  }
  return "unknown";
}

// Base of every error the library throws. The kind selects the CLI
// diagnostic class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::kParse,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

// Constructibility failure in a merge table; rank() names the first bad rule.
class RankValidationError : public ValidationError {
 public:
  RankValidationError(std::size_t rank, const std::string& what)
      : ValidationError("rank " + std::to_string(rank) + ": " + what),
        rank_(rank) {}
  std::size_t rank() const noexcept { return rank_; }

 private:
  std::size_t rank_;
};

class AlignmentError : public Error {
 public:
  AlignmentError(std::size_t line, const std::string& what)
      : Error(ErrorKind::kAlignment,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ReservedMarkerError : public Error {
 public:
  explicit ReservedMarkerError(std::string_view token)
      : Error(ErrorKind::kReservedMarker,
              "token contains the reserved end-of-word marker: " +
                  std::string(token)) {}
};

class NoPairsError : public Error {
 public:
  NoPairsError() : Error(ErrorKind::kNoPairs, "no symbol pairs available") {}
};

class ComparabilityError : public Error {
 public:
  explicit ComparabilityError(const std::string& what)
      : Error(ErrorKind::kComparability, what) {}
};

}  // namespace rbpe
