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

#include <cstdint>

namespace rbpe {

// splitmix64 (Steele, Lea and Flood; constants as published by Vigna).
// The recurrence is fully specified, so a seed yields the same stream on
// every platform.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    ++draws_;
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) from the high 53 bits of one draw.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t draws() const { return draws_; }
  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  std::uint64_t draws_ = 0;
};

}  // namespace rbpe
