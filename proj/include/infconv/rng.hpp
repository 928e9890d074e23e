// Copyright 2026 The infconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace infconv {

// Counter-based uniform stream: draw i of stream s under seed k is a pure
// function of (k, s, i), so parallel chunking cannot change any draw and
// results are reproducible for any thread count. The mixer is splitmix64.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(seed ^ (stream * 0xD2B74407B1CE6E93ULL + 0x9E3779B97F4A7C15ULL))) {}

  // Uniform in the open interval (0, 1); never returns 0 or 1.
  double uniform(std::uint64_t i) const {
    std::uint64_t z = splitmix64(key_ + i * 0xDA942042E4DD58B5ULL);
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

}  // namespace infconv
