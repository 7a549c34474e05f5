// Copyright 2026 The docgraph Authors.
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

#ifndef DOCGRAPH_SRC_RNG_H_
#define DOCGRAPH_SRC_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

#include "docgraph/embeddings.h"

namespace docgraph::rng {

// Independent stream for a (seed, key) pair.
inline std::mt19937_64 keyed_stream(uint64_t seed, std::string_view key) {
  uint64_t h = fnv1a64(key, seed);
  std::seed_seq seq{static_cast<uint32_t>(h), static_cast<uint32_t>(h >> 32), static_cast<uint32_t>(seed),
                    static_cast<uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

// Uniform in [0, n). Rejection sampling keeps results identical across
// standard library implementations.
inline size_t draw(std::mt19937_64 &rng, size_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<size_t>(x % n);
}

inline double unit(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace docgraph::rng

#endif  // DOCGRAPH_SRC_RNG_H_
