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

#ifndef DOCGRAPH_SRC_BINARY_IO_H_
#define DOCGRAPH_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "docgraph/error.h"

namespace docgraph::binary {

inline void put_u32(std::ostream &out, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

inline void put_u64(std::ostream &out, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

inline void put_f32(std::ostream &out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }
inline void put_f64(std::ostream &out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

inline void put_string(std::ostream &out, const std::string &s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void read_exact(std::istream &in, char *dst, size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n) throw Error(ErrorCode::kFormat, "unexpected end of binary file");
}

inline uint32_t get_u32(std::istream &in) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char *>(b), 4);
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline uint64_t get_u64(std::istream &in) {
  unsigned char b[8];
  read_exact(in, reinterpret_cast<char *>(b), 8);
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline float get_f32(std::istream &in) { return std::bit_cast<float>(get_u32(in)); }
inline double get_f64(std::istream &in) { return std::bit_cast<double>(get_u64(in)); }

inline std::string get_string(std::istream &in, uint32_t max_len = 1u << 20) {
  uint32_t n = get_u32(in);
  if (n > max_len) throw Error(ErrorCode::kFormat, "string length out of range");
  std::string s(n, '\0');
  read_exact(in, s.data(), n);
  return s;
}

}  // namespace docgraph::binary

#endif  // DOCGRAPH_SRC_BINARY_IO_H_
