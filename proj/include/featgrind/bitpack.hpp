// Copyright 2026 The featgrind Authors.
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
#include <span>
#include <vector>

namespace featgrind {

// Fixed-width codes packed MSB-first: code i occupies stream bits
// [i*bits, (i+1)*bits), and stream bit j lives in byte j/8 at bit
// position 7 - j%8. The last byte is zero-padded.

constexpr uint64_t packed_size(uint64_t count, unsigned bits) { return (count * bits + 7) / 8; }

/// bits in [1, 32]; every code must fit in `bits`.
std::vector<uint8_t> pack_codes(std::span<const uint32_t> codes, unsigned bits);
std::vector<uint32_t> unpack_codes(std::span<const uint8_t> packed, uint64_t count, unsigned bits);

void write_code(std::span<uint8_t> packed, uint64_t index, unsigned bits, uint32_t code);
uint32_t read_code(std::span<const uint8_t> packed, uint64_t index, unsigned bits);

/// Smallest b with 2^b >= n (n >= 1); ceil_log2(1) == 0.
constexpr unsigned ceil_log2(uint64_t n) {
  unsigned b = 0;
  while ((uint64_t{1} << b) < n) ++b;
  return b;
}

}  // namespace featgrind
