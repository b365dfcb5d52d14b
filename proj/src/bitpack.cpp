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

#include "featgrind/bitpack.hpp"

#include <string>

#include "featgrind/error.hpp"

namespace featgrind {

namespace {

void check_bits(unsigned bits) {
  if (bits < 1 || bits > 32) throw InvalidArgument("code width must be in [1, 32], got " + std::to_string(bits));
}

}  // namespace

void write_code(std::span<uint8_t> packed, uint64_t index, unsigned bits, uint32_t code) {
  uint64_t bit = index * bits;
  for (int b = static_cast<int>(bits) - 1; b >= 0; --b, ++bit) {
    const uint8_t mask = static_cast<uint8_t>(0x80u >> (bit & 7));
    if ((code >> b) & 1u)
      packed[bit >> 3] |= mask;
    else
      packed[bit >> 3] &= static_cast<uint8_t>(~mask);
  }
}

uint32_t read_code(std::span<const uint8_t> packed, uint64_t index, unsigned bits) {
  uint64_t bit = index * bits;
  uint32_t code = 0;
  for (unsigned b = 0; b < bits; ++b, ++bit)
    code = (code << 1) | ((packed[bit >> 3] >> (7 - (bit & 7))) & 1u);
  return code;
}

std::vector<uint8_t> pack_codes(std::span<const uint32_t> codes, unsigned bits) {
  check_bits(bits);
  std::vector<uint8_t> out(packed_size(codes.size(), bits), 0);
  const uint64_t limit = bits == 32 ? ~uint64_t{0} : (uint64_t{1} << bits);
  for (uint64_t i = 0; i < codes.size(); ++i) {
    if (codes[i] >= limit)
      throw InvalidArgument("code " + std::to_string(codes[i]) + " does not fit in " + std::to_string(bits) + " bits");
    write_code(out, i, bits, codes[i]);
  }
  return out;
}

std::vector<uint32_t> unpack_codes(std::span<const uint8_t> packed, uint64_t count, unsigned bits) {
  check_bits(bits);
  if (packed.size() < packed_size(count, bits)) throw DataError("packed buffer too short");
  std::vector<uint32_t> out(count);
  for (uint64_t i = 0; i < count; ++i) out[i] = read_code(packed, i, bits);
  return out;
}

}  // namespace featgrind
