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

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "featgrind/error.hpp"

namespace featgrind::binio {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian and read by memcpy");

using Magic = std::array<char, 8>;

constexpr Magic make_magic(std::string_view tag) {
  Magic m{};
  for (size_t i = 0; i < tag.size() && i < m.size(); ++i) m[i] = tag[i];
  return m;
}

class Writer {
 public:
  void bytes(std::span<const uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  void magic(const Magic& m) {
    bytes({reinterpret_cast<const uint8_t*>(m.data()), m.size()});
  }
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    uint8_t raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    bytes(raw);
  }
  template <typename T>
  void array(std::span<const T> values) {
    bytes({reinterpret_cast<const uint8_t*>(values.data()), values.size_bytes()});
  }

  const std::vector<uint8_t>& buffer() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<uint8_t> buf_;
};

class Reader {
 public:
  Reader(std::span<const uint8_t> data, std::string what) : data_(data), what_(std::move(what)) {}

  void expect_magic(const Magic& m) {
    auto got = take(m.size());
    if (std::memcmp(got.data(), m.data(), m.size()) != 0)
      throw DataError(what_ + ": bad magic (not a " + std::string(m.data()) + " file)");
  }
  template <typename T>
  T get() {
    T value;
    auto raw = take(sizeof(T));
    std::memcpy(&value, raw.data(), sizeof(T));
    return value;
  }
  template <typename T>
  std::vector<T> array(uint64_t count) {
    if (count > remaining() / sizeof(T)) fail_size(count * sizeof(T));
    std::vector<T> out(count);
    auto raw = take(count * sizeof(T));
    std::memcpy(out.data(), raw.data(), raw.size());
    return out;
  }
  std::span<const uint8_t> take(uint64_t count) {
    if (count > remaining()) fail_size(count);
    auto out = data_.subspan(pos_, count);
    pos_ += count;
    return out;
  }
  uint64_t remaining() const { return data_.size() - pos_; }
  void expect_end() const {
    if (remaining() != 0)
      throw DataError(what_ + ": size mismatch, " + std::to_string(remaining()) +
                      " trailing bytes after payload");
  }
  const std::string& what() const { return what_; }

 private:
  [[noreturn]] void fail_size(uint64_t wanted) const {
    throw DataError(what_ + ": size mismatch, needed " + std::to_string(wanted) +
                    " more bytes but only " + std::to_string(remaining()) + " remain");
  }

  std::span<const uint8_t> data_;
  uint64_t pos_ = 0;
  std::string what_;
};

std::vector<uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const uint8_t> data);

/// FNV-1a, 64-bit. Used for config and workload fingerprints.
constexpr uint64_t fnv1a(std::span<const uint8_t> data, uint64_t h = 0xcbf29ce484222325ULL) {
  for (uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a(std::string_view s, uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a({reinterpret_cast<const uint8_t*>(s.data()), s.size()}, h);
}

}  // namespace featgrind::binio
