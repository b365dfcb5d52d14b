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

#include "featgrind/features.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <string>

#include "featgrind/binio.hpp"
#include "featgrind/error.hpp"
#include "featgrind/rng.hpp"

namespace featgrind {

namespace {
constexpr binio::Magic kMagic = binio::make_magic("FMAT1");
constexpr uint32_t kVersion = 1;
}  // namespace

FeatureMatrix::FeatureMatrix(uint64_t n, uint64_t d, uint32_t elem_bits)
    : n_(n), d_(d), elem_bits_(elem_bits), values_(n * d, 0.0f) {}

FeatureMatrix::FeatureMatrix(uint64_t n, uint64_t d, std::vector<float> values, uint32_t elem_bits)
    : n_(n), d_(d), elem_bits_(elem_bits), values_(std::move(values)) {
  if (values_.size() != n * d)
    throw InvalidArgument("feature values size " + std::to_string(values_.size()) + " != n*d = " +
                          std::to_string(n * d));
}

void FeatureMatrix::check_finite() const {
  for (uint64_t idx = 0; idx < values_.size(); ++idx) {
    if (!std::isfinite(values_[idx]))
      throw DataError("non-finite feature value at (" + std::to_string(idx / d_) + "," +
                      std::to_string(idx % d_) + ")");
  }
}

std::vector<uint8_t> encode_fmat(const FeatureMatrix& f) {
  if (f.elem_bits() != 32) throw InvalidArgument("FMAT1 writer supports elem_bits = 32 only");
  binio::Writer w;
  w.magic(kMagic);
  w.put<uint32_t>(kVersion);
  w.put<uint32_t>(f.elem_bits());
  w.put<uint64_t>(f.rows());
  w.put<uint64_t>(f.cols());
  w.array(f.values());
  return w.take();
}

namespace {

FeatureShape read_header(binio::Reader& r) {
  r.expect_magic(kMagic);
  const auto version = r.get<uint32_t>();
  if (version != kVersion) throw DataError(r.what() + ": unsupported version " + std::to_string(version));
  FeatureShape s;
  s.elem_bits = r.get<uint32_t>();
  s.n = r.get<uint64_t>();
  s.d = r.get<uint64_t>();
  if (s.elem_bits != 32) throw DataError(r.what() + ": unsupported elem_bits " + std::to_string(s.elem_bits));
  if (s.d != 0 && s.n > (uint64_t{1} << 62) / s.d) throw DataError(r.what() + ": corrupt header dimensions");
  return s;
}

}  // namespace

FeatureMatrix decode_fmat(std::span<const uint8_t> bytes) {
  binio::Reader r(bytes, "FMAT1");
  const FeatureShape s = read_header(r);
  auto values = r.array<float>(s.n * s.d);
  r.expect_end();
  FeatureMatrix f(s.n, s.d, std::move(values), s.elem_bits);
  f.check_finite();
  return f;
}

FeatureMatrix load_features(const std::filesystem::path& path) { return decode_fmat(binio::read_file(path)); }

void save_features(const FeatureMatrix& f, const std::filesystem::path& path) {
  binio::write_file(path, encode_fmat(f));
}

FeatureShape peek_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::array<uint8_t, 32> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) throw DataError("FMAT1: truncated header");
  binio::Reader r(header, "FMAT1");
  const FeatureShape s = read_header(r);
  if (std::filesystem::file_size(path) != header.size() + s.n * s.d * 4)
    throw DataError("FMAT1: size mismatch between header and payload");
  return s;
}

FeatureMatrix synthetic_features(uint64_t n, uint64_t d, double noise, uint64_t seed) {
  if (d < 1) throw InvalidArgument("feature dimension must be >= 1");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidArgument("noise must be finite and >= 0");
  Rng rng(seed);
  std::vector<double> u(d);
  double norm = 0.0;
  for (auto& v : u) {
    v = rng.normal();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : u) v /= norm;
  const double scale = noise / std::sqrt(static_cast<double>(d));
  FeatureMatrix f(n, d);
  for (uint64_t i = 0; i < n; ++i)
    for (uint64_t j = 0; j < d; ++j) f.at(i, j) = static_cast<float>(u[j] + scale * rng.normal());
  return f;
}

}  // namespace featgrind
