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

#include "featgrind/vq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "featgrind/binio.hpp"
#include "featgrind/bitpack.hpp"
#include "featgrind/error.hpp"
#include "featgrind/kernels.hpp"
#include "featgrind/rng.hpp"

namespace featgrind {

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::kEuclidean;
  if (name == "cosine") return Metric::kCosine;
  throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Metric m) { return m == Metric::kEuclidean ? "euclidean" : "cosine"; }

CodeLayout parse_layout(std::string_view name) {
  if (name == "packed") return CodeLayout::kPacked;
  if (name == "byte") return CodeLayout::kByteAligned;
  throw InvalidArgument("unknown code layout '" + std::string(name) + "'");
}

std::string_view to_string(CodeLayout l) { return l == CodeLayout::kPacked ? "packed" : "byte"; }

void VqParams::validate() const {
  if (width < 1) throw InvalidArgument("VQ width must be >= 1");
  if (length < 2 || length > kMaxCodebookLength)
    throw InvalidArgument("VQ codebook length must be in [2, " + std::to_string(kMaxCodebookLength) + "]");
  if (fit_sample_fraction && !(*fit_sample_fraction > 0.0 && *fit_sample_fraction <= 1.0))
    throw InvalidArgument("VQ fit sample fraction must be in (0, 1]");
  if (kmeans_max_iters < 1) throw InvalidArgument("k-means needs at least one iteration");
  if (!(kmeans_tol >= 0.0)) throw InvalidArgument("k-means tolerance must be >= 0");
  if (restarts < 1) throw InvalidArgument("k-means needs at least one restart");
}

unsigned vq_code_bits(uint32_t length) { return std::max(1u, ceil_log2(length)); }

unsigned vq_code_storage_bits(uint32_t length, CodeLayout layout) {
  const unsigned bits = vq_code_bits(length);
  return layout == CodeLayout::kPacked ? bits : 8 * ((bits + 7) / 8);
}

uint32_t VqCodec::part_width(uint32_t p) const {
  const uint64_t start = static_cast<uint64_t>(p) * params.width;
  return static_cast<uint32_t>(std::min<uint64_t>(params.width, d - start));
}

namespace {

// Sub-vectors of part `p` for the given rows, as doubles. Under cosine each
// sub-vector is scaled to unit norm (zero stays zero).
std::vector<double> gather_part(const FeatureMatrix& f, std::span<const uint64_t> rows, uint64_t offset,
                                uint32_t width, Metric metric) {
  std::vector<double> out(rows.size() * width);
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto src = f.row(rows[r]).subspan(offset, width);
    double* dst = out.data() + r * width;
    double norm = 0.0;
    for (uint32_t j = 0; j < width; ++j) {
      dst[j] = src[j];
      norm += dst[j] * dst[j];
    }
    if (metric == Metric::kCosine && norm > 0.0) {
      norm = std::sqrt(norm);
      for (uint32_t j = 0; j < width; ++j) dst[j] /= norm;
    }
  }
  return out;
}

bool is_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

// Distinct rows in lexicographic order; stops early once more than `limit`.
std::vector<double> distinct_rows(std::span<const double> points, uint32_t width, uint64_t limit) {
  const uint64_t n = points.size() / width;
  std::vector<uint64_t> order(n);
  for (uint64_t i = 0; i < n; ++i) order[i] = i;
  auto row = [&](uint64_t i) { return points.subspan(i * width, width); };
  std::sort(order.begin(), order.end(), [&](uint64_t a, uint64_t b) {
    const auto ra = row(a), rb = row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  std::vector<double> out;
  uint64_t count = 0;
  for (uint64_t k = 0; k < n; ++k) {
    if (k > 0 && std::ranges::equal(row(order[k]), row(order[k - 1]))) continue;
    const auto r = row(order[k]);
    out.insert(out.end(), r.begin(), r.end());
    if (++count > limit) break;
  }
  return out;
}

struct PartFit {
  std::vector<float> codebook;
  uint32_t entries = 0;
  double objective = 0.0;
  std::vector<double> history;
};

PartFit fit_part(std::vector<double> points, uint32_t width, const VqParams& p, uint64_t part) {
  const uint32_t length = p.length;
  bool saw_zero = false;
  if (p.metric == Metric::kCosine) {
    // Zero sub-vectors are served by entry 0 and stay out of the statistics.
    std::vector<double> nonzero;
    nonzero.reserve(points.size());
    for (size_t i = 0; i < points.size(); i += width) {
      const auto r = std::span<const double>(points).subspan(i, width);
      if (is_zero(r))
        saw_zero = true;
      else
        nonzero.insert(nonzero.end(), r.begin(), r.end());
    }
    points = std::move(nonzero);
  }

  PartFit fit;
  std::vector<double> centroids = distinct_rows(points, width, length);
  const uint64_t distinct = centroids.size() / width;
  if (saw_zero && distinct < length) {
    // Room left for an exact zero entry; it goes first so zero rows decode to zero.
    centroids.insert(centroids.begin(), width, 0.0);
    fit.entries = static_cast<uint32_t>(distinct + 1);
    fit.objective = 0.0;
    fit.history = {0.0};
  } else if (distinct <= length) {
    fit.entries = static_cast<uint32_t>(std::max<uint64_t>(distinct, 1));
    if (distinct == 0) centroids.assign(width, 0.0);
    fit.objective = 0.0;
    fit.history = {0.0};
  } else {
    KMeansOptions opts{p.kmeans_max_iters, p.kmeans_tol, p.restarts};
    KMeansResult km = kmeans(points, width, length, p.metric, opts, derive_seed(p.seed, 0x7061727473ULL, part));
    centroids = std::move(km.centroids);
    fit.entries = length;
    fit.objective = km.objective;
    fit.history = std::move(km.history);
  }
  fit.codebook.resize(static_cast<size_t>(length) * width);
  for (uint32_t e = 0; e < length; ++e) {
    const uint32_t src = std::min(e, fit.entries - 1);
    for (uint32_t j = 0; j < width; ++j)
      fit.codebook[static_cast<size_t>(e) * width + j] = static_cast<float>(centroids[static_cast<size_t>(src) * width + j]);
  }
  return fit;
}

// Codebook of part p as doubles; cosine entries renormalized after the
// float round-trip so costs are exact cosines.
std::vector<double> part_centroids(const VqCodec& c, uint32_t p) {
  const uint32_t w = c.part_width(p);
  std::vector<double> out(c.codebooks[p].begin(), c.codebooks[p].end());
  if (c.params.metric == Metric::kCosine) {
    for (size_t e = 0; e < out.size(); e += w) {
      auto v = std::span(out).subspan(e, w);
      double norm = 0.0;
      for (double x : v) norm += x * x;
      if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
      }
    }
  }
  return out;
}

std::vector<uint64_t> resolve_rows(std::span<const uint64_t> rows, uint64_t n) {
  if (rows.empty()) {
    std::vector<uint64_t> all(n);
    for (uint64_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  for (uint64_t r : rows)
    if (r >= n) throw DataError("row id " + std::to_string(r) + " out of range (n = " + std::to_string(n) + ")");
  return {rows.begin(), rows.end()};
}

}  // namespace

VqCodec fit_vq(const FeatureMatrix& f, const VqParams& p) {
  p.validate();
  if (f.cols() < 1) throw InvalidArgument("VQ needs d >= 1");
  if (p.width > f.cols())
    throw InvalidArgument("VQ width " + std::to_string(p.width) + " exceeds feature dimension " + std::to_string(f.cols()));
  if (f.rows() < 1) throw InvalidArgument("VQ needs at least one row to fit");

  VqCodec c;
  c.params = p;
  c.d = f.cols();
  c.source_elem_bits = f.elem_bits();
  c.num_parts = static_cast<uint32_t>((f.cols() + p.width - 1) / p.width);

  const double fraction = p.fit_sample_fraction.value_or(std::min(1.0, 1e6 / static_cast<double>(f.rows())));
  const auto sample_size = std::clamp<uint64_t>(
      static_cast<uint64_t>(std::ceil(fraction * static_cast<double>(f.rows()))), 1, f.rows());
  std::vector<uint64_t> sample(f.rows());
  for (uint64_t i = 0; i < f.rows(); ++i) sample[i] = i;
  if (sample_size < f.rows()) {
    Rng rng(derive_seed(p.seed, 0x73616d706c65ULL));
    for (uint64_t i = 0; i < sample_size; ++i) std::swap(sample[i], sample[i + rng.below(f.rows() - i)]);
    sample.resize(sample_size);
    std::sort(sample.begin(), sample.end());
  }

  c.codebooks.resize(c.num_parts);
  c.part_entries.resize(c.num_parts);
  c.part_objective.resize(c.num_parts);
  c.part_history.resize(c.num_parts);
  const auto parts = static_cast<int64_t>(c.num_parts);
  // Parts are independent; each job owns its slot, so the result does not
  // depend on scheduling.
#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t part = 0; part < parts; ++part) {
    const auto pp = static_cast<uint32_t>(part);
    const uint32_t w = c.part_width(pp);
    PartFit fit = fit_part(gather_part(f, sample, c.part_offset(pp), w, p.metric), w, p, pp);
    c.codebooks[pp] = std::move(fit.codebook);
    c.part_entries[pp] = fit.entries;
    c.part_objective[pp] = fit.objective;
    c.part_history[pp] = std::move(fit.history);
  }
  return c;
}

VqCodec encode_vq(const FeatureMatrix& f, VqCodec c) {
  if (f.cols() != c.d)
    throw InvalidArgument("dimension mismatch: features have d = " + std::to_string(f.cols()) + ", codebooks d = " +
                          std::to_string(c.d));
  c.n = f.rows();
  c.codes.assign(c.n * c.num_parts, 0);
  std::vector<uint64_t> all(c.n);
  for (uint64_t i = 0; i < c.n; ++i) all[i] = i;
  std::vector<uint32_t> assign(c.n);
  std::vector<double> cost(c.n);
  for (uint32_t p = 0; p < c.num_parts; ++p) {
    const uint32_t w = c.part_width(p);
    const auto x = gather_part(f, all, c.part_offset(p), w, c.params.metric);
    const auto cents = part_centroids(c, p);
    kernels::omp::nearest_centroid(x, w, cents, c.params.metric, assign, cost);
    for (uint64_t i = 0; i < c.n; ++i) c.codes[i * c.num_parts + p] = assign[i];
  }
  c.has_codes = true;
  return c;
}

FeatureMatrix decode_vq(const VqCodec& c, std::span<const uint64_t> rows) {
  if (!c.has_codes) throw InvalidArgument("VQ codec has no codes; encode first");
  const auto ids = resolve_rows(rows, c.n);
  FeatureMatrix out(ids.size(), c.d, c.source_elem_bits);
  const auto count = static_cast<int64_t>(ids.size());
#pragma omp parallel for schedule(static)
  for (int64_t r = 0; r < count; ++r) {
    auto dst = out.row(static_cast<uint64_t>(r));
    for (uint32_t p = 0; p < c.num_parts; ++p) {
      const auto e = c.entry(p, c.codes[ids[r] * c.num_parts + p]);
      std::copy(e.begin(), e.end(), dst.begin() + c.part_offset(p));
    }
  }
  return out;
}

double vq_objective(const FeatureMatrix& f, const VqCodec& c) {
  if (!c.has_codes) throw InvalidArgument("VQ codec has no codes; encode first");
  if (f.rows() != c.n || f.cols() != c.d) throw InvalidArgument("feature shape does not match the codec");
  std::vector<uint64_t> all(c.n);
  for (uint64_t i = 0; i < c.n; ++i) all[i] = i;
  double total = 0.0;
  for (uint32_t p = 0; p < c.num_parts; ++p) {
    const uint32_t w = c.part_width(p);
    const auto x = gather_part(f, all, c.part_offset(p), w, c.params.metric);
    const auto cents = part_centroids(c, p);
    for (uint64_t i = 0; i < c.n; ++i) {
      const auto row = std::span<const double>(x).subspan(i * w, w);
      if (c.params.metric == Metric::kCosine && is_zero(row)) continue;
      total += point_cost(row, std::span<const double>(cents).subspan(static_cast<uint64_t>(c.codes[i * c.num_parts + p]) * w, w),
                          c.params.metric);
    }
  }
  return total;
}

VqCompressionRatio vq_compression_ratio(uint32_t width, uint32_t length, CodeLayout layout, uint32_t elem_bits) {
  VqCompressionRatio cr;
  const double raw = static_cast<double>(width) * elem_bits;
  cr.theoretical = raw / std::log2(static_cast<double>(length));
  cr.realized = raw / static_cast<double>(vq_code_storage_bits(length, layout));
  return cr;
}

VqCompressionRatio vq_compression_ratio(const VqCodec& c) {
  auto cr = vq_compression_ratio(c.params.width, c.params.length, c.params.layout, c.source_elem_bits);
  for (const auto& cb : c.codebooks) cr.codebook_bytes += cb.size() * sizeof(float);
  return cr;
}

// ---------------------------------------------------------------------------

namespace {
constexpr binio::Magic kMagic = binio::make_magic("VQF1");
constexpr uint32_t kVersion = 1;
}  // namespace

std::vector<uint8_t> encode_vqf(const VqCodec& c) {
  binio::Writer w;
  w.magic(kMagic);
  w.put<uint32_t>(kVersion);
  w.put<uint8_t>(static_cast<uint8_t>(c.params.metric));
  w.put<uint8_t>(static_cast<uint8_t>(c.params.layout));
  w.put<uint16_t>(0);
  w.put<uint32_t>(c.params.width);
  w.put<uint32_t>(c.params.length);
  w.put<uint32_t>(c.num_parts);
  const uint64_t n = c.has_codes ? c.n : 0;
  w.put<uint64_t>(n);
  w.put<uint64_t>(c.d);
  for (const auto& cb : c.codebooks) w.array<float>(cb);
  if (n > 0) {
    const unsigned bits = vq_code_bits(c.params.length);
    if (c.params.layout == CodeLayout::kPacked) {
      w.array<uint8_t>(pack_codes(c.codes, bits));
    } else {
      const unsigned bytes = (bits + 7) / 8;
      for (uint32_t code : c.codes)
        for (unsigned b = 0; b < bytes; ++b) w.put<uint8_t>(static_cast<uint8_t>(code >> (8 * b)));
    }
  }
  return w.take();
}

VqCodec decode_vqf(std::span<const uint8_t> bytes) {
  binio::Reader r(bytes, "VQF1");
  r.expect_magic(kMagic);
  const auto version = r.get<uint32_t>();
  if (version != kVersion) throw DataError("VQF1: unsupported version " + std::to_string(version));
  VqCodec c;
  const auto metric = r.get<uint8_t>();
  const auto layout = r.get<uint8_t>();
  r.get<uint16_t>();
  if (metric > 1) throw DataError("VQF1: unknown metric tag " + std::to_string(metric));
  if (layout > 1) throw DataError("VQF1: unknown code layout tag " + std::to_string(layout));
  c.params.metric = static_cast<Metric>(metric);
  c.params.layout = static_cast<CodeLayout>(layout);
  c.params.width = r.get<uint32_t>();
  c.params.length = r.get<uint32_t>();
  c.num_parts = r.get<uint32_t>();
  c.n = r.get<uint64_t>();
  c.d = r.get<uint64_t>();
  if (c.params.width < 1 || c.params.length < 2 || c.params.length > kMaxCodebookLength || c.d < c.params.width)
    throw DataError("VQF1: invalid width/length/d in header");
  if (c.num_parts != (c.d + c.params.width - 1) / c.params.width) throw DataError("VQF1: num_parts inconsistent with d/width");
  if (c.n > (uint64_t{1} << 40)) throw DataError("VQF1: corrupt header row count");
  c.codebooks.resize(c.num_parts);
  for (uint32_t p = 0; p < c.num_parts; ++p)
    c.codebooks[p] = r.array<float>(static_cast<uint64_t>(c.params.length) * c.part_width(p));
  c.part_entries.assign(c.num_parts, c.params.length);
  if (c.n > 0) {
    const unsigned bits = vq_code_bits(c.params.length);
    const uint64_t count = c.n * c.num_parts;
    if (c.params.layout == CodeLayout::kPacked) {
      c.codes = unpack_codes(r.take(packed_size(count, bits)), count, bits);
    } else {
      const unsigned nbytes = (bits + 7) / 8;
      const auto raw = r.take(count * nbytes);
      c.codes.resize(count);
      for (uint64_t i = 0; i < count; ++i) {
        uint32_t code = 0;
        for (unsigned b = 0; b < nbytes; ++b) code |= static_cast<uint32_t>(raw[i * nbytes + b]) << (8 * b);
        c.codes[i] = code;
      }
    }
    for (uint32_t code : c.codes)
      if (code >= c.params.length) throw DataError("VQF1: code " + std::to_string(code) + " >= codebook length");
    c.has_codes = true;
  }
  r.expect_end();
  return c;
}

VqCodec load_vq(const std::filesystem::path& path) { return decode_vqf(binio::read_file(path)); }

void save_vq(const VqCodec& c, const std::filesystem::path& path) { binio::write_file(path, encode_vqf(c)); }

}  // namespace featgrind
