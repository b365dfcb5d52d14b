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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "featgrind/bitpack.hpp"
#include "featgrind/error.hpp"
#include "featgrind/sq.hpp"
#include "test_util.hpp"

namespace featgrind {
namespace {

SqParams params(int k, double e_min, double e_max) {
  SqParams p;
  p.k = k;
  p.e_min = e_min;
  p.e_max = e_max;
  return p;
}

// Expected codes and reconstructions below were computed with a 50-digit
// mpmath evaluation of the quantizer and its inverse.
TEST(SqValue, QuantizeExamples) {
  EXPECT_EQ(sq_quantize_value(0.25, params(3, -4, 0)), 6u);
  EXPECT_EQ(sq_quantize_value(-0.5, params(3, -4, 0)), 0u);
  EXPECT_EQ(sq_quantize_value(0.7, params(1, -4, 0)), 1u);
  EXPECT_EQ(sq_quantize_value(-0.2, params(1, -4, 0)), 0u);
}

TEST(SqValue, DequantizeExamples) {
  EXPECT_NEAR(sq_dequantize_value(6, params(3, -4, 0)), 0.35355339059327376220, 1e-15);
  EXPECT_NEAR(sq_dequantize_value(0, params(3, -4, 0)), -0.70710678118654752440, 1e-15);
  EXPECT_DOUBLE_EQ(sq_dequantize_value(1, params(1, -4, 0)), 0.25);
  EXPECT_DOUBLE_EQ(sq_dequantize_value(0, params(1, -4, 0)), -0.25);
}

TEST(SqValue, BoundaryAndZeroConventions) {
  const auto p = params(3, -4, 0);
  // log2|x| = e_max would floor to 2^(k-1); clamped into the top bucket.
  EXPECT_EQ(sq_quantize_value(1.0, p), 7u);
  EXPECT_EQ(sq_quantize_value(-1.0, p), 0u);
  // Out-of-range magnitudes are clipped.
  EXPECT_EQ(sq_quantize_value(1e6, p), 7u);
  EXPECT_EQ(sq_quantize_value(1e-9, p), 4u);
  EXPECT_EQ(sq_quantize_value(-1e-9, p), 3u);
  // Zero takes the non-negative branch at e_min.
  EXPECT_EQ(sq_quantize_value(0.0, p), 4u);
  EXPECT_EQ(sq_quantize_value(-0.0, p), 4u);
  EXPECT_GT(sq_dequantize_value(4, p), 0.0);
  for (int k = 1; k <= 8; ++k) {
    const auto pk = params(k, -7, 3);
    for (double x : {-1e9, -3.0, -1e-12, 0.0, 1e-12, 0.5, 7.0, 1e9})
      EXPECT_LT(sq_quantize_value(x, pk), 1u << k);
  }
}

TEST(SqValue, RoundTripLogErrorWithinHalfBucket) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> exp_dist(-9.0, 2.0);
  for (int k = 2; k <= 8; ++k) {
    const auto p = params(k, -9.0, 2.0);
    const double bound = (p.e_max - p.e_min) / std::ldexp(1.0, k);
    for (int t = 0; t < 5000; ++t) {
      const double x = (t % 2 ? -1.0 : 1.0) * std::exp2(exp_dist(gen));
      const double xh = sq_dequantize_value(sq_quantize_value(x, p), p);
      ASSERT_LE(std::abs(std::log2(std::abs(xh)) - std::log2(std::abs(x))), bound * (1 + 1e-12)) << x;
    }
  }
}

TEST(SqValue, SignPreservationAndMonotonicity) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int k = 1; k <= 8; ++k) {
    const auto p = params(k, -6, 1);
    for (int t = 0; t < 2000; ++t) {
      const double x = dist(gen);
      const double xh = sq_dequantize_value(sq_quantize_value(x, p), p);
      ASSERT_EQ(xh > 0, x >= 0) << "k=" << k << " x=" << x;
      const double a = std::abs(dist(gen)), b = std::abs(dist(gen));
      ASSERT_LE(sq_quantize_value(std::min(a, b), p), sq_quantize_value(std::max(a, b), p));
    }
  }
}

TEST(SqFit, PowerOfTwoRange) {
  std::vector<float> v;
  for (int e = 0; e <= 4; ++e) {
    v.push_back(std::ldexp(1.0f, -e));
    v.push_back(-std::ldexp(1.0f, -e));
  }
  FeatureMatrix f(2, 5, v);
  auto p = fit_sq(f, 3, 0.0);
  EXPECT_EQ(p.e_min, -4.0);
  EXPECT_EQ(p.e_max, 0.0);
}

TEST(SqFit, OutlierClipped) {
  // 100 copies of 2^0 and one 2^10: the 99th percentile of log2|x| is 0
  // (numpy.quantile, linear interpolation).
  std::vector<float> v(100, 1.0f);
  v.push_back(1024.0f);
  FeatureMatrix f(101, 1, v);
  auto p = fit_sq(f, 1, 0.01);
  EXPECT_EQ(p.e_max, 0.0);
  EXPECT_EQ(p.e_min, 0.0);
  // The same data leaves no range for k >= 2.
  EXPECT_THROW(fit_sq(f, 2, 0.01), InvalidArgument);
}

TEST(SqFit, ZerosIgnoredAndAllZeroRejected) {
  FeatureMatrix zeros(3, 3);
  EXPECT_THROW(fit_sq(zeros, 2, 0.0), InvalidArgument);
  EXPECT_NO_THROW(fit_sq(zeros, 1, 0.0));
  FeatureMatrix f(1, 4, std::vector<float>{0.0f, 0.5f, 0.0f, -4.0f});
  auto p = fit_sq(f, 4, 0.0);
  EXPECT_EQ(p.e_min, -1.0);
  EXPECT_EQ(p.e_max, 2.0);
  EXPECT_THROW(fit_sq(f, 9, 0.0), InvalidArgument);
  EXPECT_THROW(fit_sq(f, 4, 0.3), InvalidArgument);
}

TEST(SqFit, Quantiles) {
  std::vector<double> s{0, 1, 2, 3, 4};
  EXPECT_EQ(sorted_quantile(s, 0.0), 0.0);
  EXPECT_EQ(sorted_quantile(s, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(s, 0.1), 0.4);
}

TEST(SqCodec, MatrixPathMatchesScalarPath) {
  auto f = testing::random_normal(37, 13, 3);
  for (int k : {1, 2, 3, 5, 8}) {
    auto p = fit_sq(f, k, 0.01);
    auto c = quantize_sq(f, p);
    ASSERT_EQ(c.payload.size(), packed_size(37 * 13, k));
    auto x = dequantize_sq(c);
    for (uint64_t i = 0; i < 37; ++i)
      for (uint64_t j = 0; j < 13; ++j) {
        const uint32_t code = sq_quantize_value(f.at(i, j), p);
        ASSERT_EQ(c.code(i, j), code);
        ASSERT_EQ(x.at(i, j), static_cast<float>(sq_dequantize_value(code, p)));
      }
  }
}

TEST(SqCodec, IdempotentOnDequantizedInput) {
  auto f = testing::random_normal(50, 16, 4);
  for (int k = 1; k <= 8; ++k) {
    auto p = fit_sq(f, k, 0.005);
    auto c = quantize_sq(f, p);
    auto again = quantize_sq(dequantize_sq(c), p);
    EXPECT_EQ(again.payload, c.payload) << "k=" << k;
  }
}

TEST(SqCodec, GatherMatchesFullDecode) {
  auto f = testing::random_normal(20, 7, 8);
  auto c = quantize_sq(f, fit_sq(f, 3));
  auto full = dequantize_sq(c);
  std::vector<uint64_t> rows{2, 0, 19, 2};
  auto part = dequantize_sq(c, rows);
  ASSERT_EQ(part.rows(), 4u);
  for (size_t r = 0; r < rows.size(); ++r)
    for (uint64_t j = 0; j < 7; ++j) EXPECT_EQ(part.at(r, j), full.at(rows[r], j));
  std::vector<uint64_t> bad{20};
  EXPECT_THROW(dequantize_sq(c, bad), DataError);
}

TEST(SqCodec, CompressionRatio) {
  FeatureMatrix f = testing::random_normal(100, 128, 1);
  for (auto [k, cr] : {std::pair{1, 32.0}, {2, 16.0}, {8, 4.0}}) {
    auto c = quantize_sq(f, fit_sq(f, k));
    auto r = sq_compression_ratio(c);
    EXPECT_EQ(r.payload, cr);
    const double raw = 100.0 * 128 * 4;
    EXPECT_DOUBLE_EQ(r.with_header, raw / (56.0 + 100.0 * 128 * k / 8));
    EXPECT_LT(r.with_header, r.payload);
  }
}

TEST(SqFile, LayoutAndRoundTrip) {
  auto f = testing::random_normal(9, 5, 2);
  auto c = quantize_sq(f, fit_sq(f, 3, 0.0));
  auto bytes = encode_sqf(c);
  ASSERT_EQ(bytes.size(), kSqHeaderBytes + packed_size(45, 3));
  EXPECT_EQ(std::memcmp(bytes.data(), "SQF1\0\0\0\0", 8), 0);
  double e_min;
  std::memcpy(&e_min, bytes.data() + 32, 8);
  EXPECT_EQ(e_min, c.params.e_min);
  EXPECT_EQ(decode_sqf(bytes), c);

  auto dir = testing::temp_dir("sqf");
  save_sq(c, dir / "x.sqf");
  EXPECT_EQ(load_sq(dir / "x.sqf"), c);

  auto bad = bytes;
  bad.pop_back();
  EXPECT_THROW(decode_sqf(bad), DataError);
  bad = bytes;
  bad[12] = 9;  // k
  EXPECT_THROW(decode_sqf(bad), DataError);
}

TEST(SqParamsTest, Validation) {
  EXPECT_THROW(params(0, -1, 0).validate(), InvalidArgument);
  EXPECT_THROW(params(9, -1, 0).validate(), InvalidArgument);
  EXPECT_THROW(params(2, 0, 0).validate(), InvalidArgument);
  EXPECT_NO_THROW(params(1, 0, 0).validate());
  FeatureMatrix f(1, 1, std::vector<float>{1.0f});
  EXPECT_THROW(quantize_sq(f, params(3, 1, 1)), InvalidArgument);
}

}  // namespace
}  // namespace featgrind
