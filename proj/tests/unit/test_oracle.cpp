/*
 * Copyright 2026 The TinyCL Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tinycl/oracle.hpp"

namespace tinycl {
namespace {

FloatMap rand_map(const Shape3& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1, 1);
    FloatMap m(s);
    for (auto& v : m.data()) v = d(rng);
    return m;
}

FloatKernel rand_kernel(const Shape4& s, std::mt19937_64& rng, double bound = 1.0) {
    std::uniform_real_distribution<double> d(-bound, bound);
    FloatKernel k(s);
    for (auto& v : k.data()) v = d(rng);
    return k;
}

// Written separately from the library: explicit 6-loop direct convolution.
FloatMap naive_conv(const FloatMap& v, const FloatKernel& k, int stride, int pad) {
    const int R = static_cast<int>(v.rows()), C = static_cast<int>(v.cols());
    const int outR = (R + 2 * pad - 3) / stride + 1, outC = (C + 2 * pad - 3) / stride + 1;
    FloatMap z(k.out_channels(), static_cast<std::size_t>(outR), static_cast<std::size_t>(outC));
    for (std::size_t o = 0; o < k.out_channels(); ++o)
        for (int r = 0; r < outR; ++r)
            for (int c = 0; c < outC; ++c) {
                double s = 0;
                for (std::size_t j = 0; j < k.in_channels(); ++j)
                    for (int m = 0; m < 3; ++m)
                        for (int n = 0; n < 3; ++n) {
                            const int y = r * stride + m - pad, x = c * stride + n - pad;
                            if (y >= 0 && y < R && x >= 0 && x < C)
                                s += v(j, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) *
                                     k(o, j, static_cast<std::size_t>(m), static_cast<std::size_t>(n));
                        }
                z(o, static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = s;
            }
    return z;
}

TEST(OracleConv, IdentityKernel) {
    std::mt19937_64 rng(1);
    const auto v = rand_map({3, 5, 4}, rng);
    FloatKernel k(3, 3, 3, 3);
    for (std::size_t c = 0; c < 3; ++c) k(c, c, 1, 1) = 1.0;
    EXPECT_EQ(oracle::conv_forward(v, k), v);
}

TEST(OracleConv, OnePixelIsChannelDotProduct) {
    std::mt19937_64 rng(2);
    const auto v = rand_map({6, 1, 1}, rng);
    const auto k = rand_kernel({2, 6, 3, 3}, rng);
    const auto z = oracle::conv_forward(v, k);
    for (std::size_t o = 0; o < 2; ++o) {
        double s = 0;
        for (std::size_t j = 0; j < 6; ++j) s += v(j, 0, 0) * k(o, j, 1, 1);
        EXPECT_NEAR(z(o, 0, 0), s, 1e-15);
    }
}

TEST(OracleConv, MatchesNaiveImplementation) {
    std::mt19937_64 rng(3);
    for (std::size_t i = 0; i < 40; ++i) {
        const int stride = 1 + static_cast<int>(i % 2), pad = static_cast<int>((i / 2) % 2);
        const Shape3 s{1 + i % 5, 3 + i % 6, 3 + i % 4};
        const auto v = rand_map(s, rng);
        const auto k = rand_kernel({1 + i % 3, s.channels, 3, 3}, rng);
        const auto a = oracle::conv_forward(v, k, static_cast<std::size_t>(stride), static_cast<std::size_t>(pad));
        const auto b = naive_conv(v, k, stride, pad);
        ASSERT_EQ(a.shape(), b.shape());
        for (std::size_t x = 0; x < a.size(); ++x) ASSERT_NEAR(a.data()[x], b.data()[x], 1e-12);
    }
}

TEST(OracleConv, AdjointIdentities) {
    std::mt19937_64 rng(4);
    for (std::size_t i = 0; i < 40; ++i) {
        const std::size_t stride = 1 + i % 2, pad = (i / 2) % 2;
        const Shape3 s{1 + i % 4, 3 + i % 5, 4 + i % 3};
        const auto v = rand_map(s, rng);
        const auto k = rand_kernel({1 + i % 3, s.channels, 3, 3}, rng);
        const auto z = oracle::conv_forward(v, k, stride, pad);
        const auto g = rand_map(z.shape(), rng);
        const double lhs = oracle::inner(z, g);
        EXPECT_NEAR(lhs, oracle::inner(v, oracle::conv_gprop(g, k, s, stride, pad)), 1e-9);
        EXPECT_NEAR(lhs, oracle::inner(k, oracle::conv_kgrad(g, v, stride, pad)), 1e-9);
    }
}

TEST(OracleDense, AdjointIdentities) {
    std::mt19937_64 rng(5);
    const auto x = rand_map({8, 2, 4}, rng);
    const auto w = rand_kernel({5, 8, 2, 4}, rng);
    const auto y = oracle::dense_forward(x, w);
    std::vector<double> dy(5);
    for (auto& v : dy) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    double lhs = 0;
    for (std::size_t n = 0; n < 5; ++n) lhs += y[n] * dy[n];
    EXPECT_NEAR(lhs, oracle::inner(x, oracle::dense_gprop(dy, w)), 1e-9);
    EXPECT_NEAR(lhs, oracle::inner(w, oracle::dense_wgrad(x, dy)), 1e-9);
}

TEST(OracleRelu, ForwardAndBackward) {
    FloatMap x(1, 1, 3);
    x(0, 0, 0) = -1;
    x(0, 0, 1) = 0;
    x(0, 0, 2) = 2;
    const auto r = oracle::relu(x);
    EXPECT_EQ(r(0, 0, 0), 0.0);
    EXPECT_EQ(r(0, 0, 2), 2.0);
    const auto b = oracle::relu_backward(FloatMap(1, 1, 3, 1.0), x);
    EXPECT_EQ(b(0, 0, 0), 0.0);
    EXPECT_EQ(b(0, 0, 1), 0.0);
    EXPECT_EQ(b(0, 0, 2), 1.0);
}

TEST(FiniteDiff, LinearModelIsExact) {
    std::mt19937_64 rng(6);
    oracle::FloatModel m;
    m.dense = rand_kernel({3, 8, 2, 4}, rng, 0.3);
    EXPECT_LT(oracle::finite_diff_check(m, rand_map({8, 2, 4}, rng), 1, 1e-4), 1e-8);
}

TEST(FiniteDiff, TwoConvPlusDenseToy) {
    std::mt19937_64 rng(7);
    oracle::FloatModel m;
    m.conv_kernels = {rand_kernel({4, 3, 3, 3}, rng, 0.5), rand_kernel({4, 4, 3, 3}, rng, 0.5)};
    m.dense = rand_kernel({3, 4, 4, 4}, rng, 0.3);
    for (auto kind : {LossKind::Mse, LossKind::SoftmaxCrossEntropy}) {
        m.loss = kind;
        EXPECT_LT(oracle::finite_diff_check(m, rand_map({3, 4, 4}, rng), 2, 1e-4), 1e-5);
    }
}

TEST(FiniteDiff, PerfectPredictionUsesDenominatorFloor) {
    oracle::FloatModel m;
    m.dense = FloatKernel(2, 1, 1, 2);
    m.dense(0, 0, 0, 0) = 1.0;
    FloatMap x(1, 1, 2);
    x(0, 0, 0) = 1.0;
    EXPECT_LT(oracle::finite_diff_check(m, x, 0, 1e-4), 1e-6);
}

TEST(FiniteDiff, EpsilonBounds) {
    oracle::FloatModel m;
    m.dense = FloatKernel(1, 1, 1, 1, 0.5);
    const FloatMap x(1, 1, 1, 1.0);
    EXPECT_THROW(oracle::finite_diff_check(m, x, 0, 1e-7), std::invalid_argument);
    EXPECT_THROW(oracle::finite_diff_check(m, x, 0, 0.1), std::invalid_argument);
}

TEST(ExactOracle, EncodeAndReduceTies) {
    EXPECT_EQ(oracle::exact_encode(1, 8192), 1);
    EXPECT_EQ(oracle::exact_encode(-1, 8192), -1);
    EXPECT_EQ(oracle::exact_encode(100, 1), 32767);
    EXPECT_EQ(oracle::exact_reduce(0x800), 1);
    EXPECT_EQ(oracle::exact_reduce(-0x800), -1);
    EXPECT_EQ(oracle::exact_reduce(oracle::int128{1} << 40), 32767);
}

}  // namespace
}  // namespace tinycl
