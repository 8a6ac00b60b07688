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

#include "test_support.hpp"
#include "tinycl/convsim.hpp"
#include "tinycl/errors.hpp"
#include "tinycl/memsys.hpp"
#include "tinycl/oracle.hpp"

namespace tinycl {
namespace {

using testing::max_abs_diff;
using testing::random_kernel;
using testing::random_map;
using testing::safe_bound;

const double kHalfLsb = std::ldexp(1.0, -13);

ConvLayerSpec spec_of(std::size_t in, std::size_t out, std::size_t rows, std::size_t cols) {
    ConvLayerSpec s;
    s.in_channels = in;
    s.out_channels = out;
    s.rows = rows;
    s.cols = cols;
    return s;
}

KernelTensor identity_kernel(std::size_t channels) {
    KernelTensor k(channels, channels, 3, 3);
    for (std::size_t c = 0; c < channels; ++c) k(c, c, 1, 1) = Fxp16::one();
    return k;
}

TEST(SnakeStep, FetchCounts) {
    SnakeCursor c;
    auto s = snake_step(c, 4, 4);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->new_fetches, kFeaturesPerStep);
    EXPECT_FALSE(s->row_turn);
    EXPECT_EQ(s->next.col, 1u);
    EXPECT_EQ(snake_pass_fetches(1, 1), 9u);
    EXPECT_EQ(snake_pass_fetches(32, 32), 3078u);
}

TEST(SnakeStep, RowTurnHoldsColumnAndReversesDirection) {
    SnakeCursor c{0, 3, SnakeDirection::LeftToRight, 0};
    const auto s = snake_step(c, 4, 4);
    ASSERT_TRUE(s);
    EXPECT_TRUE(s->row_turn);
    EXPECT_EQ(s->new_fetches, 3u);
    EXPECT_EQ(s->next.row, 1u);
    EXPECT_EQ(s->next.col, 3u);
    EXPECT_EQ(s->next.direction, SnakeDirection::RightToLeft);
    const auto t = snake_step(s->next, 4, 4);
    EXPECT_EQ(t->next.col, 2u);
}

TEST(SnakeStep, VisitsEveryPixelOnce) {
    const std::size_t rows = 5, cols = 4;
    std::vector<int> seen(rows * cols, 0);
    SnakeCursor c;
    seen[0] = 1;
    std::size_t steps = 0, turns = 0;
    while (auto s = snake_step(c, rows, cols)) {
        c = s->next;
        ++seen[c.row * cols + c.col];
        ++steps;
        turns += s->row_turn;
    }
    EXPECT_EQ(steps, rows * cols - 1);
    EXPECT_EQ(turns, rows - 1);
    for (int v : seen) EXPECT_EQ(v, 1);
}

TEST(ConvForward, IdentityKernelCopiesInput) {
    std::mt19937_64 rng(1);
    const auto spec = spec_of(8, 8, 6, 7);
    FeatureMap img(1, 6, 7);
    for (auto& v : img.data()) v = encode(std::uniform_real_distribution<double>(-4, 4)(rng));
    const auto v = pad_channels(img);
    PuArray pu;
    KernelTensor k(8, 8, 3, 3);
    k(0, 0, 1, 1) = Fxp16::one();
    const auto z = conv_forward(v, k, spec, pu).output;
    EXPECT_EQ(z, v);
    EXPECT_EQ(conv_forward(v, identity_kernel(8), spec, pu).output, v);
}

TEST(ConvForward, ZeroKernelGivesZeros) {
    std::mt19937_64 rng(2);
    const auto spec = spec_of(8, 8, 5, 5);
    PuArray pu;
    const auto z = conv_forward(random_map(spec.input_shape(), 1, rng), KernelTensor(spec.kernel_shape()), spec, pu);
    EXPECT_EQ(z.output, FeatureMap(spec.output_shape()));
}

TEST(ConvForward, ReferenceShapeCyclesFetchesStalls) {
    std::mt19937_64 rng(3);
    const ConvLayerSpec spec;
    PuArray pu;
    MemoryGroup mem(MemoryKind::PartialFeature, 1 << 20, 3);
    const auto r = conv_forward(random_map(spec.input_shape(), 1, rng),
                                random_kernel(spec.kernel_shape(), 0.1, rng), spec, pu, &mem);
    EXPECT_EQ(r.stats.cycles, 8192u);
    EXPECT_EQ(r.stats.fetches, 8u * 3078u);
    EXPECT_EQ(r.stats.stalls, 0u);
    EXPECT_EQ(mem.stalls(), 0u);
}

TEST(ConvForward, SingleBankStallsOnEveryStep) {
    std::mt19937_64 rng(4);
    const auto spec = spec_of(8, 8, 4, 4);
    PuArray pu;
    MemoryGroup mem(MemoryKind::PartialFeature, 1 << 20, 1);
    const auto r = conv_forward(random_map(spec.input_shape(), 1, rng),
                                random_kernel(spec.kernel_shape(), 0.1, rng), spec, pu, &mem);
    // 3 transactions on one bank: 2 stall cycles per step, 15 steps per pass.
    EXPECT_EQ(r.stats.stalls, 8u * 15u * 2u);
}

TEST(ConvForward, BitExactAgainstExactOracle) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        const auto spec = spec_of(8 * (1 + i % 2), 8 * (1 + (i / 2) % 2), 3 + i % 6, 2 + i % 7);
        PuArray pu;
        const auto v = random_map(spec.input_shape(), 1, rng);
        const auto k = random_kernel(spec.kernel_shape(), 1, rng);
        const auto r = conv_forward(v, k, spec, pu);
        ASSERT_EQ(r.output, oracle::exact_conv_forward(v, k)) << i;
    }
}

TEST(ConvForward, MatchesDoubleOracleWithinOneRounding) {
    std::mt19937_64 rng(6);
    const auto spec = spec_of(8, 8, 6, 6);
    PuArray pu;
    const auto v = random_map(spec.input_shape(), 1, rng);
    const auto k = random_kernel(spec.kernel_shape(), safe_bound(72), rng);
    const auto r = conv_forward(v, k, spec, pu);
    EXPECT_EQ(r.stats.saturations, 0u);
    EXPECT_LE(max_abs_diff(r.output, oracle::conv_forward(to_float(v), to_float(k))), kHalfLsb);
}

TEST(ConvForward, SaturationIsCounted) {
    const auto spec = spec_of(8, 8, 3, 3);
    PuArray pu;
    const auto r = conv_forward(FeatureMap(spec.input_shape(), encode(4.0)),
                                KernelTensor(spec.kernel_shape(), encode(4.0)), spec, pu);
    EXPECT_GT(r.stats.saturations, 0u);
    EXPECT_EQ(r.output(0, 1, 1), Fxp16::max());
}

TEST(ConvForward, UnsupportedGeometryIsRejected) {
    PuArray pu;
    auto spec = spec_of(8, 8, 4, 4);
    const FeatureMap v(spec.input_shape());
    const KernelTensor k(spec.kernel_shape());
    spec.stride = 2;
    EXPECT_THROW(conv_forward(v, k, spec, pu), ConfigError);
    spec.stride = 1;
    spec.pad = 0;
    EXPECT_THROW(conv_forward(v, k, spec, pu), ConfigError);
    spec.pad = 1;
    EXPECT_THROW(conv_forward(FeatureMap(8, 5, 4), k, spec, pu), ConfigError);
    EXPECT_THROW(conv_forward(v, KernelTensor(8, 16, 3, 3), spec, pu), ConfigError);
    EXPECT_THROW(conv_forward(FeatureMap(3, 4, 4), KernelTensor(8, 3, 3, 3), spec_of(3, 8, 4, 4), pu),
                 ConfigError);
}

TEST(ConvKernelGradient, ZeroInputs) {
    std::mt19937_64 rng(7);
    const auto spec = spec_of(8, 8, 5, 5);
    PuArray pu;
    const auto g = random_map(spec.output_shape(), 1, rng);
    const auto v = random_map(spec.input_shape(), 1, rng);
    EXPECT_EQ(conv_kernel_gradient(FeatureMap(spec.output_shape()), v, spec, pu).gradient,
              KernelTensor(spec.kernel_shape()));
    EXPECT_EQ(conv_kernel_gradient(g, FeatureMap(spec.input_shape()), spec, pu).gradient,
              KernelTensor(spec.kernel_shape()));
}

TEST(ConvKernelGradient, ReferenceShapeCycles) {
    std::mt19937_64 rng(8);
    const ConvLayerSpec spec;
    PuArray pu;
    const auto r = conv_kernel_gradient(random_map(spec.output_shape(), 0.01, rng),
                                        random_map(spec.input_shape(), 0.5, rng), spec, pu);
    EXPECT_EQ(r.stats.cycles, 8192u);
}

TEST(ConvKernelGradient, BitExactAgainstExactOracle) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 30; ++i) {
        const auto spec = spec_of(8 * (1 + i % 2), 8 * (1 + (i / 2) % 2), 2 + i % 7, 3 + i % 6);
        PuArray pu;
        const auto g = random_map(spec.output_shape(), 1, rng);
        const auto v = random_map(spec.input_shape(), 1, rng);
        ASSERT_EQ(conv_kernel_gradient(g, v, spec, pu).gradient, oracle::exact_conv_kgrad(g, v)) << i;
    }
}

TEST(ConvKernelGradient, MatchesFiniteDifferencesOfOracleLoss) {
    // L(K) = <G, conv(V, K)> is linear in K, so dL/dK is exactly the kernel gradient.
    std::mt19937_64 rng(10);
    const auto spec = spec_of(8, 8, 5, 5);
    PuArray pu;
    const auto g = random_map(spec.output_shape(), safe_bound(25), rng);
    const auto v = random_map(spec.input_shape(), 1, rng);
    const auto k = random_kernel(spec.kernel_shape(), 0.5, rng);
    const auto dk = conv_kernel_gradient(g, v, spec, pu);
    EXPECT_EQ(dk.stats.saturations, 0u);

    const FloatMap gf = to_float(g), vf = to_float(v);
    FloatKernel kf = to_float(k);
    auto loss = [&] { return oracle::inner(gf, oracle::conv_forward(vf, kf)); };
    const double h = 1e-4;
    double worst = 0.0;
    for (std::size_t i = 0; i < kf.size(); ++i) {
        const double w0 = kf.data()[i];
        kf.data()[i] = w0 + h;
        const double up = loss();
        kf.data()[i] = w0 - h;
        const double down = loss();
        kf.data()[i] = w0;
        worst = std::max(worst, std::abs((up - down) / (2 * h) - decode(dk.gradient.data()[i])));
    }
    EXPECT_LE(worst, kHalfLsb + 1e-8);
}

TEST(ConvGradientPropagation, ZerosAndIdentity) {
    std::mt19937_64 rng(11);
    const auto spec = spec_of(8, 8, 5, 6);
    PuArray pu;
    EXPECT_EQ(conv_gradient_propagation(FeatureMap(spec.output_shape()),
                                        random_kernel(spec.kernel_shape(), 1, rng), spec, pu).output,
              FeatureMap(spec.input_shape()));
    const auto g = random_map(spec.output_shape(), 4, rng);
    EXPECT_EQ(conv_gradient_propagation(g, identity_kernel(8), spec, pu).output, g);
}

TEST(ConvGradientPropagation, ReferenceShapeCycles) {
    std::mt19937_64 rng(12);
    const ConvLayerSpec spec;
    PuArray pu;
    const auto r = conv_gradient_propagation(random_map(spec.output_shape(), 0.5, rng),
                                             random_kernel(spec.kernel_shape(), 0.1, rng), spec, pu);
    EXPECT_EQ(r.stats.cycles, 8192u);
    EXPECT_EQ(r.stats.fetches, 8u * 3078u);
}

TEST(ConvGradientPropagation, BitExactAgainstExactOracle) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 30; ++i) {
        const auto spec = spec_of(8 * (1 + i % 2), 8 * (1 + (i / 2) % 2), 3 + i % 5, 2 + i % 7);
        PuArray pu;
        const auto g = random_map(spec.output_shape(), 1, rng);
        const auto k = random_kernel(spec.kernel_shape(), 1, rng);
        ASSERT_EQ(conv_gradient_propagation(g, k, spec, pu).output, oracle::exact_conv_gprop(g, k)) << i;
    }
}

TEST(ConvGradientPropagation, MatchesDoubleOracle) {
    std::mt19937_64 rng(14);
    const auto spec = spec_of(16, 8, 6, 5);
    PuArray pu;
    const auto g = random_map(spec.output_shape(), 1, rng);
    const auto k = random_kernel(spec.kernel_shape(), safe_bound(72), rng);
    const auto r = conv_gradient_propagation(g, k, spec, pu);
    EXPECT_EQ(r.stats.saturations, 0u);
    EXPECT_LE(max_abs_diff(r.output, oracle::conv_gprop(to_float(g), to_float(k), spec.input_shape())),
              kHalfLsb);
}

TEST(ConvGradientPropagation, EqualsForwardWithFlippedTransposedKernel) {
    std::mt19937_64 rng(15);
    const auto spec = spec_of(16, 8, 5, 7);
    ConvLayerSpec back = spec_of(8, 16, 5, 7);
    PuArray pu;
    const auto g = random_map(spec.output_shape(), 1, rng);
    const auto k = random_kernel(spec.kernel_shape(), 1, rng);
    EXPECT_EQ(conv_gradient_propagation(g, k, spec, pu).output,
              conv_forward(g, flip_transpose(k), back, pu).output);
    EXPECT_EQ(flip_transpose(flip_transpose(k)), k);
}

}  // namespace
}  // namespace tinycl
