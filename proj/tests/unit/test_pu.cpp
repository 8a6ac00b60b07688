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

#include <algorithm>
#include <array>
#include <limits>
#include <random>

#include "tinycl/errors.hpp"
#include "tinycl/oracle.hpp"
#include "tinycl/pu.hpp"

namespace tinycl {
namespace {

using Lanes = std::array<Fxp16, kGroupLanes>;

Lanes fill(double v) {
    Lanes a;
    a.fill(encode(v));
    return a;
}

Lanes random_lanes(std::mt19937_64& rng, int16_t lo, int16_t hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    Lanes a;
    for (auto& v : a) v = Fxp16::from_raw(static_cast<int16_t>(d(rng)));
    return a;
}

int64_t clip32(int64_t v) {
    return std::clamp<int64_t>(v, std::numeric_limits<int32_t>::min(), std::numeric_limits<int32_t>::max());
}

// Independent model of the balanced adder tree: clip after every node.
int64_t tree_oracle(const Lanes& a, const Lanes& b) {
    std::array<int64_t, 8> p;
    for (std::size_t i = 0; i < 8; ++i) p[i] = int64_t{a[i].raw} * b[i].raw;
    for (std::size_t width = 8; width > 1; width /= 2)
        for (std::size_t i = 0; i < width / 2; ++i) p[i] = clip32(p[2 * i] + p[2 * i + 1]);
    return p[0];
}

TEST(MultiOperand, ZerosAndOnes) {
    MacUnit u;
    EXPECT_EQ(u.multi_operand(fill(0), fill(0)), Acc32::zero());
    EXPECT_EQ(u.multi_operand(fill(1), fill(1)).to_double(), 8.0);
}

TEST(MultiOperand, MatchesExactDotProductInUnitRange) {
    std::mt19937_64 rng(21);
    MacUnit u;
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_lanes(rng, -4096, 4096), b = random_lanes(rng, -4096, 4096);
        oracle::int128 exact = 0;
        for (std::size_t k = 0; k < 8; ++k) exact += oracle::int128{a[k].raw} * b[k].raw;
        const Acc32 got = u.multi_operand(a, b);
        ASSERT_EQ(int64_t{got.raw}, static_cast<int64_t>(exact));
        ASSERT_EQ(reduce(got).raw, oracle::exact_reduce(exact));
    }
    EXPECT_EQ(u.saturation().total(), 0u);
}

TEST(MultiOperand, FullRangeFollowsClippingTree) {
    std::mt19937_64 rng(22);
    MacUnit u;
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_lanes(rng, std::numeric_limits<int16_t>::min(), std::numeric_limits<int16_t>::max());
        const auto b = random_lanes(rng, std::numeric_limits<int16_t>::min(), std::numeric_limits<int16_t>::max());
        ASSERT_EQ(int64_t{u.multi_operand(a, b).raw}, tree_oracle(a, b));
    }
    EXPECT_GT(u.saturation().acc_events, 0u);
}

TEST(MultiOperand, LaneOrderDoesNotMatterWithoutClipping) {
    std::mt19937_64 rng(23);
    MacUnit u;
    for (int i = 0; i < 1000; ++i) {
        auto a = random_lanes(rng, -8192, 8192), b = random_lanes(rng, -8192, 8192);
        const Acc32 ref = u.multi_operand(a, b);
        std::array<std::size_t, 8> perm{0, 1, 2, 3, 4, 5, 6, 7};
        std::shuffle(perm.begin(), perm.end(), rng);
        Lanes pa, pb;
        for (std::size_t k = 0; k < 8; ++k) {
            pa[k] = a[perm[k]];
            pb[k] = b[perm[k]];
        }
        ASSERT_EQ(u.multi_operand(pa, pb), ref);
    }
}

TEST(MultiOperand, WrongModeIsContractError) {
    MacUnit u;
    u.set_mode(MacMode::MultiAdder);
    EXPECT_THROW(u.multi_operand(fill(1), fill(1)), ContractError);
    MacUnit v;
    EXPECT_THROW(v.multi_adder(fill(1), Fxp16::one()), ContractError);
    EXPECT_THROW(v.multi_adder_dot(fill(1), fill(1)), ContractError);
    EXPECT_THROW(v.multi_adder_lanes(fill(1), Fxp16::one()), ContractError);
}

TEST(MultiAdder, Accumulates) {
    MacUnit u;
    u.set_mode(MacMode::MultiAdder);
    u.multi_adder(fill(0), encode(3.0));
    EXPECT_EQ(u.partial_sum(), Acc32::zero());
    u.multi_adder(fill(1), Fxp16::one());
    EXPECT_EQ(u.partial_sum().to_double(), 8.0);
    u.multi_adder(fill(1), Fxp16::one());
    EXPECT_EQ(u.partial_sum().to_double(), 16.0);
}

TEST(MultiAdder, LanesKeepSeparateSums) {
    MacUnit u;
    u.set_mode(MacMode::MultiAdder);
    Lanes a;
    for (std::size_t i = 0; i < 8; ++i) a[i] = encode(0.125 * static_cast<double>(i));
    u.multi_adder_lanes(a, encode(2.0));
    u.multi_adder_lanes(a, encode(1.0));
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(u.lane_sums()[i].to_double(), 0.375 * static_cast<double>(i));
    EXPECT_EQ(u.partial_sum(), Acc32::zero());
}

TEST(MultiAdder, ModeSwitchKeepsStateIndependent) {
    MacUnit u;
    const Acc32 before = u.multi_operand(fill(1), fill(0.5));
    u.set_mode(MacMode::MultiAdder);
    u.multi_adder_dot(fill(1), fill(1));
    u.set_mode(MacMode::MultiOperand);
    EXPECT_EQ(u.multi_operand(fill(1), fill(0.5)), before);
    EXPECT_EQ(u.partial_sum().to_double(), 8.0);
}

TEST(Dadda, Sums) {
    std::array<Acc32, 9> in{};
    EXPECT_EQ(dadda_sum9(in), Acc32::zero());
    in.fill(widen(Fxp16::one()));
    EXPECT_EQ(dadda_sum9(in).to_double(), 9.0);
    for (std::size_t i = 0; i < 8; ++i) in[i] = widen(encode(i % 2 ? 1.5 : -1.5));
    in[8] = Acc32::zero();
    EXPECT_EQ(dadda_sum9(in), Acc32::zero());
}

TEST(Dadda, SaturatesOnlyTheFinalResult) {
    std::array<Acc32, 9> in{};
    in.fill(Acc32::max());
    in[8] = Acc32::min();
    in[7] = Acc32::min();
    in[6] = Acc32::min();
    in[5] = Acc32::min();
    SaturationStats st;
    // Exact sum is 5*max + 4*min = max - 4, which is representable.
    EXPECT_EQ(dadda_sum9(in, &st).raw, std::numeric_limits<int32_t>::max() - 4);
    EXPECT_EQ(st.total(), 0u);
    in.fill(Acc32::max());
    EXPECT_EQ(dadda_sum9(in, &st), Acc32::max());
    EXPECT_EQ(st.acc_events, 1u);
}

TEST(PuArray, ClearResetsEveryPartial) {
    PuArray pu;
    pu.set_mode(MacMode::MultiAdder);
    for (std::size_t m = 0; m < kMacCount; ++m) {
        pu.mac(m).multi_adder(fill(1), encode(0.5));
        pu.mac(m).multi_adder_lanes(fill(1), encode(0.5));
    }
    clear_partials(pu);
    for (std::size_t m = 0; m < kMacCount; ++m) {
        EXPECT_EQ(pu.mac(m).partial_sum(), Acc32::zero());
        for (Acc32 v : pu.mac(m).lane_sums()) EXPECT_EQ(v, Acc32::zero());
    }
    clear_partials(pu);
    EXPECT_EQ(pu.mac(4).partial_sum(), Acc32::zero());
    mac_multi_adder(pu.mac(1, 1), fill(1), encode(2.0));
    EXPECT_EQ(pu.mac(4).partial_sum().to_double(), 16.0);
}

TEST(PuArray, SaturationCountsAggregate) {
    PuArray pu;
    // Products of 2^30 clip at all three tree levels: 4 + 2 + 1 events.
    pu.mac(0).multi_operand(fill(-8), fill(-8));
    EXPECT_EQ(pu.saturation().acc_events, 7u);
    pu.accumulate(Acc32::max(), Acc32::max());
    EXPECT_EQ(pu.saturation().acc_events, 8u);
    pu.reset_saturation();
    EXPECT_EQ(pu.saturation().total(), 0u);
    EXPECT_THROW(pu.mac(9), std::out_of_range);
}

}  // namespace
}  // namespace tinycl
