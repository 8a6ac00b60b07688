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
#include <limits>
#include <random>

#include "tinycl/fxp.hpp"
#include "tinycl/oracle.hpp"

namespace tinycl {
namespace {

TEST(Encode, ExactPowersOfTwo) {
    EXPECT_EQ(encode(1.0).raw, 0x1000);
    EXPECT_EQ(encode(-1.0).raw, -0x1000);
    EXPECT_EQ(encode(0.0).raw, 0);
    EXPECT_EQ(encode(-8.0).raw, std::numeric_limits<int16_t>::min());
}

TEST(Encode, SaturatesOutOfRange) {
    EXPECT_EQ(encode(100.0).raw, 0x7FFF);
    EXPECT_NEAR(decode(encode(100.0)), 7.999756, 1e-6);
    EXPECT_EQ(encode(-100.0).raw, std::numeric_limits<int16_t>::min());
    EXPECT_EQ(encode(8.0).raw, 0x7FFF);
}

TEST(Encode, SmallValueRoundsToOneLsb) {
    EXPECT_EQ(encode(0.00018).raw, oracle::exact_encode(18, 100000));
    EXPECT_EQ(encode(0.00018).raw, 1);
}

TEST(Encode, TiesAwayFromZero) {
    EXPECT_EQ(encode(0.5 / 4096).raw, 1);
    EXPECT_EQ(encode(-0.5 / 4096).raw, -1);
    EXPECT_EQ(encode(1.5 / 4096).raw, 2);
    EXPECT_EQ(encode(-2.5 / 4096).raw, -3);
}

TEST(Encode, RejectsNonFinite) {
    EXPECT_THROW(encode(std::nan("")), std::invalid_argument);
    EXPECT_THROW(encode(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(Encode, MatchesExactRationalOracle) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int64_t> num(-10'000'000, 10'000'000);
    std::uniform_int_distribution<int64_t> den(1, 1'000'000);
    for (int i = 0; i < 20000; ++i) {
        const int64_t n = num(rng), d = den(rng);
        ASSERT_EQ(encode(static_cast<double>(n) / static_cast<double>(d)).raw, oracle::exact_encode(n, d))
            << n << "/" << d;
    }
}

TEST(Encode, DecodeRoundTripsEveryRawValue) {
    for (int r = std::numeric_limits<int16_t>::min(); r <= std::numeric_limits<int16_t>::max(); ++r) {
        const Fxp16 v = Fxp16::from_raw(static_cast<int16_t>(r));
        ASSERT_EQ(encode(decode(v)), v);
    }
}

TEST(Mul, ExactProducts) {
    EXPECT_EQ(mul(Fxp16::one(), Fxp16::one()).raw, 0x1000000);
    EXPECT_EQ(mul(encode(-8.0), encode(-8.0)).to_double(), 64.0);
    EXPECT_EQ(mul(encode(0.5), encode(0.25)).to_double(), 0.125);
}

TEST(Mul, MatchesIntegerProductForAllCorners) {
    const int16_t corners[] = {std::numeric_limits<int16_t>::min(), -1, 0, 1,
                               std::numeric_limits<int16_t>::max()};
    for (int16_t a : corners)
        for (int16_t b : corners)
            EXPECT_EQ(int64_t{mul(Fxp16::from_raw(a), Fxp16::from_raw(b)).raw}, int64_t{a} * b);
}

TEST(AccAdd, AddsAndSaturates) {
    const Acc32 one = widen(Fxp16::one());
    EXPECT_EQ(acc_add(one, widen(encode(2.0))).to_double(), 3.0);
    SaturationStats st;
    EXPECT_EQ(acc_add(Acc32::max(), one, &st), Acc32::max());
    EXPECT_EQ(st.acc_events, 1u);
    EXPECT_EQ(acc_sub(Acc32::min(), one, &st), Acc32::min());
    EXPECT_EQ(st.acc_events, 2u);
}

TEST(AccAdd, SeventyTwoCopiesOfSixtyFourSaturate) {
    const Acc32 sixty_four = mul(encode(-8.0), encode(-8.0));
    SaturationStats st;
    Acc32 acc{};
    int64_t exact = 0;
    for (int i = 0; i < 72; ++i) {
        acc = acc_add(acc, sixty_four, &st);
        exact += sixty_four.raw;
    }
    // Oracle: exact integer sum clipped once to the 32-bit range.
    const int64_t clipped = std::min<int64_t>(exact, std::numeric_limits<int32_t>::max());
    EXPECT_EQ(int64_t{acc.raw}, clipped);
    EXPECT_NEAR(acc.to_double(), 127.99999994, 1e-7);
    EXPECT_GT(st.acc_events, 0u);
}

TEST(Reduce, BasicAndTie) {
    EXPECT_EQ(reduce(widen(Fxp16::one())), Fxp16::one());
    EXPECT_EQ(reduce(Acc32::from_raw(0x800)).raw, 1);
    EXPECT_EQ(reduce(Acc32::from_raw(-0x800)).raw, -1);
    EXPECT_EQ(reduce(Acc32::from_raw(0x7FF)).raw, 0);
    EXPECT_EQ(reduce(Acc32::from_raw(0x1800)).raw, 2);
}

TEST(Reduce, SaturatesAndCounts) {
    SaturationStats st;
    EXPECT_EQ(reduce(widen(encode(4.0)) , &st).raw, 0x4000);
    const Acc32 twenty = Acc32::from_raw(20 << 24);
    EXPECT_EQ(reduce(twenty, &st), Fxp16::max());
    EXPECT_EQ(reduce(Acc32::from_raw(-(20 << 24)), &st), Fxp16::min());
    EXPECT_EQ(st.reduce_events, 2u);
    EXPECT_EQ(st.total(), 2u);
}

TEST(Reduce, MatchesExactOracleOnRandomRaw) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int32_t> d(std::numeric_limits<int32_t>::min(),
                                             std::numeric_limits<int32_t>::max());
    for (int i = 0; i < 100000; ++i) {
        const int32_t r = d(rng);
        ASSERT_EQ(reduce(Acc32::from_raw(r)).raw, oracle::exact_reduce(r));
    }
}

TEST(Reduce, ErrorIsAtMostHalfLsbInRange) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int32_t> d(-(8 << 24) + 2048, (8 << 24) - 2049);
    for (int i = 0; i < 100000; ++i) {
        const Acc32 a = Acc32::from_raw(d(rng));
        ASSERT_LE(std::abs(decode(reduce(a)) - a.to_double()), std::ldexp(1.0, -13));
    }
}

TEST(SgdUpdate, SingleRounding) {
    const Fxp16 w = encode(0.5), lr = encode(0.25), g = encode(1.0);
    EXPECT_EQ(decode(sgd_update(w, lr, g)), 0.25);
    // 1 LSB * 0.5 LSB: the product is half an LSB, which rounds away from zero.
    EXPECT_EQ(sgd_update(Fxp16::zero(), encode(0.5), Fxp16::from_raw(1)).raw, -1);
}

}  // namespace
}  // namespace tinycl
