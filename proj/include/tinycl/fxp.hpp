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

/**
 * @file fxp.hpp
 * @brief Q4.12 fixed-point values and the 32-bit accumulator of the MAC datapath.
 *
 * Multiplying two Q4.12 values yields an exact product at scale 2^-24, which
 * is what the 32-bit adders accumulate. Reduction back to 16 bits rounds to
 * nearest with ties away from zero and then saturates. Both the 32-bit adders
 * and the reduction clip instead of wrapping; every clip is observable
 * through a SaturationStats counter when one is supplied.
 */

#pragma once

#include <cstdint>
#include <limits>

namespace tinycl {

inline constexpr int kFracBits = 12;
inline constexpr int32_t kFxpOne = 1 << kFracBits;
inline constexpr int kAccFracBits = 2 * kFracBits;

/// Counts clipping events on the accumulate and reduce paths.
struct SaturationStats {
    uint64_t acc_events = 0;
    uint64_t reduce_events = 0;

    uint64_t total() const { return acc_events + reduce_events; }
    SaturationStats& operator+=(const SaturationStats& o) {
        acc_events += o.acc_events;
        reduce_events += o.reduce_events;
        return *this;
    }
};

/// 16-bit two's-complement value, real value = raw / 2^12.
struct Fxp16 {
    int16_t raw = 0;

    static constexpr Fxp16 from_raw(int16_t r) { return Fxp16{r}; }
    static constexpr Fxp16 max() { return Fxp16{std::numeric_limits<int16_t>::max()}; }
    static constexpr Fxp16 min() { return Fxp16{std::numeric_limits<int16_t>::min()}; }
    static constexpr Fxp16 zero() { return Fxp16{0}; }
    static constexpr Fxp16 one() { return Fxp16{static_cast<int16_t>(kFxpOne)}; }

    constexpr double to_double() const { return static_cast<double>(raw) / kFxpOne; }

    friend constexpr bool operator==(Fxp16, Fxp16) = default;
};

/// 32-bit accumulator at scale 2^-24.
struct Acc32 {
    int32_t raw = 0;

    static constexpr Acc32 from_raw(int32_t r) { return Acc32{r}; }
    static constexpr Acc32 max() { return Acc32{std::numeric_limits<int32_t>::max()}; }
    static constexpr Acc32 min() { return Acc32{std::numeric_limits<int32_t>::min()}; }
    static constexpr Acc32 zero() { return Acc32{0}; }

    constexpr double to_double() const {
        return static_cast<double>(raw) / static_cast<double>(int64_t{1} << kAccFracBits);
    }

    friend constexpr bool operator==(Acc32, Acc32) = default;
};

/// Nearest Q4.12 value, ties away from zero, saturating. Throws
/// std::invalid_argument on NaN or infinity.
Fxp16 encode(double x);

constexpr double decode(Fxp16 v) { return v.to_double(); }

/// Exact product; |a.raw * b.raw| <= 2^30 always fits.
constexpr Acc32 mul(Fxp16 a, Fxp16 b) {
    return Acc32{static_cast<int32_t>(a.raw) * static_cast<int32_t>(b.raw)};
}

constexpr Acc32 saturate_acc(int64_t v, SaturationStats* stats = nullptr) {
    if (v > std::numeric_limits<int32_t>::max()) {
        if (stats) ++stats->acc_events;
        return Acc32::max();
    }
    if (v < std::numeric_limits<int32_t>::min()) {
        if (stats) ++stats->acc_events;
        return Acc32::min();
    }
    return Acc32{static_cast<int32_t>(v)};
}

constexpr Acc32 acc_add(Acc32 a, Acc32 b, SaturationStats* stats = nullptr) {
    return saturate_acc(int64_t{a.raw} + int64_t{b.raw}, stats);
}

constexpr Acc32 acc_sub(Acc32 a, Acc32 b, SaturationStats* stats = nullptr) {
    return saturate_acc(int64_t{a.raw} - int64_t{b.raw}, stats);
}

/// Lifts a Q4.12 value onto the accumulator scale (exact).
constexpr Acc32 widen(Fxp16 v) { return Acc32{static_cast<int32_t>(v.raw) * kFxpOne}; }

/// Rescales 2^-24 -> 2^-12, rounding half away from zero, then saturates.
constexpr Fxp16 reduce(Acc32 a, SaturationStats* stats = nullptr) {
    constexpr int64_t half = int64_t{1} << (kFracBits - 1);
    const int64_t v = a.raw;
    const int64_t q = v >= 0 ? (v + half) >> kFracBits : -((-v + half) >> kFracBits);
    if (q > std::numeric_limits<int16_t>::max()) {
        if (stats) ++stats->reduce_events;
        return Fxp16::max();
    }
    if (q < std::numeric_limits<int16_t>::min()) {
        if (stats) ++stats->reduce_events;
        return Fxp16::min();
    }
    return Fxp16{static_cast<int16_t>(q)};
}

/// w - lr * g with a single rounding step; used by the SGD update.
constexpr Fxp16 sgd_update(Fxp16 w, Fxp16 lr, Fxp16 g, SaturationStats* stats = nullptr) {
    return reduce(acc_sub(widen(w), mul(lr, g), stats), stats);
}

}  // namespace tinycl
