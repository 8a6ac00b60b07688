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
 * @file pu.hpp
 * @brief Behavioral model of the processing unit: nine MAC blocks plus the
 *        9-operand final adder.
 *
 * Each MAC has 8 multipliers and 8 adders. In multi-operand mode 7 of the
 * adders form a balanced tree, (0+1),(2+3),(4+5),(6+7) then pairwise, and the
 * result leaves the block. In multi-adder mode the products are accumulated
 * into persistent registers: either one scalar partial sum, or one register
 * per lane when 8 independent outputs are being built in parallel (kernel and
 * dense weight gradients).
 *
 * All adders saturate at the 32-bit bounds. The final adder is modeled as an
 * exact sum that saturates only on its result.
 */

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "tinycl/fxp.hpp"
#include "tinycl/tensor.hpp"

namespace tinycl {

enum class MacMode { MultiOperand, MultiAdder };

using LaneSpan = std::span<const Fxp16, kGroupLanes>;

class MacUnit {
  public:
    MacMode mode() const { return mode_; }
    void set_mode(MacMode m) { mode_ = m; }

    /// Sum of the 8 lane products through the adder tree. Leaves the
    /// partial-sum registers untouched.
    Acc32 multi_operand(LaneSpan a, LaneSpan b);

    /// partial_sum += sum_i a_i * b.
    void multi_adder(LaneSpan a, Fxp16 b);

    /// partial_sum += sum_i a_i * b_i. Dense gradient propagation keeps one
    /// output per MAC and streams 8 (dY, W^T) pairs per cycle.
    void multi_adder_dot(LaneSpan a, LaneSpan b);

    /// lane_sum[i] += a_i * b for each lane.
    void multi_adder_lanes(LaneSpan a, Fxp16 b);

    Acc32 partial_sum() const { return partial_sum_; }
    const std::array<Acc32, kGroupLanes>& lane_sums() const { return lane_sums_; }

    void clear();

    const SaturationStats& saturation() const { return saturation_; }
    void reset_saturation() { saturation_ = {}; }

  private:
    void require(MacMode m, const char* op) const;
    Acc32 tree(LaneSpan a, LaneSpan b);
    Acc32 tree_scalar(LaneSpan a, Fxp16 b);

    MacMode mode_ = MacMode::MultiOperand;
    Acc32 partial_sum_{};
    std::array<Acc32, kGroupLanes> lane_sums_{};
    SaturationStats saturation_{};
};

inline constexpr std::size_t kMacCount = 9;

/// Saturating sum of nine accumulator values; exact before the final clip.
Acc32 dadda_sum9(std::span<const Acc32, kMacCount> inputs, SaturationStats* stats = nullptr);

class PuArray {
  public:
    static constexpr std::size_t kSide = 3;

    MacUnit& mac(std::size_t k, std::size_t l) { return macs_.at(k * kSide + l); }
    const MacUnit& mac(std::size_t k, std::size_t l) const { return macs_.at(k * kSide + l); }
    MacUnit& mac(std::size_t index) { return macs_.at(index); }
    const MacUnit& mac(std::size_t index) const { return macs_.at(index); }

    /// Switches every MAC; only legal between operations.
    void set_mode(MacMode m);
    void clear_partials();

    Acc32 dadda_sum9(std::span<const Acc32, kMacCount> inputs) {
        return tinycl::dadda_sum9(inputs, &own_);
    }
    Fxp16 reduce(Acc32 a) { return tinycl::reduce(a, &own_); }
    Acc32 accumulate(Acc32 a, Acc32 b) { return acc_add(a, b, &own_); }

    /// Events from every MAC plus the final adder and reduction stage.
    SaturationStats saturation() const;
    void reset_saturation();

  private:
    std::array<MacUnit, kMacCount> macs_{};
    SaturationStats own_{};
};

// Free-function forms of the MAC primitives.
inline Acc32 mac_multi_operand(MacUnit& u, LaneSpan a, LaneSpan b) { return u.multi_operand(a, b); }
inline void mac_multi_adder(MacUnit& u, LaneSpan a, Fxp16 b) { u.multi_adder(a, b); }
inline void clear_partials(PuArray& pu) { pu.clear_partials(); }

}  // namespace tinycl
