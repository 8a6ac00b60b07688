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

#include "tinycl/pu.hpp"

#include <string>

#include "tinycl/errors.hpp"

namespace tinycl {

void MacUnit::require(MacMode m, const char* op) const {
    if (mode_ != m) {
        throw ContractError(std::string(op) + ": MAC is configured in " +
                            (mode_ == MacMode::MultiOperand ? "multi-operand" : "multi-adder") +
                            " mode");
    }
}

Acc32 MacUnit::tree(LaneSpan a, LaneSpan b) {
    auto* s = &saturation_;
    const Acc32 p01 = acc_add(mul(a[0], b[0]), mul(a[1], b[1]), s);
    const Acc32 p23 = acc_add(mul(a[2], b[2]), mul(a[3], b[3]), s);
    const Acc32 p45 = acc_add(mul(a[4], b[4]), mul(a[5], b[5]), s);
    const Acc32 p67 = acc_add(mul(a[6], b[6]), mul(a[7], b[7]), s);
    return acc_add(acc_add(p01, p23, s), acc_add(p45, p67, s), s);
}

Acc32 MacUnit::tree_scalar(LaneSpan a, Fxp16 b) {
    const std::array<Fxp16, kGroupLanes> bs{b, b, b, b, b, b, b, b};
    return tree(a, bs);
}

Acc32 MacUnit::multi_operand(LaneSpan a, LaneSpan b) {
    require(MacMode::MultiOperand, "mac_multi_operand");
    return tree(a, b);
}

void MacUnit::multi_adder(LaneSpan a, Fxp16 b) {
    require(MacMode::MultiAdder, "mac_multi_adder");
    partial_sum_ = acc_add(partial_sum_, tree_scalar(a, b), &saturation_);
}

void MacUnit::multi_adder_dot(LaneSpan a, LaneSpan b) {
    require(MacMode::MultiAdder, "mac_multi_adder_dot");
    partial_sum_ = acc_add(partial_sum_, tree(a, b), &saturation_);
}

void MacUnit::multi_adder_lanes(LaneSpan a, Fxp16 b) {
    require(MacMode::MultiAdder, "mac_multi_adder_lanes");
    for (std::size_t i = 0; i < kGroupLanes; ++i) {
        lane_sums_[i] = acc_add(lane_sums_[i], mul(a[i], b), &saturation_);
    }
}

void MacUnit::clear() {
    partial_sum_ = Acc32{};
    lane_sums_.fill(Acc32{});
}

Acc32 dadda_sum9(std::span<const Acc32, kMacCount> inputs, SaturationStats* stats) {
    int64_t sum = 0;
    for (const Acc32 v : inputs) sum += v.raw;
    return saturate_acc(sum, stats);
}

void PuArray::set_mode(MacMode m) {
    for (auto& u : macs_) u.set_mode(m);
}

void PuArray::clear_partials() {
    for (auto& u : macs_) u.clear();
}

SaturationStats PuArray::saturation() const {
    SaturationStats total = own_;
    for (const auto& u : macs_) total += u.saturation();
    return total;
}

void PuArray::reset_saturation() {
    own_ = {};
    for (auto& u : macs_) u.reset_saturation();
}

}  // namespace tinycl
