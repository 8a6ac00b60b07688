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
 * @file cycle_model.hpp
 * @brief Closed-form cycle counts for the six dataflow passes.
 *
 * Conv passes produce one output value per cycle per input channel group.
 * Dense forward consumes 64 inputs (8 pixels x 8 channels) per cycle.
 *
 * The dense backward passes have two models. `Formula` follows the schedules
 * as built: gradient propagation keeps one dX per MAC, ceil(I/9) rounds of
 * ceil(n/8) cycles; the weight gradient streams 64 inputs per dY entry.
 * `Calibrated` reproduces the measured per-pass totals of the reference
 * 32x32x8 -> 10 layer: gradient propagation at the forward rate, and the
 * weight gradient at ceil(I * ceil(n/8) / 9) cycles. Calibrated is the
 * default.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "tinycl/tensor.hpp"

namespace tinycl {

enum class CycleModel { Calibrated, Formula };

std::string_view to_string(CycleModel m);
/// Accepts "calibrated" or "formula"; throws ConfigError otherwise.
CycleModel parse_cycle_model(std::string_view name);

inline constexpr std::size_t kDenseInputsPerCycle = 64;

constexpr uint64_t conv_pass_cycles(std::size_t out_rows, std::size_t out_cols,
                                    std::size_t out_channels, std::size_t in_channels) {
    return uint64_t{out_rows} * out_cols * out_channels * ceil_div(in_channels, kGroupLanes);
}

inline uint64_t conv_forward_cycles(const ConvLayerSpec& s) {
    return conv_pass_cycles(s.out_rows(), s.out_cols(), s.out_channels, s.in_channels);
}
inline uint64_t conv_kernel_gradient_cycles(const ConvLayerSpec& s) { return conv_forward_cycles(s); }
inline uint64_t conv_gradient_propagation_cycles(const ConvLayerSpec& s) {
    // Output is dV (in_channels planes); lanes run over the layer's outputs.
    return conv_pass_cycles(s.rows, s.cols, s.in_channels, s.out_channels);
}

constexpr uint64_t dense_forward_cycles(std::size_t in_features, std::size_t n) {
    return uint64_t{ceil_div(in_features, kDenseInputsPerCycle)} * n;
}

constexpr uint64_t dense_gradient_propagation_cycles(std::size_t in_features, std::size_t n,
                                                     CycleModel m) {
    if (m == CycleModel::Formula) {
        return uint64_t{ceil_div(in_features, 9)} * ceil_div(n, kGroupLanes);
    }
    return dense_forward_cycles(in_features, n);
}

constexpr uint64_t dense_weight_gradient_cycles(std::size_t in_features, std::size_t n,
                                                CycleModel m) {
    if (m == CycleModel::Formula) return dense_forward_cycles(in_features, n);
    return ceil_div(uint64_t{in_features} * ceil_div(n, kGroupLanes), 9);
}

}  // namespace tinycl
