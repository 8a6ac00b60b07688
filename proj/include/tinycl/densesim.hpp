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
 * @file densesim.hpp
 * @brief Dense-layer dataflows on the same nine MACs.
 *
 * The input feature map is consumed in its channel-major storage order; the
 * weight matrix W is a KernelTensor (n, C, R, W) so that row n lines up with
 * the flattened input. The output count n is a runtime value and grows as
 * new classes arrive.
 */

#pragma once

#include <cstddef>
#include <vector>

#include "tinycl/convsim.hpp"
#include "tinycl/cycle_model.hpp"
#include "tinycl/pu.hpp"
#include "tinycl/tensor.hpp"

namespace tinycl {

struct DenseLayerSpec {
    std::size_t in_features = 8 * 32 * 32;
    std::size_t out_features = 10;

    /// Throws ConfigError unless in_features is a positive multiple of 64 and n >= 1.
    void validate() const;
};

struct DenseForwardResult {
    std::vector<Fxp16> output;
    PassStats stats;
};

struct DenseGradPropResult {
    FeatureMap gradient;  // same shape as the forward input
    PassStats stats;
};

struct DenseWeightGradResult {
    KernelTensor gradient;
    PassStats stats;
};

/// Per cycle 8 MACs take 8 pixels x 8 channels; their outputs and the running
/// partial sum meet in the final adder. Cycles = (in/64) * n.
DenseForwardResult dense_forward(const FeatureMap& input, const KernelTensor& weights,
                                 const DenseLayerSpec& spec, PuArray& pu);

/// dX = W^T dY. MAC m owns feature 9t + m and accumulates ceil(n/8) chunks
/// of 8 (dY, W) pairs in its partial-sum register.
DenseGradPropResult dense_gradient_propagation(std::span<const Fxp16> grad_out,
                                               const KernelTensor& weights,
                                               const DenseLayerSpec& spec, PuArray& pu,
                                               CycleModel model = CycleModel::Calibrated);

/// dW(n, i) = reduce(I_i * dY_n), 64 inputs against one dY entry per cycle.
DenseWeightGradResult dense_weight_gradient(const FeatureMap& input, std::span<const Fxp16> grad_out,
                                            const DenseLayerSpec& spec, PuArray& pu,
                                            CycleModel model = CycleModel::Calibrated);

/// Dense weight tensor shape for a layer reading `input`.
inline Shape4 dense_weight_shape(const Shape3& input, std::size_t n) {
    return {n, input.channels, input.rows, input.cols};
}

}  // namespace tinycl
