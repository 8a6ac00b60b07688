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

#include "tinycl/densesim.hpp"

#include <string>

#include "tinycl/errors.hpp"

namespace tinycl {

namespace {

constexpr std::size_t kPixelsPerCycle = 8;

void require_dense_operands(const Shape3& input, const Shape4& weights, const DenseLayerSpec& spec) {
    spec.validate();
    if (input.size() != spec.in_features) {
        throw ConfigError("dense input has " + std::to_string(input.size()) + " features, layer expects " +
                          std::to_string(spec.in_features));
    }
    if (input.channels % kGroupLanes != 0 || input.plane() % kPixelsPerCycle != 0) {
        throw ConfigError("dense input " + to_string(input) +
                          " must have channels and pixels in multiples of 8");
    }
    if (weights != dense_weight_shape(input, spec.out_features)) {
        throw ConfigError("dense weights have shape " + to_string(weights) + ", expected " +
                          to_string(dense_weight_shape(input, spec.out_features)));
    }
}

void require_grad_length(std::size_t got, const DenseLayerSpec& spec) {
    if (got != spec.out_features) {
        throw ConfigError("dense output gradient has " + std::to_string(got) + " entries, layer has " +
                          std::to_string(spec.out_features) + " outputs");
    }
}

}  // namespace

void DenseLayerSpec::validate() const {
    if (out_features == 0) throw ConfigError("dense layer needs at least one output");
    if (in_features == 0 || in_features % kDenseInputsPerCycle != 0) {
        throw ConfigError("dense in_features " + std::to_string(in_features) +
                          " is not a positive multiple of 64");
    }
}

DenseForwardResult dense_forward(const FeatureMap& input, const KernelTensor& weights,
                                 const DenseLayerSpec& spec, PuArray& pu) {
    require_dense_operands(input.shape(), weights.shape(), spec);
    const uint64_t sat_before = pu.saturation().total();
    const std::size_t groups = input.channels() / kGroupLanes;
    const std::size_t plane = input.shape().plane();
    const std::size_t cols = input.cols();

    DenseForwardResult result{std::vector<Fxp16>(spec.out_features), {}};
    pu.set_mode(MacMode::MultiOperand);
    for (std::size_t n = 0; n < spec.out_features; ++n) {
        Acc32 partial{};
        for (std::size_t g = 0; g < groups; ++g) {
            for (std::size_t p = 0; p < plane; p += kPixelsPerCycle) {
                std::array<Acc32, kMacCount> parts{};
                for (std::size_t t = 0; t < kPixelsPerCycle; ++t) {
                    const std::size_t r = (p + t) / cols;
                    const std::size_t c = (p + t) % cols;
                    std::array<Fxp16, kGroupLanes> w{};
                    for (std::size_t lane = 0; lane < kGroupLanes; ++lane)
                        w[lane] = weights(n, g * kGroupLanes + lane, r, c);
                    parts[t] = pu.mac(t).multi_operand(channel_group_read(input, g, r, c), w);
                }
                parts[kMacCount - 1] = partial;
                partial = pu.dadda_sum9(parts);
                ++result.stats.cycles;
                result.stats.transactions += 2 * kPixelsPerCycle;
            }
        }
        result.output[n] = pu.reduce(partial);
    }
    result.stats.saturations = pu.saturation().total() - sat_before;
    return result;
}

DenseGradPropResult dense_gradient_propagation(std::span<const Fxp16> grad_out,
                                               const KernelTensor& weights,
                                               const DenseLayerSpec& spec, PuArray& pu,
                                               CycleModel model) {
    spec.validate();
    require_grad_length(grad_out.size(), spec);
    const Shape3 in_shape{weights.in_channels(), weights.k_rows(), weights.k_cols()};
    require_dense_operands(in_shape, weights.shape(), spec);

    const uint64_t sat_before = pu.saturation().total();
    const std::size_t features = spec.in_features;
    const std::size_t chunks = ceil_div(spec.out_features, kGroupLanes);

    DenseGradPropResult result{FeatureMap(in_shape), {}};
    auto dx = result.gradient.data();
    uint64_t schedule_cycles = 0;
    pu.set_mode(MacMode::MultiAdder);
    for (std::size_t base = 0; base < features; base += kMacCount) {
        pu.clear_partials();
        for (std::size_t q = 0; q < chunks; ++q) {
            std::array<Fxp16, kGroupLanes> dy{};
            for (std::size_t lane = 0; lane < kGroupLanes; ++lane) {
                const std::size_t n = q * kGroupLanes + lane;
                if (n < spec.out_features) dy[lane] = grad_out[n];
            }
            for (std::size_t m = 0; m < kMacCount && base + m < features; ++m) {
                std::array<Fxp16, kGroupLanes> wt{};
                for (std::size_t lane = 0; lane < kGroupLanes; ++lane) {
                    const std::size_t n = q * kGroupLanes + lane;
                    if (n < spec.out_features) wt[lane] = weights.row(n)[base + m];
                }
                pu.mac(m).multi_adder_dot(dy, wt);
            }
            ++schedule_cycles;
        }
        for (std::size_t m = 0; m < kMacCount && base + m < features; ++m)
            dx[base + m] = pu.reduce(pu.mac(m).partial_sum());
    }
    pu.set_mode(MacMode::MultiOperand);
    result.stats.cycles = model == CycleModel::Formula
                              ? schedule_cycles
                              : dense_gradient_propagation_cycles(features, spec.out_features, model);
    result.stats.transactions = schedule_cycles * (1 + kMacCount);
    result.stats.saturations = pu.saturation().total() - sat_before;
    return result;
}

DenseWeightGradResult dense_weight_gradient(const FeatureMap& input, std::span<const Fxp16> grad_out,
                                            const DenseLayerSpec& spec, PuArray& pu,
                                            CycleModel model) {
    require_grad_length(grad_out.size(), spec);
    const Shape4 w_shape = dense_weight_shape(input.shape(), spec.out_features);
    require_dense_operands(input.shape(), w_shape, spec);

    const uint64_t sat_before = pu.saturation().total();
    const std::size_t groups = input.channels() / kGroupLanes;
    const std::size_t plane = input.shape().plane();
    const std::size_t cols = input.cols();

    DenseWeightGradResult result{KernelTensor(w_shape), {}};
    uint64_t schedule_cycles = 0;
    pu.set_mode(MacMode::MultiAdder);
    for (std::size_t n = 0; n < spec.out_features; ++n) {
        for (std::size_t g = 0; g < groups; ++g) {
            for (std::size_t p = 0; p < plane; p += kPixelsPerCycle) {
                pu.clear_partials();
                for (std::size_t t = 0; t < kPixelsPerCycle; ++t) {
                    const std::size_t r = (p + t) / cols;
                    const std::size_t c = (p + t) % cols;
                    MacUnit& mac = pu.mac(t);
                    mac.multi_adder_lanes(channel_group_read(input, g, r, c), grad_out[n]);
                    for (std::size_t lane = 0; lane < kGroupLanes; ++lane)
                        result.gradient(n, g * kGroupLanes + lane, r, c) = pu.reduce(mac.lane_sums()[lane]);
                }
                ++schedule_cycles;
            }
        }
    }
    pu.set_mode(MacMode::MultiOperand);
    result.stats.cycles = model == CycleModel::Formula
                              ? schedule_cycles
                              : dense_weight_gradient_cycles(spec.in_features, spec.out_features, model);
    result.stats.transactions = schedule_cycles * kPixelsPerCycle;
    result.stats.saturations = pu.saturation().total() - sat_before;
    return result;
}

}  // namespace tinycl
