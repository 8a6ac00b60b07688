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
 * @file convsim.hpp
 * @brief Convolution dataflows on the PU model: forward, kernel gradient and
 *        gradient propagation, all driven by the snake traversal.
 *
 * The 3x3 window of 8-channel features lives in a register buffer. A step
 * along a row shifts it by one column and fetches one new column (3
 * features); at the end of a row the column is held, the row advances, and a
 * new row of 3 features is fetched. Only the first window of a pass fetches
 * all 9. Out-of-image window positions read as zeros, so every pass sees the
 * input zero-padded by one pixel on each border (an (R+2) x (C+2) matrix).
 *
 * Index map for the kernel gradient: MAC (k,l) accumulates
 *   dK(o, j, k, l) = sum_{r,c} G(o, r, c) * V(j, r + k - 1, c + l - 1)
 * which is the exact derivative of the pad-1 forward pass.
 *
 * Only stride 1 with pad 1 is supported by these dataflows.
 */

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "tinycl/memsys.hpp"
#include "tinycl/pu.hpp"
#include "tinycl/tensor.hpp"

namespace tinycl {

/// Counters for one dataflow pass.
struct PassStats {
    uint64_t cycles = 0;
    uint64_t fetches = 0;       // 8-channel features loaded into window buffers
    uint64_t transactions = 0;  // 128-bit read transactions
    uint64_t stalls = 0;
    uint64_t saturations = 0;

    PassStats& operator+=(const PassStats& o) {
        cycles += o.cycles;
        fetches += o.fetches;
        transactions += o.transactions;
        stalls += o.stalls;
        saturations += o.saturations;
        return *this;
    }
};

enum class SnakeDirection { LeftToRight, RightToLeft };

struct SnakeCursor {
    std::size_t row = 0;
    std::size_t col = 0;
    SnakeDirection direction = SnakeDirection::LeftToRight;
    std::size_t out_channel_group = 0;

    friend bool operator==(const SnakeCursor&, const SnakeCursor&) = default;
};

inline constexpr std::size_t kWindowFeatures = 9;
inline constexpr std::size_t kFeaturesPerStep = 3;

struct SnakeStep {
    SnakeCursor next;
    std::size_t new_fetches = 0;
    bool row_turn = false;
};

/// Advances to the next output pixel of an rows x cols grid. Returns nullopt
/// once the last pixel of the pass has been visited.
std::optional<SnakeStep> snake_step(const SnakeCursor& c, std::size_t rows, std::size_t cols);

inline std::optional<SnakeStep> snake_step(const SnakeCursor& c, const ConvLayerSpec& spec) {
    return snake_step(c, spec.out_rows(), spec.out_cols());
}

/// Total fresh feature fetches of one full snake pass: 9 + 3 (R C - 1).
constexpr uint64_t snake_pass_fetches(std::size_t rows, std::size_t cols) {
    return kWindowFeatures + kFeaturesPerStep * (uint64_t{rows} * cols - 1);
}

/// Running totals across passes, split by pass kind.
struct ConvCycleModel {
    uint64_t cycles_forward = 0;
    uint64_t cycles_kgrad = 0;
    uint64_t cycles_gprop = 0;
    uint64_t mem_fetches = 0;
};

struct ConvForwardResult {
    FeatureMap output;
    PassStats stats;
};

struct ConvKernelGradResult {
    KernelTensor gradient;
    PassStats stats;
};

/// Z = conv(V, K), "same" size. V.channels and K.in_channels must match and
/// be multiples of 8. `source` (optional) is the memory the window reads from,
/// for port/stall accounting; a 3-bank group is assumed when null.
ConvForwardResult conv_forward(const FeatureMap& input, const KernelTensor& kernel,
                               const ConvLayerSpec& spec, PuArray& pu,
                               MemoryGroup* source = nullptr);

/// dK from the output gradient G and the stored forward input V.
ConvKernelGradResult conv_kernel_gradient(const FeatureMap& grad_out, const FeatureMap& input,
                                          const ConvLayerSpec& spec, PuArray& pu,
                                          MemoryGroup* feature_source = nullptr,
                                          MemoryGroup* gradient_source = nullptr);

/// dV from G and the layer's forward kernel, through the forward dataflow
/// with the kernel read transposed in its channel axes and spatially flipped.
ConvForwardResult conv_gradient_propagation(const FeatureMap& grad_out, const KernelTensor& kernel,
                                            const ConvLayerSpec& spec, PuArray& pu,
                                            MemoryGroup* source = nullptr);

/// K'(j, o, k, l) = K(o, j, 2 - k, 2 - l).
KernelTensor flip_transpose(const KernelTensor& kernel);

}  // namespace tinycl
