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

#include "tinycl/convsim.hpp"

#include <limits>
#include <string>
#include <vector>

#include "tinycl/errors.hpp"

namespace tinycl {

std::optional<SnakeStep> snake_step(const SnakeCursor& c, std::size_t rows, std::size_t cols) {
    const bool ltr = c.direction == SnakeDirection::LeftToRight;
    const bool row_end = ltr ? c.col + 1 == cols : c.col == 0;
    SnakeStep step{c, kFeaturesPerStep, false};
    if (row_end) {
        if (c.row + 1 >= rows) return std::nullopt;
        ++step.next.row;
        step.next.direction = ltr ? SnakeDirection::RightToLeft : SnakeDirection::LeftToRight;
        step.row_turn = true;
    } else {
        step.next.col = ltr ? c.col + 1 : c.col - 1;
    }
    return step;
}

KernelTensor flip_transpose(const KernelTensor& kernel) {
    const auto& s = kernel.shape();
    KernelTensor out(Shape4{s.in_channels, s.out_channels, s.k_rows, s.k_cols});
    for (std::size_t o = 0; o < s.out_channels; ++o)
        for (std::size_t i = 0; i < s.in_channels; ++i)
            for (std::size_t k = 0; k < s.k_rows; ++k)
                for (std::size_t l = 0; l < s.k_cols; ++l)
                    out(i, o, s.k_rows - 1 - k, s.k_cols - 1 - l) = kernel(o, i, k, l);
    return out;
}

namespace {

using Feature = std::array<Fxp16, kGroupLanes>;
using WindowLanes = std::array<Feature, kWindowFeatures>;

constexpr std::size_t kSide = ConvLayerSpec::kKernel;

/// 8-channel feature at (y, x) of `group`; zero outside the image.
Feature fetch_feature(const FeatureMap& src, std::size_t group, std::ptrdiff_t y, std::ptrdiff_t x) {
    if (y < 0 || x < 0 || y >= static_cast<std::ptrdiff_t>(src.rows()) ||
        x >= static_cast<std::ptrdiff_t>(src.cols())) {
        return Feature{};
    }
    return channel_group_read(src, group, static_cast<std::size_t>(y), static_cast<std::size_t>(x));
}

/// The 3x3 register window; element (k, l) holds input (r + k - 1, c + l - 1).
class WindowBuffer {
  public:
    WindowBuffer(const FeatureMap& src, std::size_t group) : src_(src), group_(group) {}

    void load(std::size_t r, std::size_t c) {
        for (std::size_t k = 0; k < kSide; ++k)
            for (std::size_t l = 0; l < kSide; ++l) at(k, l) = fetch(r, c, k, l);
    }

    /// Moves the window onto `next` from `prev` reusing 6 of the 9 features.
    void advance(const SnakeCursor& prev, const SnakeCursor& next) {
        if (next.row != prev.row) {
            for (std::size_t l = 0; l < kSide; ++l) {
                at(0, l) = at(1, l);
                at(1, l) = at(2, l);
                at(2, l) = fetch(next.row, next.col, 2, l);
            }
        } else if (next.col > prev.col) {
            for (std::size_t k = 0; k < kSide; ++k) {
                at(k, 0) = at(k, 1);
                at(k, 1) = at(k, 2);
                at(k, 2) = fetch(next.row, next.col, k, 2);
            }
        } else {
            for (std::size_t k = 0; k < kSide; ++k) {
                at(k, 2) = at(k, 1);
                at(k, 1) = at(k, 0);
                at(k, 0) = fetch(next.row, next.col, k, 0);
            }
        }
    }

    const WindowLanes& lanes() const { return window_; }

  private:
    Feature& at(std::size_t k, std::size_t l) { return window_[k * kSide + l]; }
    Feature fetch(std::size_t r, std::size_t c, std::size_t k, std::size_t l) const {
        return fetch_feature(src_, group_, static_cast<std::ptrdiff_t>(r + k) - 1,
                             static_cast<std::ptrdiff_t>(c + l) - 1);
    }

    const FeatureMap& src_;
    std::size_t group_;
    WindowLanes window_{};
};

/// One snake pass over a rows x cols output grid, reading windows of `group`.
template <typename OnPixel>
PassStats run_snake(const FeatureMap& src, std::size_t group, std::size_t rows, std::size_t cols,
                    MemoryGroup& mem, OnPixel&& on_pixel) {
    PassStats stats;
    WindowBuffer window(src, group);
    SnakeCursor cursor{0, 0, SnakeDirection::LeftToRight, group};

    // The first window is staged by the prefetch buffers before the pass starts.
    window.load(0, 0);
    stats.fetches += kWindowFeatures;
    stats.transactions += kWindowFeatures;
    mem.access(kWindowFeatures * kGroupLanes, false, true);
    on_pixel(cursor, window.lanes());
    ++stats.cycles;

    while (auto step = snake_step(cursor, rows, cols)) {
        window.advance(cursor, step->next);
        cursor = step->next;
        stats.fetches += step->new_fetches;
        stats.transactions += step->new_fetches;
        stats.stalls += mem.access(step->new_fetches * kGroupLanes, false);
        on_pixel(cursor, window.lanes());
        ++stats.cycles;
    }
    return stats;
}

void require_hardware_geometry(const ConvLayerSpec& spec) {
    spec.validate();
    if (spec.stride != 1) {
        throw ConfigError("hardware conv dataflow supports stride 1 only, got stride " +
                          std::to_string(spec.stride));
    }
    if (spec.pad != 1) {
        throw ConfigError("hardware conv dataflow supports pad 1 only, got pad " +
                          std::to_string(spec.pad));
    }
}

void require_shape(const Shape3& got, const Shape3& want, const char* what) {
    if (got != want) {
        throw ConfigError(std::string(what) + " has shape " + to_string(got) + ", expected " +
                          to_string(want));
    }
}

void require_lane_multiple(std::size_t channels, const char* what) {
    if (channels % kGroupLanes != 0) {
        throw ConfigError(std::string(what) + " channel count " + std::to_string(channels) +
                          " is not padded to a multiple of 8");
    }
}

MemoryGroup scratch_feature_memory() {
    return MemoryGroup(MemoryKind::PartialFeature, std::numeric_limits<std::size_t>::max(), 3);
}

/// Shared by forward and gradient propagation: multi-operand MACs, 9-operand
/// final add, groups accumulated in Acc32 and reduced once per output value.
ConvForwardResult window_convolution(const FeatureMap& src, std::size_t out_channels,
                                     std::size_t rows, std::size_t cols, PuArray& pu,
                                     MemoryGroup& mem, auto&& kernel_lane) {
    const uint64_t sat_before = pu.saturation().total();
    const std::size_t groups = src.channels() / kGroupLanes;
    ConvForwardResult result{FeatureMap(Shape3{out_channels, rows, cols}), {}};
    std::vector<Acc32> acc(rows * cols);
    pu.set_mode(MacMode::MultiOperand);

    for (std::size_t o = 0; o < out_channels; ++o) {
        std::fill(acc.begin(), acc.end(), Acc32{});
        for (std::size_t g = 0; g < groups; ++g) {
            WindowLanes weights{};
            for (std::size_t m = 0; m < kWindowFeatures; ++m)
                for (std::size_t lane = 0; lane < kGroupLanes; ++lane)
                    weights[m][lane] = kernel_lane(o, g * kGroupLanes + lane, m / kSide, m % kSide);

            result.stats += run_snake(src, g, rows, cols, mem,
                                      [&](const SnakeCursor& cur, const WindowLanes& window) {
                                          std::array<Acc32, kMacCount> parts{};
                                          for (std::size_t m = 0; m < kMacCount; ++m)
                                              parts[m] = pu.mac(m).multi_operand(window[m], weights[m]);
                                          Acc32& a = acc[cur.row * cols + cur.col];
                                          a = pu.accumulate(a, pu.dadda_sum9(parts));
                                      });
        }
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) result.output(o, r, c) = pu.reduce(acc[r * cols + c]);
    }
    result.stats.saturations = pu.saturation().total() - sat_before;
    return result;
}

}  // namespace

ConvForwardResult conv_forward(const FeatureMap& input, const KernelTensor& kernel,
                               const ConvLayerSpec& spec, PuArray& pu, MemoryGroup* source) {
    require_hardware_geometry(spec);
    require_lane_multiple(spec.in_channels, "conv input");
    require_shape(input.shape(), spec.input_shape(), "conv input");
    if (kernel.shape() != spec.kernel_shape()) {
        throw ConfigError("conv kernel has shape " + to_string(kernel.shape()) + ", expected " +
                          to_string(spec.kernel_shape()));
    }
    MemoryGroup scratch = scratch_feature_memory();
    MemoryGroup& mem = source ? *source : scratch;
    return window_convolution(input, spec.out_channels, spec.out_rows(), spec.out_cols(), pu, mem,
                              [&](std::size_t o, std::size_t i, std::size_t k, std::size_t l) {
                                  return kernel(o, i, k, l);
                              });
}

ConvForwardResult conv_gradient_propagation(const FeatureMap& grad_out, const KernelTensor& kernel,
                                            const ConvLayerSpec& spec, PuArray& pu,
                                            MemoryGroup* source) {
    require_hardware_geometry(spec);
    require_lane_multiple(spec.out_channels, "conv output gradient");
    require_shape(grad_out.shape(), spec.output_shape(), "conv output gradient");
    if (kernel.shape() != spec.kernel_shape()) {
        throw ConfigError("conv kernel has shape " + to_string(kernel.shape()) + ", expected " +
                          to_string(spec.kernel_shape()));
    }
    MemoryGroup scratch = scratch_feature_memory();
    MemoryGroup& mem = source ? *source : scratch;
    // Output channel j of dV sums over the layer's outputs o (the lanes).
    return window_convolution(grad_out, spec.in_channels, spec.rows, spec.cols, pu, mem,
                              [&](std::size_t j, std::size_t o, std::size_t k, std::size_t l) {
                                  return kernel(o, j, kSide - 1 - k, kSide - 1 - l);
                              });
}

ConvKernelGradResult conv_kernel_gradient(const FeatureMap& grad_out, const FeatureMap& input,
                                          const ConvLayerSpec& spec, PuArray& pu,
                                          MemoryGroup* feature_source,
                                          MemoryGroup* gradient_source) {
    require_hardware_geometry(spec);
    require_lane_multiple(spec.in_channels, "conv input");
    require_shape(input.shape(), spec.input_shape(), "conv input");
    require_shape(grad_out.shape(), spec.output_shape(), "conv output gradient");

    MemoryGroup scratch = scratch_feature_memory();
    MemoryGroup& mem = feature_source ? *feature_source : scratch;
    const uint64_t sat_before = pu.saturation().total();
    const std::size_t groups = spec.in_channels / kGroupLanes;
    const std::size_t rows = spec.out_rows();
    const std::size_t cols = spec.out_cols();

    ConvKernelGradResult result{KernelTensor(spec.kernel_shape()), {}};
    pu.set_mode(MacMode::MultiAdder);
    for (std::size_t o = 0; o < spec.out_channels; ++o) {
        for (std::size_t g = 0; g < groups; ++g) {
            pu.clear_partials();
            result.stats += run_snake(input, g, rows, cols, mem,
                                      [&](const SnakeCursor& cur, const WindowLanes& window) {
                                          const Fxp16 grad = grad_out(o, cur.row, cur.col);
                                          if (gradient_source) gradient_source->access(1, false, true);
                                          for (std::size_t m = 0; m < kMacCount; ++m)
                                              pu.mac(m).multi_adder_lanes(window[m], grad);
                                      });
            for (std::size_t m = 0; m < kMacCount; ++m) {
                const auto& lanes = pu.mac(m).lane_sums();
                for (std::size_t lane = 0; lane < kGroupLanes; ++lane)
                    result.gradient(o, g * kGroupLanes + lane, m / kSide, m % kSide) = pu.reduce(lanes[lane]);
            }
        }
    }
    pu.set_mode(MacMode::MultiOperand);
    result.stats.saturations = pu.saturation().total() - sat_before;
    return result;
}

}  // namespace tinycl
