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
 * @file memsys.hpp
 * @brief The accelerator's memory groups: training data (GDumb) memory,
 *        partial feature memory, kernel memory and the two gradient memories.
 *
 * Every port moves at most 128 bits (8 Q4.12 values) per transaction. Feature
 * memories are banked by channel group so that the three columns fetched per
 * snake step are served by concurrent reads; a single-bank group serializes
 * them and the extra rounds show up as stalls. Writes go through a dedicated
 * write port and never stall reads.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tinycl/tensor.hpp"

namespace tinycl {

inline constexpr std::size_t kPortBits = 128;
inline constexpr std::size_t kBytesPerValue = 2;
inline constexpr std::size_t kValuesPerTransaction = kPortBits / (8 * kBytesPerValue);

enum class MemoryKind { TrainingData, PartialFeature, Kernel, GradientA, GradientB };

std::string_view to_string(MemoryKind kind);

class MemoryGroup {
  public:
    MemoryGroup(MemoryKind kind, std::size_t capacity_bytes, std::size_t banks = 1);

    MemoryKind kind() const { return kind_; }
    std::size_t capacity_bytes() const { return capacity_; }
    std::size_t used_bytes() const { return used_; }
    std::size_t banks() const { return banks_; }
    std::size_t port_width_bits() const { return kPortBits; }

    uint64_t reads() const { return reads_; }
    uint64_t writes() const { return writes_; }
    uint64_t stalls() const { return stalls_; }

    /// Reserves space; throws CapacityError mentioning `what`.
    void allocate(std::size_t bytes, const std::string& what);
    void release(std::size_t bytes);

    /// Counts ceil(n/8) port transactions issued in one compute cycle and
    /// returns the stall cycles they cost. Reads are spread over the banks;
    /// anything beyond one round per cycle stalls, unless the data was already
    /// staged by the prefetch buffers.
    uint64_t access(std::size_t n_values, bool is_write, bool prefetched = false);

    void reset_counters();

  private:
    MemoryKind kind_;
    std::size_t capacity_;
    std::size_t banks_;
    std::size_t used_ = 0;
    uint64_t reads_ = 0;
    uint64_t writes_ = 0;
    uint64_t stalls_ = 0;
};

inline uint64_t account_access(MemoryGroup& g, std::size_t n_values, bool is_write) {
    return g.access(n_values, is_write);
}

enum class GradientSide { A, B };

/// Which gradient memory a pass reads; the other one is written.
struct GradientPingPong {
    GradientSide active = GradientSide::A;

    GradientSide read_side() const { return active; }
    GradientSide write_side() const {
        return active == GradientSide::A ? GradientSide::B : GradientSide::A;
    }
    friend bool operator==(const GradientPingPong&, const GradientPingPong&) = default;
};

constexpr GradientPingPong gradient_swap(GradientPingPong p) {
    return {p.active == GradientSide::A ? GradientSide::B : GradientSide::A};
}

/// Default sizing follows the reference 32x32x8 layer: 8 partial-feature
/// blocks of 32x32x16 b per weighted layer (three layers), the 3x3x16 b
/// kernel blocks of both conv layers plus the 10-class dense matrix, and 16
/// gradient blocks split evenly over the two gradient memories.
struct MemoryConfig {
    std::size_t training_data_bytes = 6'144'000;
    std::size_t partial_feature_bytes = 3 * 8 * 32 * 32 * kBytesPerValue;
    std::size_t kernel_bytes = 2 * 64 * 9 * kBytesPerValue + 10 * 8192 * kBytesPerValue;
    std::size_t gradient_bytes = 8 * 32 * 32 * kBytesPerValue;
    std::size_t feature_banks = 3;
};

class MemorySystem {
  public:
    explicit MemorySystem(const MemoryConfig& cfg = {});

    MemoryGroup& group(MemoryKind kind);
    const MemoryGroup& group(MemoryKind kind) const;
    MemoryGroup& gradient(GradientSide side) {
        return group(side == GradientSide::A ? MemoryKind::GradientA : MemoryKind::GradientB);
    }

    /// Keeps the forward input of `layer` until its backward pass.
    void store_partial_feature(std::size_t layer, const FeatureMap& fm);
    const FeatureMap& load_partial_feature(std::size_t layer) const;
    void clear_partial_features();
    std::size_t partial_feature_bytes() const;

    GradientPingPong ping_pong() const { return ping_pong_; }
    MemoryGroup& gradient_read_group() { return gradient(ping_pong_.read_side()); }
    MemoryGroup& gradient_write_group() { return gradient(ping_pong_.write_side()); }

    /// Stores a gradient map in the write-side memory.
    void write_gradient(const FeatureMap& g);
    /// The map currently held by the read-side memory.
    const FeatureMap& read_gradient() const;
    /// Ends a pass: the memory just written becomes the read side.
    void swap_gradients();

    /// Sizes kernel memory for the model's weights; throws CapacityError.
    void reserve_kernels(std::size_t bytes, const std::string& what);
    void release_kernels();

    void reset_counters();

  private:
    std::map<MemoryKind, MemoryGroup> groups_;
    std::map<std::size_t, FeatureMap> partial_features_;
    std::optional<FeatureMap> gradient_a_;
    std::optional<FeatureMap> gradient_b_;
    GradientPingPong ping_pong_{};
};

inline std::size_t bytes_of(const FeatureMap& fm) { return fm.size() * kBytesPerValue; }
inline std::size_t bytes_of(const KernelTensor& k) { return k.size() * kBytesPerValue; }

}  // namespace tinycl
