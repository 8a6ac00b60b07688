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

#include "tinycl/memsys.hpp"

#include <algorithm>

#include "tinycl/errors.hpp"

namespace tinycl {

std::string_view to_string(MemoryKind kind) {
    switch (kind) {
        case MemoryKind::TrainingData: return "training_data";
        case MemoryKind::PartialFeature: return "partial_feature";
        case MemoryKind::Kernel: return "kernel";
        case MemoryKind::GradientA: return "gradient_a";
        case MemoryKind::GradientB: return "gradient_b";
    }
    return "unknown";
}

MemoryGroup::MemoryGroup(MemoryKind kind, std::size_t capacity_bytes, std::size_t banks)
    : kind_(kind), capacity_(capacity_bytes), banks_(banks) {
    if (banks_ == 0) throw ConfigError("memory group needs at least one bank");
}

void MemoryGroup::allocate(std::size_t bytes, const std::string& what) {
    if (used_ + bytes > capacity_) {
        throw CapacityError(std::string(to_string(kind_)) + " memory overflow storing " + what,
                            used_ + bytes, capacity_);
    }
    used_ += bytes;
}

void MemoryGroup::release(std::size_t bytes) { used_ -= std::min(bytes, used_); }

uint64_t MemoryGroup::access(std::size_t n_values, bool is_write, bool prefetched) {
    const uint64_t transactions = ceil_div(n_values, kValuesPerTransaction);
    if (is_write) {
        writes_ += transactions;
        return 0;
    }
    reads_ += transactions;
    if (prefetched || transactions == 0) return 0;
    const uint64_t rounds = ceil_div(transactions, banks_);
    const uint64_t stall = rounds - 1;
    stalls_ += stall;
    return stall;
}

void MemoryGroup::reset_counters() { reads_ = writes_ = stalls_ = 0; }

MemorySystem::MemorySystem(const MemoryConfig& cfg) {
    groups_.emplace(MemoryKind::TrainingData, MemoryGroup(MemoryKind::TrainingData, cfg.training_data_bytes));
    groups_.emplace(MemoryKind::PartialFeature,
                    MemoryGroup(MemoryKind::PartialFeature, cfg.partial_feature_bytes, cfg.feature_banks));
    groups_.emplace(MemoryKind::Kernel, MemoryGroup(MemoryKind::Kernel, cfg.kernel_bytes));
    groups_.emplace(MemoryKind::GradientA,
                    MemoryGroup(MemoryKind::GradientA, cfg.gradient_bytes, cfg.feature_banks));
    groups_.emplace(MemoryKind::GradientB,
                    MemoryGroup(MemoryKind::GradientB, cfg.gradient_bytes, cfg.feature_banks));
}

MemoryGroup& MemorySystem::group(MemoryKind kind) { return groups_.at(kind); }
const MemoryGroup& MemorySystem::group(MemoryKind kind) const { return groups_.at(kind); }

void MemorySystem::store_partial_feature(std::size_t layer, const FeatureMap& fm) {
    auto& mem = group(MemoryKind::PartialFeature);
    if (auto it = partial_features_.find(layer); it != partial_features_.end()) {
        mem.release(bytes_of(it->second));
        partial_features_.erase(it);
    }
    mem.allocate(bytes_of(fm), "input feature of layer " + std::to_string(layer));
    partial_features_.emplace(layer, fm);
}

const FeatureMap& MemorySystem::load_partial_feature(std::size_t layer) const {
    auto it = partial_features_.find(layer);
    if (it == partial_features_.end()) {
        throw ContractError("no partial feature stored for layer " + std::to_string(layer));
    }
    return it->second;
}

void MemorySystem::clear_partial_features() {
    auto& mem = group(MemoryKind::PartialFeature);
    for (const auto& [layer, fm] : partial_features_) mem.release(bytes_of(fm));
    partial_features_.clear();
}

std::size_t MemorySystem::partial_feature_bytes() const {
    return group(MemoryKind::PartialFeature).used_bytes();
}

void MemorySystem::write_gradient(const FeatureMap& g) {
    const GradientSide side = ping_pong_.write_side();
    auto& slot = side == GradientSide::A ? gradient_a_ : gradient_b_;
    auto& mem = gradient(side);
    if (slot) mem.release(bytes_of(*slot));
    slot.reset();
    mem.allocate(bytes_of(g), "gradient map " + to_string(g.shape()));
    slot = g;
}

const FeatureMap& MemorySystem::read_gradient() const {
    const auto& slot = ping_pong_.read_side() == GradientSide::A ? gradient_a_ : gradient_b_;
    if (!slot) throw ContractError("read-side gradient memory is empty");
    return *slot;
}

void MemorySystem::swap_gradients() { ping_pong_ = gradient_swap(ping_pong_); }

void MemorySystem::reserve_kernels(std::size_t bytes, const std::string& what) {
    group(MemoryKind::Kernel).allocate(bytes, what);
}

void MemorySystem::release_kernels() {
    auto& mem = group(MemoryKind::Kernel);
    mem.release(mem.used_bytes());
}

void MemorySystem::reset_counters() {
    for (auto& [kind, g] : groups_) g.reset_counters();
}

}  // namespace tinycl
