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
 * @file replay_buffer.hpp
 * @brief GDumb sample memory: greedy, class-balanced, fixed byte capacity.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tinycl/memsys.hpp"
#include "tinycl/tensor.hpp"

namespace tinycl {

struct Sample {
    FeatureMap image;  // unpadded channels, values in [0, 1]
    std::size_t label = 0;
    uint64_t id = 0;
};

class ReplayBuffer {
  public:
    static constexpr std::size_t kDefaultCapacity = 6'144'000;

    explicit ReplayBuffer(std::size_t capacity_bytes = kDefaultCapacity);

    /// Stores `s` if there is room. When full, evicts the oldest sample of
    /// the most populated class (lowest class id on ties) to make room;
    /// rejects `s` if its class is already at least that populated. Returns
    /// the evicted or rejected sample.
    std::optional<Sample> insert(Sample s);

    std::size_t size() const { return samples_.size(); }
    std::size_t capacity_bytes() const { return memory_.capacity_bytes(); }
    std::size_t stored_bytes() const { return memory_.used_bytes(); }
    const std::vector<Sample>& samples() const { return samples_; }
    const std::map<std::size_t, std::size_t>& class_counts() const { return counts_; }

  private:
    MemoryGroup memory_;
    std::vector<Sample> samples_;  // insertion order, oldest first
    std::map<std::size_t, std::size_t> counts_;
};

inline std::optional<Sample> gdumb_insert(ReplayBuffer& buf, Sample s) { return buf.insert(std::move(s)); }

}  // namespace tinycl
