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

#include "tinycl/replay_buffer.hpp"

#include <algorithm>

namespace tinycl {

ReplayBuffer::ReplayBuffer(std::size_t capacity_bytes)
    : memory_(MemoryKind::TrainingData, capacity_bytes) {}

std::optional<Sample> ReplayBuffer::insert(Sample s) {
    const std::size_t bytes = bytes_of(s.image);
    if (bytes > memory_.capacity_bytes()) return s;

    std::optional<Sample> evicted;
    while (memory_.used_bytes() + bytes > memory_.capacity_bytes()) {
        // std::map iterates in class-id order, so the first maximum wins ties.
        auto victim = std::max_element(counts_.begin(), counts_.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
        const auto own = counts_.find(s.label);
        if (own != counts_.end() && own->second >= victim->second) return s;

        const std::size_t cls = victim->first;
        auto oldest = std::find_if(samples_.begin(), samples_.end(),
                                   [cls](const Sample& x) { return x.label == cls; });
        memory_.release(bytes_of(oldest->image));
        if (!evicted) evicted = std::move(*oldest);
        samples_.erase(oldest);
        if (--victim->second == 0) counts_.erase(victim);
    }
    memory_.allocate(bytes, "replay sample");
    ++counts_[s.label];
    samples_.push_back(std::move(s));
    return evicted;
}

}  // namespace tinycl
