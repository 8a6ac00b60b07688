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
 * @file checks.hpp
 * @brief Quick self-consistency checks exposed through `tinycl check`.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tinycl {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Simulated passes against the exact integer references on `instances`
/// random small layers each, plus the reference-shape cycle counts.
std::vector<CheckResult> run_self_checks(uint64_t seed = 1, std::size_t instances = 20);

}  // namespace tinycl
