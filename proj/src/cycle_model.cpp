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

#include "tinycl/cycle_model.hpp"

#include <string>

#include "tinycl/errors.hpp"

namespace tinycl {

std::string_view to_string(CycleModel m) {
    return m == CycleModel::Calibrated ? "calibrated" : "formula";
}

CycleModel parse_cycle_model(std::string_view name) {
    if (name == "calibrated") return CycleModel::Calibrated;
    if (name == "formula") return CycleModel::Formula;
    throw ConfigError("unknown cycle model '" + std::string(name) +
                      "' (expected 'calibrated' or 'formula')");
}

}  // namespace tinycl
