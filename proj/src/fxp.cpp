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

#include "tinycl/fxp.hpp"

#include <cmath>
#include <stdexcept>

namespace tinycl {

Fxp16 encode(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("encode: non-finite input cannot be quantized");
    }
    // Scaling by 2^12 is exact, so std::round sees the true value.
    const double scaled = std::round(std::ldexp(x, kFracBits));
    if (scaled >= static_cast<double>(Fxp16::max().raw)) return Fxp16::max();
    if (scaled <= static_cast<double>(Fxp16::min().raw)) return Fxp16::min();
    return Fxp16{static_cast<int16_t>(scaled)};
}

}  // namespace tinycl
