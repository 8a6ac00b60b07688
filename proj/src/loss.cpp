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

#include "tinycl/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tinycl/errors.hpp"

namespace tinycl {

std::string_view to_string(LossKind k) { return k == LossKind::Mse ? "mse" : "softmax_ce"; }

LossKind parse_loss_kind(std::string_view name) {
    if (name == "mse") return LossKind::Mse;
    if (name == "softmax_ce") return LossKind::SoftmaxCrossEntropy;
    throw ConfigError("unknown loss '" + std::string(name) + "' (expected 'mse' or 'softmax_ce')");
}

FloatLoss float_loss(std::span<const double> y, std::size_t label, LossKind kind) {
    if (label >= y.size()) {
        throw std::out_of_range("loss: label " + std::to_string(label) + " outside " +
                                std::to_string(y.size()) + " outputs");
    }
    const double n = static_cast<double>(y.size());
    FloatLoss out{0.0, std::vector<double>(y.size())};
    if (kind == LossKind::Mse) {
        for (std::size_t k = 0; k < y.size(); ++k) {
            const double diff = y[k] - (k == label ? 1.0 : 0.0);
            out.value += diff * diff / n;
            out.gradient[k] = 2.0 * diff / n;
        }
        return out;
    }
    const double peak = *std::max_element(y.begin(), y.end());
    double z = 0.0;
    for (double v : y) z += std::exp(v - peak);
    for (std::size_t k = 0; k < y.size(); ++k) {
        out.gradient[k] = std::exp(y[k] - peak) / z - (k == label ? 1.0 : 0.0);
    }
    out.value = -(y[label] - peak - std::log(z));
    return out;
}

FixedLoss loss_and_gradient(std::span<const Fxp16> y, std::size_t label, LossKind kind) {
    std::vector<double> yf(y.size());
    std::transform(y.begin(), y.end(), yf.begin(), decode);
    const FloatLoss fl = float_loss(yf, label, kind);
    FixedLoss out{fl.value, std::vector<Fxp16>(y.size())};
    std::transform(fl.gradient.begin(), fl.gradient.end(), out.gradient.begin(), encode);
    return out;
}

}  // namespace tinycl
