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
 * @file loss.hpp
 * @brief Loss at the model head, evaluated in double precision.
 *
 * MSE: J = (1/n) sum_k (y_k - t_k)^2 against the one-hot target t, so
 * dJ/dy = (2/n)(y - t). Softmax cross-entropy: dJ/dy = softmax(y) - t.
 * There is no loss hardware; the fixed-point gradient is re-encoded to Q4.12
 * before it enters the dense backward passes.
 */

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tinycl/fxp.hpp"

namespace tinycl {

enum class LossKind { Mse, SoftmaxCrossEntropy };

std::string_view to_string(LossKind k);
LossKind parse_loss_kind(std::string_view name);

struct FloatLoss {
    double value = 0.0;
    std::vector<double> gradient;
};

FloatLoss float_loss(std::span<const double> y, std::size_t label, LossKind kind = LossKind::Mse);

struct FixedLoss {
    double value = 0.0;
    std::vector<Fxp16> gradient;
};

/// Throws std::out_of_range when label >= y.size().
FixedLoss loss_and_gradient(std::span<const Fxp16> y, std::size_t label, LossKind kind = LossKind::Mse);

}  // namespace tinycl
