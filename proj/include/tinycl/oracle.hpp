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
 * @file oracle.hpp
 * @brief Double-precision reference semantics for the six computations and
 *        an exact-integer fixed-point reference.
 *
 * The conv references are literal sums with general stride and symmetric
 * zero padding; they make no attempt at efficiency. The dense references go
 * through Eigen matrix-vector products.
 *
 * The exact references recompute the fixed-point results with 128-bit
 * integer sums and a single explicit round/saturate per output. Whenever a
 * hardware pass reports zero saturation events its output must equal these
 * bit for bit.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tinycl/loss.hpp"
#include "tinycl/tensor.hpp"

namespace tinycl::oracle {

// -- double precision -----------------------------------------------------

/// Z(i,r,c) = sum_{l,m,n} V(l, r*s + m - pad, c*s + n - pad) K(i,l,m,n).
FloatMap conv_forward(const FloatMap& v, const FloatKernel& k, std::size_t stride = 1, std::size_t pad = 1);

/// dJ/dV for the forward pass above; `input_shape` is the shape of V.
FloatMap conv_gprop(const FloatMap& g, const FloatKernel& k, const Shape3& input_shape,
                    std::size_t stride = 1, std::size_t pad = 1);

/// dK(i,j,k,l) = sum_{m,n} G(i,m,n) V(j, m*s + k - pad, n*s + l - pad).
FloatKernel conv_kgrad(const FloatMap& g, const FloatMap& v, std::size_t stride = 1, std::size_t pad = 1);

std::vector<double> dense_forward(const FloatMap& input, const FloatKernel& w);
FloatMap dense_gprop(std::span<const double> grad_out, const FloatKernel& w);
FloatKernel dense_wgrad(const FloatMap& input, std::span<const double> grad_out);

FloatMap relu(const FloatMap& x);
/// g where x > 0, else 0.
FloatMap relu_backward(const FloatMap& g, const FloatMap& x);

/// Sum over all elements of a .* b.
template <typename T>
double inner(const T& a, const T& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

/// Conv+ReLU layers followed by one dense layer, all in double precision.
struct FloatModel {
    std::vector<FloatKernel> conv_kernels;
    FloatKernel dense;
    LossKind loss = LossKind::Mse;

    struct Gradients {
        std::vector<FloatKernel> conv;
        FloatKernel dense;
    };

    std::vector<double> predict(const FloatMap& x) const;
    double loss_value(const FloatMap& x, std::size_t label) const;
    Gradients gradients(const FloatMap& x, std::size_t label) const;
};

/// Max relative error between central differences of the model loss and the
/// analytic gradient over every weight; denominator max(|a|, |b|, 1e-8).
/// Throws std::invalid_argument unless 1e-6 <= eps <= 1e-2.
double finite_diff_check(const FloatModel& model, const FloatMap& x, std::size_t label, double eps);

// -- exact fixed point ----------------------------------------------------

__extension__ using int128 = __int128;

/// Nearest raw Q4.12 value to num/den (den > 0), ties away from zero, saturated.
int16_t exact_encode(int64_t num, int64_t den);

/// Round 2^-24-scaled integer to Q4.12 (ties away from zero), saturated.
int16_t exact_reduce(int128 raw24);

FeatureMap exact_conv_forward(const FeatureMap& v, const KernelTensor& k);
FeatureMap exact_conv_gprop(const FeatureMap& g, const KernelTensor& k);
KernelTensor exact_conv_kgrad(const FeatureMap& g, const FeatureMap& v);
std::vector<Fxp16> exact_dense_forward(const FeatureMap& input, const KernelTensor& w);
FeatureMap exact_dense_gprop(std::span<const Fxp16> grad_out, const KernelTensor& w);
KernelTensor exact_dense_wgrad(const FeatureMap& input, std::span<const Fxp16> grad_out);

}  // namespace tinycl::oracle
