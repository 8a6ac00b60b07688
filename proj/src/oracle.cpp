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

#include "tinycl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tinycl/errors.hpp"

namespace tinycl::oracle {

namespace {

constexpr std::size_t kK = ConvLayerSpec::kKernel;

std::size_t out_extent(std::size_t in, std::size_t stride, std::size_t pad) {
    if (stride == 0) throw ConfigError("oracle: stride must be >= 1");
    if (in + 2 * pad < kK) throw ConfigError("oracle: input smaller than the 3x3 window");
    return (in + 2 * pad - kK) / stride + 1;
}

/// Value at (ch, y, x) of V, zero outside the image.
double padded(const FloatMap& v, std::size_t ch, std::ptrdiff_t y, std::ptrdiff_t x) {
    if (y < 0 || x < 0 || y >= static_cast<std::ptrdiff_t>(v.rows()) ||
        x >= static_cast<std::ptrdiff_t>(v.cols())) {
        return 0.0;
    }
    return v(ch, static_cast<std::size_t>(y), static_cast<std::size_t>(x));
}

std::ptrdiff_t offset(std::size_t base, std::size_t stride, std::size_t tap, std::size_t pad) {
    return static_cast<std::ptrdiff_t>(base * stride + tap) - static_cast<std::ptrdiff_t>(pad);
}

}  // namespace

FloatMap conv_forward(const FloatMap& v, const FloatKernel& k, std::size_t stride, std::size_t pad) {
    if (k.in_channels() != v.channels() || k.k_rows() != kK || k.k_cols() != kK) {
        throw ConfigError("oracle conv_forward: kernel " + to_string(k.shape()) +
                          " does not match input " + to_string(v.shape()));
    }
    const std::size_t rows = out_extent(v.rows(), stride, pad);
    const std::size_t cols = out_extent(v.cols(), stride, pad);
    FloatMap z(k.out_channels(), rows, cols);
    for (std::size_t i = 0; i < k.out_channels(); ++i)
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                double s = 0.0;
                for (std::size_t l = 0; l < v.channels(); ++l)
                    for (std::size_t m = 0; m < kK; ++m)
                        for (std::size_t n = 0; n < kK; ++n)
                            s += padded(v, l, offset(r, stride, m, pad), offset(c, stride, n, pad)) *
                                 k(i, l, m, n);
                z(i, r, c) = s;
            }
    return z;
}

FloatMap conv_gprop(const FloatMap& g, const FloatKernel& k, const Shape3& input_shape,
                    std::size_t stride, std::size_t pad) {
    if (k.out_channels() != g.channels() || k.in_channels() != input_shape.channels) {
        throw ConfigError("oracle conv_gprop: kernel " + to_string(k.shape()) + " does not match gradient " +
                          to_string(g.shape()));
    }
    if (out_extent(input_shape.rows, stride, pad) != g.rows() ||
        out_extent(input_shape.cols, stride, pad) != g.cols()) {
        throw ConfigError("oracle conv_gprop: gradient " + to_string(g.shape()) +
                          " is not the output size of input " + to_string(input_shape));
    }
    FloatMap dv(input_shape);
    for (std::size_t i = 0; i < input_shape.channels; ++i)
        for (std::size_t j = 0; j < input_shape.rows; ++j)
            for (std::size_t kc = 0; kc < input_shape.cols; ++kc) {
                double s = 0.0;
                // All (l, m) with l*s + m - pad == j, and (n, p) with n*s + p - pad == kc.
                for (std::size_t l = 0; l < g.rows(); ++l)
                    for (std::size_t m = 0; m < kK; ++m) {
                        if (offset(l, stride, m, pad) != static_cast<std::ptrdiff_t>(j)) continue;
                        for (std::size_t n = 0; n < g.cols(); ++n)
                            for (std::size_t p = 0; p < kK; ++p) {
                                if (offset(n, stride, p, pad) != static_cast<std::ptrdiff_t>(kc)) continue;
                                for (std::size_t q = 0; q < g.channels(); ++q) s += g(q, l, n) * k(q, i, m, p);
                            }
                    }
                dv(i, j, kc) = s;
            }
    return dv;
}

FloatKernel conv_kgrad(const FloatMap& g, const FloatMap& v, std::size_t stride, std::size_t pad) {
    if (out_extent(v.rows(), stride, pad) != g.rows() || out_extent(v.cols(), stride, pad) != g.cols()) {
        throw ConfigError("oracle conv_kgrad: gradient " + to_string(g.shape()) +
                          " is not the output size of input " + to_string(v.shape()));
    }
    FloatKernel dk(g.channels(), v.channels(), kK, kK);
    for (std::size_t i = 0; i < g.channels(); ++i)
        for (std::size_t j = 0; j < v.channels(); ++j)
            for (std::size_t k = 0; k < kK; ++k)
                for (std::size_t l = 0; l < kK; ++l) {
                    double s = 0.0;
                    for (std::size_t m = 0; m < g.rows(); ++m)
                        for (std::size_t n = 0; n < g.cols(); ++n)
                            s += g(i, m, n) * padded(v, j, offset(m, stride, k, pad), offset(n, stride, l, pad));
                    dk(i, j, k, l) = s;
                }
    return dk;
}

std::vector<double> dense_forward(const FloatMap& input, const FloatKernel& w) {
    if (w.shape().fan_in() != input.size()) {
        throw ConfigError("oracle dense_forward: weights " + to_string(w.shape()) +
                          " do not match input " + to_string(input.shape()));
    }
    const Eigen::VectorXd y = as_eigen(w) * as_eigen(input);
    return {y.data(), y.data() + y.size()};
}

FloatMap dense_gprop(std::span<const double> grad_out, const FloatKernel& w) {
    if (grad_out.size() != w.out_channels()) {
        throw ConfigError("oracle dense_gprop: gradient length does not match weight rows");
    }
    FloatMap dx(w.in_channels(), w.k_rows(), w.k_cols());
    const Eigen::Map<const Eigen::VectorXd> dy(grad_out.data(), static_cast<Eigen::Index>(grad_out.size()));
    as_eigen(dx) = as_eigen(w).transpose() * dy;
    return dx;
}

FloatKernel dense_wgrad(const FloatMap& input, std::span<const double> grad_out) {
    FloatKernel dw(grad_out.size(), input.channels(), input.rows(), input.cols());
    const Eigen::Map<const Eigen::VectorXd> dy(grad_out.data(), static_cast<Eigen::Index>(grad_out.size()));
    as_eigen(dw) = dy * as_eigen(input).transpose();
    return dw;
}

FloatMap relu(const FloatMap& x) {
    FloatMap out(x.shape());
    std::transform(x.data().begin(), x.data().end(), out.data().begin(),
                   [](double v) { return v > 0.0 ? v : 0.0; });
    return out;
}

FloatMap relu_backward(const FloatMap& g, const FloatMap& x) {
    if (g.shape() != x.shape()) throw ConfigError("oracle relu_backward: shape mismatch");
    FloatMap out(g.shape());
    for (std::size_t i = 0; i < g.size(); ++i) out.data()[i] = x.data()[i] > 0.0 ? g.data()[i] : 0.0;
    return out;
}

std::vector<double> FloatModel::predict(const FloatMap& x) const {
    FloatMap a = x;
    for (const auto& k : conv_kernels) a = relu(conv_forward(a, k));
    return dense_forward(a, dense);
}

double FloatModel::loss_value(const FloatMap& x, std::size_t label) const {
    return float_loss(predict(x), label, loss).value;
}

FloatModel::Gradients FloatModel::gradients(const FloatMap& x, std::size_t label) const {
    std::vector<FloatMap> inputs{x};
    std::vector<FloatMap> pre;
    for (const auto& k : conv_kernels) {
        pre.push_back(conv_forward(inputs.back(), k));
        inputs.push_back(relu(pre.back()));
    }
    const auto y = dense_forward(inputs.back(), dense);
    const auto dy = float_loss(y, label, loss).gradient;

    Gradients out;
    out.dense = dense_wgrad(inputs.back(), dy);
    FloatMap g = dense_gprop(dy, dense);
    out.conv.resize(conv_kernels.size());
    for (std::size_t l = conv_kernels.size(); l-- > 0;) {
        g = relu_backward(g, pre[l]);
        out.conv[l] = conv_kgrad(g, inputs[l]);
        g = conv_gprop(g, conv_kernels[l], inputs[l].shape());
    }
    return out;
}

double finite_diff_check(const FloatModel& model, const FloatMap& x, std::size_t label, double eps) {
    if (!(eps >= 1e-6 && eps <= 1e-2)) {
        throw std::invalid_argument("finite_diff_check: eps must lie in [1e-6, 1e-2]");
    }
    const auto analytic = model.gradients(x, label);
    FloatModel probe = model;
    double worst = 0.0;

    auto check = [&](double& weight, double a) {
        const double saved = weight;
        weight = saved + eps;
        const double up = probe.loss_value(x, label);
        weight = saved - eps;
        const double down = probe.loss_value(x, label);
        weight = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(a - numeric) / denom);
    };

    for (std::size_t l = 0; l < probe.conv_kernels.size(); ++l) {
        auto w = probe.conv_kernels[l].data();
        for (std::size_t i = 0; i < w.size(); ++i) check(w[i], analytic.conv[l].data()[i]);
    }
    auto w = probe.dense.data();
    for (std::size_t i = 0; i < w.size(); ++i) check(w[i], analytic.dense.data()[i]);
    return worst;
}

// -- exact fixed point ----------------------------------------------------

namespace {

int16_t saturate16(int128 q) {
    if (q > std::numeric_limits<int16_t>::max()) return std::numeric_limits<int16_t>::max();
    if (q < std::numeric_limits<int16_t>::min()) return std::numeric_limits<int16_t>::min();
    return static_cast<int16_t>(q);
}

/// num/den rounded to nearest integer, ties away from zero (den > 0).
int128 round_div(int128 num, int128 den) {
    const int128 mag = num < 0 ? -num : num;
    const int128 q = (2 * mag + den) / (2 * den);
    return num < 0 ? -q : q;
}

int128 raw_product(Fxp16 a, Fxp16 b) { return static_cast<int128>(a.raw) * b.raw; }

int16_t raw_at(const FeatureMap& v, std::size_t ch, std::ptrdiff_t y, std::ptrdiff_t x) {
    if (y < 0 || x < 0 || y >= static_cast<std::ptrdiff_t>(v.rows()) ||
        x >= static_cast<std::ptrdiff_t>(v.cols())) {
        return 0;
    }
    return v(ch, static_cast<std::size_t>(y), static_cast<std::size_t>(x)).raw;
}

}  // namespace

int16_t exact_encode(int64_t num, int64_t den) {
    if (den <= 0) throw std::invalid_argument("exact_encode: denominator must be positive");
    return saturate16(round_div(static_cast<int128>(num) * kFxpOne, den));
}

int16_t exact_reduce(int128 raw24) { return saturate16(round_div(raw24, kFxpOne)); }

FeatureMap exact_conv_forward(const FeatureMap& v, const KernelTensor& k) {
    FeatureMap z(k.out_channels(), v.rows(), v.cols());
    for (std::size_t i = 0; i < k.out_channels(); ++i)
        for (std::size_t r = 0; r < v.rows(); ++r)
            for (std::size_t c = 0; c < v.cols(); ++c) {
                int128 s = 0;
                for (std::size_t l = 0; l < v.channels(); ++l)
                    for (std::size_t m = 0; m < kK; ++m)
                        for (std::size_t n = 0; n < kK; ++n)
                            s += static_cast<int128>(raw_at(v, l, offset(r, 1, m, 1), offset(c, 1, n, 1))) *
                                 k(i, l, m, n).raw;
                z(i, r, c) = Fxp16{exact_reduce(s)};
            }
    return z;
}

FeatureMap exact_conv_gprop(const FeatureMap& g, const KernelTensor& k) {
    FeatureMap dv(k.in_channels(), g.rows(), g.cols());
    for (std::size_t i = 0; i < k.in_channels(); ++i)
        for (std::size_t j = 0; j < g.rows(); ++j)
            for (std::size_t c = 0; c < g.cols(); ++c) {
                int128 s = 0;
                for (std::size_t q = 0; q < g.channels(); ++q)
                    for (std::size_t m = 0; m < kK; ++m)
                        for (std::size_t p = 0; p < kK; ++p) {
                            // Output pixel (l, n) = (j + 1 - m, c + 1 - p) saw V(j, c) through tap (m, p).
                            const auto l = static_cast<std::ptrdiff_t>(j + 1) - static_cast<std::ptrdiff_t>(m);
                            const auto n = static_cast<std::ptrdiff_t>(c + 1) - static_cast<std::ptrdiff_t>(p);
                            s += static_cast<int128>(raw_at(g, q, l, n)) * k(q, i, m, p).raw;
                        }
                dv(i, j, c) = Fxp16{exact_reduce(s)};
            }
    return dv;
}

KernelTensor exact_conv_kgrad(const FeatureMap& g, const FeatureMap& v) {
    KernelTensor dk(g.channels(), v.channels(), kK, kK);
    for (std::size_t i = 0; i < g.channels(); ++i)
        for (std::size_t j = 0; j < v.channels(); ++j)
            for (std::size_t k = 0; k < kK; ++k)
                for (std::size_t l = 0; l < kK; ++l) {
                    int128 s = 0;
                    for (std::size_t m = 0; m < g.rows(); ++m)
                        for (std::size_t n = 0; n < g.cols(); ++n)
                            s += static_cast<int128>(g(i, m, n).raw) *
                                 raw_at(v, j, offset(m, 1, k, 1), offset(n, 1, l, 1));
                    dk(i, j, k, l) = Fxp16{exact_reduce(s)};
                }
    return dk;
}

std::vector<Fxp16> exact_dense_forward(const FeatureMap& input, const KernelTensor& w) {
    std::vector<Fxp16> y(w.out_channels());
    for (std::size_t n = 0; n < w.out_channels(); ++n) {
        int128 s = 0;
        const auto row = w.row(n);
        for (std::size_t i = 0; i < input.size(); ++i) s += raw_product(input.data()[i], row[i]);
        y[n] = Fxp16{exact_reduce(s)};
    }
    return y;
}

FeatureMap exact_dense_gprop(std::span<const Fxp16> grad_out, const KernelTensor& w) {
    FeatureMap dx(w.in_channels(), w.k_rows(), w.k_cols());
    for (std::size_t i = 0; i < dx.size(); ++i) {
        int128 s = 0;
        for (std::size_t n = 0; n < grad_out.size(); ++n) s += raw_product(grad_out[n], w.row(n)[i]);
        dx.data()[i] = Fxp16{exact_reduce(s)};
    }
    return dx;
}

KernelTensor exact_dense_wgrad(const FeatureMap& input, std::span<const Fxp16> grad_out) {
    KernelTensor dw(grad_out.size(), input.channels(), input.rows(), input.cols());
    for (std::size_t n = 0; n < grad_out.size(); ++n)
        for (std::size_t i = 0; i < input.size(); ++i)
            dw.row(n)[i] = Fxp16{exact_reduce(raw_product(input.data()[i], grad_out[n]))};
    return dw;
}

}  // namespace tinycl::oracle
