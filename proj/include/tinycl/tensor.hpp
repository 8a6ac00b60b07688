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
 * @file tensor.hpp
 * @brief Channel-major feature maps and 4D kernels, templated on scalar.
 *
 * FeatureMap storage is laid out exactly like the accelerator SRAM: all of
 * channel 0's row-major plane, then channel 1, and so on. The same templates
 * instantiated on double carry the reference (oracle) values.
 */

#pragma once

#include <array>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tinycl/errors.hpp"
#include "tinycl/fxp.hpp"

namespace tinycl {

/// Channels moved per 128-bit memory port transaction.
inline constexpr std::size_t kGroupLanes = 8;

struct Shape3 {
    std::size_t channels = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t size() const { return channels * rows * cols; }
    std::size_t plane() const { return rows * cols; }
    friend bool operator==(const Shape3&, const Shape3&) = default;
};

std::string to_string(const Shape3& s);

/// ch * rows * cols + row * cols + col; throws std::out_of_range.
std::size_t feature_address(std::size_t ch, std::size_t row, std::size_t col, const Shape3& shape);

constexpr std::size_t round_up(std::size_t v, std::size_t multiple) {
    return (v + multiple - 1) / multiple * multiple;
}

constexpr std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

template <typename Scalar>
class Tensor3 {
  public:
    using value_type = Scalar;

    Tensor3() = default;
    explicit Tensor3(const Shape3& shape, Scalar fill = Scalar{}) : shape_(shape) {
        if (shape.channels == 0 || shape.rows == 0 || shape.cols == 0) {
            throw ConfigError("feature map dimensions must be >= 1, got " + to_string(shape));
        }
        data_.assign(shape.size(), fill);
    }
    Tensor3(std::size_t channels, std::size_t rows, std::size_t cols, Scalar fill = Scalar{})
        : Tensor3(Shape3{channels, rows, cols}, fill) {}

    const Shape3& shape() const { return shape_; }
    std::size_t channels() const { return shape_.channels; }
    std::size_t rows() const { return shape_.rows; }
    std::size_t cols() const { return shape_.cols; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    Scalar& operator()(std::size_t ch, std::size_t row, std::size_t col) {
        return data_[(ch * shape_.rows + row) * shape_.cols + col];
    }
    const Scalar& operator()(std::size_t ch, std::size_t row, std::size_t col) const {
        return data_[(ch * shape_.rows + row) * shape_.cols + col];
    }

    /// Bounds-checked access; out-of-range indices throw std::out_of_range.
    const Scalar& at(std::size_t ch, std::size_t row, std::size_t col) const {
        return data_[feature_address(ch, row, col, shape_)];
    }

    std::span<Scalar> data() { return data_; }
    std::span<const Scalar> data() const { return data_; }

    friend bool operator==(const Tensor3&, const Tensor3&) = default;

  private:
    Shape3 shape_{};
    std::vector<Scalar> data_;
};

struct Shape4 {
    std::size_t out_channels = 0;
    std::size_t in_channels = 0;
    std::size_t k_rows = 0;
    std::size_t k_cols = 0;

    std::size_t size() const { return out_channels * in_channels * k_rows * k_cols; }
    /// Elements per output channel (the dense fan-in when used as W).
    std::size_t fan_in() const { return in_channels * k_rows * k_cols; }
    friend bool operator==(const Shape4&, const Shape4&) = default;
};

std::string to_string(const Shape4& s);

/// Kernel of shape (out, in, row, col). A dense weight matrix with n outputs
/// over a C x R x W feature map is stored as (n, C, R, W).
template <typename Scalar>
class Tensor4 {
  public:
    using value_type = Scalar;

    Tensor4() = default;
    explicit Tensor4(const Shape4& shape, Scalar fill = Scalar{}) : shape_(shape) {
        if (shape.size() == 0) {
            throw ConfigError("kernel dimensions must be >= 1, got " + to_string(shape));
        }
        data_.assign(shape.size(), fill);
    }
    Tensor4(std::size_t out, std::size_t in, std::size_t kr, std::size_t kc, Scalar fill = Scalar{})
        : Tensor4(Shape4{out, in, kr, kc}, fill) {}

    const Shape4& shape() const { return shape_; }
    std::size_t out_channels() const { return shape_.out_channels; }
    std::size_t in_channels() const { return shape_.in_channels; }
    std::size_t k_rows() const { return shape_.k_rows; }
    std::size_t k_cols() const { return shape_.k_cols; }
    std::size_t size() const { return data_.size(); }

    Scalar& operator()(std::size_t o, std::size_t i, std::size_t r, std::size_t c) {
        return data_[((o * shape_.in_channels + i) * shape_.k_rows + r) * shape_.k_cols + c];
    }
    const Scalar& operator()(std::size_t o, std::size_t i, std::size_t r, std::size_t c) const {
        return data_[((o * shape_.in_channels + i) * shape_.k_rows + r) * shape_.k_cols + c];
    }

    /// Row `o` flattened in (in, row, col) order.
    std::span<Scalar> row(std::size_t o) {
        return std::span<Scalar>(data_).subspan(o * shape_.fan_in(), shape_.fan_in());
    }
    std::span<const Scalar> row(std::size_t o) const {
        return std::span<const Scalar>(data_).subspan(o * shape_.fan_in(), shape_.fan_in());
    }

    std::span<Scalar> data() { return data_; }
    std::span<const Scalar> data() const { return data_; }

    friend bool operator==(const Tensor4&, const Tensor4&) = default;

  private:
    Shape4 shape_{};
    std::vector<Scalar> data_;
};

using FeatureMap = Tensor3<Fxp16>;
using KernelTensor = Tensor4<Fxp16>;
using FloatMap = Tensor3<double>;
using FloatKernel = Tensor4<double>;

struct ConvLayerSpec {
    std::size_t in_channels = 8;
    std::size_t out_channels = 8;
    std::size_t rows = 32;
    std::size_t cols = 32;
    std::size_t stride = 1;
    std::size_t pad = 1;

    static constexpr std::size_t kKernel = 3;

    std::size_t out_rows() const { return (rows + 2 * pad - kKernel) / stride + 1; }
    std::size_t out_cols() const { return (cols + 2 * pad - kKernel) / stride + 1; }
    Shape3 input_shape() const { return {in_channels, rows, cols}; }
    Shape3 output_shape() const { return {out_channels, out_rows(), out_cols()}; }
    Shape4 kernel_shape() const { return {out_channels, in_channels, kKernel, kKernel}; }

    /// Throws ConfigError for a stride of zero or a window larger than the padded input.
    void validate() const;
};

/// Features (group*8 .. group*8+7) at one pixel.
std::array<Fxp16, kGroupLanes> channel_group_read(const FeatureMap& fm, std::size_t group,
                                                  std::size_t row, std::size_t col);

template <typename Scalar>
std::vector<Scalar> flatten(const Tensor3<Scalar>& fm) {
    return {fm.data().begin(), fm.data().end()};
}

template <typename Scalar>
Tensor3<Scalar> reshape(std::span<const Scalar> flat, const Shape3& shape) {
    if (flat.size() != shape.size()) {
        throw ConfigError("reshape: " + std::to_string(flat.size()) + " values do not fill " +
                          to_string(shape));
    }
    Tensor3<Scalar> out(shape);
    std::copy(flat.begin(), flat.end(), out.data().begin());
    return out;
}

/// Appends zero-valued channels up to the next multiple of `multiple`.
template <typename Scalar>
Tensor3<Scalar> pad_channels(const Tensor3<Scalar>& fm, std::size_t multiple = kGroupLanes) {
    Tensor3<Scalar> out(Shape3{round_up(fm.channels(), multiple), fm.rows(), fm.cols()});
    std::copy(fm.data().begin(), fm.data().end(), out.data().begin());
    return out;
}

FloatMap to_float(const FeatureMap& fm);
FloatKernel to_float(const KernelTensor& k);
FeatureMap to_fixed(const FloatMap& fm);
KernelTensor to_fixed(const FloatKernel& k);

template <std::floating_point Scalar>
auto as_eigen(const Tensor3<Scalar>& t) {
    return Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(
        t.data().data(), static_cast<Eigen::Index>(t.size()));
}

template <std::floating_point Scalar>
auto as_eigen(Tensor3<Scalar>& t) {
    return Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(
        t.data().data(), static_cast<Eigen::Index>(t.size()));
}

/// (out x fan_in) row-major matrix view.
template <std::floating_point Scalar>
auto as_eigen(const Tensor4<Scalar>& t) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    return Eigen::Map<const Mat>(t.data().data(), static_cast<Eigen::Index>(t.out_channels()),
                                 static_cast<Eigen::Index>(t.shape().fan_in()));
}

template <std::floating_point Scalar>
auto as_eigen(Tensor4<Scalar>& t) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    return Eigen::Map<Mat>(t.data().data(), static_cast<Eigen::Index>(t.out_channels()),
                           static_cast<Eigen::Index>(t.shape().fan_in()));
}

}  // namespace tinycl
