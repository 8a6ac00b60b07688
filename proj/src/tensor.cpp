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

#include "tinycl/tensor.hpp"

#include <sstream>

namespace tinycl {

std::string to_string(const Shape3& s) {
    std::ostringstream os;
    os << s.channels << "x" << s.rows << "x" << s.cols;
    return os.str();
}

std::string to_string(const Shape4& s) {
    std::ostringstream os;
    os << s.out_channels << "x" << s.in_channels << "x" << s.k_rows << "x" << s.k_cols;
    return os.str();
}

std::size_t feature_address(std::size_t ch, std::size_t row, std::size_t col, const Shape3& shape) {
    if (ch >= shape.channels || row >= shape.rows || col >= shape.cols) {
        throw std::out_of_range("feature_address: (" + std::to_string(ch) + "," +
                                std::to_string(row) + "," + std::to_string(col) +
                                ") outside " + to_string(shape));
    }
    return ch * shape.rows * shape.cols + row * shape.cols + col;
}

void ConvLayerSpec::validate() const {
    if (stride == 0) throw ConfigError("conv layer stride must be >= 1");
    if (in_channels == 0 || out_channels == 0 || rows == 0 || cols == 0) {
        throw ConfigError("conv layer dimensions must be >= 1");
    }
    if (rows + 2 * pad < kKernel || cols + 2 * pad < kKernel) {
        throw ConfigError("conv layer input smaller than the 3x3 window");
    }
}

std::array<Fxp16, kGroupLanes> channel_group_read(const FeatureMap& fm, std::size_t group,
                                                  std::size_t row, std::size_t col) {
    if ((group + 1) * kGroupLanes > fm.channels()) {
        throw std::out_of_range("channel_group_read: group " + std::to_string(group) +
                                " needs channels up to " +
                                std::to_string((group + 1) * kGroupLanes - 1) + " but map has " +
                                std::to_string(fm.channels()));
    }
    if (row >= fm.rows() || col >= fm.cols()) {
        throw std::out_of_range("channel_group_read: pixel outside " + to_string(fm.shape()));
    }
    std::array<Fxp16, kGroupLanes> out{};
    for (std::size_t lane = 0; lane < kGroupLanes; ++lane) {
        out[lane] = fm(group * kGroupLanes + lane, row, col);
    }
    return out;
}

FloatMap to_float(const FeatureMap& fm) {
    FloatMap out(fm.shape());
    for (std::size_t i = 0; i < fm.size(); ++i) out.data()[i] = decode(fm.data()[i]);
    return out;
}

FloatKernel to_float(const KernelTensor& k) {
    FloatKernel out(k.shape());
    for (std::size_t i = 0; i < k.size(); ++i) out.data()[i] = decode(k.data()[i]);
    return out;
}

FeatureMap to_fixed(const FloatMap& fm) {
    FeatureMap out(fm.shape());
    for (std::size_t i = 0; i < fm.size(); ++i) out.data()[i] = encode(fm.data()[i]);
    return out;
}

KernelTensor to_fixed(const FloatKernel& k) {
    KernelTensor out(k.shape());
    for (std::size_t i = 0; i < k.size(); ++i) out.data()[i] = encode(k.data()[i]);
    return out;
}

}  // namespace tinycl
