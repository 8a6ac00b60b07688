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

#include "tinycl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "tinycl/errors.hpp"

namespace tinycl {

Dataset parse_cifar10(std::span<const uint8_t> bytes, uint64_t first_id) {
    constexpr std::size_t plane = kCifarSide * kCifarSide;
    Dataset ds{Shape3{3, kCifarSide, kCifarSide}, 10, {}};
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        if (bytes.size() - offset < kCifarRecordBytes) {
            throw ParseError("truncated CIFAR-10 record (" + std::to_string(bytes.size() - offset) +
                                 " of " + std::to_string(kCifarRecordBytes) + " bytes)",
                             offset);
        }
        const uint8_t label = bytes[offset];
        if (label > 9) {
            throw DataError("CIFAR-10 label " + std::to_string(label) + " out of range at byte offset " +
                            std::to_string(offset));
        }
        Sample s{FeatureMap(ds.shape), label, first_id + ds.samples.size()};
        auto px = s.image.data();
        for (std::size_t i = 0; i < 3 * plane; ++i) {
            px[i] = encode(static_cast<double>(bytes[offset + 1 + i]) / 255.0);
        }
        ds.samples.push_back(std::move(s));
        offset += kCifarRecordBytes;
    }
    return ds;
}

Dataset load_cifar10(const std::filesystem::path& path, uint64_t first_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open CIFAR-10 file " + path.string());
    const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_cifar10(bytes, first_id);
}

Dataset gen_synthetic(std::size_t n_classes, std::size_t n_per_class, std::size_t rows, std::size_t cols,
                      std::size_t channels, uint64_t seed) {
    if (n_classes == 0 || n_per_class == 0 || rows == 0 || cols == 0 || channels == 0) {
        throw ConfigError("gen_synthetic: all counts must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::normal_distribution<double> jitter(0.0, 0.5);

    struct Prototype {
        double cy, cx;
        std::vector<double> amp;
    };
    std::vector<Prototype> protos;
    for (std::size_t c = 0; c < n_classes; ++c) {
        Prototype p{unit(rng) * static_cast<double>(rows - 1), unit(rng) * static_cast<double>(cols - 1), {}};
        for (std::size_t ch = 0; ch < channels; ++ch) p.amp.push_back(0.3 + 0.7 * unit(rng));
        protos.push_back(std::move(p));
    }
    const double sigma = 0.2 * static_cast<double>(std::max(rows, cols));

    Dataset ds{Shape3{channels, rows, cols}, n_classes, {}};
    // Interleave classes so any prefix is close to balanced.
    for (std::size_t i = 0; i < n_per_class; ++i) {
        for (std::size_t c = 0; c < n_classes; ++c) {
            const auto& p = protos[c];
            const double cy = p.cy + jitter(rng);
            const double cx = p.cx + jitter(rng);
            Sample s{FeatureMap(ds.shape), c, ds.samples.size()};
            for (std::size_t ch = 0; ch < channels; ++ch)
                for (std::size_t y = 0; y < rows; ++y)
                    for (std::size_t x = 0; x < cols; ++x) {
                        const double dy = static_cast<double>(y) - cy;
                        const double dx = static_cast<double>(x) - cx;
                        const double v = p.amp[ch] * std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma)) +
                                         noise(rng);
                        s.image(ch, y, x) = encode(std::clamp(v, 0.0, 1.0));
                    }
            ds.samples.push_back(std::move(s));
        }
    }
    return ds;
}

}  // namespace tinycl
