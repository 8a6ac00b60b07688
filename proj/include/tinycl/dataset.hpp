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
 * @file dataset.hpp
 * @brief CIFAR-10 binary reader and a seeded synthetic image generator.
 *
 * CIFAR-10 binary records are 3073 bytes: one label byte (0-9) followed by
 * 1024 red, 1024 green and 1024 blue bytes, each plane row-major 32x32.
 * Pixels are scaled by 1/255 and encoded to Q4.12.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tinycl/replay_buffer.hpp"

namespace tinycl {

struct Dataset {
    Shape3 shape{};
    std::size_t num_classes = 0;
    std::vector<Sample> samples;
};

inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarRecordBytes = 1 + 3 * kCifarSide * kCifarSide;

/// Parses an in-memory CIFAR-10 binary blob. Throws ParseError on a
/// truncated record and DataError on a label above 9. Sample ids start at
/// `first_id`.
Dataset parse_cifar10(std::span<const uint8_t> bytes, uint64_t first_id = 0);
Dataset load_cifar10(const std::filesystem::path& path, uint64_t first_id = 0);

/// Class c is a Gaussian blob at a seeded class-specific position with
/// seeded per-channel amplitudes; samples add positional jitter and pixel
/// noise, clipped to [0, 1].
Dataset gen_synthetic(std::size_t n_classes, std::size_t n_per_class, std::size_t rows, std::size_t cols,
                      std::size_t channels, uint64_t seed);

}  // namespace tinycl
