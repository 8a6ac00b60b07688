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
 * @file experiment.hpp
 * @brief Experiment configuration, the task-stream runner and its output
 *        files (JSON report, per-pass CSV, weight dump).
 *
 * The configuration and report schemas are described in docs/formats.md.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "tinycl/cl_engine.hpp"
#include "tinycl/dataset.hpp"

namespace tinycl {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

struct DatasetConfig {
    std::string kind = "synthetic";  // "synthetic" | "cifar10"
    std::filesystem::path train_path;
    std::filesystem::path test_path;  // optional for cifar10
    std::size_t n_per_class = 20;     // synthetic train samples per class
    std::size_t test_per_class = 10;  // synthetic held-out samples per class
    std::size_t max_per_class = 0;    // cap on train samples offered per class, 0 = all
    double test_fraction = 0.1;       // cifar10 held-out share when no test file is given
};

struct ProtocolConfig {
    std::size_t n_tasks = 5;
    std::size_t classes_per_task = 2;
    std::size_t epochs = 10;
    double lr = 1.0;
    LossKind loss = LossKind::Mse;
    bool reinit_each_task = false;
    double init_range = 0.5;
    std::size_t buffer_bytes = ReplayBuffer::kDefaultCapacity;
};

struct ExperimentConfig {
    ModelSpec model{};
    DeviceConfig device{};
    DatasetConfig dataset{};
    ProtocolConfig protocol{};
    uint64_t seed = 1;
    bool log_passes = true;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct ExperimentData {
    Dataset train;
    Dataset test;
};

ExperimentData load_experiment_data(const ExperimentConfig& cfg);

struct ExperimentResult {
    TrainingState state;
    CycleReport report;
    ReplayBuffer buffer;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentData& data);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Report with a fixed field set; unavailable measurements are null.
nlohmann::json make_report(const ExperimentConfig& cfg, const ExperimentResult& result,
                           std::optional<std::string> generated_at = std::nullopt);

/// "TCLW" magic, u32 version, u32 tensor count, then per tensor u32[4] dims
/// and the raw int16 values, all little-endian.
void write_weights(std::ostream& os, const TrainingState& state);

/// Writes report.json, cycles.csv and weights.bin into `dir`.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                   const std::filesystem::path& dir);

}  // namespace tinycl
