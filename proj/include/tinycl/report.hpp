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
 * @file report.hpp
 * @brief Append-only per-pass cycle log and per-task accuracy of a run.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tinycl {

enum class PassKind { Forward, KernelGradient, GradientPropagation, WeightGradient };

std::string_view to_string(PassKind p);

struct PassRecord {
    std::size_t task = 0;
    std::size_t epoch = 0;
    std::size_t sample = 0;
    std::size_t layer = 0;
    PassKind pass = PassKind::Forward;
    uint64_t cycles = 0;
    uint64_t stalls = 0;
    uint64_t saturations = 0;
};

struct TaskAccuracy {
    std::size_t task = 0;
    std::size_t classes_seen = 0;
    std::optional<double> accuracy_all;       // over every class seen so far
    std::vector<std::optional<double>> per_task;  // accuracy on each task's classes
};

struct PassTotals {
    uint64_t passes = 0;
    uint64_t cycles = 0;
    uint64_t stalls = 0;
    uint64_t saturations = 0;
    uint64_t last_cycles = 0;  // cycles of the most recent pass
};

class CycleReport {
  public:
    /// Training passes. With `keep_records` off only the totals are kept.
    void append(const PassRecord& rec);
    /// Forward passes run for evaluation; totals only.
    void append_inference(uint64_t cycles, uint64_t stalls);
    void append_accuracy(TaskAccuracy acc) { accuracy_.push_back(std::move(acc)); }

    void set_keep_records(bool keep) { keep_records_ = keep; }

    const std::vector<PassRecord>& records() const { return records_; }
    const std::vector<TaskAccuracy>& accuracy() const { return accuracy_; }
    /// Keyed by (layer, pass).
    const std::map<std::pair<std::size_t, PassKind>, PassTotals>& totals() const { return totals_; }

    uint64_t training_cycles() const { return training_cycles_; }
    uint64_t inference_cycles() const { return inference_cycles_; }
    uint64_t total_cycles() const { return training_cycles_ + inference_cycles_; }
    uint64_t total_stalls() const { return stalls_; }
    uint64_t total_saturations() const { return saturations_; }

    /// Modeled time: cycles x clock period.
    static double wall_time_s(uint64_t cycles, double clock_period_ns) {
        return static_cast<double>(cycles) * clock_period_ns * 1e-9;
    }

    /// task,epoch,sample,layer,pass,cycles,stalls,saturations
    void write_csv(std::ostream& os) const;

  private:
    bool keep_records_ = true;
    std::vector<PassRecord> records_;
    std::vector<TaskAccuracy> accuracy_;
    std::map<std::pair<std::size_t, PassKind>, PassTotals> totals_;
    uint64_t training_cycles_ = 0;
    uint64_t inference_cycles_ = 0;
    uint64_t stalls_ = 0;
    uint64_t saturations_ = 0;
};

}  // namespace tinycl
