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
 * @file cl_engine.hpp
 * @brief Continual-learning controller: model state, the per-sample
 *        forward / loss / backward / update schedule, and GDumb task runs.
 *
 * A training step on the device:
 *   forward:  each conv layer stores its input in partial feature memory,
 *             runs the forward dataflow and applies ReLU on write-back; the
 *             dense layer stores its input and produces y.
 *   loss:     computed in double precision, dY re-encoded to Q4.12 and
 *             written to a gradient memory.
 *   backward: dense weight gradient and gradient propagation, then for each
 *             conv layer, last first, the ReLU mask is applied as G is read,
 *             followed by the kernel gradient and gradient propagation. Every
 *             pass reads one gradient memory and writes the other.
 *   update:   w <- w - lr * g, saturating, one rounding per weight.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tinycl/convsim.hpp"
#include "tinycl/cycle_model.hpp"
#include "tinycl/densesim.hpp"
#include "tinycl/loss.hpp"
#include "tinycl/memsys.hpp"
#include "tinycl/oracle.hpp"
#include "tinycl/pu.hpp"
#include "tinycl/replay_buffer.hpp"
#include "tinycl/report.hpp"

namespace tinycl {

/// Conv+ReLU layers followed by one dense layer.
struct ModelSpec {
    Shape3 input{3, 32, 32};
    std::vector<std::size_t> conv_filters{8, 8};

    /// Layer geometry with channel counts padded to multiples of 8.
    std::vector<ConvLayerSpec> conv_layers() const;
    Shape3 dense_input() const;
    std::size_t weighted_layers() const { return conv_filters.size() + 1; }
    /// Index of the dense layer in reports.
    std::size_t dense_layer() const { return conv_filters.size(); }
    void validate() const;
};

struct TrainingState {
    ModelSpec model;
    std::vector<KernelTensor> conv_kernels;
    KernelTensor dense;  // (num_classes, C, R, W); empty while no class is known
    std::size_t num_classes = 0;
    Fxp16 lr = Fxp16::one();
    std::size_t epoch = 0;
    std::size_t batch_size = 1;
    double loss = 0.0;  // last step, float domain

    std::size_t weight_bytes() const;
};

/// Conv weights uniform in [-range, range] quantized to Q4.12; weights that
/// touch padded channels stay zero so padding channels remain inert.
TrainingState init_state(const ModelSpec& model, double init_range, uint64_t seed,
                         Fxp16 lr = Fxp16::one());

/// Re-draws the conv kernels and clears the dense rows, keeping the class count.
void reinitialize(TrainingState& state, double init_range, uint64_t seed);

/// Appends zero-initialized dense rows up to `num_classes`.
void grow_classes(TrainingState& state, std::size_t num_classes);

/// Pads an image's channels to the model's first-layer width.
FeatureMap ingest(const FeatureMap& image, const ModelSpec& model);

FeatureMap relu_forward(const FeatureMap& x);
/// g where x_forward > 0, else 0.
FeatureMap relu_backward(const FeatureMap& g, const FeatureMap& x_forward);

struct DeviceConfig {
    double clock_period_ns = 3.87;
    MemoryConfig memory{};
    CycleModel cycle_model = CycleModel::Calibrated;

    void validate() const;
};

/// One simulated accelerator: PU plus memories. Not shared between runs.
class Device {
  public:
    explicit Device(const DeviceConfig& cfg = {});

    const DeviceConfig& config() const { return cfg_; }
    PuArray& pu() { return pu_; }
    MemorySystem& memory() { return mem_; }

    /// Sizes kernel memory for the state's weights; throws CapacityError.
    void load_weights(const TrainingState& state);

  private:
    DeviceConfig cfg_;
    PuArray pu_{};
    MemorySystem mem_;
};

struct StepTag {
    std::size_t task = 0;
    std::size_t epoch = 0;
    std::size_t sample = 0;
};

struct Gradients {
    std::vector<KernelTensor> conv;
    KernelTensor dense;
    std::vector<Fxp16> output;
    double loss = 0.0;
};

/// Forward + backward for one sample; leaves the weights untouched.
Gradients compute_gradients(const TrainingState& state, const FeatureMap& image, std::size_t label,
                            LossKind loss, Device& device, CycleReport* report = nullptr,
                            StepTag tag = {});

void apply_gradients(TrainingState& state, const Gradients& grads, SaturationStats* stats = nullptr);

/// One SGD step (batch size 1). Returns the loss.
double train_step(TrainingState& state, const FeatureMap& image, std::size_t label, LossKind loss,
                  Device& device, CycleReport* report = nullptr, StepTag tag = {});

/// Forward pass only; cycles go to the report's inference total.
std::vector<Fxp16> predict(const TrainingState& state, const FeatureMap& image, Device& device,
                           CycleReport* report = nullptr);

/// Argmax of the output, lowest index on ties.
std::size_t classify(std::span<const Fxp16> y);

/// Fraction of `samples` with label in `classes` that are classified
/// correctly; nullopt when none qualifies.
std::optional<double> evaluate(const TrainingState& state, std::span<const Sample> samples,
                               std::span<const std::size_t> classes, Device& device,
                               CycleReport* report = nullptr);

/// Float mirror of the fixed-point weights (for oracle comparisons).
oracle::FloatModel to_float_model(const TrainingState& state, LossKind loss);

struct ClConfig {
    std::size_t epochs = 10;
    LossKind loss = LossKind::Mse;
    bool reinit_each_task = false;
    double init_range = 0.5;
    uint64_t seed = 1;
};

struct Task {
    std::size_t index = 0;
    std::vector<std::size_t> classes;
    std::vector<Sample> samples;
};

/// Consecutive class ids per task: task t holds classes [t*k, (t+1)*k).
struct TaskStream {
    std::vector<Task> tasks;

    static TaskStream split(std::span<const Sample> samples, std::size_t n_tasks,
                            std::size_t classes_per_task);
    /// Throws ConfigError when two tasks share a class.
    void validate() const;
};

/// Offers the task's samples to the buffer, grows the dense layer to the
/// classes seen, then retrains from the buffer for cfg.epochs.
void run_task(TrainingState& state, ReplayBuffer& buffer, const Task& task, Device& device,
              const ClConfig& cfg, CycleReport& report);

}  // namespace tinycl
