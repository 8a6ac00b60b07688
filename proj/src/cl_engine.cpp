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

#include "tinycl/cl_engine.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "tinycl/errors.hpp"

namespace tinycl {

std::vector<ConvLayerSpec> ModelSpec::conv_layers() const {
    std::vector<ConvLayerSpec> out;
    std::size_t in = round_up(input.channels, kGroupLanes);
    for (std::size_t f : conv_filters) {
        const std::size_t o = round_up(f, kGroupLanes);
        out.push_back(ConvLayerSpec{in, o, input.rows, input.cols, 1, 1});
        in = o;
    }
    return out;
}

Shape3 ModelSpec::dense_input() const {
    const std::size_t ch = conv_filters.empty() ? input.channels : conv_filters.back();
    return {round_up(ch, kGroupLanes), input.rows, input.cols};
}

void ModelSpec::validate() const {
    if (input.size() == 0) throw ConfigError("model input dimensions must be >= 1");
    if (input.plane() % 8 != 0) {
        throw ConfigError("model input plane " + std::to_string(input.rows) + "x" +
                          std::to_string(input.cols) + " must hold a multiple of 8 pixels");
    }
    for (std::size_t f : conv_filters)
        if (f == 0) throw ConfigError("conv layer needs at least one filter");
    for (const auto& l : conv_layers()) l.validate();
}

std::size_t TrainingState::weight_bytes() const {
    std::size_t b = dense.size() * kBytesPerValue;
    for (const auto& k : conv_kernels) b += bytes_of(k);
    return b;
}

namespace {

std::vector<KernelTensor> draw_kernels(const ModelSpec& model, double range, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-range, range);
    std::vector<KernelTensor> out;
    std::size_t real_in = model.input.channels;
    for (const auto& spec : model.conv_layers()) {
        const std::size_t real_out = model.conv_filters[out.size()];
        KernelTensor k(spec.kernel_shape());
        for (std::size_t o = 0; o < real_out; ++o)
            for (std::size_t i = 0; i < real_in; ++i)
                for (std::size_t r = 0; r < ConvLayerSpec::kKernel; ++r)
                    for (std::size_t c = 0; c < ConvLayerSpec::kKernel; ++c) k(o, i, r, c) = encode(dist(rng));
        out.push_back(std::move(k));
        real_in = real_out;
    }
    return out;
}

}  // namespace

TrainingState init_state(const ModelSpec& model, double init_range, uint64_t seed, Fxp16 lr) {
    model.validate();
    TrainingState s;
    s.model = model;
    s.lr = lr;
    s.conv_kernels = draw_kernels(model, init_range, seed);
    return s;
}

void reinitialize(TrainingState& state, double init_range, uint64_t seed) {
    state.conv_kernels = draw_kernels(state.model, init_range, seed);
    const std::size_t n = state.num_classes;
    state.num_classes = 0;
    state.dense = KernelTensor{};
    grow_classes(state, n);
}

void grow_classes(TrainingState& state, std::size_t num_classes) {
    if (num_classes <= state.num_classes) return;
    KernelTensor grown(dense_weight_shape(state.model.dense_input(), num_classes));
    std::copy(state.dense.data().begin(), state.dense.data().end(), grown.data().begin());
    state.dense = std::move(grown);
    state.num_classes = num_classes;
}

FeatureMap ingest(const FeatureMap& image, const ModelSpec& model) {
    if (image.shape() != model.input) {
        throw ConfigError("image shape " + to_string(image.shape()) + " does not match model input " +
                          to_string(model.input));
    }
    return pad_channels(image);
}

FeatureMap relu_forward(const FeatureMap& x) {
    FeatureMap out(x.shape());
    std::transform(x.data().begin(), x.data().end(), out.data().begin(),
                   [](Fxp16 v) { return v.raw > 0 ? v : Fxp16{}; });
    return out;
}

FeatureMap relu_backward(const FeatureMap& g, const FeatureMap& x_forward) {
    if (g.shape() != x_forward.shape()) {
        throw ConfigError("relu_backward: gradient " + to_string(g.shape()) + " vs activation " +
                          to_string(x_forward.shape()));
    }
    FeatureMap out(g.shape());
    for (std::size_t i = 0; i < g.size(); ++i)
        out.data()[i] = x_forward.data()[i].raw > 0 ? g.data()[i] : Fxp16{};
    return out;
}

void DeviceConfig::validate() const {
    if (!(clock_period_ns > 0.0)) throw ConfigError("clock_period_ns must be > 0");
    if (memory.feature_banks == 0) throw ConfigError("feature_banks must be >= 1");
}

Device::Device(const DeviceConfig& cfg) : cfg_(cfg), mem_((cfg.validate(), cfg.memory)) {}

void Device::load_weights(const TrainingState& state) {
    mem_.release_kernels();
    mem_.reserve_kernels(state.weight_bytes(),
                         "model weights with " + std::to_string(state.num_classes) + " classes");
}

Gradients compute_gradients(const TrainingState& state, const FeatureMap& image, std::size_t label,
                            LossKind loss, Device& device, CycleReport* report, StepTag tag) {
    if (state.num_classes == 0) throw ContractError("train_step: the dense layer has no classes yet");
    if (label >= state.num_classes) {
        throw ContractError("train_step: label " + std::to_string(label) + " >= class count " +
                            std::to_string(state.num_classes));
    }
    auto& mem = device.memory();
    auto& pu = device.pu();
    auto& features = mem.group(MemoryKind::PartialFeature);
    const CycleModel cm = device.config().cycle_model;
    const auto layers = state.model.conv_layers();
    const std::size_t dense_layer = layers.size();

    auto record = [&](std::size_t layer, PassKind pass, const PassStats& st) {
        if (!report) return;
        report->append({tag.task, tag.epoch, tag.sample, layer, pass, st.cycles, st.stalls, st.saturations});
    };

    mem.store_partial_feature(0, ingest(image, state.model));
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto fwd = conv_forward(mem.load_partial_feature(l), state.conv_kernels[l], layers[l], pu, &features);
        record(l, PassKind::Forward, fwd.stats);
        mem.store_partial_feature(l + 1, relu_forward(fwd.output));
    }

    const FeatureMap& dense_in = mem.load_partial_feature(dense_layer);
    const DenseLayerSpec ds{dense_in.size(), state.num_classes};
    auto y = dense_forward(dense_in, state.dense, ds, pu);
    record(dense_layer, PassKind::Forward, y.stats);

    auto head = loss_and_gradient(y.output, label, loss);
    mem.write_gradient(reshape<Fxp16>(head.gradient, Shape3{head.gradient.size(), 1, 1}));
    mem.swap_gradients();

    Gradients out;
    out.loss = head.value;
    out.output = std::move(y.output);
    const auto dy = mem.read_gradient().data();

    auto wg = dense_weight_gradient(dense_in, dy, ds, pu, cm);
    record(dense_layer, PassKind::WeightGradient, wg.stats);
    out.dense = std::move(wg.gradient);

    auto gp = dense_gradient_propagation(dy, state.dense, ds, pu, cm);
    record(dense_layer, PassKind::GradientPropagation, gp.stats);
    mem.write_gradient(gp.gradient);
    mem.swap_gradients();

    out.conv.resize(layers.size());
    for (std::size_t l = layers.size(); l-- > 0;) {
        // ReLU mask applied as G is read from the gradient memory.
        const FeatureMap g = relu_backward(mem.read_gradient(), mem.load_partial_feature(l + 1));
        auto& g_mem = mem.gradient_read_group();
        auto kg = conv_kernel_gradient(g, mem.load_partial_feature(l), layers[l], pu, &features, &g_mem);
        record(l, PassKind::KernelGradient, kg.stats);
        out.conv[l] = std::move(kg.gradient);

        auto dv = conv_gradient_propagation(g, state.conv_kernels[l], layers[l], pu, &g_mem);
        record(l, PassKind::GradientPropagation, dv.stats);
        mem.write_gradient(dv.output);
        mem.swap_gradients();
    }
    return out;
}

void apply_gradients(TrainingState& state, const Gradients& grads, SaturationStats* stats) {
    auto update = [&](std::span<Fxp16> w, std::span<const Fxp16> g) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = sgd_update(w[i], state.lr, g[i], stats);
    };
    for (std::size_t l = 0; l < state.conv_kernels.size(); ++l)
        update(state.conv_kernels[l].data(), grads.conv[l].data());
    update(state.dense.data(), grads.dense.data());
}

double train_step(TrainingState& state, const FeatureMap& image, std::size_t label, LossKind loss,
                  Device& device, CycleReport* report, StepTag tag) {
    const Gradients g = compute_gradients(state, image, label, loss, device, report, tag);
    SaturationStats sat;
    apply_gradients(state, g, &sat);
    state.loss = g.loss;
    return g.loss;
}

std::vector<Fxp16> predict(const TrainingState& state, const FeatureMap& image, Device& device,
                           CycleReport* report) {
    if (state.num_classes == 0) throw ContractError("predict: the dense layer has no classes yet");
    auto& pu = device.pu();
    auto& features = device.memory().group(MemoryKind::PartialFeature);
    const auto layers = state.model.conv_layers();
    uint64_t cycles = 0;
    uint64_t stalls = 0;
    FeatureMap x = ingest(image, state.model);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto fwd = conv_forward(x, state.conv_kernels[l], layers[l], pu, &features);
        cycles += fwd.stats.cycles;
        stalls += fwd.stats.stalls;
        x = relu_forward(fwd.output);
    }
    auto y = dense_forward(x, state.dense, DenseLayerSpec{x.size(), state.num_classes}, pu);
    cycles += y.stats.cycles;
    if (report) report->append_inference(cycles, stalls);
    return std::move(y.output);
}

std::size_t classify(std::span<const Fxp16> y) {
    const auto it = std::max_element(y.begin(), y.end(), [](Fxp16 a, Fxp16 b) { return a.raw < b.raw; });
    return static_cast<std::size_t>(std::distance(y.begin(), it));
}

std::optional<double> evaluate(const TrainingState& state, std::span<const Sample> samples,
                               std::span<const std::size_t> classes, Device& device,
                               CycleReport* report) {
    const std::set<std::size_t> wanted(classes.begin(), classes.end());
    std::size_t total = 0;
    std::size_t correct = 0;
    for (const auto& s : samples) {
        if (!wanted.contains(s.label)) continue;
        ++total;
        if (classify(predict(state, s.image, device, report)) == s.label) ++correct;
    }
    if (total == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(total);
}

oracle::FloatModel to_float_model(const TrainingState& state, LossKind loss) {
    oracle::FloatModel m;
    for (const auto& k : state.conv_kernels) m.conv_kernels.push_back(to_float(k));
    if (state.num_classes > 0) m.dense = to_float(state.dense);
    m.loss = loss;
    return m;
}

TaskStream TaskStream::split(std::span<const Sample> samples, std::size_t n_tasks,
                             std::size_t classes_per_task) {
    if (classes_per_task == 0) throw ConfigError("classes_per_task must be >= 1");
    TaskStream ts;
    for (std::size_t t = 0; t < n_tasks; ++t) {
        Task task;
        task.index = t;
        for (std::size_t c = 0; c < classes_per_task; ++c) task.classes.push_back(t * classes_per_task + c);
        for (const auto& s : samples)
            if (s.label / classes_per_task == t) task.samples.push_back(s);
        ts.tasks.push_back(std::move(task));
    }
    return ts;
}

void TaskStream::validate() const {
    std::set<std::size_t> seen;
    for (const auto& t : tasks) {
        for (std::size_t c : t.classes) {
            if (!seen.insert(c).second) {
                throw ConfigError("class " + std::to_string(c) + " appears in more than one task");
            }
        }
        for (const auto& s : t.samples) {
            if (std::find(t.classes.begin(), t.classes.end(), s.label) == t.classes.end()) {
                throw ConfigError("task " + std::to_string(t.index) + " holds a sample of foreign class " +
                                  std::to_string(s.label));
            }
        }
    }
}

void run_task(TrainingState& state, ReplayBuffer& buffer, const Task& task, Device& device,
              const ClConfig& cfg, CycleReport& report) {
    for (const auto& s : task.samples) buffer.insert(s);

    std::size_t classes = state.num_classes;
    for (std::size_t c : task.classes) classes = std::max(classes, c + 1);
    grow_classes(state, classes);
    if (task.samples.empty()) return;

    if (cfg.reinit_each_task) reinitialize(state, cfg.init_range, cfg.seed + task.index + 1);
    device.load_weights(state);

    // Each epoch trains on a seeded shuffle of the buffer contents.
    const std::vector<Sample> memory = buffer.samples();
    std::vector<std::size_t> order(memory.size());
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::seed_seq seq{cfg.seed, static_cast<uint64_t>(task.index), static_cast<uint64_t>(e)};
        std::mt19937_64 rng(seq);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const Sample& s = memory[order[pos]];
            train_step(state, s.image, s.label, cfg.loss, device, &report, StepTag{task.index, e, pos});
        }
        ++state.epoch;
    }
}

}  // namespace tinycl
