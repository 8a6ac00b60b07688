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

#include "tinycl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <set>

#include "tinycl/errors.hpp"

namespace tinycl {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

void read_path(const json& j, const char* key, std::filesystem::path& out, const std::string& where) {
    std::string s;
    read(j, key, s, where);
    if (!s.empty()) out = s;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    reject_unknown(j, {"schema_version", "seed", "model", "device", "dataset", "protocol", "log_passes"},
                   "config");
    int version = kConfigSchemaVersion;
    read(j, "schema_version", version, "config");
    if (version != kConfigSchemaVersion) {
        throw ConfigError("unsupported config schema_version " + std::to_string(version));
    }
    ExperimentConfig cfg;
    read(j, "seed", cfg.seed, "config");
    read(j, "log_passes", cfg.log_passes, "config");

    if (j.contains("model")) {
        const auto& m = j.at("model");
        reject_unknown(m, {"input", "conv_filters"}, "model");
        if (m.contains("input")) {
            const auto& in = m.at("input");
            reject_unknown(in, {"channels", "rows", "cols"}, "model.input");
            read(in, "channels", cfg.model.input.channels, "model.input");
            read(in, "rows", cfg.model.input.rows, "model.input");
            read(in, "cols", cfg.model.input.cols, "model.input");
        }
        read(m, "conv_filters", cfg.model.conv_filters, "model");
    }

    if (j.contains("device")) {
        const auto& d = j.at("device");
        reject_unknown(d, {"clock_period_ns", "cycle_model", "memory"}, "device");
        read(d, "clock_period_ns", cfg.device.clock_period_ns, "device");
        std::string cm = std::string(to_string(cfg.device.cycle_model));
        read(d, "cycle_model", cm, "device");
        cfg.device.cycle_model = parse_cycle_model(cm);
        if (d.contains("memory")) {
            const auto& mem = d.at("memory");
            reject_unknown(mem,
                           {"training_data_bytes", "partial_feature_bytes", "kernel_bytes",
                            "gradient_bytes", "feature_banks"},
                           "device.memory");
            auto& mc = cfg.device.memory;
            read(mem, "training_data_bytes", mc.training_data_bytes, "device.memory");
            read(mem, "partial_feature_bytes", mc.partial_feature_bytes, "device.memory");
            read(mem, "kernel_bytes", mc.kernel_bytes, "device.memory");
            read(mem, "gradient_bytes", mc.gradient_bytes, "device.memory");
            read(mem, "feature_banks", mc.feature_banks, "device.memory");
        }
    }

    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        reject_unknown(d,
                       {"kind", "train_path", "test_path", "n_per_class", "test_per_class",
                        "max_per_class", "test_fraction"},
                       "dataset");
        auto& dc = cfg.dataset;
        read(d, "kind", dc.kind, "dataset");
        read_path(d, "train_path", dc.train_path, "dataset");
        read_path(d, "test_path", dc.test_path, "dataset");
        read(d, "n_per_class", dc.n_per_class, "dataset");
        read(d, "test_per_class", dc.test_per_class, "dataset");
        read(d, "max_per_class", dc.max_per_class, "dataset");
        read(d, "test_fraction", dc.test_fraction, "dataset");
    }

    if (j.contains("protocol")) {
        const auto& p = j.at("protocol");
        reject_unknown(p,
                       {"n_tasks", "classes_per_task", "epochs", "lr", "loss", "reinit_each_task",
                        "init_range", "buffer_bytes"},
                       "protocol");
        auto& pc = cfg.protocol;
        read(p, "n_tasks", pc.n_tasks, "protocol");
        read(p, "classes_per_task", pc.classes_per_task, "protocol");
        read(p, "epochs", pc.epochs, "protocol");
        read(p, "lr", pc.lr, "protocol");
        std::string loss = std::string(to_string(pc.loss));
        read(p, "loss", loss, "protocol");
        pc.loss = parse_loss_kind(loss);
        read(p, "reinit_each_task", pc.reinit_each_task, "protocol");
        read(p, "init_range", pc.init_range, "protocol");
        read(p, "buffer_bytes", pc.buffer_bytes, "protocol");
    }

    cfg.model.validate();
    cfg.device.validate();
    if (cfg.dataset.kind != "synthetic" && cfg.dataset.kind != "cifar10") {
        throw ConfigError("dataset.kind must be 'synthetic' or 'cifar10'");
    }
    if (cfg.dataset.kind == "cifar10" && cfg.dataset.train_path.empty()) {
        throw ConfigError("dataset.train_path is required for cifar10");
    }
    if (cfg.protocol.n_tasks == 0 || cfg.protocol.classes_per_task == 0) {
        throw ConfigError("protocol needs at least one task and one class per task");
    }
    if (!(cfg.dataset.test_fraction >= 0.0 && cfg.dataset.test_fraction < 1.0)) {
        throw ConfigError("dataset.test_fraction must lie in [0, 1)");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
    const auto& mc = cfg.device.memory;
    return {
        {"schema_version", kConfigSchemaVersion},
        {"seed", cfg.seed},
        {"log_passes", cfg.log_passes},
        {"model",
         {{"input", {{"channels", cfg.model.input.channels}, {"rows", cfg.model.input.rows},
                     {"cols", cfg.model.input.cols}}},
          {"conv_filters", cfg.model.conv_filters}}},
        {"device",
         {{"clock_period_ns", cfg.device.clock_period_ns},
          {"cycle_model", to_string(cfg.device.cycle_model)},
          {"memory",
           {{"training_data_bytes", mc.training_data_bytes},
            {"partial_feature_bytes", mc.partial_feature_bytes},
            {"kernel_bytes", mc.kernel_bytes},
            {"gradient_bytes", mc.gradient_bytes},
            {"feature_banks", mc.feature_banks}}}}},
        {"dataset",
         {{"kind", cfg.dataset.kind},
          {"train_path", cfg.dataset.train_path.string()},
          {"test_path", cfg.dataset.test_path.string()},
          {"n_per_class", cfg.dataset.n_per_class},
          {"test_per_class", cfg.dataset.test_per_class},
          {"max_per_class", cfg.dataset.max_per_class},
          {"test_fraction", cfg.dataset.test_fraction}}},
        {"protocol",
         {{"n_tasks", cfg.protocol.n_tasks},
          {"classes_per_task", cfg.protocol.classes_per_task},
          {"epochs", cfg.protocol.epochs},
          {"lr", cfg.protocol.lr},
          {"loss", to_string(cfg.protocol.loss)},
          {"reinit_each_task", cfg.protocol.reinit_each_task},
          {"init_range", cfg.protocol.init_range},
          {"buffer_bytes", cfg.protocol.buffer_bytes}}},
    };
}

namespace {

/// Keeps at most `cap` samples per class (0 = no limit), preserving order.
std::vector<Sample> cap_per_class(std::vector<Sample> samples, std::size_t cap) {
    if (cap == 0) return samples;
    std::map<std::size_t, std::size_t> seen;
    std::vector<Sample> out;
    for (auto& s : samples)
        if (seen[s.label]++ < cap) out.push_back(std::move(s));
    return out;
}

}  // namespace

ExperimentData load_experiment_data(const ExperimentConfig& cfg) {
    const auto& dc = cfg.dataset;
    const std::size_t n_classes = cfg.protocol.n_tasks * cfg.protocol.classes_per_task;
    ExperimentData data;
    if (dc.kind == "synthetic") {
        const auto& in = cfg.model.input;
        Dataset all = gen_synthetic(n_classes, dc.n_per_class + dc.test_per_class, in.rows, in.cols,
                                    in.channels, cfg.seed);
        data.train = Dataset{all.shape, all.num_classes, {}};
        data.test = Dataset{all.shape, all.num_classes, {}};
        // Samples come in rounds of one per class; the first n_per_class rounds train.
        for (std::size_t i = 0; i < all.samples.size(); ++i) {
            auto& dst = i / n_classes < dc.n_per_class ? data.train : data.test;
            dst.samples.push_back(std::move(all.samples[i]));
        }
    } else {
        Dataset train = load_cifar10(dc.train_path);
        if (!dc.test_path.empty()) {
            data.test = load_cifar10(dc.test_path, train.samples.size());
            data.train = std::move(train);
        } else {
            std::map<std::size_t, std::size_t> per_class;
            for (const auto& s : train.samples) ++per_class[s.label];
            std::map<std::size_t, std::size_t> taken;
            data.train = Dataset{train.shape, train.num_classes, {}};
            data.test = Dataset{train.shape, train.num_classes, {}};
            for (auto& s : train.samples) {
                const auto hold = static_cast<std::size_t>(dc.test_fraction * static_cast<double>(per_class[s.label]));
                const std::size_t keep = per_class[s.label] - hold;
                auto& dst = taken[s.label]++ < keep ? data.train : data.test;
                dst.samples.push_back(std::move(s));
            }
        }
    }
    data.train.samples = cap_per_class(std::move(data.train.samples), dc.max_per_class);
    for (auto* ds : {&data.train, &data.test}) {
        std::erase_if(ds->samples, [&](const Sample& s) { return s.label >= n_classes; });
    }
    return data;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentData& data) {
    const auto& pc = cfg.protocol;
    ExperimentResult result{
        init_state(cfg.model, pc.init_range, cfg.seed, encode(pc.lr)), CycleReport{}, ReplayBuffer(pc.buffer_bytes)};
    result.report.set_keep_records(cfg.log_passes);

    DeviceConfig dev_cfg = cfg.device;
    Device device(dev_cfg);
    const ClConfig cl{pc.epochs, pc.loss, pc.reinit_each_task, pc.init_range, cfg.seed};

    TaskStream stream = TaskStream::split(data.train.samples, pc.n_tasks, pc.classes_per_task);
    stream.validate();

    std::vector<std::size_t> seen;
    for (const auto& task : stream.tasks) {
        run_task(result.state, result.buffer, task, device, cl, result.report);
        seen.insert(seen.end(), task.classes.begin(), task.classes.end());

        TaskAccuracy acc;
        acc.task = task.index;
        acc.classes_seen = result.state.num_classes;
        acc.accuracy_all = evaluate(result.state, data.test.samples, seen, device, &result.report);
        for (std::size_t t = 0; t <= task.index; ++t) {
            acc.per_task.push_back(
                evaluate(result.state, data.test.samples, stream.tasks[t].classes, device, &result.report));
        }
        result.report.append_accuracy(std::move(acc));
    }
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, load_experiment_data(cfg));
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json make_report(const ExperimentConfig& cfg, const ExperimentResult& result,
                 std::optional<std::string> generated_at) {
    const auto& rep = result.report;
    const double clk = cfg.device.clock_period_ns;
    const auto layers = cfg.model.conv_layers();

    json layer_list = json::array();
    auto pass_entry = [&](std::size_t layer, PassKind pass) {
        const auto it = rep.totals().find({layer, pass});
        if (it == rep.totals().end()) {
            return json{{"passes", 0}, {"cycles_per_pass", nullptr}, {"cycles", 0}, {"stalls", 0},
                        {"saturations", 0}};
        }
        const auto& t = it->second;
        return json{{"passes", t.passes}, {"cycles_per_pass", t.last_cycles}, {"cycles", t.cycles},
                    {"stalls", t.stalls}, {"saturations", t.saturations}};
    };
    for (std::size_t l = 0; l < layers.size(); ++l) {
        layer_list.push_back({{"layer", l},
                              {"type", "conv"},
                              {"input_shape", to_string(layers[l].input_shape())},
                              {"forward", pass_entry(l, PassKind::Forward)},
                              {"kernel_gradient", pass_entry(l, PassKind::KernelGradient)},
                              {"gradient_propagation", pass_entry(l, PassKind::GradientPropagation)}});
    }
    const std::size_t dl = cfg.model.dense_layer();
    layer_list.push_back({{"layer", dl},
                          {"type", "dense"},
                          {"input_shape", to_string(cfg.model.dense_input())},
                          {"forward", pass_entry(dl, PassKind::Forward)},
                          {"weight_gradient", pass_entry(dl, PassKind::WeightGradient)},
                          {"gradient_propagation", pass_entry(dl, PassKind::GradientPropagation)}});

    json tasks = json::array();
    for (const auto& a : rep.accuracy()) {
        json per = json::array();
        for (const auto& v : a.per_task) per.push_back(optional_number(v));
        tasks.push_back({{"task", a.task},
                         {"classes_seen", a.classes_seen},
                         {"accuracy_all", optional_number(a.accuracy_all)},
                         {"accuracy_per_task", per}});
    }

    json counts = json::object();
    for (const auto& [cls, n] : result.buffer.class_counts()) counts[std::to_string(cls)] = n;

    return {
        {"schema", "tinycl.report"},
        {"schema_version", kReportSchemaVersion},
        {"generated_at", generated_at ? json(*generated_at) : json(nullptr)},
        {"seed", cfg.seed},
        {"cycle_model", to_string(cfg.device.cycle_model)},
        {"clock_period_ns", clk},
        {"config", to_json(cfg)},
        {"layers", layer_list},
        {"totals",
         {{"training_cycles", rep.training_cycles()},
          {"inference_cycles", rep.inference_cycles()},
          {"total_cycles", rep.total_cycles()},
          {"stalls", rep.total_stalls()},
          {"saturation_events", rep.total_saturations()}}},
        {"wall_time",
         {{"estimate", true},
          {"basis", "total_cycles x clock_period_ns; excludes host and inter-layer overheads"},
          {"training_seconds", CycleReport::wall_time_s(rep.training_cycles(), clk)},
          {"total_seconds", CycleReport::wall_time_s(rep.total_cycles(), clk)}}},
        {"tasks", tasks},
        {"buffer",
         {{"capacity_bytes", result.buffer.capacity_bytes()},
          {"stored_bytes", result.buffer.stored_bytes()},
          {"samples", result.buffer.size()},
          {"class_counts", counts}}},
        {"final", {{"classes", result.state.num_classes},
                   {"epochs_run", result.state.epoch},
                   {"last_loss", result.state.num_classes ? json(result.state.loss) : json(nullptr)}}},
    };
}

namespace {

void put_u32(std::ostream& os, uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                       static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    os.write(b, 4);
}

void put_tensor(std::ostream& os, const KernelTensor& k) {
    const auto& s = k.shape();
    for (std::size_t d : {s.out_channels, s.in_channels, s.k_rows, s.k_cols}) put_u32(os, static_cast<uint32_t>(d));
    for (Fxp16 v : k.data()) {
        const auto u = static_cast<uint16_t>(v.raw);
        const char b[2] = {static_cast<char>(u & 0xFF), static_cast<char>(u >> 8)};
        os.write(b, 2);
    }
}

}  // namespace

void write_weights(std::ostream& os, const TrainingState& state) {
    os.write("TCLW", 4);
    put_u32(os, 1);
    const bool has_dense = state.num_classes > 0;
    put_u32(os, static_cast<uint32_t>(state.conv_kernels.size() + (has_dense ? 1 : 0)));
    for (const auto& k : state.conv_kernels) put_tensor(os, k);
    if (has_dense) put_tensor(os, state.dense);
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name, std::ios::openmode mode) {
        std::ofstream f(dir / name, mode);
        if (!f) throw ConfigError("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("cycles.csv", std::ios::out);
        result.report.write_csv(f);
    }
    {
        auto f = open("weights.bin", std::ios::out | std::ios::binary);
        write_weights(f, result.state);
    }
    {
        auto f = open("report.json", std::ios::out);
        // generated_at is the only field that varies between identical runs.
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        f << make_report(cfg, result, std::string(buf)).dump(2) << '\n';
    }
}

}  // namespace tinycl
