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

// tinycl: command-line front end for the simulator.
//
//   tinycl run --config configs/desk_synthetic.json --out-dir out/
//   tinycl check
//   tinycl cycles --rows 32 --cols 32 --channels 3 --filters 8,8 --classes 10

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"

#include "tinycl/checks.hpp"
#include "tinycl/cycle_model.hpp"
#include "tinycl/errors.hpp"
#include "tinycl/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::optional<uint64_t>& seed,
            const std::string& out_dir, const std::string& dataset,
            const std::string& cycle_model) {
    auto cfg = tinycl::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!dataset.empty()) {
        cfg.dataset.kind = "cifar10";
        cfg.dataset.train_path = dataset;
    }
    if (!cycle_model.empty()) cfg.device.cycle_model = tinycl::parse_cycle_model(cycle_model);

    const auto result = tinycl::run_experiment(cfg);
    tinycl::write_outputs(cfg, result, out_dir);

    const auto& rep = result.report;
    std::cout << "training cycles   " << rep.training_cycles() << '\n'
              << "inference cycles  " << rep.inference_cycles() << '\n'
              << "wall time (est.)  "
              << tinycl::CycleReport::wall_time_s(rep.total_cycles(), cfg.device.clock_period_ns)
              << " s at " << cfg.device.clock_period_ns << " ns/cycle\n";
    for (const auto& a : rep.accuracy()) {
        std::cout << "task " << a.task << "  classes " << a.classes_seen << "  accuracy ";
        if (a.accuracy_all)
            std::cout << std::fixed << std::setprecision(3) << *a.accuracy_all << '\n';
        else
            std::cout << "n/a\n";
        std::cout.unsetf(std::ios::floatfield);
    }
    std::cout << "outputs written to " << out_dir << '\n';
    return 0;
}

int cmd_check(uint64_t seed, std::size_t instances) {
    bool all = true;
    for (const auto& r : tinycl::run_self_checks(seed, instances)) {
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
        all = all && r.passed;
    }
    return all ? 0 : 1;
}

int cmd_cycles(std::size_t channels, std::size_t rows, std::size_t cols,
               const std::vector<std::size_t>& filters, std::size_t classes) {
    tinycl::ModelSpec model;
    model.input = {channels, rows, cols};
    model.conv_filters = filters;
    model.validate();
    std::cout << std::left << std::setw(8) << "layer" << std::setw(24) << "pass" << std::setw(14)
              << "calibrated" << "formula\n";
    auto row = [](std::string layer, std::string pass, uint64_t cal, uint64_t form) {
        std::cout << std::left << std::setw(8) << layer << std::setw(24) << pass << std::setw(14) << cal
                  << form << '\n';
    };
    const auto layers = model.conv_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto f = tinycl::conv_forward_cycles(layers[l]);
        const auto k = tinycl::conv_kernel_gradient_cycles(layers[l]);
        const auto g = tinycl::conv_gradient_propagation_cycles(layers[l]);
        row("conv" + std::to_string(l), "forward", f, f);
        row("", "kernel_gradient", k, k);
        row("", "gradient_propagation", g, g);
    }
    const std::size_t in = model.dense_input().size();
    using tinycl::CycleModel;
    const auto f = tinycl::dense_forward_cycles(in, classes);
    row("dense", "forward", f, f);
    row("", "weight_gradient", tinycl::dense_weight_gradient_cycles(in, classes, CycleModel::Calibrated),
        tinycl::dense_weight_gradient_cycles(in, classes, CycleModel::Formula));
    row("", "gradient_propagation",
        tinycl::dense_gradient_propagation_cycles(in, classes, CycleModel::Calibrated),
        tinycl::dense_gradient_propagation_cycles(in, classes, CycleModel::Formula));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TinyCL accelerator simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a continual-learning experiment");
    std::string config_path, out_dir = "out", dataset, cycle_model;
    std::optional<uint64_t> seed;
    run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out-dir", out_dir, "Directory for report.json, cycles.csv, weights.bin");
    run->add_option("--dataset", dataset, "CIFAR-10 binary batch; overrides the config dataset");
    run->add_option("--cycle-model", cycle_model, "Dense backward cycle model")
        ->check(CLI::IsMember({"calibrated", "formula"}));

    auto* check = app.add_subcommand("check", "Run the built-in self-checks");
    uint64_t check_seed = 1;
    std::size_t instances = 20;
    check->add_option("--seed", check_seed);
    check->add_option("--instances", instances)->check(CLI::PositiveNumber);

    auto* cycles = app.add_subcommand("cycles", "Print per-pass cycle counts for a model shape");
    std::size_t channels = 3, rows = 32, cols = 32, classes = 10;
    std::vector<std::size_t> filters{8, 8};
    cycles->add_option("--channels", channels);
    cycles->add_option("--rows", rows);
    cycles->add_option("--cols", cols);
    cycles->add_option("--filters", filters)->delimiter(',');
    cycles->add_option("--classes", classes)->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, seed, out_dir, dataset, cycle_model);
        if (*check) return cmd_check(check_seed, instances);
        if (*cycles) return cmd_cycles(channels, rows, cols, filters, classes);
    } catch (const std::exception& e) {
        std::cerr << "tinycl: error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
