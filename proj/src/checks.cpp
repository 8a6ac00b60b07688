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

#include "tinycl/checks.hpp"

#include <random>
#include <sstream>

#include "tinycl/convsim.hpp"
#include "tinycl/cycle_model.hpp"
#include "tinycl/densesim.hpp"
#include "tinycl/oracle.hpp"

namespace tinycl {

namespace {

FeatureMap random_map(const Shape3& s, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-bound, bound);
    FeatureMap m(s);
    for (auto& v : m.data()) v = encode(d(rng));
    return m;
}

KernelTensor random_kernel(const Shape4& s, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-bound, bound);
    KernelTensor k(s);
    for (auto& v : k.data()) v = encode(d(rng));
    return k;
}

CheckResult expect_equal(std::string name, uint64_t got, uint64_t want) {
    std::ostringstream os;
    os << "got " << got << ", expected " << want;
    return {std::move(name), got == want, os.str()};
}

}  // namespace

std::vector<CheckResult> run_self_checks(uint64_t seed, std::size_t instances) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> groups(1, 2), side(3, 9), classes(1, 12);

    std::size_t fwd_ok = 0, kg_ok = 0, gp_ok = 0, dense_ok = 0;
    for (std::size_t i = 0; i < instances; ++i) {
        ConvLayerSpec spec;
        spec.in_channels = 8 * groups(rng);
        spec.out_channels = 8 * groups(rng);
        spec.rows = side(rng);
        spec.cols = side(rng);
        PuArray pu;
        // Bounds keep every accumulation below 7.5 in magnitude, so nothing clips.
        const double kb = std::min(1.0, 7.5 / (9.0 * static_cast<double>(spec.in_channels)));
        const auto v = random_map(spec.input_shape(), 1.0, rng);
        const auto k = random_kernel(spec.kernel_shape(), kb, rng);
        fwd_ok += conv_forward(v, k, spec, pu).output == oracle::exact_conv_forward(v, k);

        const double gb_k = std::min(1.0, 7.5 / static_cast<double>(spec.rows * spec.cols));
        const auto g = random_map(spec.output_shape(), gb_k, rng);
        kg_ok += conv_kernel_gradient(g, v, spec, pu).gradient == oracle::exact_conv_kgrad(g, v);

        const double gb_p = std::min(1.0, 7.5 / (9.0 * static_cast<double>(spec.out_channels)));
        const auto gp = random_map(spec.output_shape(), gb_p, rng);
        const auto kp = random_kernel(spec.kernel_shape(), 1.0, rng);
        gp_ok += conv_gradient_propagation(gp, kp, spec, pu).output == oracle::exact_conv_gprop(gp, kp);

        const Shape3 in{8, 8, groups(rng) * 4};
        const std::size_t n = classes(rng);
        DenseLayerSpec ds{in.size(), n};
        const auto x = random_map(in, 1.0, rng);
        const auto w = random_kernel(dense_weight_shape(in, n), 7.5 / static_cast<double>(in.size()), rng);
        const auto fw = dense_forward(x, w, ds, pu);
        const auto dy = random_map(Shape3{n, 1, 1}, std::min(1.0, 7.5 / static_cast<double>(n)), rng);
        const auto gpd = dense_gradient_propagation(dy.data(), w, ds, pu);
        const auto wg = dense_weight_gradient(x, dy.data(), ds, pu);
        dense_ok += fw.output == oracle::exact_dense_forward(x, w) &&
                    gpd.gradient == oracle::exact_dense_gprop(dy.data(), w) &&
                    wg.gradient == oracle::exact_dense_wgrad(x, dy.data());
    }
    auto tally = [&](std::string name, std::size_t ok) {
        out.push_back({std::move(name), ok == instances,
                       std::to_string(ok) + "/" + std::to_string(instances) + " bit-exact"});
    };
    tally("conv forward vs exact reference", fwd_ok);
    tally("conv kernel gradient vs exact reference", kg_ok);
    tally("conv gradient propagation vs exact reference", gp_ok);
    tally("dense passes vs exact reference", dense_ok);

    ConvLayerSpec ref;
    PuArray pu;
    const auto z = random_map(ref.input_shape(), 0.1, rng);
    const auto kz = random_kernel(ref.kernel_shape(), 0.1, rng);
    const auto fr = conv_forward(z, kz, ref, pu);
    out.push_back(expect_equal("conv 32x32x8 -> 8 pass cycles", fr.stats.cycles, 8192));
    out.push_back(expect_equal("snake pass fetches 32x32", snake_pass_fetches(32, 32), 3078));
    out.push_back(expect_equal("dense 8192 -> 10 forward cycles", dense_forward_cycles(8192, 10), 1280));
    out.push_back(expect_equal("dense 8192 -> 10 weight gradient cycles",
                               dense_weight_gradient_cycles(8192, 10, CycleModel::Calibrated), 1821));
    out.push_back(expect_equal("dense 8192 -> 10 gradient propagation cycles",
                               dense_gradient_propagation_cycles(8192, 10, CycleModel::Calibrated), 1280));
    return out;
}

}  // namespace tinycl
