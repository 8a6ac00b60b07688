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

#include "tinycl/report.hpp"

namespace tinycl {

std::string_view to_string(PassKind p) {
    switch (p) {
        case PassKind::Forward: return "forward";
        case PassKind::KernelGradient: return "kernel_gradient";
        case PassKind::GradientPropagation: return "gradient_propagation";
        case PassKind::WeightGradient: return "weight_gradient";
    }
    return "unknown";
}

void CycleReport::append(const PassRecord& rec) {
    if (keep_records_) records_.push_back(rec);
    auto& t = totals_[{rec.layer, rec.pass}];
    ++t.passes;
    t.cycles += rec.cycles;
    t.stalls += rec.stalls;
    t.saturations += rec.saturations;
    t.last_cycles = rec.cycles;
    training_cycles_ += rec.cycles + rec.stalls;
    stalls_ += rec.stalls;
    saturations_ += rec.saturations;
}

void CycleReport::append_inference(uint64_t cycles, uint64_t stalls) {
    inference_cycles_ += cycles + stalls;
    stalls_ += stalls;
}

void CycleReport::write_csv(std::ostream& os) const {
    os << "task,epoch,sample,layer,pass,cycles,stalls,saturations\n";
    for (const auto& r : records_) {
        os << r.task << ',' << r.epoch << ',' << r.sample << ',' << r.layer << ',' << to_string(r.pass)
           << ',' << r.cycles << ',' << r.stalls << ',' << r.saturations << '\n';
    }
}

}  // namespace tinycl
