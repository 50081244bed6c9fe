// Copyright 2026 The Franson Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FRANSON_CORE_PIPELINE_H
#define FRANSON_CORE_PIPELINE_H

#include <cstdint>
#include <optional>

#include "core/analysis.h"
#include "core/region_model.h"
#include "core/report.h"
#include "core/simulator.h"

namespace franson {

struct PipelineOptions {
    long long shard_pairs = 1'000'000;  // pairs simulated per memory shard
    int threads = 1;
};

struct PipelineResult {
    AnalysisAccumulator acc;
    long long n_pairs = 0;
    int64_t last_emit = 0;
};

// Simulates n_pairs in shards, pairing and accumulating each shard before
// the next is generated, so long runs never hold all detections at once.
// Shards chain their emission clocks, so the detections seen by the
// accumulator match a single unsharded run exactly. Truth is attached when
// the config logs it.
PipelineResult run_pipeline(const ExperimentConfig &config, const RegionModelPair *model,
                            const SelectionRule &rule, const PipelineOptions &opt);

// Coincident pairs only; when the run carries anchor settings, additionally
// require both stations' early settings to be the anchors.
SelectionRule default_rule(const ExperimentConfig &config);

// Local model, slow switching, CHSH angles: the selection loophole in action.
ExperimentConfig loophole_config(uint64_t seed);

// Fast switching, anchored selection, three-setting chain: the regime where
// the local bound of 2n-1 separates from the quantum value 2n cos(pi/2n).
ExperimentConfig nogo_config(Engine engine, uint64_t seed);

struct DemoResult {
    Report bell;
    Report nosignal;
    std::optional<Report> whitebox;
    PipelineResult pipeline;
};

DemoResult run_demo(const ExperimentConfig &config, const RegionModelPair *model,
                    const PipelineOptions &opt);

// One flat report for a finished run: the chained Bell section when the
// config's angle lists form a chain, a counts-only summary otherwise, then
// the no-signaling keys under nosignal_ and, for truth-logging runs, the
// whitebox keys under whitebox_.
Report combined_report(const AnalysisAccumulator &acc, const ExperimentConfig &config);

}  // namespace franson

#endif
