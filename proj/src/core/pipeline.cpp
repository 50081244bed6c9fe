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

#include "core/pipeline.h"

#include <algorithm>

#include "core/bell_math.h"
#include "core/error.h"

namespace franson {

PipelineResult run_pipeline(const ExperimentConfig &config, const RegionModelPair *model,
                            const SelectionRule &rule, const PipelineOptions &opt) {
    config.validate();
    if (opt.shard_pairs < 1) {
        raise(ErrorCode::DomainError, "shard_pairs must be >= 1");
    }
    PipelineResult result;
    result.acc = AnalysisAccumulator((int)config.station_settings(Side::Left).size(),
                                     (int)config.station_settings(Side::Right).size(), rule);
    result.n_pairs = config.n_pairs;
    int64_t emit_base = 0;
    for (long long begin = 0; begin < config.n_pairs; begin += opt.shard_pairs) {
        long long end = std::min(config.n_pairs, begin + opt.shard_pairs);
        SimOutput shard = run_experiment_range(config, model, begin, end, emit_base, opt.threads);
        emit_base = shard.last_emit;
        AnalysisAccumulator part = analyze_run(shard, config, rule, config.whitebox);
        result.acc.merge(part);
    }
    result.last_emit = emit_base;
    return result;
}

SelectionRule default_rule(const ExperimentConfig &config) {
    SelectionRule rule;
    rule.coincident_only = true;
    if (config.use_anchor) {
        rule.early_left_index = 0;
        rule.early_right_index = 0;
    }
    return rule;
}

ExperimentConfig loophole_config(uint64_t seed) {
    ExperimentConfig cfg;
    cfg.engine = Engine::LHV;
    cfg.switching = Switching::Slow;
    cfg.ticks_per_dl = 8;
    // long dwell per setting so almost no pair straddles a switch
    cfg.d_over_dl = 20000;
    cfg.t_ret_left = 2;
    cfg.t_ret_right = 2;
    cfg.mean_interval_ticks = 400;
    cfg.n_pairs = 2'200'000;
    AngleSet angles = canonical_angles(2);
    cfg.phis = angles.phis;
    cfg.psis = angles.psis;
    cfg.use_anchor = false;
    cfg.visibility = 1.0;
    cfg.rng_seed = seed;
    cfg.whitebox = false;
    return cfg;
}

ExperimentConfig nogo_config(Engine engine, uint64_t seed) {
    ExperimentConfig cfg;
    cfg.engine = engine;
    cfg.switching = Switching::Fast;
    cfg.ticks_per_dl = 8;
    cfg.d_over_dl = 100;
    cfg.t_ret_left = 2;
    cfg.t_ret_right = 2;
    cfg.mean_interval_ticks = 400;
    cfg.n_pairs = 20'000'000;
    AngleSet angles = canonical_angles(3);
    cfg.phis = angles.phis;
    cfg.psis = angles.psis;
    cfg.use_anchor = true;
    cfg.phi0 = 0;
    cfg.psi0 = 0;
    cfg.visibility = 1.0;
    cfg.rng_seed = seed;
    cfg.whitebox = engine == Engine::LHV;
    return cfg;
}

namespace {

void merge_prefixed(Report &into, const Report &from, const std::string &prefix) {
    for (const auto &entry : from.entries()) {
        if (entry.is_number) {
            into.set(prefix + entry.key, entry.num);
        } else {
            into.set_text(prefix + entry.key, entry.text);
        }
    }
}

}  // namespace

Report combined_report(const AnalysisAccumulator &acc, const ExperimentConfig &config) {
    Report rep;
    bool chain = config.phis.size() >= 2 && config.phis.size() == config.psis.size();
    if (chain) {
        rep = bell_report(acc, config.phis, config.psis, config.visibility, config.use_anchor);
    } else {
        rep.set_text("kind", "summary");
        rep.set("pairs_total", (double)acc.n_pairs_total);
        rep.set("pairs_selected", (double)acc.n_selected);
        rep.set("n_coincident", (double)acc.n_class[0]);
        rep.set("n_left_late", (double)acc.n_class[1]);
        rep.set("n_right_late", (double)acc.n_class[2]);
        rep.set("n_accidental", (double)acc.n_accidental);
        rep.set("n_orphan_left", (double)acc.n_orphan_left);
        rep.set("n_orphan_right", (double)acc.n_orphan_right);
    }
    merge_prefixed(rep, nosignal_report(acc), "nosignal_");
    if (config.whitebox && chain) {
        merge_prefixed(rep, whitebox_report(acc, (int)config.phis.size(), config.use_anchor),
                       "whitebox_");
    }
    return rep;
}

DemoResult run_demo(const ExperimentConfig &config, const RegionModelPair *model,
                    const PipelineOptions &opt) {
    DemoResult demo;
    demo.pipeline = run_pipeline(config, model, default_rule(config), opt);
    demo.bell = bell_report(demo.pipeline.acc, config.phis, config.psis, config.visibility,
                            config.use_anchor);
    demo.nosignal = nosignal_report(demo.pipeline.acc);
    if (config.whitebox) {
        demo.whitebox = whitebox_report(demo.pipeline.acc, (int)config.phis.size(),
                                        config.use_anchor);
    }
    return demo;
}

}  // namespace franson
