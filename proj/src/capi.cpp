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

#include "franson/franson.h"

#include <cstring>
#include <string>
#include <thread>

#include "core/analysis.h"
#include "core/bell_math.h"
#include "core/error.h"
#include "core/pipeline.h"
#include "core/quadrature.h"
#include "core/region_model.h"
#include "core/report.h"
#include "core/schedule.h"
#include "core/simulator.h"
#include "core/synth.h"
#include "core/validate.h"

#if defined(_WIN32)
#define FRANSON_EXPORT __declspec(dllexport)
#else
#define FRANSON_EXPORT __attribute__((visibility("default")))
#endif

struct franson_model {
    franson::RegionModelPair m;
};

struct franson_report {
    franson::Report r;
};

namespace {

thread_local std::string g_last_error;

franson_status fail(franson_status status, const std::string &message) {
    g_last_error = message;
    return status;
}

franson_status from_exception(const franson::Error &e) {
    g_last_error = e.what();
    return (franson_status)(int)e.code();
}

franson_status fill_buffer(const std::string &text, char *buffer, size_t size, size_t *needed) {
    if (needed) {
        *needed = text.size() + 1;
    }
    if (buffer && size > 0) {
        size_t n = text.size() < size - 1 ? text.size() : size - 1;
        std::memcpy(buffer, text.data(), n);
        buffer[n] = '\0';
    }
    return FRANSON_OK;
}

int pick_threads(int threads) {
    if (threads > 0) {
        return threads;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? (int)hw : 1;
}

}  // namespace

extern "C" {

FRANSON_EXPORT int franson_abi_version(void) {
    return 1;
}

FRANSON_EXPORT const char *franson_last_error(void) {
    return g_last_error.c_str();
}

FRANSON_EXPORT franson_status franson_coincidence_probability(int l, int m, double phi, double psi,
                                                              double v, double *out) {
    if (!out) {
        return fail(FRANSON_BAD_ARGUMENT, "out is null");
    }
    try {
        *out = franson::coincidence_probability(l, m, phi, psi, v);
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT franson_status franson_chained_lhv_bound(int n, int coincident_ensemble,
                                                        double *out) {
    if (!out) {
        return fail(FRANSON_BAD_ARGUMENT, "out is null");
    }
    try {
        *out = franson::lhv_bound(n, coincident_ensemble ? franson::Ensemble::Coincident
                                                         : franson::Ensemble::PureLL);
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT franson_status franson_chained_qm_max(int n, double *out) {
    if (!out) {
        return fail(FRANSON_BAD_ARGUMENT, "out is null");
    }
    try {
        *out = franson::qm_max(n);
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT franson_status franson_visibility_threshold(int n, double *out) {
    if (!out) {
        return fail(FRANSON_BAD_ARGUMENT, "out is null");
    }
    try {
        *out = franson::visibility_threshold(n);
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT franson_status franson_model_load(const char *path, franson_model **out) {
    if (!path || !out) {
        return fail(FRANSON_BAD_ARGUMENT, "path or out is null");
    }
    *out = nullptr;
    try {
        auto *handle = new franson_model{franson::load_model(path)};
        *out = handle;
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT franson_status franson_model_builtin(const char *name, franson_model **out) {
    if (!name || !out) {
        return fail(FRANSON_BAD_ARGUMENT, "name or out is null");
    }
    *out = nullptr;
    std::string which = name;
    if (which == "reference") {
        *out = new franson_model{franson::reference_model()};
        return FRANSON_OK;
    }
    if (which == "quadrant") {
        *out = new franson_model{franson::quadrant_model()};
        return FRANSON_OK;
    }
    return fail(FRANSON_BAD_ARGUMENT, "unknown builtin model '" + which + "'");
}

FRANSON_EXPORT franson_status franson_model_save(const franson_model *model, const char *path) {
    if (!model || !path) {
        return fail(FRANSON_BAD_ARGUMENT, "model or path is null");
    }
    try {
        franson::save_model(model->m, path);
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT void franson_model_free(franson_model *model) {
    delete model;
}

FRANSON_EXPORT franson_status franson_model_table(const franson_model *model, double phi,
                                                  double psi, double quad_tol, double out16[16]) {
    if (!model || !out16) {
        return fail(FRANSON_BAD_ARGUMENT, "model or out16 is null");
    }
    try {
        double tol = quad_tol > 0 ? quad_tol : 1e-9;
        franson::JointTable table = franson::joint_table_quadrature(model->m, phi, psi, tol);
        for (int i = 0; i < 16; i++) {
            out16[i] = table.p[(size_t)i];
        }
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT franson_status franson_model_validate(const franson_model *model, int grid_points,
                                                     double quad_tol, franson_report **out) {
    if (!model || !out) {
        return fail(FRANSON_BAD_ARGUMENT, "model or out is null");
    }
    *out = nullptr;
    try {
        int grid = grid_points > 0 ? grid_points : 64;
        double tol = quad_tol > 0 ? quad_tol : 1e-9;
        franson::ValidationReport vr = franson::validate_model(model->m, grid, tol);
        franson::Report rep;
        rep.set_text("kind", "model-validation");
        rep.set("hv_dimension", model->m.d);
        rep.set("grid_points", vr.grid_points);
        rep.set("quad_tol", vr.quad_tol);
        rep.set("area_max_dev", vr.area_max_dev);
        rep.set("residual_max", vr.residual_max);
        rep.set("residual_rms", vr.residual_rms);
        rep.set("nosignal_max_dev", vr.nosignal_max_dev);
        rep.set("chi_only_max_dev", vr.chi_only_max_dev);
        rep.set("passed", vr.passed() ? 1 : 0);
        *out = new franson_report{std::move(rep)};
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT franson_status franson_model_synthesize(const franson_model *seed,
                                                       uint64_t rng_seed, long long budget,
                                                       double tol_max, franson_model **out_model,
                                                       franson_report **out_report) {
    if (!seed || !out_model || !out_report) {
        return fail(FRANSON_BAD_ARGUMENT, "seed, out_model, or out_report is null");
    }
    *out_model = nullptr;
    *out_report = nullptr;
    try {
        franson::SynthesisOptions opt;
        opt.rng_seed = rng_seed;
        if (budget > 0) {
            opt.budget = budget;
        }
        if (tol_max > 0) {
            opt.tol_max = tol_max;
        }
        franson::SynthesisResult res = franson::synthesize(seed->m, opt);
        franson::Report rep;
        rep.set_text("kind", "synthesis");
        rep.set("succeeded", res.succeeded ? 1 : 0);
        rep.set("used_fallback", res.used_fallback ? 1 : 0);
        rep.set("iterations", (double)res.iterations);
        rep.set("rng_seed", (double)res.seed);
        rep.set("residual_max", res.residual_max);
        rep.set("residual_rms", res.residual_rms);
        if (!res.succeeded) {
            rep.set_text("worst_entry", res.worst_entry);
            rep.set("worst_chi", res.worst_chi);
            rep.set("worst_dev", res.worst_dev);
        }
        if (res.succeeded) {
            *out_model = new franson_model{std::move(res.model)};
        }
        *out_report = new franson_report{std::move(rep)};
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT franson_status franson_run(const char *config_text, const franson_model *model,
                                          int threads, franson_report **out) {
    if (!config_text || !out) {
        return fail(FRANSON_BAD_ARGUMENT, "config_text or out is null");
    }
    *out = nullptr;
    try {
        franson::ExperimentConfig config = franson::ExperimentConfig::parse(config_text);
        franson::RegionModelPair loaded;
        const franson::RegionModelPair *mp = nullptr;
        if (model) {
            mp = &model->m;
        } else if (!config.model_file.empty()) {
            loaded = franson::load_model(config.model_file);
            mp = &loaded;
        }
        franson::PipelineOptions opt;
        opt.threads = pick_threads(threads);
        franson::PipelineResult result =
            franson::run_pipeline(config, mp, franson::default_rule(config), opt);
        franson::Report rep = franson::combined_report(result.acc, config);
        *out = new franson_report{std::move(rep)};
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT franson_status franson_demo_config(const char *name, uint64_t rng_seed,
                                                  char *buffer, size_t size, size_t *needed) {
    if (!name) {
        return fail(FRANSON_BAD_ARGUMENT, "name is null");
    }
    std::string which = name;
    franson::ExperimentConfig cfg;
    if (which == "loophole") {
        cfg = franson::loophole_config(rng_seed);
    } else if (which == "nogo-qm") {
        cfg = franson::nogo_config(franson::Engine::QM, rng_seed);
    } else if (which == "nogo-lhv") {
        cfg = franson::nogo_config(franson::Engine::LHV, rng_seed);
    } else {
        return fail(FRANSON_BAD_ARGUMENT, "unknown demo '" + which + "'");
    }
    return fill_buffer(cfg.str(), buffer, size, needed);
}

FRANSON_EXPORT franson_status franson_simulate_csv(const char *config_text,
                                                   const franson_model *model, int threads,
                                                   const char *detections_path,
                                                   const char *truth_path,
                                                   const char *settings_path,
                                                   franson_report **out_summary) {
    if (!config_text || !detections_path || !out_summary) {
        return fail(FRANSON_BAD_ARGUMENT, "config_text, detections_path, or out_summary is null");
    }
    *out_summary = nullptr;
    try {
        franson::ExperimentConfig config = franson::ExperimentConfig::parse(config_text);
        franson::RegionModelPair loaded;
        const franson::RegionModelPair *mp = nullptr;
        if (model) {
            mp = &model->m;
        } else if (!config.model_file.empty()) {
            loaded = franson::load_model(config.model_file);
            mp = &loaded;
        }
        if (truth_path && !config.whitebox) {
            return fail(FRANSON_INVALID_CONFIG,
                        "truth output requested but the config does not log truth");
        }
        franson::SimOutput run = franson::run_experiment(config, mp, pick_threads(threads));
        franson::save_detections_csv(detections_path, run);
        if (truth_path) {
            franson::save_truth_csv(truth_path, run);
        }
        if (settings_path) {
            franson::save_settings_csv(settings_path, config.make_schedule(franson::Side::Left),
                                       config.make_schedule(franson::Side::Right), run.end_tick);
        }
        franson::Report rep;
        rep.set_text("kind", "simulation");
        rep.set("n_pairs", (double)config.n_pairs);
        rep.set("n_left_detections", (double)run.left_tick.size());
        rep.set("n_right_detections", (double)run.right_tick.size());
        rep.set("end_tick", (double)run.end_tick);
        rep.set("last_emit", (double)run.last_emit);
        rep.set_text("detections_path", detections_path);
        if (truth_path) {
            rep.set_text("truth_path", truth_path);
        }
        if (settings_path) {
            rep.set_text("settings_path", settings_path);
        }
        *out_summary = new franson_report{std::move(rep)};
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT franson_status franson_analyze_csv(const char *config_text,
                                                  const char *detections_path,
                                                  const char *truth_path,
                                                  const char *settings_path,
                                                  franson_report **out) {
    if (!config_text || !detections_path || !out) {
        return fail(FRANSON_BAD_ARGUMENT, "config_text, detections_path, or out is null");
    }
    *out = nullptr;
    try {
        franson::ExperimentConfig config = franson::ExperimentConfig::parse(config_text);
        franson::SimOutput data;
        franson::load_detections_csv(detections_path, data);
        bool use_truth = truth_path != nullptr;
        if (use_truth) {
            franson::load_truth_csv(truth_path, data);
            franson::rebuild_truth_emit(config, data);
        }
        franson::SettingLookup lookup;
        if (settings_path) {
            auto schedules = franson::load_settings_csv(settings_path);
            lookup = franson::schedule_lookup(schedules.first, schedules.second);
        } else {
            lookup = franson::schedule_lookup(config.make_schedule(franson::Side::Left),
                                              config.make_schedule(franson::Side::Right));
        }
        franson::AnalysisAccumulator acc = franson::analyze_with_lookup(
            data, config, lookup, franson::default_rule(config), use_truth);
        franson::Report rep = franson::combined_report(acc, config);
        *out = new franson_report{std::move(rep)};
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT size_t franson_report_size(const franson_report *report) {
    return report ? report->r.entries().size() : 0;
}

FRANSON_EXPORT const char *franson_report_key(const franson_report *report, size_t index) {
    if (!report || index >= report->r.entries().size()) {
        return nullptr;
    }
    return report->r.entries()[index].key.c_str();
}

FRANSON_EXPORT int franson_report_has(const franson_report *report, const char *key) {
    return report && key && report->r.has(key) ? 1 : 0;
}

FRANSON_EXPORT franson_status franson_report_number(const franson_report *report, const char *key,
                                                    double *out) {
    if (!report || !key || !out) {
        return fail(FRANSON_BAD_ARGUMENT, "report, key, or out is null");
    }
    try {
        *out = report->r.number(key);
        return FRANSON_OK;
    } catch (const franson::Error &e) {
        return from_exception(e);
    }
}

FRANSON_EXPORT const char *franson_report_text(const franson_report *report, const char *key) {
    if (!report || !key) {
        return nullptr;
    }
    const auto &entries = report->r.entries();
    for (const auto &entry : entries) {
        if (entry.key == key && !entry.is_number) {
            return entry.text.c_str();
        }
    }
    return nullptr;
}

FRANSON_EXPORT franson_status franson_report_render(const franson_report *report, char *buffer,
                                                    size_t size, size_t *needed) {
    if (!report) {
        return fail(FRANSON_BAD_ARGUMENT, "report is null");
    }
    return fill_buffer(report->r.str(), buffer, size, needed);
}

FRANSON_EXPORT void franson_report_free(franson_report *report) {
    delete report;
}

}  // extern "C"
