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

// Command line front end. Talks to the library exclusively through the
// public C interface.
//
// Exit codes: 0 success, 1 negative result (validation or synthesis did not
// pass, analysis verdict missing), 2 usage or library error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "franson/franson.h"

namespace {

int lib_error(const char *what) {
    fprintf(stderr, "%s: %s\n", what, franson_last_error());
    return 2;
}

std::string render(const franson_report *report) {
    size_t needed = 0;
    franson_report_render(report, nullptr, 0, &needed);
    std::string text(needed, '\0');
    franson_report_render(report, text.data(), text.size(), &needed);
    text.resize(needed - 1);
    return text;
}

bool write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out.good()) {
        fprintf(stderr, "cannot write %s\n", path.c_str());
        return false;
    }
    return true;
}

bool read_file(const std::string &path, std::string &text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fprintf(stderr, "cannot open %s\n", path.c_str());
        return false;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    return true;
}

// Prints the report and optionally saves it. Returns false on IO failure.
bool emit_report(franson_report *report, const std::string &save_path) {
    std::string text = render(report);
    fputs(text.c_str(), stdout);
    if (!save_path.empty() && !write_file(save_path, text)) {
        return false;
    }
    return true;
}

struct ModelArg {
    std::string path;
    std::string builtin;

    // Loads or builds the model; returns nullptr and prints on failure.
    // required = false allows both fields empty (model stays null).
    franson_model *open(bool required) const {
        franson_model *model = nullptr;
        if (!path.empty()) {
            if (franson_model_load(path.c_str(), &model) != FRANSON_OK) {
                lib_error("model load failed");
                return nullptr;
            }
            return model;
        }
        if (!builtin.empty()) {
            if (franson_model_builtin(builtin.c_str(), &model) != FRANSON_OK) {
                lib_error("builtin model failed");
                return nullptr;
            }
            return model;
        }
        if (required) {
            fprintf(stderr, "a model is required: pass --model or --builtin\n");
        }
        return nullptr;
    }
};

void add_model_options(CLI::App *cmd, ModelArg &arg) {
    auto *p = cmd->add_option("--model", arg.path, "Region model file");
    auto *b = cmd->add_option("--builtin", arg.builtin, "Built-in model: reference or quadrant");
    p->excludes(b);
}

int cmd_predict(int n, bool have_angles, double phi, double psi, double visibility) {
    double v = 0;
    printf("n_chain = %d\n", n);
    if (franson_chained_lhv_bound(n, 0, &v) != FRANSON_OK) {
        return lib_error("bound failed");
    }
    printf("bound_pure_ll = %.12g\n", v);
    if (franson_chained_lhv_bound(n, 1, &v) != FRANSON_OK) {
        return lib_error("bound failed");
    }
    printf("bound_coincident = %.12g\n", v);
    if (franson_chained_qm_max(n, &v) != FRANSON_OK) {
        return lib_error("qm max failed");
    }
    printf("qm_max = %.12g\n", v);
    if (franson_visibility_threshold(n, &v) != FRANSON_OK) {
        return lib_error("threshold failed");
    }
    printf("visibility_threshold = %.12g\n", v);
    if (have_angles) {
        static const int signs[] = {1, -1};
        for (int l : signs) {
            for (int m : signs) {
                if (franson_coincidence_probability(l, m, phi, psi, visibility, &v) !=
                    FRANSON_OK) {
                    return lib_error("probability failed");
                }
                printf("p_coincident_%s%s = %.12g\n", l > 0 ? "plus" : "minus",
                       m > 0 ? "_plus" : "_minus", v);
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Franson interference simulator and analysis toolkit"};
    app.require_subcommand(1);

    // predict
    auto *predict = app.add_subcommand("predict", "Closed-form bounds and probabilities");
    int predict_n = 3;
    double predict_phi = 0, predict_psi = 0, predict_vis = 1.0;
    predict->add_option("--n", predict_n, "Chain length")->check(CLI::PositiveNumber);
    auto *opt_phi = predict->add_option("--phi", predict_phi, "Left phase for probabilities");
    auto *opt_psi = predict->add_option("--psi", predict_psi, "Right phase for probabilities");
    predict->add_option("--visibility", predict_vis, "Interference visibility");
    opt_psi->needs(opt_phi);
    opt_phi->needs(opt_psi);

    // validate
    auto *validate = app.add_subcommand("validate", "Check a model against the target table");
    ModelArg validate_model;
    add_model_options(validate, validate_model);
    int validate_grid = 64;
    double validate_tol = 1e-9;
    std::string validate_report;
    validate->add_option("--grid", validate_grid, "Phase-sum grid points");
    validate->add_option("--tol", validate_tol, "Quadrature tolerance");
    validate->add_option("--report", validate_report, "Also save the report here");

    // synth
    auto *synth = app.add_subcommand("synth", "Search for a model matching the target table");
    std::string synth_seed, synth_out, synth_report;
    uint64_t synth_rng = 1;
    long long synth_budget = 0;
    double synth_tol = 0;
    synth->add_option("--seed", synth_seed, "Seed model file")->required();
    synth->add_option("--out", synth_out, "Where to save the found model")->required();
    synth->add_option("--rng-seed", synth_rng, "Search RNG seed");
    synth->add_option("--budget", synth_budget, "Objective evaluation budget");
    synth->add_option("--tol-max", synth_tol, "Acceptance residual");
    synth->add_option("--report", synth_report, "Also save the report here");

    // run (simulate + analyze in memory)
    auto *run = app.add_subcommand("run", "Simulate and analyze in one pass");
    std::string run_config, run_report, run_manifest;
    ModelArg run_model;
    int run_threads = 0;
    run->add_option("--config", run_config, "Experiment config file")->required();
    add_model_options(run, run_model);
    run->add_option("--threads", run_threads, "Worker threads (0 = all cores)");
    run->add_option("--report", run_report, "Also save the report here");
    run->add_option("--manifest", run_manifest, "Save a replayable run manifest here");

    // simulate (to CSV)
    auto *simulate = app.add_subcommand("simulate", "Simulate and write detection CSV files");
    std::string sim_config, sim_detections, sim_truth, sim_settings, sim_report;
    ModelArg sim_model;
    int sim_threads = 0;
    simulate->add_option("--config", sim_config, "Experiment config file")->required();
    add_model_options(simulate, sim_model);
    simulate->add_option("--threads", sim_threads, "Worker threads (0 = all cores)");
    simulate->add_option("--detections", sim_detections, "Detections CSV output")->required();
    simulate->add_option("--truth", sim_truth, "Truth CSV output (needs whitebox = 1)");
    simulate->add_option("--settings", sim_settings, "Setting schedule CSV output");
    simulate->add_option("--report", sim_report, "Also save the summary here");

    // analyze (from CSV)
    auto *analyze = app.add_subcommand("analyze", "Analyze detection CSV files");
    std::string ana_config, ana_detections, ana_truth, ana_settings, ana_report;
    analyze->add_option("--config", ana_config, "Experiment config file")->required();
    analyze->add_option("--detections", ana_detections, "Detections CSV input")->required();
    analyze->add_option("--truth", ana_truth, "Truth CSV input");
    analyze->add_option("--settings", ana_settings, "Setting schedule CSV input");
    analyze->add_option("--report", ana_report, "Also save the report here");

    // demo
    auto *demo = app.add_subcommand("demo", "Run a named demonstration");
    std::string demo_name, demo_report, demo_config_out;
    ModelArg demo_model;
    uint64_t demo_rng = 1;
    int demo_threads = 0;
    demo->add_option("name", demo_name, "loophole, nogo-qm, or nogo-lhv")->required();
    demo->add_option("--rng-seed", demo_rng, "Run RNG seed");
    demo->add_option("--threads", demo_threads, "Worker threads (0 = all cores)");
    add_model_options(demo, demo_model);
    demo->add_option("--report", demo_report, "Also save the report here");
    demo->add_option("--config-out", demo_config_out, "Save the demo's config here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (predict->parsed()) {
        return cmd_predict(predict_n, opt_phi->count() > 0, predict_phi, predict_psi,
                           predict_vis);
    }

    if (validate->parsed()) {
        franson_model *model = validate_model.open(true);
        if (!model) {
            return 2;
        }
        franson_report *report = nullptr;
        if (franson_model_validate(model, validate_grid, validate_tol, &report) != FRANSON_OK) {
            franson_model_free(model);
            return lib_error("validation failed to run");
        }
        bool io_ok = emit_report(report, validate_report);
        double passed = 0;
        franson_report_number(report, "passed", &passed);
        franson_report_free(report);
        franson_model_free(model);
        if (!io_ok) {
            return 2;
        }
        return passed > 0 ? 0 : 1;
    }

    if (synth->parsed()) {
        franson_model *seed = nullptr;
        if (franson_model_load(synth_seed.c_str(), &seed) != FRANSON_OK) {
            return lib_error("seed load failed");
        }
        franson_model *found = nullptr;
        franson_report *report = nullptr;
        if (franson_model_synthesize(seed, synth_rng, synth_budget, synth_tol, &found, &report) !=
            FRANSON_OK) {
            franson_model_free(seed);
            return lib_error("synthesis failed to run");
        }
        bool io_ok = emit_report(report, synth_report);
        double ok = 0;
        franson_report_number(report, "succeeded", &ok);
        franson_report_free(report);
        franson_model_free(seed);
        if (ok > 0 && io_ok) {
            if (franson_model_save(found, synth_out.c_str()) != FRANSON_OK) {
                franson_model_free(found);
                return lib_error("model save failed");
            }
            printf("model saved to %s\n", synth_out.c_str());
        }
        franson_model_free(found);
        if (!io_ok) {
            return 2;
        }
        return ok > 0 ? 0 : 1;
    }

    if (run->parsed()) {
        std::string config_text;
        if (!read_file(run_config, config_text)) {
            return 2;
        }
        franson_model *model = run_model.open(false);
        if (!model && !run_model.path.empty()) {
            return 2;
        }
        franson_report *report = nullptr;
        if (franson_run(config_text.c_str(), model, run_threads, &report) != FRANSON_OK) {
            franson_model_free(model);
            return lib_error("run failed");
        }
        bool io_ok = emit_report(report, run_report);
        if (io_ok && !run_manifest.empty()) {
            std::string manifest = config_text;
            if (!manifest.empty() && manifest.back() != '\n') {
                manifest += '\n';
            }
            manifest += "manifest_tool = franson run\n";
            manifest += "manifest_abi_version = " + std::to_string(franson_abi_version()) + "\n";
            if (!run_model.path.empty()) {
                manifest += "manifest_model = " + run_model.path + "\n";
            } else if (!run_model.builtin.empty()) {
                manifest += "manifest_builtin = " + run_model.builtin + "\n";
            }
            io_ok = write_file(run_manifest, manifest);
        }
        franson_report_free(report);
        franson_model_free(model);
        return io_ok ? 0 : 2;
    }

    if (simulate->parsed()) {
        std::string config_text;
        if (!read_file(sim_config, config_text)) {
            return 2;
        }
        franson_model *model = sim_model.open(false);
        if (!model && !sim_model.path.empty()) {
            return 2;
        }
        franson_report *report = nullptr;
        if (franson_simulate_csv(config_text.c_str(), model, sim_threads, sim_detections.c_str(),
                                 sim_truth.empty() ? nullptr : sim_truth.c_str(),
                                 sim_settings.empty() ? nullptr : sim_settings.c_str(),
                                 &report) != FRANSON_OK) {
            franson_model_free(model);
            return lib_error("simulation failed");
        }
        bool io_ok = emit_report(report, sim_report);
        franson_report_free(report);
        franson_model_free(model);
        return io_ok ? 0 : 2;
    }

    if (analyze->parsed()) {
        std::string config_text;
        if (!read_file(ana_config, config_text)) {
            return 2;
        }
        franson_report *report = nullptr;
        if (franson_analyze_csv(config_text.c_str(), ana_detections.c_str(),
                                ana_truth.empty() ? nullptr : ana_truth.c_str(),
                                ana_settings.empty() ? nullptr : ana_settings.c_str(),
                                &report) != FRANSON_OK) {
            return lib_error("analysis failed");
        }
        bool io_ok = emit_report(report, ana_report);
        franson_report_free(report);
        return io_ok ? 0 : 2;
    }

    if (demo->parsed()) {
        size_t needed = 0;
        if (franson_demo_config(demo_name.c_str(), demo_rng, nullptr, 0, &needed) != FRANSON_OK) {
            return lib_error("demo config failed");
        }
        std::string config_text(needed, '\0');
        franson_demo_config(demo_name.c_str(), demo_rng, config_text.data(), config_text.size(),
                            &needed);
        config_text.resize(needed - 1);
        if (!demo_config_out.empty() && !write_file(demo_config_out, config_text)) {
            return 2;
        }
        franson_model *model = demo_model.open(false);
        if (!model && !demo_model.path.empty()) {
            return 2;
        }
        if (!model && demo_name != "nogo-qm") {
            // local-model demos default to the built-in exact model
            if (franson_model_builtin("reference", &model) != FRANSON_OK) {
                return lib_error("builtin model failed");
            }
        }
        franson_report *report = nullptr;
        if (franson_run(config_text.c_str(), model, demo_threads, &report) != FRANSON_OK) {
            franson_model_free(model);
            return lib_error("demo run failed");
        }
        bool io_ok = emit_report(report, demo_report);
        franson_report_free(report);
        franson_model_free(model);
        return io_ok ? 0 : 2;
    }

    return 2;
}
