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

// Exercises the shared library the way an external consumer would: through
// the C header only, with no access to the internal C++ types.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "franson/franson.h"

namespace {

std::string render(const franson_report *rep) {
    size_t needed = 0;
    REQUIRE(franson_report_render(rep, nullptr, 0, &needed) == FRANSON_OK);
    std::vector<char> buf(needed);
    REQUIRE(franson_report_render(rep, buf.data(), buf.size(), &needed) == FRANSON_OK);
    return std::string(buf.data());
}

double number(const franson_report *rep, const char *key) {
    double v = 0;
    REQUIRE(franson_report_number(rep, key, &v) == FRANSON_OK);
    return v;
}

std::string demo_config(const char *name, uint64_t seed) {
    size_t needed = 0;
    REQUIRE(franson_demo_config(name, seed, nullptr, 0, &needed) == FRANSON_OK);
    std::vector<char> buf(needed);
    REQUIRE(franson_demo_config(name, seed, buf.data(), buf.size(), &needed) == FRANSON_OK);
    return std::string(buf.data());
}

// Swaps one "key = value" line of a config dump.
std::string set_line(const std::string &cfg, const std::string &key, const std::string &line) {
    size_t at = cfg.find(key + " ");
    REQUIRE(at != std::string::npos);
    size_t end = cfg.find('\n', at);
    return cfg.substr(0, at) + line + cfg.substr(end);
}

}  // namespace

TEST_CASE("abi version and error channel") {
    CHECK(franson_abi_version() == 1);
    REQUIRE(franson_last_error() != nullptr);

    double out = 0;
    CHECK(franson_chained_lhv_bound(1, 1, &out) == FRANSON_DOMAIN_ERROR);
    CHECK(std::strlen(franson_last_error()) > 0);
    std::string main_msg = franson_last_error();

    // Each thread keeps its own message.
    std::string worker_before, worker_after;
    std::thread t([&] {
        worker_before = franson_last_error();
        double d = 0;
        franson_visibility_threshold(-2, &d);
        worker_after = franson_last_error();
    });
    t.join();
    CHECK(worker_before.empty());
    CHECK_FALSE(worker_after.empty());
    CHECK(std::string(franson_last_error()) == main_msg);
}

TEST_CASE("closed form quantities match their definitions") {
    double p = 0;
    REQUIRE(franson_coincidence_probability(1, 1, 0.0, 0.0, 1.0, &p) == FRANSON_OK);
    CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
    REQUIRE(franson_coincidence_probability(1, -1, 0.0, 0.0, 1.0, &p) == FRANSON_OK);
    CHECK(p == doctest::Approx(0.0).epsilon(1e-15));
    double sum = 0;
    for (int l : {-1, 1}) {
        for (int m : {-1, 1}) {
            REQUIRE(franson_coincidence_probability(l, m, 0.7, -0.4, 0.8, &p) == FRANSON_OK);
            sum += p;
        }
    }
    CHECK(sum == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(franson_coincidence_probability(2, 1, 0, 0, 1, &p) == FRANSON_DOMAIN_ERROR);
    CHECK(franson_coincidence_probability(1, 1, 0, 0, 1.5, &p) == FRANSON_DOMAIN_ERROR);
    CHECK(franson_coincidence_probability(1, 1, 0, 0, 1, nullptr) == FRANSON_BAD_ARGUMENT);

    double b = 0;
    REQUIRE(franson_chained_lhv_bound(3, 1, &b) == FRANSON_OK);
    CHECK(b == 5.0);
    REQUIRE(franson_chained_lhv_bound(3, 0, &b) == FRANSON_OK);
    CHECK(b == 4.0);
    double q = 0;
    REQUIRE(franson_chained_qm_max(2, &q) == FRANSON_OK);
    CHECK(q == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-14));
    double v = 0;
    REQUIRE(franson_visibility_threshold(3, &v) == FRANSON_OK);
    CHECK(v == doctest::Approx(0.9622504486493764).epsilon(1e-12));
    CHECK(franson_visibility_threshold(0, &v) == FRANSON_DOMAIN_ERROR);
    CHECK(franson_chained_qm_max(2, nullptr) == FRANSON_BAD_ARGUMENT);
}

TEST_CASE("model handles load, save, and evaluate") {
    franson_model *model = nullptr;
    REQUIRE(franson_model_builtin("reference", &model) == FRANSON_OK);
    REQUIRE(model != nullptr);

    double table[16];
    double phi = 0.3, psi = 0.2;
    REQUIRE(franson_model_table(model, phi, psi, 0, table) == FRANSON_OK);
    double sum = 0;
    for (double x : table) {
        CHECK(x >= 0);
        sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    // Row l in +E, -E, +L, -L order; same for columns.
    double chi = phi + psi;
    CHECK(table[0] == doctest::Approx((1 + std::cos(chi)) / 16).epsilon(1e-6));
    CHECK(table[1] == doctest::Approx((1 - std::cos(chi)) / 16).epsilon(1e-6));
    CHECK(table[2] == doctest::Approx(1.0 / 16).epsilon(1e-6));   // +E then +L
    CHECK(table[10] == doctest::Approx((1 + std::cos(chi)) / 16).epsilon(1e-6));

    std::string path = "/tmp/franson_capi_model.rmodel";
    REQUIRE(franson_model_save(model, path.c_str()) == FRANSON_OK);
    franson_model *back = nullptr;
    REQUIRE(franson_model_load(path.c_str(), &back) == FRANSON_OK);
    double table2[16];
    REQUIRE(franson_model_table(back, phi, psi, 0, table2) == FRANSON_OK);
    for (int i = 0; i < 16; i++) {
        // The text format keeps 12 significant digits, so the reloaded
        // model matches to quadrature precision rather than bit for bit.
        CHECK(std::fabs(table[i] - table2[i]) < 1e-9);
    }
    franson_model_free(back);
    std::remove(path.c_str());

    franson_report *val = nullptr;
    REQUIRE(franson_model_validate(model, 16, 0, &val) == FRANSON_OK);
    CHECK(number(val, "passed") == 1);
    CHECK(number(val, "residual_max") < 1e-6);
    CHECK(number(val, "grid_points") == 16);
    franson_report_free(val);
    franson_model_free(model);

    franson_model *quad = nullptr;
    REQUIRE(franson_model_builtin("quadrant", &quad) == FRANSON_OK);
    franson_report *qval = nullptr;
    REQUIRE(franson_model_validate(quad, 16, 0, &qval) == FRANSON_OK);
    CHECK(number(qval, "passed") == 0);
    CHECK(number(qval, "residual_max") > 0.1);
    franson_report_free(qval);
    franson_model_free(quad);

    franson_model *bad = nullptr;
    CHECK(franson_model_builtin("bogus", &bad) == FRANSON_BAD_ARGUMENT);
    CHECK(bad == nullptr);
    CHECK(franson_model_load("/tmp/franson_no_such_file.rmodel", &bad) == FRANSON_IO_ERROR);
    CHECK(bad == nullptr);

    FILE *f = fopen("/tmp/franson_capi_garbage.rmodel", "w");
    REQUIRE(f);
    fputs("not a model\n", f);
    fclose(f);
    CHECK(franson_model_load("/tmp/franson_capi_garbage.rmodel", &bad) == FRANSON_PARSE_ERROR);
    std::remove("/tmp/franson_capi_garbage.rmodel");

    franson_model_free(nullptr);   // must be harmless
    franson_report_free(nullptr);
}

TEST_CASE("synthesis reports success and failure without leaking handles") {
    franson_model *seed = nullptr;
    REQUIRE(franson_model_load(FRANSON_SEED_DIR "/default.rmodel", &seed) == FRANSON_OK);

    franson_model *found = nullptr;
    franson_report *rep = nullptr;
    REQUIRE(franson_model_synthesize(seed, 5, 0, 0, &found, &rep) == FRANSON_OK);
    REQUIRE(rep != nullptr);
    CHECK(number(rep, "succeeded") == 1);
    REQUIRE(found != nullptr);
    CHECK(number(rep, "residual_max") < 5e-3);
    franson_report *check = nullptr;
    REQUIRE(franson_model_validate(found, 0, 0, &check) == FRANSON_OK);
    CHECK(number(check, "passed") == 1);
    franson_report_free(check);
    franson_report_free(rep);
    franson_model_free(found);

    // An unreachable tolerance fails cleanly: no model, full diagnostics.
    found = nullptr;
    rep = nullptr;
    REQUIRE(franson_model_synthesize(seed, 5, 40, 1e-15, &found, &rep) == FRANSON_OK);
    REQUIRE(rep != nullptr);
    CHECK(number(rep, "succeeded") == 0);
    CHECK(found == nullptr);
    CHECK(franson_report_text(rep, "worst_entry") != nullptr);
    CHECK(number(rep, "worst_dev") > 0);
    franson_report_free(rep);
    franson_model_free(seed);

    // A seed without the sliver structure is rejected outright.
    franson_model *quad = nullptr;
    REQUIRE(franson_model_builtin("quadrant", &quad) == FRANSON_OK);
    CHECK(franson_model_synthesize(quad, 5, 0, 0, &found, &rep) != FRANSON_OK);
    CHECK(found == nullptr);
    CHECK(rep == nullptr);
    CHECK(std::strlen(franson_last_error()) > 0);
    franson_model_free(quad);
}

TEST_CASE("demo config fills caller buffers") {
    size_t needed = 0;
    REQUIRE(franson_demo_config("nogo-qm", 77, nullptr, 0, &needed) == FRANSON_OK);
    CHECK(needed > 20);
    std::vector<char> buf(needed);
    REQUIRE(franson_demo_config("nogo-qm", 77, buf.data(), buf.size(), &needed) == FRANSON_OK);
    std::string cfg(buf.data());
    CHECK(cfg.size() == needed - 1);
    CHECK(cfg.find("engine") != std::string::npos);
    CHECK(cfg.find("n_pairs") != std::string::npos);
    CHECK(cfg.find("rng_seed = 77") != std::string::npos);

    // Truncation keeps the terminator and still reports the full size.
    char tiny[10];
    size_t needed2 = 0;
    REQUIRE(franson_demo_config("nogo-qm", 77, tiny, sizeof tiny, &needed2) == FRANSON_OK);
    CHECK(needed2 == needed);
    CHECK(tiny[9] == '\0');
    CHECK(std::strncmp(tiny, cfg.c_str(), 9) == 0);

    CHECK(franson_demo_config("bogus", 1, nullptr, 0, &needed) == FRANSON_BAD_ARGUMENT);
    CHECK(franson_demo_config(nullptr, 1, nullptr, 0, &needed) == FRANSON_BAD_ARGUMENT);

    for (const char *name : {"loophole", "nogo-lhv"}) {
        std::string text = demo_config(name, 3);
        CHECK(text.find("switching") != std::string::npos);
    }
}

TEST_CASE("run, simulate, and analyze agree through the C surface") {
    std::string cfg = demo_config("loophole", 19);
    cfg = set_line(cfg, "n_pairs", "n_pairs = 120000");

    // The local engine refuses to run without a model.
    franson_report *rep = nullptr;
    CHECK(franson_run(cfg.c_str(), nullptr, 2, &rep) == FRANSON_INVALID_CONFIG);
    CHECK(rep == nullptr);
    CHECK(franson_run("echo! = what", nullptr, 2, &rep) == FRANSON_INVALID_CONFIG);
    CHECK(franson_run(nullptr, nullptr, 2, &rep) == FRANSON_BAD_ARGUMENT);

    franson_model *model = nullptr;
    REQUIRE(franson_model_builtin("reference", &model) == FRANSON_OK);
    REQUIRE(franson_run(cfg.c_str(), model, 2, &rep) == FRANSON_OK);
    REQUIRE(rep != nullptr);
    CHECK(std::string(franson_report_text(rep, "kind")) == "chained-bell");
    CHECK(franson_report_has(rep, "chained") == 1);
    CHECK(franson_report_has(rep, "nope") == 0);
    double chained = number(rep, "chained");
    CHECK(std::fabs(chained - 2 * std::sqrt(2.0)) < 0.1);

    // Report introspection: every key is reachable and in range.
    size_t n_keys = franson_report_size(rep);
    CHECK(n_keys > 10);
    for (size_t i = 0; i < n_keys; i++) {
        CHECK(franson_report_key(rep, i) != nullptr);
    }
    CHECK(franson_report_key(rep, n_keys) == nullptr);
    double dummy = 0;
    CHECK(franson_report_number(rep, "kind", &dummy) != FRANSON_OK);   // text key
    CHECK(franson_report_number(rep, "nope", &dummy) != FRANSON_OK);
    CHECK(franson_report_text(rep, "chained") == nullptr);             // numeric key
    CHECK(franson_report_number(rep, "chained", nullptr) == FRANSON_BAD_ARGUMENT);
    std::string run_rendered = render(rep);
    CHECK(run_rendered.find("chained = ") != std::string::npos);
    franson_report_free(rep);

    // Detections written to CSV and analyzed back give the identical report.
    std::string wb_cfg = set_line(cfg, "whitebox", "whitebox = 1");
    const char *det = "/tmp/franson_capi_det.csv";
    const char *truth = "/tmp/franson_capi_truth.csv";
    const char *sett = "/tmp/franson_capi_sett.csv";
    franson_report *sim = nullptr;
    REQUIRE(franson_simulate_csv(wb_cfg.c_str(), model, 2, det, truth, sett, &sim) == FRANSON_OK);
    CHECK(std::string(franson_report_text(sim, "kind")) == "simulation");
    CHECK(number(sim, "n_left_detections") == 120000);
    franson_report_free(sim);

    franson_report *ana = nullptr;
    REQUIRE(franson_analyze_csv(wb_cfg.c_str(), det, truth, sett, &ana) == FRANSON_OK);
    franson_report *direct = nullptr;
    REQUIRE(franson_run(wb_cfg.c_str(), model, 2, &direct) == FRANSON_OK);
    CHECK(render(ana) == render(direct));
    franson_report_free(ana);
    franson_report_free(direct);

    // Truth output demands a truth-logging config.
    franson_report *refuse = nullptr;
    CHECK(franson_simulate_csv(cfg.c_str(), model, 2, det, truth, nullptr, &refuse) ==
          FRANSON_INVALID_CONFIG);
    CHECK(refuse == nullptr);

    std::remove(det);
    std::remove(truth);
    std::remove(sett);
    franson_model_free(model);
}
