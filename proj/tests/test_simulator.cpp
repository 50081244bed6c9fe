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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "core/angles.h"
#include "core/error.h"
#include "core/region_model.h"
#include "core/rng.h"
#include "core/simulator.h"
#include "doctest.h"

using namespace franson;

namespace {

ExperimentConfig small_config(Engine engine, Switching mode, long long n_pairs) {
    ExperimentConfig c;
    c.engine = engine;
    c.switching = mode;
    c.n_pairs = n_pairs;
    c.phis = {0.0, PI / 2};
    c.psis = {PI / 4, 3 * PI / 4};
    c.rng_seed = 9;
    c.whitebox = true;
    return c;
}

// Tick-sorted detections stay comparable across runs as (tick, sign) pairs.
std::vector<std::pair<int64_t, int>> zip(const std::vector<int64_t> &ticks,
                                         const std::vector<int8_t> &signs) {
    std::vector<std::pair<int64_t, int>> out;
    out.reserve(ticks.size());
    for (size_t i = 0; i < ticks.size(); i++) {
        out.push_back({ticks[i], signs[i]});
    }
    return out;
}

}  // namespace

TEST_CASE("engine names round trip") {
    CHECK(parse_engine(engine_name(Engine::LHV)) == Engine::LHV);
    CHECK(parse_engine(engine_name(Engine::QM)) == Engine::QM);
    CHECK_THROWS_AS(parse_engine("classical"), Error);
}

TEST_CASE("config text round trips") {
    ExperimentConfig c = small_config(Engine::QM, Switching::Fast, 123);
    c.use_anchor = true;
    c.phi0 = 0.25;
    c.psi0 = 0.5;
    c.visibility = 0.875;
    c.t_ret_left = 3;
    c.model_file = "some/path.rmodel";
    std::string text = c.str();
    ExperimentConfig back = ExperimentConfig::parse(text);
    CHECK(back.str() == text);
    CHECK(back.phis == c.phis);
    CHECK(back.use_anchor);
    CHECK(back.visibility == 0.875);
    CHECK(back.model_file == "some/path.rmodel");

    // File round trip.
    std::string path = "/tmp/franson_test_config.txt";
    c.save(path);
    CHECK(ExperimentConfig::load(path).str() == text);
    std::remove(path.c_str());

    // Comments and manifest keys are skipped; unknown keys are not.
    ExperimentConfig d = ExperimentConfig::parse(text + "# trailing comment\nmanifest_tool = x\n");
    CHECK(d.str() == text);
    CHECK_THROWS_AS(ExperimentConfig::parse(text + "mystery_knob = 1\n"), Error);
    CHECK_THROWS_AS(ExperimentConfig::parse("n_pairs = lots\n"), Error);
}

TEST_CASE("config validation names offending fields") {
    ExperimentConfig c = small_config(Engine::LHV, Switching::Slow, 10);
    CHECK_NOTHROW(c.validate());

    auto expect_invalid = [](ExperimentConfig bad, const std::string &needle) {
        try {
            bad.validate();
            FAIL_CHECK("expected an invalid config for " << needle);
        } catch (const Error &e) {
            CHECK(e.code() == ErrorCode::InvalidConfig);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    ExperimentConfig bad = c;
    bad.ticks_per_dl = 0;
    expect_invalid(bad, "ticks_per_dl");
    bad = c;
    bad.coherence_ticks = 5.0;  // slot no longer dwarfs the coherence time
    expect_invalid(bad, "coherence");
    bad = c;
    bad.d_over_dl = 5;
    expect_invalid(bad, "d_over_dl");
    bad = c;
    bad.t_ret_left = -1;
    expect_invalid(bad, "t_ret");
    bad = c;
    bad.t_ret_right = bad.transit_ticks();
    expect_invalid(bad, "retarded");
    bad = c;
    bad.mean_interval_ticks = 0.25;
    expect_invalid(bad, "mean_interval");
    bad = c;
    bad.n_pairs = -4;
    expect_invalid(bad, "n_pairs");
    bad = c;
    bad.visibility = 1.5;
    expect_invalid(bad, "visibility");
    bad = c;
    bad.phis.clear();
    expect_invalid(bad, "phis");
    bad = c;
    bad.use_anchor = true;
    bad.phi0 = std::nan("");
    expect_invalid(bad, "phi0");
}

TEST_CASE("station settings prepend the anchor") {
    ExperimentConfig c = small_config(Engine::LHV, Switching::Fast, 1);
    CHECK(c.station_settings(Side::Left) == c.phis);
    CHECK(c.station_settings(Side::Right) == c.psis);
    c.use_anchor = true;
    c.phi0 = 1.5;
    c.psi0 = 2.5;
    auto left = c.station_settings(Side::Left);
    REQUIRE(left.size() == c.phis.size() + 1);
    CHECK(left[0] == 1.5);
    CHECK(left[1] == c.phis[0]);
    CHECK(c.station_settings(Side::Right)[0] == 2.5);
}

TEST_CASE("station response follows the two-stage reading of the schedule") {
    RegionModelPair model = reference_model();
    ExperimentConfig c = small_config(Engine::LHV, Switching::Fast, 1);
    c.phis = {0.0, PI};
    SettingSchedule sched = c.make_schedule(Side::Left);
    auto settings = c.station_settings(Side::Left);
    int64_t K = c.ticks_per_dl;
    int64_t t_ret = c.t_ret(Side::Left);

    // Scan for a photon time whose slot draw reads setting 0 but whose
    // late detection would read setting 1.
    int64_t t_e = -1;
    for (int64_t cand = c.transit_ticks(); cand < c.transit_ticks() + 4000; cand++) {
        if (sched.setting_at(cand - t_ret) == 0 && sched.setting_at(cand + K - t_ret) == 1) {
            t_e = cand;
            break;
        }
    }
    REQUIRE(t_e >= 0);

    // theta = pi/2, r = 0.6: the slot draw at phi = 0 lands in the late
    // cell just above the chart's middle; at phi = pi that point is a
    // minus cell. So the photon leaves late and flips sign.
    HiddenVars hv{PI / 2, {0.6}};
    StationResponse resp =
        station_response_lhv(model, Side::Left, sched, settings, true, hv, t_e, K, t_ret);
    CHECK(resp.slot == Slot::Late);
    CHECK(resp.t_d == t_e + K);
    CHECK(resp.sign == -1);

    // r = 0.10 sits inside the early sliver at phi = 0: early exit, and the
    // sign is read at the same slot draw, so it stays plus.
    hv.r[0] = 0.10;
    resp = station_response_lhv(model, Side::Left, sched, settings, true, hv, t_e, K, t_ret);
    CHECK(resp.slot == Slot::Early);
    CHECK(resp.t_d == t_e);
    CHECK(resp.sign == +1);

    // The generic contract, across many photon times and hidden draws:
    // slot from the setting in force at t_e - t_ret, sign from the setting
    // in force at t_d - t_ret.
    CounterRng rng(4, 21);
    for (int trial = 0; trial < 400; trial++) {
        HiddenVars h{rng.uniform() * TWO_PI, {rng.uniform()}};
        int64_t t = c.transit_ticks() + (int64_t)rng.uniform_index(100000);
        StationResponse r =
            station_response_lhv(model, Side::Left, sched, settings, true, h, t, K, t_ret);
        double slot_setting = settings[sched.setting_at(t - t_ret)];
        Slot want_slot = evaluate(model, Side::Left, slot_setting, h).slot;
        CHECK(r.slot == want_slot);
        int64_t want_td = t + (want_slot == Slot::Late ? K : 0);
        CHECK(r.t_d == want_td);
        double sign_setting = settings[sched.setting_at(want_td - t_ret)];
        CHECK(r.sign == evaluate(model, Side::Left, sign_setting, h).sign);
    }

    // Without a beamsplitter the photon always exits early at +1.
    hv.r[0] = 0.99;
    resp = station_response_lhv(model, Side::Left, sched, settings, false, hv, t_e, K, t_ret);
    CHECK(resp.sign == +1);
    CHECK(resp.t_d == t_e);
    CHECK(resp.slot == Slot::Early);

    // Queries before one retardation of run time are rejected.
    CHECK_THROWS_AS(
        station_response_lhv(model, Side::Left, sched, settings, true, hv, t_ret - 1, K, t_ret),
        Error);
}

TEST_CASE("runs are reproducible and thread count never matters") {
    RegionModelPair model = reference_model();
    for (Engine engine : {Engine::LHV, Engine::QM}) {
        ExperimentConfig c = small_config(engine, Switching::Fast, 200000);
        const RegionModelPair *m = engine == Engine::LHV ? &model : nullptr;
        SimOutput one = run_experiment(c, m, 1);
        SimOutput four = run_experiment(c, m, 4);
        SimOutput eight = run_experiment(c, m, 8);
        CAPTURE(engine_name(engine));
        CHECK(one.left_tick == four.left_tick);
        CHECK(one.left_sign == four.left_sign);
        CHECK(one.right_tick == four.right_tick);
        CHECK(one.right_sign == four.right_sign);
        CHECK(one.left_tick == eight.left_tick);
        CHECK(one.left_sign == eight.left_sign);
        CHECK(one.right_tick == eight.right_tick);
        CHECK(one.right_sign == eight.right_sign);
        CHECK(one.truth_theta == four.truth_theta);
        CHECK(one.truth_slot_left == eight.truth_slot_left);
        CHECK(one.end_tick == four.end_tick);
        CHECK(one.last_emit == eight.last_emit);

        CHECK(std::is_sorted(one.left_tick.begin(), one.left_tick.end()));
        CHECK(std::is_sorted(one.right_tick.begin(), one.right_tick.end()));
        CHECK((long long)one.left_tick.size() == c.n_pairs);
        CHECK((long long)one.right_tick.size() == c.n_pairs);
    }
}

TEST_CASE("left station outputs ignore everything about the right station") {
    RegionModelPair model = reference_model();
    for (Engine engine : {Engine::LHV, Engine::QM}) {
        ExperimentConfig c = small_config(engine, Switching::Fast, 100000);
        const RegionModelPair *m = engine == Engine::LHV ? &model : nullptr;
        SimOutput base = run_experiment(c, m, 4);

        ExperimentConfig other = c;
        other.psis = {1.0, 2.0, 3.0};  // different angles, different count
        other.t_ret_right = 5;
        SimOutput moved = run_experiment(other, m, 4);

        CAPTURE(engine_name(engine));
        CHECK(base.left_tick == moved.left_tick);
        CHECK(base.left_sign == moved.left_sign);
        // The right station did change, otherwise the check is vacuous.
        // (Detection times can survive an angle change; the signs cannot.)
        CHECK(base.right_sign != moved.right_sign);
    }
}

TEST_CASE("slow switching reproduces balanced singles and class fractions") {
    RegionModelPair model = reference_model();
    for (Engine engine : {Engine::LHV, Engine::QM}) {
        ExperimentConfig c = small_config(engine, Switching::Slow, 200000);
        SimOutput out = run_experiment(c, engine == Engine::LHV ? &model : nullptr, 4);
        CAPTURE(engine_name(engine));

        double n = (double)c.n_pairs;
        double sigma_half = 5.0 * std::sqrt(0.25 / n);
        long long plus_l = 0, plus_r = 0;
        for (auto s : out.left_sign) {
            plus_l += s > 0;
        }
        for (auto s : out.right_sign) {
            plus_r += s > 0;
        }
        CHECK(std::fabs(plus_l / n - 0.5) < sigma_half);
        CHECK(std::fabs(plus_r / n - 0.5) < sigma_half);

        // Same-slot pairs should make up half the ensemble, and each
        // station individually exits early half the time.
        REQUIRE(out.has_truth);
        long long same = 0, early_l = 0, early_r = 0;
        for (long long i = 0; i < c.n_pairs; i++) {
            same += out.truth_slot_left[i] == out.truth_slot_right[i];
            early_l += out.truth_slot_left[i] == 0;
            early_r += out.truth_slot_right[i] == 0;
        }
        CHECK(std::fabs(same / n - 0.5) < sigma_half);
        CHECK(std::fabs(early_l / n - 0.5) < sigma_half);
        CHECK(std::fabs(early_r / n - 0.5) < sigma_half);
    }
}

TEST_CASE("equal-phase interference locks coincident signs together") {
    // Static settings with phi + psi = 0 and unit visibility: every
    // same-branch pair agrees in sign, exactly.
    ExperimentConfig c;
    c.engine = Engine::QM;
    c.switching = Switching::Static;
    c.n_pairs = 20000;
    c.phis = {PI / 3};
    c.psis = {TWO_PI - PI / 3};
    c.rng_seed = 17;
    c.whitebox = true;
    SimOutput out = run_experiment(c, nullptr, 2);

    long long checked = 0;
    for (long long i = 0; i < c.n_pairs; i++) {
        if (out.truth_slot_left[i] != out.truth_slot_right[i]) {
            continue;
        }
        int64_t tl = out.truth_emit[i] + c.transit_ticks() +
                     (out.truth_slot_left[i] ? c.ticks_per_dl : 0);
        int64_t tr = out.truth_emit[i] + c.transit_ticks() +
                     (out.truth_slot_right[i] ? c.ticks_per_dl : 0);
        auto it_l = std::lower_bound(out.left_tick.begin(), out.left_tick.end(), tl);
        auto it_r = std::lower_bound(out.right_tick.begin(), out.right_tick.end(), tr);
        REQUIRE(it_l != out.left_tick.end());
        REQUIRE(it_r != out.right_tick.end());
        // Skip tick collisions between neighbouring pairs.
        if ((it_l + 1 != out.left_tick.end() && *(it_l + 1) == tl) ||
            (it_r + 1 != out.right_tick.end() && *(it_r + 1) == tr)) {
            continue;
        }
        int sl = out.left_sign[it_l - out.left_tick.begin()];
        int sr = out.right_sign[it_r - out.right_tick.begin()];
        CHECK(sl * sr == 1);
        checked++;
    }
    CHECK(checked > 8000);
}

TEST_CASE("range slices reassemble the full run") {
    RegionModelPair model = reference_model();
    ExperimentConfig c = small_config(Engine::LHV, Switching::Fast, 3000);
    SimOutput full = run_experiment(c, &model, 2);

    SimOutput head = run_experiment_range(c, &model, 0, 1100, 0, 2);
    SimOutput tail = run_experiment_range(c, &model, 1100, 3000, head.last_emit, 2);
    CHECK(head.pair_begin == 0);
    CHECK(head.pair_end == 1100);
    CHECK(tail.pair_begin == 1100);

    // Equal ticks make the within-tick order unspecified, so compare as
    // sorted (tick, sign) multisets.
    auto merged_left = zip(head.left_tick, head.left_sign);
    auto tail_left = zip(tail.left_tick, tail.left_sign);
    merged_left.insert(merged_left.end(), tail_left.begin(), tail_left.end());
    std::sort(merged_left.begin(), merged_left.end());
    auto full_left = zip(full.left_tick, full.left_sign);
    std::sort(full_left.begin(), full_left.end());
    CHECK(merged_left == full_left);

    auto merged_right = zip(head.right_tick, head.right_sign);
    auto tail_right = zip(tail.right_tick, tail.right_sign);
    merged_right.insert(merged_right.end(), tail_right.begin(), tail_right.end());
    std::sort(merged_right.begin(), merged_right.end());
    auto full_right = zip(full.right_tick, full.right_sign);
    std::sort(full_right.begin(), full_right.end());
    CHECK(merged_right == full_right);

    // Truth rows line up by pair index.
    for (long long i = 0; i < 1100; i++) {
        CHECK(head.truth_theta[i] == full.truth_theta[i]);
        CHECK(head.truth_emit[i] == full.truth_emit[i]);
    }
    for (long long i = 1100; i < 3000; i++) {
        CHECK(tail.truth_theta[i - 1100] == full.truth_theta[i]);
        CHECK(tail.truth_emit[i - 1100] == full.truth_emit[i]);
    }
}

TEST_CASE("detection and truth files round trip") {
    RegionModelPair model = reference_model();
    ExperimentConfig c = small_config(Engine::LHV, Switching::Fast, 5000);
    SimOutput out = run_experiment(c, &model, 2);

    std::string det_path = "/tmp/franson_test_det.csv";
    std::string truth_path = "/tmp/franson_test_truth.csv";
    save_detections_csv(det_path, out);
    save_truth_csv(truth_path, out);

    SimOutput back;
    load_detections_csv(det_path, back);
    CHECK(back.left_tick == out.left_tick);
    CHECK(back.left_sign == out.left_sign);
    CHECK(back.right_tick == out.right_tick);
    CHECK(back.right_sign == out.right_sign);

    load_truth_csv(truth_path, back);
    CHECK(back.has_truth);
    CHECK(back.truth_theta == out.truth_theta);
    CHECK(back.truth_r == out.truth_r);
    CHECK(back.truth_slot_left == out.truth_slot_left);
    CHECK(back.truth_slot_right == out.truth_slot_right);
    CHECK(back.truth_branch == out.truth_branch);
    CHECK(back.pair_begin == out.pair_begin);
    CHECK(back.pair_end == out.pair_end);

    // Emission times are not stored; the config rebuilds them exactly.
    rebuild_truth_emit(c, back);
    CHECK(back.truth_emit == out.truth_emit);

    std::remove(det_path.c_str());
    std::remove(truth_path.c_str());

    SimOutput scratch;
    CHECK_THROWS_AS(load_detections_csv("/tmp/franson_missing.csv", scratch), Error);
}

TEST_CASE("malformed csv rows are rejected with line numbers") {
    auto write = [](const std::string &path, const std::string &text) {
        FILE *f = fopen(path.c_str(), "w");
        REQUIRE(f);
        fputs(text.c_str(), f);
        fclose(f);
    };
    std::string path = "/tmp/franson_test_bad.csv";
    SimOutput scratch;

    write(path, "nonsense header\nL,1,1\n");
    CHECK_THROWS_AS(load_detections_csv(path, scratch), Error);

    write(path, "station,tick,sign\nL,12,2\n");
    try {
        load_detections_csv(path, scratch);
        FAIL_CHECK("bad sign accepted");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }

    write(path, "station,tick,sign\nX,12,1\n");
    CHECK_THROWS_AS(load_detections_csv(path, scratch), Error);

    // Truth files demand contiguous pair ids.
    write(path, "pair,theta,r,slot_left,slot_right,branch\n0,0.5,0.5,E,E,-1\n2,0.5,0.5,L,L,-1\n");
    CHECK_THROWS_AS(load_truth_csv(path, scratch), Error);

    std::remove(path.c_str());
}

TEST_CASE("runs demand what they need") {
    ExperimentConfig c = small_config(Engine::LHV, Switching::Slow, 10);
    // The local engine cannot run without a model.
    CHECK_THROWS_AS(run_experiment(c, nullptr, 1), Error);
    // Invalid configs are rejected before any work happens.
    ExperimentConfig bad = c;
    bad.n_pairs = -1;
    RegionModelPair model = reference_model();
    CHECK_THROWS_AS(run_experiment(bad, &model, 1), Error);
    // A malformed model is rejected too.
    RegionModelPair misshapen = model;
    misshapen.d = 2;
    CHECK_THROWS_AS(run_experiment(c, &misshapen, 1), Error);
    // Zero pairs is a valid, empty run.
    ExperimentConfig empty = c;
    empty.n_pairs = 0;
    SimOutput out = run_experiment(empty, &model, 1);
    CHECK(out.left_tick.empty());
    CHECK(out.right_tick.empty());
}
