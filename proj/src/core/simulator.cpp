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

#include "core/simulator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "core/angles.h"
#include "core/error.h"
#include "core/rng.h"

namespace franson {

namespace {

// RNG stream layout. Streams 1 and 2 belong to the station schedules.
constexpr uint64_t SOURCE_STREAM = 3;
constexpr uint64_t PAIR_STREAM_BASE = 16;

uint64_t shared_stream(long long pair) {
    return PAIR_STREAM_BASE + 3 * (uint64_t)pair;
}
uint64_t left_stream(long long pair) {
    return PAIR_STREAM_BASE + 3 * (uint64_t)pair + 1;
}
uint64_t right_stream(long long pair) {
    return PAIR_STREAM_BASE + 3 * (uint64_t)pair + 2;
}

int64_t emission_interval(const ExperimentConfig &config, long long pair) {
    double u = uniform_at(config.rng_seed, SOURCE_STREAM, (uint64_t)pair);
    return 1 + (int64_t)std::floor(-config.mean_interval_ticks * std::log1p(-u));
}

std::string fmt17(double v) {
    if (v == 0) {
        v = 0;
    }
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join_angles(const std::vector<double> &vals) {
    std::string out;
    for (size_t i = 0; i < vals.size(); i++) {
        if (i) {
            out += ',';
        }
        out += fmt17(vals[i]);
    }
    return out;
}

std::vector<double> split_angles(const std::string &text, const std::string &key) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        char *end = nullptr;
        double v = std::strtod(item.c_str(), &end);
        if (!end || *end != '\0' || end == item.c_str() || !std::isfinite(v)) {
            raise(ErrorCode::InvalidConfig, "config field " + key + ": bad angle '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        raise(ErrorCode::InvalidConfig, "config field " + key + ": empty angle list");
    }
    return out;
}

std::string trim(const std::string &s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Engine parse_engine(const std::string &text) {
    if (text == "lhv") {
        return Engine::LHV;
    }
    if (text == "qm") {
        return Engine::QM;
    }
    raise(ErrorCode::InvalidConfig, "unknown engine '" + text + "'");
}

std::string engine_name(Engine e) {
    return e == Engine::LHV ? "lhv" : "qm";
}

int64_t ExperimentConfig::slot_ticks() const {
    switch (switching) {
        case Switching::Fast:
            return ticks_per_dl;
        case Switching::Slow:
            return d_over_dl * ticks_per_dl;
        default:
            return 0;
    }
}

std::vector<double> ExperimentConfig::station_settings(Side side) const {
    std::vector<double> out;
    if (use_anchor) {
        out.push_back(side == Side::Left ? phi0 : psi0);
    }
    const auto &tail = side == Side::Left ? phis : psis;
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

SettingSchedule ExperimentConfig::make_schedule(Side side) const {
    return SettingSchedule(rng_seed, side, switching, slot_ticks(),
                           (int)station_settings(side).size());
}

void ExperimentConfig::validate() const {
    std::string bad;
    auto flag = [&](const std::string &msg) {
        if (!bad.empty()) {
            bad += "; ";
        }
        bad += msg;
    };
    if (ticks_per_dl < 1) {
        flag("ticks_per_dl must be >= 1");
    }
    if ((double)ticks_per_dl < 10 * coherence_ticks) {
        flag("ticks_per_dl must be >= 10 * coherence_ticks (arm difference must dwarf coherence)");
    }
    if (d_over_dl < 10) {
        flag("d_over_dl must be >= 10 (source far from the stations)");
    }
    if (t_ret_left < 0 || t_ret_right < 0) {
        flag("t_ret_left/t_ret_right must be >= 0");
    }
    if (transit_ticks() < ticks_per_dl + std::max(t_ret_left, t_ret_right)) {
        flag("d_over_dl * ticks_per_dl must cover ticks_per_dl + t_ret (retarded lookups)");
    }
    if (coherence_ticks < 0) {
        flag("coherence_ticks must be >= 0");
    }
    if (mean_interval_ticks < 1) {
        flag("mean_interval_ticks must be >= 1");
    }
    if (n_pairs < 0) {
        flag("n_pairs must be >= 0");
    }
    if (!(visibility >= 0 && visibility <= 1)) {
        flag("visibility must lie in [0, 1]");
    }
    auto check_angles = [&](const std::vector<double> &vals, const char *name) {
        if (vals.empty()) {
            flag(std::string(name) + " must be non-empty");
        }
        for (double v : vals) {
            if (!std::isfinite(v)) {
                flag(std::string(name) + " contains a non-finite angle");
                break;
            }
        }
    };
    check_angles(phis, "phis");
    check_angles(psis, "psis");
    if (!std::isfinite(phi0) || !std::isfinite(psi0)) {
        flag("phi0/psi0 must be finite");
    }
    if (!bad.empty()) {
        raise(ErrorCode::InvalidConfig, "invalid config: " + bad);
    }
}

std::string ExperimentConfig::str() const {
    std::string out;
    out += "ticks_per_dl = " + std::to_string(ticks_per_dl) + "\n";
    out += "d_over_dl = " + std::to_string(d_over_dl) + "\n";
    out += "t_ret_left = " + std::to_string(t_ret_left) + "\n";
    out += "t_ret_right = " + std::to_string(t_ret_right) + "\n";
    out += "coherence_ticks = " + fmt17(coherence_ticks) + "\n";
    out += "mean_interval_ticks = " + fmt17(mean_interval_ticks) + "\n";
    out += "n_pairs = " + std::to_string(n_pairs) + "\n";
    out += "engine = " + engine_name(engine) + "\n";
    out += "switching = " + switching_name(switching) + "\n";
    out += "phis = " + join_angles(phis) + "\n";
    out += "psis = " + join_angles(psis) + "\n";
    out += "use_anchor = " + std::string(use_anchor ? "1" : "0") + "\n";
    out += "phi0 = " + fmt17(phi0) + "\n";
    out += "psi0 = " + fmt17(psi0) + "\n";
    out += "visibility = " + fmt17(visibility) + "\n";
    out += "rng_seed = " + std::to_string(rng_seed) + "\n";
    out += "whitebox = " + std::string(whitebox ? "1" : "0") + "\n";
    out += "beamsplitters_left = " + std::string(beamsplitters_left ? "1" : "0") + "\n";
    out += "beamsplitters_right = " + std::string(beamsplitters_right ? "1" : "0") + "\n";
    out += "model_file = " + model_file + "\n";
    return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string &text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto to_ll = [&](const std::string &v, const std::string &key) {
        try {
            return std::stoll(v);
        } catch (...) {
            raise(ErrorCode::InvalidConfig, "config field " + key + ": bad integer '" + v + "'");
        }
    };
    auto to_double = [&](const std::string &v, const std::string &key) {
        char *end = nullptr;
        double d = std::strtod(v.c_str(), &end);
        if (!end || *end != '\0' || end == v.c_str()) {
            raise(ErrorCode::InvalidConfig, "config field " + key + ": bad number '" + v + "'");
        }
        return d;
    };
    auto to_bool = [&](const std::string &v, const std::string &key) {
        if (v == "1" || v == "true") {
            return true;
        }
        if (v == "0" || v == "false") {
            return false;
        }
        raise(ErrorCode::InvalidConfig, "config field " + key + ": bad flag '" + v + "'");
    };
    while (std::getline(in, line)) {
        lineno++;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            raise(ErrorCode::InvalidConfig,
                  "config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.rfind("manifest_", 0) == 0) {
            continue;
        }
        if (key == "ticks_per_dl") {
            cfg.ticks_per_dl = to_ll(value, key);
        } else if (key == "d_over_dl") {
            cfg.d_over_dl = to_ll(value, key);
        } else if (key == "t_ret_left") {
            cfg.t_ret_left = to_ll(value, key);
        } else if (key == "t_ret_right") {
            cfg.t_ret_right = to_ll(value, key);
        } else if (key == "coherence_ticks") {
            cfg.coherence_ticks = to_double(value, key);
        } else if (key == "mean_interval_ticks") {
            cfg.mean_interval_ticks = to_double(value, key);
        } else if (key == "n_pairs") {
            cfg.n_pairs = to_ll(value, key);
        } else if (key == "engine") {
            cfg.engine = parse_engine(value);
        } else if (key == "switching") {
            cfg.switching = parse_switching(value);
        } else if (key == "phis") {
            cfg.phis = split_angles(value, key);
        } else if (key == "psis") {
            cfg.psis = split_angles(value, key);
        } else if (key == "use_anchor") {
            cfg.use_anchor = to_bool(value, key);
        } else if (key == "phi0") {
            cfg.phi0 = to_double(value, key);
        } else if (key == "psi0") {
            cfg.psi0 = to_double(value, key);
        } else if (key == "visibility") {
            cfg.visibility = to_double(value, key);
        } else if (key == "rng_seed") {
            try {
                cfg.rng_seed = std::stoull(value);
            } catch (...) {
                raise(ErrorCode::InvalidConfig, "config field rng_seed: bad integer '" + value + "'");
            }
        } else if (key == "whitebox") {
            cfg.whitebox = to_bool(value, key);
        } else if (key == "beamsplitters_left") {
            cfg.beamsplitters_left = to_bool(value, key);
        } else if (key == "beamsplitters_right") {
            cfg.beamsplitters_right = to_bool(value, key);
        } else if (key == "model_file") {
            cfg.model_file = value;
        } else {
            raise(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
        }
    }
    return cfg;
}

void ExperimentConfig::save(const std::string &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorCode::IoError, "cannot write config file: " + path);
    }
    out << str();
    if (!out.good()) {
        raise(ErrorCode::IoError, "failed writing config file: " + path);
    }
}

ExperimentConfig ExperimentConfig::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

StationResponse station_response_lhv(const RegionModelPair &model, Side side,
                                     const SettingSchedule &schedule,
                                     const std::vector<double> &settings, bool beamsplitter,
                                     const HiddenVars &hv, int64_t t_e, int64_t ticks_per_dl,
                                     int64_t t_ret) {
    StationResponse resp;
    if (!beamsplitter) {
        resp.sign = 1;
        resp.t_d = t_e;
        resp.slot = Slot::Early;
        return resp;
    }
    if (t_e < t_ret) {
        raise(ErrorCode::DomainError, "station response queried before one retardation of run time");
    }
    int slot_idx = schedule.setting_at(t_e - t_ret);
    if (slot_idx >= (int)settings.size()) {
        raise(ErrorCode::DataError, "schedule setting index outside the angle list");
    }
    OutcomeCell slot_cell = evaluate(model, side, settings[(size_t)slot_idx], hv);
    resp.slot = slot_cell.slot;
    resp.t_d = slot_cell.slot == Slot::Early ? t_e : t_e + ticks_per_dl;
    int sign_idx = schedule.setting_at(resp.t_d - t_ret);
    if (sign_idx >= (int)settings.size()) {
        raise(ErrorCode::DataError, "schedule setting index outside the angle list");
    }
    OutcomeCell sign_cell = evaluate(model, side, settings[(size_t)sign_idx], hv);
    resp.sign = sign_cell.sign;
    return resp;
}

namespace {

struct PairScratch {
    int64_t left_tick, right_tick;
    int8_t left_sign, right_sign;
    int8_t slot_left, slot_right;
    int8_t branch;
    double theta, r;
};

// Produces one pair's detections and truth facts. Left outputs depend only
// on shared hidden randomness and the left schedule; permuting the other
// station's schedule never changes them.
void simulate_pair(const ExperimentConfig &config, const RegionModelPair *model,
                   const SettingSchedule &sched_left, const SettingSchedule &sched_right,
                   const std::vector<double> &set_left, const std::vector<double> &set_right,
                   long long pair, int64_t emit, PairScratch &out) {
    int64_t k = config.ticks_per_dl;
    int64_t t_e = emit + config.transit_ticks();
    out.theta = 0;
    out.r = 0;
    out.branch = -1;
    if (config.engine == Engine::LHV) {
        CounterRng shared(config.rng_seed, shared_stream(pair));
        HiddenVars hv;
        hv.theta = shared.uniform() * TWO_PI;
        hv.r.assign((size_t)model->d, 0.0);
        for (double &ri : hv.r) {
            ri = shared.uniform();
        }
        StationResponse left =
            station_response_lhv(*model, Side::Left, sched_left, set_left,
                                 config.beamsplitters_left, hv, t_e, k, config.t_ret_left);
        StationResponse right =
            station_response_lhv(*model, Side::Right, sched_right, set_right,
                                 config.beamsplitters_right, hv, t_e, k, config.t_ret_right);
        out.left_tick = left.t_d;
        out.left_sign = (int8_t)left.sign;
        out.right_tick = right.t_d;
        out.right_sign = (int8_t)right.sign;
        out.slot_left = (int8_t)(left.slot == Slot::Late);
        out.slot_right = (int8_t)(right.slot == Slot::Late);
        out.theta = hv.theta;
        out.r = hv.r[0];
        return;
    }

    // quantum engine
    CounterRng shared(config.rng_seed, shared_stream(pair));
    CounterRng lrng(config.rng_seed, left_stream(pair));
    CounterRng rrng(config.rng_seed, right_stream(pair));
    double uclass = shared.uniform();
    int branch = shared.uniform() < 0.5 ? 0 : 1;
    bool bs_l = config.beamsplitters_left, bs_r = config.beamsplitters_right;

    auto forced = [&](Side side, PairScratch &o) {
        if (side == Side::Left) {
            o.left_tick = t_e;
            o.left_sign = 1;
            o.slot_left = 0;
        } else {
            o.right_tick = t_e;
            o.right_sign = 1;
            o.slot_right = 0;
        }
    };

    if (uclass < 0.5) {
        // coincident: one common detection tick, branch picks which
        int64_t t_d = t_e + (branch ? k : 0);
        out.branch = (int8_t)branch;
        out.slot_left = out.slot_right = (int8_t)branch;
        int l = lrng.uniform() < 0.5 ? 1 : -1;
        if (bs_l && bs_r) {
            double phi = set_left[(size_t)sched_left.setting_at(t_d - config.t_ret_left)];
            double psi = set_right[(size_t)sched_right.setting_at(t_d - config.t_ret_right)];
            double chi = phi + psi;
            double p_same = 0.5 * (1 + config.visibility * std::cos(chi));
            int m = rrng.uniform() < p_same ? l : -l;
            out.left_tick = t_d;
            out.left_sign = (int8_t)l;
            out.right_tick = t_d;
            out.right_sign = (int8_t)m;
        } else {
            if (bs_l) {
                out.left_tick = t_d;
                out.left_sign = (int8_t)l;
            } else {
                forced(Side::Left, out);
            }
            if (bs_r) {
                out.right_tick = t_d;
                out.right_sign = (int8_t)(rrng.uniform() < 0.5 ? 1 : -1);
            } else {
                forced(Side::Right, out);
            }
        }
        return;
    }

    bool left_early = uclass < 0.75;  // otherwise the left photon is the late one
    out.slot_left = (int8_t)(left_early ? 0 : 1);
    out.slot_right = (int8_t)(left_early ? 1 : 0);
    if (bs_l) {
        out.left_tick = left_early ? t_e : t_e + k;
        out.left_sign = (int8_t)(lrng.uniform() < 0.5 ? 1 : -1);
    } else {
        forced(Side::Left, out);
    }
    if (bs_r) {
        out.right_tick = left_early ? t_e + k : t_e;
        out.right_sign = (int8_t)(rrng.uniform() < 0.5 ? 1 : -1);
    } else {
        forced(Side::Right, out);
    }
}

void sort_station(std::vector<int64_t> &ticks, std::vector<int8_t> &signs) {
    size_t n = ticks.size();
    std::vector<long long> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](long long a, long long b) { return ticks[a] < ticks[b]; });
    std::vector<int64_t> t2(n);
    std::vector<int8_t> s2(n);
    for (size_t i = 0; i < n; i++) {
        t2[i] = ticks[idx[i]];
        s2[i] = signs[idx[i]];
    }
    ticks.swap(t2);
    signs.swap(s2);
}

}  // namespace

SimOutput run_experiment_range(const ExperimentConfig &config, const RegionModelPair *model,
                               long long pair_begin, long long pair_end, int64_t emit_base,
                               int threads) {
    config.validate();
    if (config.engine == Engine::LHV) {
        if (!model) {
            raise(ErrorCode::InvalidConfig, "LHV engine needs a region model");
        }
        model->validate_shape();
    }
    if (pair_begin < 0 || pair_end < pair_begin) {
        raise(ErrorCode::DomainError, "bad pair range");
    }
    if (threads < 1) {
        threads = 1;
    }
    long long n = pair_end - pair_begin;

    SimOutput out;
    out.pair_begin = pair_begin;
    out.pair_end = pair_end;
    out.left_tick.resize((size_t)n);
    out.right_tick.resize((size_t)n);
    out.left_sign.resize((size_t)n);
    out.right_sign.resize((size_t)n);
    out.has_truth = config.whitebox;
    if (config.whitebox) {
        out.truth_theta.resize((size_t)n);
        out.truth_r.resize((size_t)n);
        out.truth_slot_left.resize((size_t)n);
        out.truth_slot_right.resize((size_t)n);
        out.truth_branch.resize((size_t)n);
        out.truth_emit.resize((size_t)n);
    }
    out.last_emit = emit_base;
    out.end_tick = emit_base + config.transit_ticks() + config.ticks_per_dl + 1;
    if (n == 0) {
        return out;
    }

    int workers = (int)std::min<long long>(threads, n);
    std::vector<long long> starts(workers + 1);
    for (int w = 0; w <= workers; w++) {
        starts[w] = pair_begin + n * w / workers;
    }

    // per-block emission offsets: block sums first, then a serial scan
    std::vector<int64_t> block_sum(workers, 0);
    {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; w++) {
            pool.emplace_back([&, w] {
                int64_t acc = 0;
                for (long long i = starts[w]; i < starts[w + 1]; i++) {
                    acc += emission_interval(config, i);
                }
                block_sum[w] = acc;
            });
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    std::vector<int64_t> block_base(workers);
    int64_t acc = emit_base;
    for (int w = 0; w < workers; w++) {
        block_base[w] = acc;
        acc += block_sum[w];
    }
    out.last_emit = acc;
    out.end_tick = acc + config.transit_ticks() + config.ticks_per_dl + 1;

    const SettingSchedule sched_left = config.make_schedule(Side::Left);
    const SettingSchedule sched_right = config.make_schedule(Side::Right);
    const std::vector<double> set_left = config.station_settings(Side::Left);
    const std::vector<double> set_right = config.station_settings(Side::Right);

    std::vector<std::thread> pool;
    std::vector<std::string> worker_error(workers);
    for (int w = 0; w < workers; w++) {
        pool.emplace_back([&, w] {
            try {
                int64_t emit = block_base[w];
                PairScratch scratch;
                for (long long i = starts[w]; i < starts[w + 1]; i++) {
                    emit += emission_interval(config, i);
                    simulate_pair(config, model, sched_left, sched_right, set_left, set_right, i,
                                  emit, scratch);
                    size_t at = (size_t)(i - pair_begin);
                    out.left_tick[at] = scratch.left_tick;
                    out.left_sign[at] = scratch.left_sign;
                    out.right_tick[at] = scratch.right_tick;
                    out.right_sign[at] = scratch.right_sign;
                    if (config.whitebox) {
                        out.truth_theta[at] = scratch.theta;
                        out.truth_r[at] = scratch.r;
                        out.truth_slot_left[at] = scratch.slot_left;
                        out.truth_slot_right[at] = scratch.slot_right;
                        out.truth_branch[at] = scratch.branch;
                        out.truth_emit[at] = emit;
                    }
                }
            } catch (const std::exception &e) {
                worker_error[w] = e.what();
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    for (const auto &err : worker_error) {
        if (!err.empty()) {
            raise(ErrorCode::DataError, "simulation worker failed: " + err);
        }
    }

    sort_station(out.left_tick, out.left_sign);
    sort_station(out.right_tick, out.right_sign);
    return out;
}

SimOutput run_experiment(const ExperimentConfig &config, const RegionModelPair *model,
                         int threads) {
    return run_experiment_range(config, model, 0, config.n_pairs, 0, threads);
}

void save_detections_csv(const std::string &path, const SimOutput &out) {
    std::string text = "station,tick,sign\n";
    for (size_t i = 0; i < out.left_tick.size(); i++) {
        text += "L,";
        text += std::to_string(out.left_tick[i]);
        text += ',';
        text += out.left_sign[i] > 0 ? "1" : "-1";
        text += '\n';
    }
    for (size_t i = 0; i < out.right_tick.size(); i++) {
        text += "R,";
        text += std::to_string(out.right_tick[i]);
        text += ',';
        text += out.right_sign[i] > 0 ? "1" : "-1";
        text += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        raise(ErrorCode::IoError, "cannot write detections file: " + path);
    }
    f << text;
    if (!f.good()) {
        raise(ErrorCode::IoError, "failed writing detections file: " + path);
    }
}

void load_detections_csv(const std::string &path, SimOutput &out) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open detections file: " + path);
    }
    out.left_tick.clear();
    out.left_sign.clear();
    out.right_tick.clear();
    out.right_sign.clear();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty() || line == "station,tick,sign") {
            continue;
        }
        std::istringstream ls(line);
        std::string station, tick_text, sign_text;
        if (!std::getline(ls, station, ',') || !std::getline(ls, tick_text, ',') ||
            !std::getline(ls, sign_text)) {
            raise(ErrorCode::ParseError, "detections line " + std::to_string(lineno) + ": bad row");
        }
        int64_t tick;
        int sign;
        try {
            tick = std::stoll(tick_text);
            sign = std::stoi(sign_text);
        } catch (...) {
            raise(ErrorCode::ParseError,
                  "detections line " + std::to_string(lineno) + ": bad number");
        }
        if (sign != 1 && sign != -1) {
            raise(ErrorCode::ParseError,
                  "detections line " + std::to_string(lineno) + ": sign must be 1 or -1");
        }
        if (station == "L") {
            out.left_tick.push_back(tick);
            out.left_sign.push_back((int8_t)sign);
        } else if (station == "R") {
            out.right_tick.push_back(tick);
            out.right_sign.push_back((int8_t)sign);
        } else {
            raise(ErrorCode::ParseError,
                  "detections line " + std::to_string(lineno) + ": unknown station");
        }
        out.end_tick = std::max(out.end_tick, tick + 1);
    }
}

void save_truth_csv(const std::string &path, const SimOutput &out) {
    if (!out.has_truth) {
        raise(ErrorCode::DataError, "run has no truth log (whitebox flag was off)");
    }
    std::string text = "pair,theta,r,slot_left,slot_right,branch\n";
    for (size_t i = 0; i < out.truth_slot_left.size(); i++) {
        text += std::to_string(out.pair_begin + (long long)i);
        text += ',';
        text += fmt17(out.truth_theta[i]);
        text += ',';
        text += fmt17(out.truth_r[i]);
        text += ',';
        text += out.truth_slot_left[i] ? 'L' : 'E';
        text += ',';
        text += out.truth_slot_right[i] ? 'L' : 'E';
        text += ',';
        text += std::to_string((int)out.truth_branch[i]);
        text += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        raise(ErrorCode::IoError, "cannot write truth file: " + path);
    }
    f << text;
    if (!f.good()) {
        raise(ErrorCode::IoError, "failed writing truth file: " + path);
    }
}

void load_truth_csv(const std::string &path, SimOutput &out) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open truth file: " + path);
    }
    out.has_truth = true;
    out.truth_theta.clear();
    out.truth_r.clear();
    out.truth_slot_left.clear();
    out.truth_slot_right.clear();
    out.truth_branch.clear();
    out.truth_emit.clear();
    bool first = true;
    std::string line;
    int lineno = 0;
    long long expect = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty() || line == "pair,theta,r,slot_left,slot_right,branch") {
            continue;
        }
        std::istringstream ls(line);
        std::string pair_text, theta_text, r_text, sl, sr, branch_text;
        if (!std::getline(ls, pair_text, ',') || !std::getline(ls, theta_text, ',') ||
            !std::getline(ls, r_text, ',') || !std::getline(ls, sl, ',') ||
            !std::getline(ls, sr, ',') || !std::getline(ls, branch_text)) {
            raise(ErrorCode::ParseError, "truth line " + std::to_string(lineno) + ": bad row");
        }
        long long pair;
        try {
            pair = std::stoll(pair_text);
        } catch (...) {
            raise(ErrorCode::ParseError, "truth line " + std::to_string(lineno) + ": bad pair id");
        }
        if (first) {
            out.pair_begin = pair;
            expect = pair;
            first = false;
        }
        if (pair != expect++) {
            raise(ErrorCode::ParseError,
                  "truth line " + std::to_string(lineno) + ": pair ids must be contiguous");
        }
        auto slot_of = [&](const std::string &s) -> int8_t {
            if (s == "E") {
                return 0;
            }
            if (s == "L") {
                return 1;
            }
            raise(ErrorCode::ParseError, "truth line " + std::to_string(lineno) + ": bad slot");
        };
        out.truth_theta.push_back(std::strtod(theta_text.c_str(), nullptr));
        out.truth_r.push_back(std::strtod(r_text.c_str(), nullptr));
        out.truth_slot_left.push_back(slot_of(sl));
        out.truth_slot_right.push_back(slot_of(sr));
        try {
            out.truth_branch.push_back((int8_t)std::stoi(branch_text));
        } catch (...) {
            raise(ErrorCode::ParseError, "truth line " + std::to_string(lineno) + ": bad branch");
        }
    }
    out.pair_end = expect;
}

void rebuild_truth_emit(const ExperimentConfig &config, SimOutput &out) {
    out.truth_emit.assign(out.truth_slot_left.size(), 0);
    int64_t emit = 0;
    for (long long i = 0; i < out.pair_end; i++) {
        emit += emission_interval(config, i);
        if (i >= out.pair_begin) {
            out.truth_emit[(size_t)(i - out.pair_begin)] = emit;
        }
    }
}

}  // namespace franson
