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

#ifndef FRANSON_CORE_SIMULATOR_H_
#define FRANSON_CORE_SIMULATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "core/cells.h"
#include "core/region_model.h"
#include "core/schedule.h"

namespace franson {

enum class Engine { LHV = 0, QM = 1 };

Engine parse_engine(const std::string &text);
std::string engine_name(Engine e);

// Full description of one simulated run. Times are integer ticks; the long
// interferometer arm exceeds the short one by ticks_per_dl ticks, and the
// source sits d_over_dl such arm differences from each detector.
struct ExperimentConfig {
    int64_t ticks_per_dl = 8;     // arm-length difference over c, in ticks
    int64_t d_over_dl = 100;      // source-to-station distance in arm differences
    int64_t t_ret_left = 2;       // phase-shifter-to-detector light time
    int64_t t_ret_right = 2;
    double coherence_ticks = 0.08;
    double mean_interval_ticks = 400;  // exponential emission spacing
    long long n_pairs = 0;
    Engine engine = Engine::LHV;
    Switching switching = Switching::Slow;
    std::vector<double> phis{0};  // left analysis angles (chain order)
    std::vector<double> psis{0};  // right analysis angles
    bool use_anchor = false;      // prepend the selection anchors below as
    double phi0 = 0;              // station setting index 0
    double psi0 = 0;
    double visibility = 1.0;  // QM engine interference visibility
    uint64_t rng_seed = 1;
    bool whitebox = false;
    bool beamsplitters_left = true;
    bool beamsplitters_right = true;
    std::string model_file;  // region model for the LHV engine (CLI runs)

    // Throws InvalidConfig naming every offending field.
    void validate() const;

    int64_t transit_ticks() const {
        return d_over_dl * ticks_per_dl;
    }
    int64_t slot_ticks() const;
    int64_t t_ret(Side side) const {
        return side == Side::Left ? t_ret_left : t_ret_right;
    }
    // The station's slot-draw angle list: anchors (when enabled) occupy
    // index 0, analysis angles follow in order.
    std::vector<double> station_settings(Side side) const;

    SettingSchedule make_schedule(Side side) const;

    void save(const std::string &path) const;
    static ExperimentConfig load(const std::string &path);
    // Parses "key = value" text; keys with the manifest_ prefix are ignored.
    static ExperimentConfig parse(const std::string &text);
    std::string str() const;
};

// One run's output. Detection streams are tick-sorted per station; truth
// rows (whitebox runs only) are indexed by pair - pair_begin.
struct SimOutput {
    std::vector<int64_t> left_tick, right_tick;
    std::vector<int8_t> left_sign, right_sign;

    bool has_truth = false;
    std::vector<double> truth_theta;
    std::vector<double> truth_r;
    std::vector<int8_t> truth_slot_left, truth_slot_right;  // 0 early, 1 late
    std::vector<int8_t> truth_branch;                       // QM coincident 0/1, else -1
    std::vector<int64_t> truth_emit;

    long long pair_begin = 0, pair_end = 0;
    int64_t end_tick = 0;   // exclusive bound on detection ticks
    int64_t last_emit = 0;  // emission tick of the final pair
};

struct StationResponse {
    int sign = 1;
    int64_t t_d = 0;
    Slot slot = Slot::Early;
};

// The local hidden-variable station: the early/late decision reads the
// setting in force one retardation before the photon could leave early; the
// sign reads the setting in force one retardation before the actual
// detection. With the beamsplitter removed every photon arrives early at
// the +1 detector.
StationResponse station_response_lhv(const RegionModelPair &model, Side side,
                                     const SettingSchedule &schedule,
                                     const std::vector<double> &settings, bool beamsplitter,
                                     const HiddenVars &hv, int64_t t_e, int64_t ticks_per_dl,
                                     int64_t t_ret);

SimOutput run_experiment(const ExperimentConfig &config, const RegionModelPair *model,
                         int threads = 1);

// A contiguous slice of the same run: pairs [pair_begin, pair_end) with
// emit_base the emission tick preceding pair_begin. Slices concatenate to
// exactly the full run's detections.
SimOutput run_experiment_range(const ExperimentConfig &config, const RegionModelPair *model,
                               long long pair_begin, long long pair_end, int64_t emit_base,
                               int threads);

void save_detections_csv(const std::string &path, const SimOutput &out);
void load_detections_csv(const std::string &path, SimOutput &out);
void save_truth_csv(const std::string &path, const SimOutput &out);
void load_truth_csv(const std::string &path, SimOutput &out);

// Recomputes the emission tick of every pair in [out.pair_begin,
// out.pair_end) into out.truth_emit (CSV loads miss them; they are needed to
// map detections back to pairs).
void rebuild_truth_emit(const ExperimentConfig &config, SimOutput &out);

}  // namespace franson

#endif  // FRANSON_CORE_SIMULATOR_H_
