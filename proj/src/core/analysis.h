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

#ifndef FRANSON_CORE_ANALYSIS_H
#define FRANSON_CORE_ANALYSIS_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/joint_table.h"
#include "core/report.h"
#include "core/schedule.h"
#include "core/simulator.h"

namespace franson {

enum class PairClass { Coincident = 0, LeftLate = 1, RightLate = 2 };

std::string pair_class_name(PairClass c);
PairClass parse_pair_class(const std::string &text);

// One matched detection pair. Setting indices and truth slots start out
// unknown (-1) and are filled by annotate_settings / attach_truth.
struct PairRecord {
    int64_t t_left = 0, t_right = 0;
    int8_t sign_left = 0, sign_right = 0;
    PairClass cls = PairClass::Coincident;
    int16_t early_left = -1, early_right = -1;  // setting one slot before detection
    int16_t late_left = -1, late_right = -1;    // setting at detection
    int8_t truth_slot_left = -1, truth_slot_right = -1;  // 0 early, 1 late
};

struct PairingResult {
    std::vector<PairRecord> records;
    long long n_accidental = 0;   // partner inside the window at a non-physical lag
    long long n_orphan_left = 0;  // detections left without a partner
    long long n_orphan_right = 0;
};

// Matches each left detection to the nearest unused right detection within
// two arm differences (ties go to the earlier right). Lags of 0 and +-1 arm
// difference classify the pair; anything else counts as accidental.
// Both stations must arrive sorted by tick, otherwise DataError.
PairingResult pair_detections(const SimOutput &data, int64_t ticks_per_dl);

// Fills the setting-index fields from each station's own detection tick,
// reading the schedule one retardation upstream of the station clock.
void annotate_settings(std::vector<PairRecord> &records, const SettingLookup &lookup,
                       int64_t ticks_per_dl, int64_t t_ret_left, int64_t t_ret_right);

SettingLookup schedule_lookup(const SettingSchedule &left, const SettingSchedule &right);
SettingLookup schedule_lookup(const MaterializedSchedule &left, const MaterializedSchedule &right);

// Matches records against a truth log by expected detection ticks (emission
// plus transit plus the logged slot offsets) and fills the truth slots.
// Duplicate tick pairs consume truth rows lowest pair id first. Returns the
// number of records no truth row accounts for. Requires truth_emit; rebuild
// it from the config when the log came from a file.
long long attach_truth(std::vector<PairRecord> &records, const SimOutput &truth,
                       const ExperimentConfig &config);

// Which matched pairs enter the correlation estimate. Early-setting
// requirements look only at the setting one slot before detection, so the
// decision is fixed before the detection-time setting acts.
struct SelectionRule {
    bool coincident_only = true;
    int early_left_index = -1;  // required early setting, -1 accepts any
    int early_right_index = -1;

    bool applies(const PairRecord &rec) const;
    bool operator==(const SelectionRule &other) const = default;
};

struct GroupStats {
    long long n_same = 0, n_diff = 0;        // all selected pairs
    long long n_ll_same = 0, n_ll_diff = 0;  // truth says both photons late
    long long n_ee_same = 0, n_ee_diff = 0;  // truth says both early

    void merge(const GroupStats &other);
};

enum class CorrelationFlavor { All, PureLL, PureEE };

struct Correlation {
    double e = 0, se = 0;
    long long n = 0;
};

// Streaming tallies for one selection rule over a detection-time setting
// grid. Shards of a long run accumulate separately and merge.
struct AnalysisAccumulator {
    int n_left = 0, n_right = 0;
    SelectionRule rule;
    std::vector<GroupStats> groups;  // row-major [late_left][late_right]

    long long n_pairs_total = 0;
    long long n_class[3] = {0, 0, 0};
    long long n_selected = 0;
    long long n_truth_missing = 0;  // selected pairs lacking truth slots
    long long n_accidental = 0, n_orphan_left = 0, n_orphan_right = 0;

    // singles tallies over all matched pairs, before selection, keyed by
    // both stations' detection-time settings
    std::vector<long long> left_plus, left_tot, right_plus, right_tot;

    AnalysisAccumulator() = default;
    AnalysisAccumulator(int n_left, int n_right, const SelectionRule &rule);

    void add(const PairRecord &rec);
    void add_pairing_counts(const PairingResult &pr);
    void add_all(const PairingResult &pr);
    void merge(const AnalysisAccumulator &other);

    const GroupStats &group(int i, int j) const;
    std::optional<Correlation> correlation(int i, int j, CorrelationFlavor flavor) const;
};

// Pair, annotate, optionally attach truth, and accumulate one run.
AnalysisAccumulator analyze_run(const SimOutput &out, const ExperimentConfig &config,
                                const SelectionRule &rule, bool use_truth);

// Same, but with an explicit setting lookup (for schedules loaded from a
// file rather than derived from the config seed).
AnalysisAccumulator analyze_with_lookup(const SimOutput &out, const ExperimentConfig &config,
                                        const SettingLookup &lookup, const SelectionRule &rule,
                                        bool use_truth);

// Below this many selected events in any chain group, verdicts read
// "insufficient data" instead of calling a direction.
constexpr long long MIN_GROUP_EVENTS = 1000;

// Chained Bell estimate over the n x n chain grid. Chain indices are zero
// based; when the run used an anchor, station setting index 0 is the anchor
// and chain index c maps to station index c + 1.
Report bell_report(const AnalysisAccumulator &acc, const std::vector<double> &phis,
                   const std::vector<double> &psis, double visibility, bool anchored);

// Truth-conditioned diagnostics: the late-late subensemble against its
// stricter bound, a CHSH cut of it, and the late/early decomposition.
Report whitebox_report(const AnalysisAccumulator &acc, int n_chain, bool anchored);

// Compares each station's singles rate across the other station's settings.
Report nosignal_report(const AnalysisAccumulator &acc);

// Empirical 16-entry outcome table over truth-annotated records: each record
// lands in the (sign, truth slot) cell pair of the two stations. Records
// without truth are skipped. n_used receives the count actually tallied.
JointTable empirical_table(const std::vector<PairRecord> &records, long long *n_used = nullptr);

void save_pairs_csv(const std::string &path, const std::vector<PairRecord> &records);
std::vector<PairRecord> load_pairs_csv(const std::string &path);

}  // namespace franson

#endif
