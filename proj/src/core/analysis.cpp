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

#include "core/analysis.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "core/bell_math.h"
#include "core/error.h"

namespace franson {

std::string pair_class_name(PairClass c) {
    switch (c) {
        case PairClass::Coincident:
            return "coincident";
        case PairClass::LeftLate:
            return "left-late";
        default:
            return "right-late";
    }
}

PairClass parse_pair_class(const std::string &text) {
    if (text == "coincident") {
        return PairClass::Coincident;
    }
    if (text == "left-late") {
        return PairClass::LeftLate;
    }
    if (text == "right-late") {
        return PairClass::RightLate;
    }
    raise(ErrorCode::ParseError, "unknown pair class '" + text + "'");
}

PairingResult pair_detections(const SimOutput &data, int64_t ticks_per_dl) {
    if (ticks_per_dl < 1) {
        raise(ErrorCode::DomainError, "ticks_per_dl must be >= 1");
    }
    for (size_t i = 1; i < data.left_tick.size(); i++) {
        if (data.left_tick[i] < data.left_tick[i - 1]) {
            raise(ErrorCode::DataError, "left detections are not sorted by tick");
        }
    }
    for (size_t i = 1; i < data.right_tick.size(); i++) {
        if (data.right_tick[i] < data.right_tick[i - 1]) {
            raise(ErrorCode::DataError, "right detections are not sorted by tick");
        }
    }
    int64_t window = 2 * ticks_per_dl;
    size_t n_right = data.right_tick.size();
    std::vector<char> used(n_right, 0);
    PairingResult pr;
    size_t lo = 0;
    for (size_t i = 0; i < data.left_tick.size(); i++) {
        int64_t t = data.left_tick[i];
        while (lo < n_right && (used[lo] || data.right_tick[lo] < t - window)) {
            lo++;
        }
        long long best = -1;
        int64_t best_d = window + 1;
        for (size_t j = lo; j < n_right && data.right_tick[j] <= t + window; j++) {
            if (used[j]) {
                continue;
            }
            int64_t d = std::llabs(data.right_tick[j] - t);
            if (d < best_d) {
                best_d = d;
                best = (long long)j;
            }
        }
        if (best < 0) {
            pr.n_orphan_left++;
            continue;
        }
        used[(size_t)best] = 1;
        int64_t dt = data.right_tick[(size_t)best] - t;
        PairClass cls;
        if (dt == 0) {
            cls = PairClass::Coincident;
        } else if (dt == ticks_per_dl) {
            cls = PairClass::RightLate;
        } else if (dt == -ticks_per_dl) {
            cls = PairClass::LeftLate;
        } else {
            pr.n_accidental++;
            continue;
        }
        PairRecord rec;
        rec.t_left = t;
        rec.t_right = data.right_tick[(size_t)best];
        rec.sign_left = data.left_sign[i];
        rec.sign_right = data.right_sign[(size_t)best];
        rec.cls = cls;
        pr.records.push_back(rec);
    }
    for (size_t j = 0; j < n_right; j++) {
        if (!used[j]) {
            pr.n_orphan_right++;
        }
    }
    return pr;
}

void annotate_settings(std::vector<PairRecord> &records, const SettingLookup &lookup,
                       int64_t ticks_per_dl, int64_t t_ret_left, int64_t t_ret_right) {
    for (auto &rec : records) {
        rec.early_left = (int16_t)lookup(Side::Left, rec.t_left - ticks_per_dl - t_ret_left);
        rec.late_left = (int16_t)lookup(Side::Left, rec.t_left - t_ret_left);
        rec.early_right = (int16_t)lookup(Side::Right, rec.t_right - ticks_per_dl - t_ret_right);
        rec.late_right = (int16_t)lookup(Side::Right, rec.t_right - t_ret_right);
    }
}

SettingLookup schedule_lookup(const SettingSchedule &left, const SettingSchedule &right) {
    return [left, right](Side side, int64_t tick) {
        return side == Side::Left ? left.setting_at(tick) : right.setting_at(tick);
    };
}

SettingLookup schedule_lookup(const MaterializedSchedule &left, const MaterializedSchedule &right) {
    auto lp = std::make_shared<MaterializedSchedule>(left);
    auto rp = std::make_shared<MaterializedSchedule>(right);
    return [lp, rp](Side side, int64_t tick) {
        return side == Side::Left ? lp->setting_at(tick) : rp->setting_at(tick);
    };
}

long long attach_truth(std::vector<PairRecord> &records, const SimOutput &truth,
                       const ExperimentConfig &config) {
    if (!truth.has_truth) {
        raise(ErrorCode::DataError, "run carries no truth log");
    }
    size_t n = truth.truth_slot_left.size();
    if (truth.truth_emit.size() != n) {
        raise(ErrorCode::DataError,
              "truth log lacks emission times; rebuild them from the run config");
    }
    int64_t transit = config.transit_ticks();
    int64_t k = config.ticks_per_dl;
    std::map<std::pair<int64_t, int64_t>, std::vector<long long>> by_ticks;
    for (size_t r = 0; r < n; r++) {
        int64_t t_e = truth.truth_emit[r] + transit;
        int64_t tl = t_e + (truth.truth_slot_left[r] ? k : 0);
        int64_t tr = t_e + (truth.truth_slot_right[r] ? k : 0);
        by_ticks[{tl, tr}].push_back((long long)r);
    }
    std::map<std::pair<int64_t, int64_t>, size_t> cursor;
    long long unmatched = 0;
    for (auto &rec : records) {
        auto it = by_ticks.find({rec.t_left, rec.t_right});
        if (it == by_ticks.end()) {
            unmatched++;
            continue;
        }
        size_t &at = cursor[it->first];
        if (at >= it->second.size()) {
            unmatched++;
            continue;
        }
        long long row = it->second[at++];
        rec.truth_slot_left = truth.truth_slot_left[(size_t)row];
        rec.truth_slot_right = truth.truth_slot_right[(size_t)row];
    }
    return unmatched;
}

bool SelectionRule::applies(const PairRecord &rec) const {
    if (coincident_only && rec.cls != PairClass::Coincident) {
        return false;
    }
    if (early_left_index >= 0) {
        if (rec.early_left < 0) {
            raise(ErrorCode::DataError, "selection rule needs annotated early settings");
        }
        if (rec.early_left != early_left_index) {
            return false;
        }
    }
    if (early_right_index >= 0) {
        if (rec.early_right < 0) {
            raise(ErrorCode::DataError, "selection rule needs annotated early settings");
        }
        if (rec.early_right != early_right_index) {
            return false;
        }
    }
    return true;
}

void GroupStats::merge(const GroupStats &other) {
    n_same += other.n_same;
    n_diff += other.n_diff;
    n_ll_same += other.n_ll_same;
    n_ll_diff += other.n_ll_diff;
    n_ee_same += other.n_ee_same;
    n_ee_diff += other.n_ee_diff;
}

AnalysisAccumulator::AnalysisAccumulator(int nl, int nr, const SelectionRule &r)
    : n_left(nl), n_right(nr), rule(r) {
    if (nl < 1 || nr < 1) {
        raise(ErrorCode::DomainError, "setting table must have at least one entry per station");
    }
    size_t cells = (size_t)nl * (size_t)nr;
    groups.assign(cells, GroupStats{});
    left_plus.assign(cells, 0);
    left_tot.assign(cells, 0);
    right_plus.assign(cells, 0);
    right_tot.assign(cells, 0);
}

void AnalysisAccumulator::add(const PairRecord &rec) {
    if (n_left < 1) {
        raise(ErrorCode::DataError, "accumulator was not given a setting table");
    }
    if (rec.late_left < 0 || rec.late_right < 0) {
        raise(ErrorCode::DataError, "records must be annotated before accumulation");
    }
    if (rec.late_left >= n_left || rec.late_right >= n_right) {
        raise(ErrorCode::DataError, "setting index outside the announced table");
    }
    n_pairs_total++;
    n_class[(int)rec.cls]++;
    size_t g = (size_t)rec.late_left * (size_t)n_right + (size_t)rec.late_right;
    left_tot[g]++;
    right_tot[g]++;
    if (rec.sign_left > 0) {
        left_plus[g]++;
    }
    if (rec.sign_right > 0) {
        right_plus[g]++;
    }
    if (!rule.applies(rec)) {
        return;
    }
    n_selected++;
    bool same = rec.sign_left == rec.sign_right;
    GroupStats &gs = groups[g];
    (same ? gs.n_same : gs.n_diff)++;
    if (rec.truth_slot_left >= 0 && rec.truth_slot_right >= 0) {
        if (rec.truth_slot_left == 1 && rec.truth_slot_right == 1) {
            (same ? gs.n_ll_same : gs.n_ll_diff)++;
        } else if (rec.truth_slot_left == 0 && rec.truth_slot_right == 0) {
            (same ? gs.n_ee_same : gs.n_ee_diff)++;
        }
    } else {
        n_truth_missing++;
    }
}

void AnalysisAccumulator::add_pairing_counts(const PairingResult &pr) {
    n_accidental += pr.n_accidental;
    n_orphan_left += pr.n_orphan_left;
    n_orphan_right += pr.n_orphan_right;
}

void AnalysisAccumulator::add_all(const PairingResult &pr) {
    add_pairing_counts(pr);
    for (const auto &rec : pr.records) {
        add(rec);
    }
}

void AnalysisAccumulator::merge(const AnalysisAccumulator &other) {
    if (other.n_left != n_left || other.n_right != n_right || !(other.rule == rule)) {
        raise(ErrorCode::DataError, "cannot merge accumulators with different tables or rules");
    }
    for (size_t g = 0; g < groups.size(); g++) {
        groups[g].merge(other.groups[g]);
        left_plus[g] += other.left_plus[g];
        left_tot[g] += other.left_tot[g];
        right_plus[g] += other.right_plus[g];
        right_tot[g] += other.right_tot[g];
    }
    n_pairs_total += other.n_pairs_total;
    for (int c = 0; c < 3; c++) {
        n_class[c] += other.n_class[c];
    }
    n_selected += other.n_selected;
    n_truth_missing += other.n_truth_missing;
    n_accidental += other.n_accidental;
    n_orphan_left += other.n_orphan_left;
    n_orphan_right += other.n_orphan_right;
}

const GroupStats &AnalysisAccumulator::group(int i, int j) const {
    if (i < 0 || i >= n_left || j < 0 || j >= n_right) {
        raise(ErrorCode::DomainError, "setting index outside the table");
    }
    return groups[(size_t)i * (size_t)n_right + (size_t)j];
}

std::optional<Correlation> AnalysisAccumulator::correlation(int i, int j,
                                                            CorrelationFlavor flavor) const {
    const GroupStats &gs = group(i, j);
    long long s, d;
    switch (flavor) {
        case CorrelationFlavor::All:
            s = gs.n_same;
            d = gs.n_diff;
            break;
        case CorrelationFlavor::PureLL:
            s = gs.n_ll_same;
            d = gs.n_ll_diff;
            break;
        default:
            s = gs.n_ee_same;
            d = gs.n_ee_diff;
            break;
    }
    long long n = s + d;
    if (n == 0) {
        return std::nullopt;
    }
    Correlation c;
    c.n = n;
    c.e = (double)(s - d) / (double)n;
    c.se = std::sqrt(std::max(0.0, 1.0 - c.e * c.e) / (double)n);
    return c;
}

AnalysisAccumulator analyze_with_lookup(const SimOutput &out, const ExperimentConfig &config,
                                        const SettingLookup &lookup, const SelectionRule &rule,
                                        bool use_truth) {
    PairingResult pr = pair_detections(out, config.ticks_per_dl);
    annotate_settings(pr.records, lookup, config.ticks_per_dl, config.t_ret_left,
                      config.t_ret_right);
    if (use_truth) {
        attach_truth(pr.records, out, config);
    }
    AnalysisAccumulator acc((int)config.station_settings(Side::Left).size(),
                            (int)config.station_settings(Side::Right).size(), rule);
    acc.add_all(pr);
    return acc;
}

AnalysisAccumulator analyze_run(const SimOutput &out, const ExperimentConfig &config,
                                const SelectionRule &rule, bool use_truth) {
    SettingLookup lookup =
        schedule_lookup(config.make_schedule(Side::Left), config.make_schedule(Side::Right));
    return analyze_with_lookup(out, config, lookup, rule, use_truth);
}

namespace {

struct ChainPair {
    int i, j;
};

// the 2n distinct correlations the chained quantity reads
std::vector<ChainPair> chain_pairs(int n) {
    std::vector<ChainPair> out;
    for (int k = 0; k < n; k++) {
        out.push_back({k, k});
    }
    for (int k = 0; k + 1 < n; k++) {
        out.push_back({k + 1, k});
    }
    out.push_back({0, n - 1});
    return out;
}

std::string pair_key(const char *prefix, int i, int j) {
    return std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

// chained estimate from a flavor of the accumulator, with a quadrature-sum
// standard error; empty when any needed group has no events at all
struct ChainEstimate {
    bool complete = false;
    double value = 0, se = 0;
    long long min_n = 0;
};

ChainEstimate chain_estimate(const AnalysisAccumulator &acc, int n, int base,
                             CorrelationFlavor flavor) {
    ChainEstimate est;
    double var = 0;
    est.min_n = -1;
    std::vector<double> grid((size_t)n * (size_t)n, std::nan(""));
    for (const auto &cp : chain_pairs(n)) {
        auto c = acc.correlation(cp.i + base, cp.j + base, flavor);
        if (!c) {
            return est;
        }
        grid[(size_t)cp.i * (size_t)n + (size_t)cp.j] = c->e;
        var += c->se * c->se;
        if (est.min_n < 0 || c->n < est.min_n) {
            est.min_n = c->n;
        }
    }
    est.complete = true;
    est.value = chained_quantity(grid, n);
    est.se = std::sqrt(var);
    return est;
}

}  // namespace

Report bell_report(const AnalysisAccumulator &acc, const std::vector<double> &phis,
                   const std::vector<double> &psis, double visibility, bool anchored) {
    int n = (int)phis.size();
    if (n < 2 || (int)psis.size() != n) {
        raise(ErrorCode::DomainError, "chained analysis needs equal angle lists of length >= 2");
    }
    int base = anchored ? 1 : 0;
    if (acc.n_left < n + base || acc.n_right < n + base) {
        raise(ErrorCode::DataError, "accumulator table is smaller than the chain");
    }
    Report rep;
    rep.set_text("kind", "chained-bell");
    rep.set("n_chain", n);
    rep.set("anchored", base);
    rep.set("pairs_total", (double)acc.n_pairs_total);
    rep.set("pairs_selected", (double)acc.n_selected);
    rep.set("selected_fraction",
            acc.n_pairs_total ? (double)acc.n_selected / (double)acc.n_pairs_total : 0.0);
    rep.set("n_coincident", (double)acc.n_class[0]);
    rep.set("n_left_late", (double)acc.n_class[1]);
    rep.set("n_right_late", (double)acc.n_class[2]);
    rep.set("n_accidental", (double)acc.n_accidental);
    rep.set("n_orphan_left", (double)acc.n_orphan_left);
    rep.set("n_orphan_right", (double)acc.n_orphan_right);

    for (const auto &cp : chain_pairs(n)) {
        auto c = acc.correlation(cp.i + base, cp.j + base, CorrelationFlavor::All);
        if (c) {
            rep.set(pair_key("E", cp.i, cp.j), c->e);
            rep.set(pair_key("se", cp.i, cp.j), c->se);
            rep.set(pair_key("n", cp.i, cp.j), (double)c->n);
        } else {
            rep.set(pair_key("n", cp.i, cp.j), 0);
        }
    }

    double bound = lhv_bound(n, Ensemble::Coincident);
    rep.set("bound_pure_ll", lhv_bound(n, Ensemble::PureLL));
    rep.set("bound_coincident", bound);
    auto qm_lookup = [&](int i, int j) -> std::optional<double> {
        return visibility * std::cos(phis[(size_t)i] + psis[(size_t)j]);
    };
    rep.set("qm_prediction", chained_quantity(qm_lookup, n));

    ChainEstimate est = chain_estimate(acc, n, base, CorrelationFlavor::All);
    if (est.complete) {
        rep.set("chained", est.value);
        rep.set("chained_se", est.se);
        rep.set("min_group_events", (double)est.min_n);
        double z = est.se > 0 ? (est.value - bound) / est.se
                              : (est.value > bound ? INFINITY : -INFINITY);
        rep.set("z_vs_coincident_bound", z);
        if (est.min_n < MIN_GROUP_EVENTS) {
            rep.set_text("verdict", "insufficient data");
        } else if (z >= 3) {
            rep.set_text("verdict", "exceeds local bound");
        } else {
            rep.set_text("verdict", "within local bound");
        }
    } else {
        rep.set_text("verdict", "insufficient data");
    }
    return rep;
}

Report whitebox_report(const AnalysisAccumulator &acc, int n_chain, bool anchored) {
    if (n_chain < 2) {
        raise(ErrorCode::DomainError, "whitebox diagnostics need a chain of length >= 2");
    }
    int base = anchored ? 1 : 0;
    if (acc.n_left < n_chain + base || acc.n_right < n_chain + base) {
        raise(ErrorCode::DataError, "accumulator table is smaller than the chain");
    }
    Report rep;
    rep.set_text("kind", "whitebox");
    rep.set("n_chain", n_chain);
    rep.set("anchored", base);
    rep.set("n_truth_missing", (double)acc.n_truth_missing);

    ChainEstimate ll = chain_estimate(acc, n_chain, base, CorrelationFlavor::PureLL);
    double ll_bound = lhv_bound(n_chain, Ensemble::PureLL);
    rep.set("ll_bound", ll_bound);
    bool insufficient = !ll.complete || ll.min_n < MIN_GROUP_EVENTS;
    if (ll.complete) {
        rep.set("ll_chained", ll.value);
        rep.set("ll_chained_se", ll.se);
        rep.set("ll_min_group_events", (double)ll.min_n);
        double z = ll.se > 0 ? (ll.value - ll_bound) / ll.se
                             : (ll.value > ll_bound ? INFINITY : -INFINITY);
        rep.set("ll_z", z);
        if (insufficient) {
            rep.set_text("verdict_ll", "insufficient data");
        } else if (z >= 3) {
            rep.set_text("verdict_ll", "exceeds subensemble bound");
        } else {
            rep.set_text("verdict_ll", "within subensemble bound");
        }
    } else {
        rep.set_text("verdict_ll", "insufficient data");
    }

    // CHSH cut: the first two chain settings on each side
    ChainEstimate chsh = chain_estimate(acc, 2, base, CorrelationFlavor::PureLL);
    if (chsh.complete) {
        rep.set("chsh_ll", chsh.value);
        rep.set("chsh_ll_se", chsh.se);
        double z = chsh.se > 0 ? (chsh.value - 2.0) / chsh.se
                               : (chsh.value > 2.0 ? INFINITY : -INFINITY);
        rep.set("chsh_ll_z", z);
    }

    double ee_abs_max = 0;
    bool have_ee = false;
    double w_dev_max = 0;
    long long balanced = 0;
    double decomp_max_z = 0;
    long long identity_mismatch = 0;
    for (const auto &gs : acc.groups) {
        identity_mismatch += std::llabs(gs.n_same - gs.n_ll_same - gs.n_ee_same) +
                             std::llabs(gs.n_diff - gs.n_ll_diff - gs.n_ee_diff);
    }
    for (const auto &cp : chain_pairs(n_chain)) {
        int i = cp.i + base, j = cp.j + base;
        auto all = acc.correlation(i, j, CorrelationFlavor::All);
        auto cll = acc.correlation(i, j, CorrelationFlavor::PureLL);
        auto cee = acc.correlation(i, j, CorrelationFlavor::PureEE);
        if (cee && cee->n >= MIN_GROUP_EVENTS) {
            have_ee = true;
            ee_abs_max = std::max(ee_abs_max, std::fabs(cee->e));
        }
        if (cll && cee) {
            double w = (double)cll->n / (double)(cll->n + cee->n);
            w_dev_max = std::max(w_dev_max, std::fabs(w - 0.5));
            if (all && std::fabs(w - 0.5) <= 0.05) {
                balanced++;
                double resid = std::fabs(all->e - 0.5 * (cll->e + cee->e));
                double sigma = std::sqrt(all->se * all->se + 0.25 * cll->se * cll->se +
                                         0.25 * cee->se * cee->se);
                if (sigma > 0) {
                    decomp_max_z = std::max(decomp_max_z, resid / sigma);
                }
            }
        }
    }
    if (have_ee) {
        rep.set("ee_abs_max", ee_abs_max);
    }
    rep.set("w_ll_max_dev", w_dev_max);
    rep.set("n_balanced_groups", (double)balanced);
    rep.set("decomposition_max_z", decomp_max_z);
    rep.set("identity_count_mismatch", (double)identity_mismatch);
    return rep;
}

Report nosignal_report(const AnalysisAccumulator &acc) {
    constexpr long long MIN_CELL = 100;
    double max_z = 0;
    std::string worst = "none";
    long long checked = 0, skipped = 0;
    long long min_events = -1;

    struct Cell {
        int other;
        double p, se;
    };
    auto scan = [&](const char *name, int n_own, int n_other, auto plus_at, auto tot_at) {
        for (int i = 0; i < n_own; i++) {
            std::vector<Cell> cells;
            for (int j = 0; j < n_other; j++) {
                long long tot = tot_at(i, j);
                if (tot < MIN_CELL) {
                    skipped++;
                    continue;
                }
                checked++;
                if (min_events < 0 || tot < min_events) {
                    min_events = tot;
                }
                double p = (double)plus_at(i, j) / (double)tot;
                cells.push_back({j, p, std::sqrt(p * (1 - p) / (double)tot)});
            }
            for (size_t a = 0; a < cells.size(); a++) {
                for (size_t b = a + 1; b < cells.size(); b++) {
                    double diff = std::fabs(cells[a].p - cells[b].p);
                    double denom =
                        std::sqrt(cells[a].se * cells[a].se + cells[b].se * cells[b].se);
                    double z = denom > 0 ? diff / denom : (diff > 0 ? INFINITY : 0.0);
                    if (z > max_z) {
                        max_z = z;
                        worst = std::string(name) + " setting " + std::to_string(i) + ": other " +
                                std::to_string(cells[a].other) + " vs " +
                                std::to_string(cells[b].other);
                    }
                }
            }
        }
    };
    scan(
        "left", acc.n_left, acc.n_right,
        [&](int i, int j) { return acc.left_plus[(size_t)i * acc.n_right + (size_t)j]; },
        [&](int i, int j) { return acc.left_tot[(size_t)i * acc.n_right + (size_t)j]; });
    scan(
        "right", acc.n_right, acc.n_left,
        [&](int i, int j) { return acc.right_plus[(size_t)j * acc.n_right + (size_t)i]; },
        [&](int i, int j) { return acc.right_tot[(size_t)j * acc.n_right + (size_t)i]; });

    Report rep;
    rep.set_text("kind", "no-signaling");
    rep.set("max_z", max_z);
    rep.set_text("worst", worst);
    rep.set("n_cells_checked", (double)checked);
    rep.set("n_cells_skipped", (double)skipped);
    rep.set("min_cell_events", (double)(min_events < 0 ? 0 : min_events));
    return rep;
}

JointTable empirical_table(const std::vector<PairRecord> &records, long long *n_used) {
    std::array<long long, 16> counts{};
    long long used = 0;
    for (const auto &rec : records) {
        if (rec.truth_slot_left < 0 || rec.truth_slot_right < 0) {
            continue;
        }
        OutcomeCell lc{rec.sign_left > 0 ? 1 : -1,
                       rec.truth_slot_left ? Slot::Late : Slot::Early};
        OutcomeCell rc{rec.sign_right > 0 ? 1 : -1,
                       rec.truth_slot_right ? Slot::Late : Slot::Early};
        counts[(size_t)(lc.index() * 4 + rc.index())]++;
        used++;
    }
    JointTable table;
    for (size_t c = 0; c < 16; c++) {
        table.p[c] = used ? (double)counts[c] / (double)used : 0.0;
    }
    if (n_used) {
        *n_used = used;
    }
    return table;
}

void save_pairs_csv(const std::string &path, const std::vector<PairRecord> &records) {
    std::string text = "t_left,t_right,sign_l,sign_r,class,early_phi,early_psi,late_phi,late_psi\n";
    for (const auto &rec : records) {
        text += std::to_string(rec.t_left);
        text += ',';
        text += std::to_string(rec.t_right);
        text += ',';
        text += rec.sign_left > 0 ? "1" : "-1";
        text += ',';
        text += rec.sign_right > 0 ? "1" : "-1";
        text += ',';
        text += pair_class_name(rec.cls);
        text += ',';
        text += std::to_string((int)rec.early_left);
        text += ',';
        text += std::to_string((int)rec.early_right);
        text += ',';
        text += std::to_string((int)rec.late_left);
        text += ',';
        text += std::to_string((int)rec.late_right);
        text += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        raise(ErrorCode::IoError, "cannot write pairs file: " + path);
    }
    f << text;
    if (!f.good()) {
        raise(ErrorCode::IoError, "failed writing pairs file: " + path);
    }
}

std::vector<PairRecord> load_pairs_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open pairs file: " + path);
    }
    std::vector<PairRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty() ||
            line == "t_left,t_right,sign_l,sign_r,class,early_phi,early_psi,late_phi,late_psi") {
            continue;
        }
        std::istringstream ls(line);
        std::string f[9];
        for (int c = 0; c < 9; c++) {
            if (!std::getline(ls, f[c], c == 8 ? '\n' : ',')) {
                raise(ErrorCode::ParseError, "pairs line " + std::to_string(lineno) + ": bad row");
            }
        }
        PairRecord rec;
        try {
            rec.t_left = std::stoll(f[0]);
            rec.t_right = std::stoll(f[1]);
            int sl = std::stoi(f[2]), sr = std::stoi(f[3]);
            if ((sl != 1 && sl != -1) || (sr != 1 && sr != -1)) {
                raise(ErrorCode::ParseError,
                      "pairs line " + std::to_string(lineno) + ": signs must be 1 or -1");
            }
            rec.sign_left = (int8_t)sl;
            rec.sign_right = (int8_t)sr;
            rec.cls = parse_pair_class(f[4]);
            rec.early_left = (int16_t)std::stoi(f[5]);
            rec.early_right = (int16_t)std::stoi(f[6]);
            rec.late_left = (int16_t)std::stoi(f[7]);
            rec.late_right = (int16_t)std::stoi(f[8]);
        } catch (const Error &) {
            throw;
        } catch (...) {
            raise(ErrorCode::ParseError, "pairs line " + std::to_string(lineno) + ": bad number");
        }
        out.push_back(rec);
    }
    return out;
}

}  // namespace franson
