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

#include "core/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "core/bell_math.h"
#include "core/error.h"
#include "core/quadrature.h"
#include "core/rng.h"
#include "core/validate.h"

namespace franson {

namespace {

constexpr double FREEZE_AMP = PI / 8;
constexpr double INF = std::numeric_limits<double>::infinity();

struct LayoutColumn {
    double x0 = 0, x1 = 0;
    std::vector<int> slabs;
    std::vector<Curve> interior;
    std::vector<bool> frozen;
};

// The structural skeleton the search works on: fixed columns and slab order,
// mutable interior boundary curves.
struct Layout {
    int d = 1;
    std::array<std::vector<std::vector<LayoutColumn>>, 2> charts;  // [station][layer]
};

Layout layout_from_model(const RegionModelPair &model) {
    Layout lay;
    lay.d = model.d;
    for (int station = 0; station < 2; station++) {
        const StationModel &st = station == 0 ? model.left : model.right;
        for (const Chart &chart : st.layers) {
            std::vector<LayoutColumn> cols;
            for (const ChartStack &stk : chart.stacks()) {
                LayoutColumn col;
                col.x0 = stk.x0;
                col.x1 = stk.x1;
                col.slabs = stk.slabs;
                col.interior = stk.interior;
                for (const Curve &cv : col.interior) {
                    col.frozen.push_back(std::fabs(cv.a - FREEZE_AMP) <= 1e-9 ||
                                         std::fabs(cv.a + FREEZE_AMP) <= 1e-9);
                }
                cols.push_back(std::move(col));
            }
            lay.charts[station].push_back(std::move(cols));
        }
    }
    return lay;
}

RegionModelPair model_from_layout(const Layout &lay) {
    RegionModelPair model;
    model.d = lay.d;
    for (int station = 0; station < 2; station++) {
        StationModel &st = station == 0 ? model.left : model.right;
        st.side = station == 0 ? Side::Left : Side::Right;
        for (const auto &cols : lay.charts[station]) {
            std::array<std::vector<Primitive>, 4> cells;
            for (const auto &col : cols) {
                for (size_t i = 0; i < col.slabs.size(); i++) {
                    Primitive p;
                    p.x0 = col.x0;
                    p.x1 = col.x1;
                    p.lo = i == 0 ? Curve::flat(0) : col.interior[i - 1];
                    p.hi = i == col.slabs.size() - 1 ? Curve::flat(1) : col.interior[i];
                    p.kind = (p.lo.a == 0 && p.hi.a == 0) ? Primitive::Kind::Rect
                                                          : Primitive::Kind::CurveBand;
                    cells[col.slabs[i]].push_back(p);
                }
            }
            st.layers.emplace_back(std::move(cells));
        }
    }
    return model;
}

// ---- parameter vector: (c, s, t) of every non-frozen interior boundary ----

template <typename Fn>
void for_each_free(Layout &lay, Fn fn) {
    for (auto &station : lay.charts) {
        for (auto &cols : station) {
            for (auto &col : cols) {
                for (size_t i = 0; i < col.interior.size(); i++) {
                    if (!col.frozen[i]) {
                        fn(col, i);
                    }
                }
            }
        }
    }
}

std::vector<double> get_params(Layout &lay) {
    std::vector<double> p;
    for_each_free(lay, [&](LayoutColumn &col, size_t i) {
        const Curve &cv = col.interior[i];
        p.push_back(cv.c);
        p.push_back(cv.s());
        p.push_back(cv.t());
    });
    return p;
}

void set_params(Layout &lay, const std::vector<double> &p) {
    size_t k = 0;
    for_each_free(lay, [&](LayoutColumn &col, size_t i) {
        col.interior[i] = Curve::from_cst(p[k], p[k + 1], p[k + 2]);
        k += 3;
    });
}

// ---- exact per-cell area repair -----------------------------------------

// Cell areas of one chart layer from the layout's boundary curves.
std::array<double, 4> layer_areas(const std::vector<LayoutColumn> &cols) {
    std::array<double, 4> areas{};
    for (const auto &col : cols) {
        double below = 0;  // integral of the slab's lower bound
        for (size_t i = 0; i < col.slabs.size(); i++) {
            double above = i == col.slabs.size() - 1 ? col.x1 - col.x0
                                                     : col.interior[i].integral(col.x0, col.x1);
            areas[col.slabs[i]] += above - below;
            below = above;
        }
    }
    return areas;
}

// Minimum-norm shift of the free parameters restoring every cell area to
// pi/2 exactly. Areas are affine in (c, s, t), so this is one linear solve.
// Returns false when the layout cannot be repaired.
bool repair_areas(Layout &lay, std::vector<double> &p) {
    set_params(lay, p);
    int n = (int)p.size();

    // residual rows: three cells per chart layer (the fourth is dependent)
    std::vector<double> rhs;
    std::vector<std::vector<double>> a;
    for (auto &station : lay.charts) {
        for (auto &cols : station) {
            auto areas = layer_areas(cols);
            for (int c = 0; c < 3; c++) {
                rhs.push_back(PI / 2 - areas[c]);
                a.emplace_back(n, 0.0);
            }
        }
    }
    if (n > 0) {
        int row_base = 0, k = 0;
        for (auto &station : lay.charts) {
            for (auto &cols : station) {
                for (auto &col : cols) {
                    for (size_t i = 0; i < col.interior.size(); i++) {
                        if (col.frozen[i]) {
                            continue;
                        }
                        double i1 = col.x1 - col.x0;
                        double is = std::cos(col.x0) - std::cos(col.x1);
                        double ic = std::sin(col.x1) - std::sin(col.x0);
                        int below = col.slabs[i], above = col.slabs[i + 1];
                        if (below < 3) {
                            a[row_base + below][k] += i1;
                            a[row_base + below][k + 1] += is;
                            a[row_base + below][k + 2] += ic;
                        }
                        if (above < 3) {
                            a[row_base + above][k] -= i1;
                            a[row_base + above][k + 1] -= is;
                            a[row_base + above][k + 2] -= ic;
                        }
                        k += 3;
                    }
                }
                row_base += 3;
            }
        }
    }

    int m = (int)rhs.size();
    // solve (A A^T) y = rhs, shift = A^T y; tolerate rank deficiency as long
    // as the unreachable residual is already zero
    std::vector<std::vector<double>> g(m, std::vector<double>(m + 1, 0.0));
    for (int r = 0; r < m; r++) {
        for (int c = 0; c < m; c++) {
            double dot = 0;
            for (int j = 0; j < n; j++) {
                dot += a[r][j] * a[c][j];
            }
            g[r][c] = dot;
        }
        g[r][m] = rhs[r];
    }
    std::vector<int> perm(m);
    for (int i = 0; i < m; i++) {
        perm[i] = i;
    }
    for (int col = 0; col < m; col++) {
        int piv = col;
        for (int r = col + 1; r < m; r++) {
            if (std::fabs(g[r][col]) > std::fabs(g[piv][col])) {
                piv = r;
            }
        }
        std::swap(g[col], g[piv]);
        if (std::fabs(g[col][col]) < 1e-12) {
            if (std::fabs(g[col][m]) > 1e-9) {
                return false;  // area constraint unreachable from free params
            }
            g[col][col] = 1;
            g[col][m] = 0;
            for (int c = col + 1; c < m; c++) {
                g[col][c] = 0;
            }
            continue;
        }
        for (int r = col + 1; r < m; r++) {
            double f = g[r][col] / g[col][col];
            for (int c = col; c <= m; c++) {
                g[r][c] -= f * g[col][c];
            }
        }
    }
    std::vector<double> y(m, 0.0);
    for (int r = m - 1; r >= 0; r--) {
        double acc = g[r][m];
        for (int c = r + 1; c < m; c++) {
            acc -= g[r][c] * y[c];
        }
        y[r] = acc / g[r][r];
    }
    for (int j = 0; j < n; j++) {
        double shift = 0;
        for (int r = 0; r < m; r++) {
            shift += a[r][j] * y[r];
        }
        p[j] += shift;
    }
    set_params(lay, p);

    // verify
    for (auto &station : lay.charts) {
        for (auto &cols : station) {
            for (double ar : layer_areas(cols)) {
                if (std::fabs(ar - PI / 2) > 1e-10) {
                    return false;
                }
            }
        }
    }
    return true;
}

// ---- search -------------------------------------------------------------

struct Search {
    const SynthesisOptions &opt;
    Layout lay;  // scratch structure; curves rewritten per candidate
    long long evals = 0;
    double best_obj = INF;
    std::vector<double> best_p;

    // Repairs p in place, then scores it by RMS residual on the descent
    // grid. Invalid candidates score infinity.
    double eval(std::vector<double> &p) {
        evals++;
        if (!repair_areas(lay, p)) {
            return INF;
        }
        double max_dev = 0, rms = 0;
        try {
            RegionModelPair model = model_from_layout(lay);
            table_residual(model, opt.descent_grid, opt.descent_quad_tol, max_dev, rms);
        } catch (const Error &) {
            return INF;
        }
        if (rms < best_obj) {
            best_obj = rms;
            best_p = p;
        }
        return rms;
    }
};

void catalog_sweep(Search &s, std::vector<double> &p) {
    const double amps[] = {0, PI / 16, -PI / 16, PI / 8, -PI / 8};
    double f = s.eval(p);
    for (size_t j = 0; j + 2 < p.size(); j += 3) {
        for (double amp : amps) {
            if (s.evals >= s.opt.budget) {
                return;
            }
            std::vector<double> q = p;
            q[j + 1] = amp;  // s component: amp * sin(x) family
            q[j + 2] = 0;
            double fq = s.eval(q);
            if (fq < f) {
                f = fq;
                p = q;
            }
        }
    }
}

void nelder_mead(Search &s, std::vector<double> start, double step, long long slice) {
    size_t n = start.size();
    if (n == 0) {
        s.eval(start);
        return;
    }
    long long stop = std::min(s.opt.budget, s.evals + slice);
    std::vector<std::pair<double, std::vector<double>>> sx;
    sx.reserve(n + 1);
    sx.emplace_back(s.eval(start), start);
    for (size_t i = 0; i < n; i++) {
        auto v = start;
        v[i] += step;
        sx.emplace_back(s.eval(v), v);
    }
    auto order = [&] {
        std::sort(sx.begin(), sx.end(),
                  [](const auto &a, const auto &b) { return a.first < b.first; });
    };
    order();
    while (s.evals < stop) {
        if (sx.back().first - sx.front().first <= 1e-13 * (1 + std::fabs(sx.front().first))) {
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; i++) {
            for (size_t k = 0; k + 1 < sx.size(); k++) {
                centroid[i] += sx[k].second[i];
            }
            centroid[i] /= (double)n;
        }
        auto blend = [&](double w) {
            std::vector<double> v(n);
            for (size_t i = 0; i < n; i++) {
                v[i] = centroid[i] + w * (centroid[i] - sx.back().second[i]);
            }
            return v;
        };
        auto xr = blend(1.0);
        double fr = s.eval(xr);
        if (fr < sx.front().first) {
            auto xe = blend(2.0);
            double fe = s.eval(xe);
            if (fe < fr) {
                sx.back() = {fe, xe};
            } else {
                sx.back() = {fr, xr};
            }
        } else if (fr < sx[sx.size() - 2].first) {
            sx.back() = {fr, xr};
        } else {
            double w = fr < sx.back().first ? 0.5 : -0.5;
            auto xc = blend(w);
            double fc = s.eval(xc);
            if (fc < std::min(fr, sx.back().first)) {
                sx.back() = {fc, xc};
            } else {
                for (size_t k = 1; k < sx.size(); k++) {
                    for (size_t i = 0; i < n; i++) {
                        sx[k].second[i] = sx[0].second[i] + 0.5 * (sx[k].second[i] - sx[0].second[i]);
                    }
                    sx[k].first = s.eval(sx[k].second);
                }
            }
        }
        order();
    }
}

double gauss(CounterRng &rng) {
    double u1 = rng.uniform(), u2 = rng.uniform();
    return std::sqrt(-2 * std::log1p(-u1)) * std::cos(TWO_PI * u2);
}

struct GateScan {
    double max_dev = 0, rms = 0, worst_chi = 0;
    int worst_l = 0, worst_r = 0;
};

GateScan gate_scan(const RegionModelPair &model, int grid, double quad_tol) {
    GateScan gs;
    double sq = 0;
    for (int k = 0; k < grid; k++) {
        double chi = (k + 0.5) * TWO_PI / grid;
        JointTable got = joint_table_quadrature(model, chi, 0, quad_tol);
        JointTable want = target_table(chi);
        for (int i = 0; i < 16; i++) {
            double dev = std::fabs(got.p[i] - want.p[i]);
            sq += dev * dev;
            if (dev > gs.max_dev) {
                gs.max_dev = dev;
                gs.worst_chi = chi;
                gs.worst_l = i / 4;
                gs.worst_r = i % 4;
            }
        }
    }
    gs.rms = std::sqrt(sq / (16.0 * grid));
    return gs;
}

SynthesisResult run_search(const Layout &base, const SynthesisOptions &opt, uint64_t substream) {
    SynthesisResult res;
    res.seed = opt.rng_seed;
    Search s{opt, base, 0, INF, {}};
    std::vector<double> p = get_params(s.lay);

    if (!repair_areas(s.lay, p)) {
        raise(ErrorCode::InvalidModel, "seed layout cannot satisfy the area constraints");
    }

    auto gate = [&](const std::vector<double> &cand) {
        std::vector<double> q = cand;
        s.evals++;
        repair_areas(s.lay, q);
        return gate_scan(model_from_layout(s.lay), opt.grid, opt.gate_quad_tol);
    };

    double best_gate = INF;
    std::vector<double> best_gate_p = p;
    auto consider = [&](const std::vector<double> &cand) {
        GateScan gs = gate(cand);
        if (gs.max_dev < best_gate) {
            best_gate = gs.max_dev;
            best_gate_p = cand;
        }
        return best_gate <= opt.tol_max;
    };

    bool passed = consider(p);
    if (!passed && !p.empty()) {
        catalog_sweep(s, p);
        CounterRng rng(opt.rng_seed, 9000 + substream);
        double radius = 0.05;
        while (!passed && s.evals < opt.budget) {
            long long slice = std::min<long long>(opt.budget - s.evals, 40 * (long long)p.size() + 120);
            nelder_mead(s, p, 0.02, slice);
            passed = consider(s.best_p.empty() ? p : s.best_p);
            if (passed || s.evals >= opt.budget) {
                break;
            }
            p = best_gate_p;
            for (double &v : p) {
                v += radius * gauss(rng);
            }
            radius *= 0.7;
        }
    }

    repair_areas(s.lay, best_gate_p);
    res.model = model_from_layout(s.lay);
    res.iterations = s.evals;
    table_residual(res.model, opt.grid, opt.gate_quad_tol, res.residual_max, res.residual_rms);
    res.succeeded = res.residual_max <= opt.tol_max;
    if (!res.succeeded) {
        GateScan gs = gate_scan(res.model, opt.grid, opt.gate_quad_tol);
        res.worst_entry = CELL_ORDER[gs.worst_l].str() + "," + CELL_ORDER[gs.worst_r].str();
        res.worst_chi = gs.worst_chi;
        res.worst_dev = gs.max_dev;
    }
    return res;
}

}  // namespace

std::pair<Primitive, Primitive> find_seed_pair(const RegionModelPair &seed) {
    seed.validate_shape();
    for (int sl = 0; sl < 2; sl++) {
        const Chart &sliver_chart = (sl == 0 ? seed.left : seed.right).layers[0];
        const Chart &recv_chart = (sl == 0 ? seed.right : seed.left).layers[0];
        for (int c = 0; c < 4; c++) {
            for (const Primitive &p : sliver_chart.cells()[c]) {
                if (std::fabs((p.x1 - p.x0) - PI) > 1e-9 || std::fabs(p.lo.a) > 1e-9) {
                    continue;
                }
                double dc = p.hi.c - p.lo.c;
                double ds = p.hi.s() - p.lo.s(), dt = p.hi.t() - p.lo.t();
                if (std::fabs(dc) > 1e-9 || std::fabs(std::hypot(ds, dt) - PI / 8) > 1e-9) {
                    continue;
                }
                if (std::fabs(p.hi.eval(p.x0) - p.lo.eval(p.x0)) > 1e-9) {
                    continue;  // thickness must vanish at the edges
                }
                double cx0 = reduce_angle(p.x0 + PI);
                if (cx0 + PI > TWO_PI + 1e-9) {
                    continue;  // complementary half must not wrap
                }
                OutcomeCell sc = CELL_ORDER[c];
                OutcomeCell want{-sc.sign, sc.slot};
                double base_level = p.lo.c;
                for (const Primitive &q : recv_chart.cells()[want.index()]) {
                    if (q.x0 > cx0 + 1e-9 || q.x1 < cx0 + PI - 1e-9) {
                        continue;
                    }
                    if (q.lo.max_on(q.x0, q.x1) <= base_level + 1e-9 &&
                        q.hi.min_on(q.x0, q.x1) >= base_level + PI / 8 - 1e-9) {
                        return {p, q};
                    }
                }
            }
        }
    }
    raise(ErrorCode::InvalidModel,
          "seed does not embed the sliver/receptor pair (a pi/8 sine sliver over one half-chart "
          "facing a tall enough rectangle on the complementary half)");
}

SynthesisResult synthesize(const RegionModelPair &seed, const SynthesisOptions &options) {
    if (options.grid < 16 || options.descent_grid < 1) {
        raise(ErrorCode::InvalidConfig, "synthesis grid must have at least 16 points");
    }
    find_seed_pair(seed);
    Layout lay = layout_from_model(seed);
    SynthesisResult res = run_search(lay, options, 0);
    if (!res.succeeded && seed.d == 1) {
        Layout doubled = lay;
        doubled.d = 2;
        for (auto &station : doubled.charts) {
            station.push_back(station[0]);
        }
        SynthesisResult fb = run_search(doubled, options, 1);
        fb.used_fallback = true;
        fb.iterations += res.iterations;
        if (fb.succeeded || fb.residual_max < res.residual_max) {
            return fb;
        }
    }
    return res;
}

}  // namespace franson
