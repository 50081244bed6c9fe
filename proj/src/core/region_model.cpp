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

#include "core/region_model.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.h"

namespace franson {

static constexpr double X_SNAP = 1e-9;
static constexpr double CURVE_TOL = 1e-12;

bool Curve::same_function(const Curve &other, double tol) const {
    return std::fabs(c - other.c) <= tol && std::fabs(s() - other.s()) <= tol &&
           std::fabs(t() - other.t()) <= tol;
}

// Candidate extrema of c + s sinx + t cosx on [x0, x1]: the endpoints plus
// any interior zeros of the derivative.
static void extrema_candidates(const Curve &cv, double x0, double x1, double out[4], int &count) {
    count = 0;
    out[count++] = x0;
    out[count++] = x1;
    double s = cv.s(), t = cv.t();
    if (s != 0 || t != 0) {
        double base = std::atan2(s, t);  // sin(base) ~ s/R, cos(base) ~ t/R
        for (int k = -2; k <= 2; k++) {
            double x = base + k * PI;
            if (x > x0 && x < x1 && count < 4) {
                out[count++] = x;
            }
        }
    }
}

double Curve::min_on(double x0, double x1) const {
    double xs[4];
    int n;
    extrema_candidates(*this, x0, x1, xs, n);
    double best = eval(xs[0]);
    for (int i = 1; i < n; i++) {
        best = std::min(best, eval(xs[i]));
    }
    return best;
}

double Curve::max_on(double x0, double x1) const {
    double xs[4];
    int n;
    extrema_candidates(*this, x0, x1, xs, n);
    double best = eval(xs[0]);
    for (int i = 1; i < n; i++) {
        best = std::max(best, eval(xs[i]));
    }
    return best;
}

double Curve::integral(double x0, double x1) const {
    return c * (x1 - x0) + s() * (std::cos(x0) - std::cos(x1)) + t() * (std::sin(x1) - std::sin(x0));
}

Curve Curve::from_cst(double c, double s, double t) {
    Curve cv;
    cv.c = c;
    cv.a = std::hypot(s, t);
    cv.delta = cv.a > 0 ? std::atan2(-t, s) : 0;
    return cv;
}

static double snap_x(double x) {
    if (std::fabs(x) <= X_SNAP) {
        return 0;
    }
    if (std::fabs(x - TWO_PI) <= X_SNAP) {
        return TWO_PI;
    }
    return x;
}

Chart::Chart(std::array<std::vector<Primitive>, 4> cells, double area_tol) : cells_(std::move(cells)) {
    struct Tagged {
        const Primitive *prim;
        int cell;
    };
    std::vector<Tagged> all;
    std::vector<double> edges{0.0, TWO_PI};
    for (int c = 0; c < 4; c++) {
        for (auto &prim : cells_[c]) {
            double x0 = snap_x(prim.x0), x1 = snap_x(prim.x1);
            if (!(x0 >= 0 && x1 <= TWO_PI && x0 < x1)) {
                raise(ErrorCode::InvalidModel, "primitive x-interval invalid in cell " +
                                                   CELL_ORDER[c].str() + " (need 0 <= x0 < x1 <= 2pi)");
            }
            all.push_back({&prim, c});
            edges.push_back(x0);
            edges.push_back(x1);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                edges.end());

    for (size_t e = 0; e + 1 < edges.size(); e++) {
        double x0 = edges[e], x1 = edges[e + 1];
        if (x1 - x0 < 1e-12) {
            continue;
        }
        double mid = 0.5 * (x0 + x1);
        std::vector<Tagged> active;
        for (auto &tp : all) {
            if (snap_x(tp.prim->x0) <= mid && mid < snap_x(tp.prim->x1)) {
                active.push_back(tp);
            }
        }
        if (active.empty()) {
            raise(ErrorCode::InvalidModel,
                  "chart has no region near x = " + std::to_string(mid));
        }
        std::sort(active.begin(), active.end(), [&](const Tagged &a, const Tagged &b) {
            return a.prim->lo.eval(mid) < b.prim->lo.eval(mid);
        });

        Column col;
        col.x0 = x0;
        col.x1 = x1;
        if (!active.front().prim->lo.same_function(Curve::flat(0), CURVE_TOL)) {
            raise(ErrorCode::InvalidModel,
                  "stack near x = " + std::to_string(mid) + " does not start at r = 0");
        }
        col.bounds.push_back(Curve::flat(0));
        for (size_t i = 0; i < active.size(); i++) {
            const Primitive &prim = *active[i].prim;
            Curve gap{prim.hi.c - prim.lo.c, 0, 0};
            // thickness hi - lo as a canonical curve, for the sign check
            double ds = prim.hi.s() - prim.lo.s(), dt = prim.hi.t() - prim.lo.t();
            double amp = std::hypot(ds, dt);
            double thickness_min = gap.c - amp;
            if (thickness_min < -1e-12) {
                // the thickness sinusoid may still stay nonnegative inside
                // the interval even if its global minimum is negative
                Curve diff;
                diff.c = prim.hi.c - prim.lo.c;
                diff.a = amp;
                diff.delta = amp > 0 ? reduce_angle(std::atan2(-dt, ds) + 0.0) : 0;
                // diff.eval uses a sin(x-delta) = s sinx + t cosx with
                // s = a cos(delta), t = -a sin(delta); match s=ds, t=dt.
                if (diff.min_on(x0, x1) < -1e-12) {
                    raise(ErrorCode::InvalidModel, "primitive in cell " +
                                                       CELL_ORDER[active[i].cell].str() +
                                                       " has hi below lo near x = " + std::to_string(mid));
                }
            }
            if (i + 1 < active.size()) {
                if (!prim.hi.same_function(active[i + 1].prim->lo, CURVE_TOL)) {
                    raise(ErrorCode::InvalidModel,
                          "stack near x = " + std::to_string(mid) +
                              " has a gap or overlap between regions (boundary curves differ)");
                }
            }
            col.bounds.push_back(prim.hi);
            col.slabs.push_back(active[i].cell);
        }
        if (!col.bounds.back().same_function(Curve::flat(1), CURVE_TOL)) {
            raise(ErrorCode::InvalidModel,
                  "stack near x = " + std::to_string(mid) + " does not end at r = 1");
        }
        columns_.push_back(std::move(col));
        if (x0 > 0 && (breakpoints_.empty() || breakpoints_.back() != x0)) {
            breakpoints_.push_back(x0);
        }
    }

    // Columns were created between consecutive edges, so coverage of [0, 2pi)
    // just requires contiguity.
    double cursor = 0;
    for (auto &col : columns_) {
        if (std::fabs(col.x0 - cursor) > 1e-12) {
            raise(ErrorCode::InvalidModel, "chart does not cover x = " + std::to_string(cursor));
        }
        cursor = col.x1;
    }
    if (std::fabs(cursor - TWO_PI) > 1e-12) {
        raise(ErrorCode::InvalidModel, "chart does not cover x up to 2pi");
    }

    auto areas = cell_areas();
    for (int c = 0; c < 4; c++) {
        if (std::fabs(areas[c] - PI / 2) > area_tol) {
            char buf[128];
            snprintf(buf, sizeof buf, "cell %s area %.12g deviates from pi/2 beyond %g",
                     CELL_ORDER[c].str().c_str(), areas[c], area_tol);
            raise(ErrorCode::InvalidModel, buf);
        }
    }
}

std::array<double, 4> Chart::cell_areas() const {
    std::array<double, 4> areas{};
    for (int c = 0; c < 4; c++) {
        for (const auto &prim : cells_[c]) {
            areas[c] += prim.area();
        }
    }
    return areas;
}

const Chart::Column &Chart::column_at(double x) const {
    // columns are sorted by x0 and contiguous
    size_t lo = 0, hi = columns_.size();
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (columns_[mid].x0 <= x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return columns_[lo];
}

OutcomeCell Chart::cell_at(double x, double r) const {
    const Column &col = column_at(x);
    double sx = std::sin(x), cx = std::cos(x);
    for (size_t i = 0; i + 1 < col.bounds.size(); i++) {
        if (r < col.bounds[i + 1].eval_st(sx, cx)) {
            return CELL_ORDER[col.slabs[i]];
        }
    }
    return CELL_ORDER[col.slabs.back()];
}

void Chart::cell_intervals(int cell_index, double x,
                           std::vector<std::pair<double, double>> &out) const {
    const Column &col = column_at(x);
    double sx = std::sin(x), cx = std::cos(x);
    double lo = 0;
    for (size_t i = 0; i < col.slabs.size(); i++) {
        double hi = i + 1 == col.slabs.size() ? 1.0 : col.bounds[i + 1].eval_st(sx, cx);
        if (col.slabs[i] == cell_index && hi > lo) {
            if (!out.empty() && out.back().second >= lo - 1e-14) {
                out.back().second = hi;
            } else {
                out.emplace_back(lo, hi);
            }
        }
        lo = hi;
    }
}

std::vector<ChartStack> Chart::stacks() const {
    std::vector<ChartStack> out;
    for (const auto &col : columns_) {
        ChartStack st;
        st.x0 = col.x0;
        st.x1 = col.x1;
        for (size_t i = 0; i < col.slabs.size(); i++) {
            if (!st.slabs.empty() && st.slabs.back() == col.slabs[i]) {
                continue;  // merge same-cell neighbors, dropping their boundary
            }
            if (!st.slabs.empty()) {
                st.interior.push_back(col.bounds[i]);
            }
            st.slabs.push_back(col.slabs[i]);
        }
        out.push_back(std::move(st));
    }
    return out;
}

void RegionModelPair::validate_shape() const {
    if (d < 1 || d > 2) {
        raise(ErrorCode::InvalidModel, "hidden variable dimension d must be 1 or 2");
    }
    size_t want = d == 1 ? 1 : 2;
    if (left.layers.size() != want || right.layers.size() != want) {
        raise(ErrorCode::InvalidModel, "model must carry " + std::to_string(want) +
                                           " chart layer(s) per station for d = " + std::to_string(d));
    }
}

const Chart &RegionModelPair::chart(Side side, const std::vector<double> &r) const {
    const StationModel &st = side == Side::Left ? left : right;
    if (st.layers.size() == 1) {
        return st.layers[0];
    }
    if (r.size() < 2) {
        raise(ErrorCode::DomainError, "model with d = 2 needs two r coordinates");
    }
    return st.layers[r[1] < 0.5 ? 0 : 1];
}

OutcomeCell evaluate(const RegionModelPair &model, Side side, double setting, const HiddenVars &hv) {
    if (hv.r.empty() || hv.r[0] < 0 || hv.r[0] >= 1) {
        raise(ErrorCode::DomainError, "hidden variable r[0] must lie in [0, 1)");
    }
    double x = side == Side::Left ? reduce_angle(hv.theta - setting) : reduce_angle(hv.theta + setting);
    return model.chart(side, hv.r).cell_at(x, hv.r[0]);
}

// ---- serialization ----------------------------------------------------

static std::string fmt12(double v) {
    if (v == 0) {
        v = 0;  // normalize -0
    }
    char buf[40];
    snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

static std::string side_name(Side side, int layer, int d) {
    std::string base = side == Side::Left ? "left" : "right";
    if (d > 1) {
        base += ":" + std::to_string(layer);
    }
    return base;
}

std::string serialize_model(const RegionModelPair &model) {
    model.validate_shape();
    std::string out = "# franson region model\nversion 1\nd " + std::to_string(model.d) + "\n";
    for (const StationModel *st : {&model.left, &model.right}) {
        for (size_t layer = 0; layer < st->layers.size(); layer++) {
            for (int c = 0; c < 4; c++) {
                auto prims = st->layers[layer].cells()[c];
                std::sort(prims.begin(), prims.end(), [](const Primitive &a, const Primitive &b) {
                    if (a.x0 != b.x0) {
                        return a.x0 < b.x0;
                    }
                    double mida = 0.5 * (a.x0 + a.x1), midb = 0.5 * (b.x0 + b.x1);
                    return a.lo.eval(mida) < b.lo.eval(midb);
                });
                for (const auto &p : prims) {
                    out += side_name(st->side, (int)layer, model.d);
                    out += ' ';
                    out += CELL_ORDER[c].str();
                    out += p.kind == Primitive::Kind::Rect ? " rect" : " curveband";
                    for (double v : {p.x0, p.x1, p.lo.c, p.lo.a, p.lo.delta, p.hi.c, p.hi.a, p.hi.delta}) {
                        out += ' ';
                        out += fmt12(v);
                    }
                    out += '\n';
                }
            }
        }
    }
    return out;
}

RegionModelPair parse_model(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool saw_version = false;
    int d = 1;
    // cells[side][layer][cell]
    std::array<std::vector<std::array<std::vector<Primitive>, 4>>, 2> cells;
    auto fail = [&](const std::string &msg) {
        raise(ErrorCode::ParseError, "model line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "version") {
            int v = -1;
            ls >> v;
            if (v != 1) {
                fail("unsupported format version");
            }
            saw_version = true;
            continue;
        }
        if (head == "d") {
            if (!(ls >> d) || d < 1 || d > 2) {
                fail("bad hidden variable dimension");
            }
            continue;
        }
        if (!saw_version) {
            fail("missing version header");
        }
        int side, layer = 0;
        std::string base = head;
        auto colon = head.find(':');
        if (colon != std::string::npos) {
            base = head.substr(0, colon);
            try {
                layer = std::stoi(head.substr(colon + 1));
            } catch (...) {
                fail("bad layer suffix");
            }
        }
        if (base == "left") {
            side = 0;
        } else if (base == "right") {
            side = 1;
        } else {
            fail("unknown side '" + head + "'");
        }
        if (layer < 0 || layer >= (d == 1 ? 1 : 2)) {
            fail("layer out of range for d");
        }
        std::string cell_text, kind_text;
        double v[8];
        if (!(ls >> cell_text >> kind_text >> v[0] >> v[1] >> v[2] >> v[3] >> v[4] >> v[5] >> v[6] >>
              v[7])) {
            fail("expected: side cell kind x0 x1 c_lo A_lo d_lo c_hi A_hi d_hi");
        }
        OutcomeCell cell = OutcomeCell::parse(cell_text);
        Primitive p;
        if (kind_text == "rect") {
            p.kind = Primitive::Kind::Rect;
        } else if (kind_text == "curveband") {
            p.kind = Primitive::Kind::CurveBand;
        } else {
            fail("unknown primitive kind '" + kind_text + "'");
        }
        p.x0 = v[0];
        p.x1 = v[1];
        p.lo = Curve{v[2], v[3], v[4]};
        p.hi = Curve{v[5], v[6], v[7]};
        if (p.kind == Primitive::Kind::Rect && (p.lo.a != 0 || p.hi.a != 0)) {
            fail("rect primitive with nonzero curve amplitude");
        }
        while ((int)cells[side].size() <= layer) {
            cells[side].emplace_back();
        }
        cells[side][layer][cell.index()].push_back(p);
    }
    if (!saw_version) {
        raise(ErrorCode::ParseError, "model file has no version header");
    }
    RegionModelPair model;
    model.d = d;
    size_t want = d == 1 ? 1 : 2;
    for (int side = 0; side < 2; side++) {
        StationModel &st = side == 0 ? model.left : model.right;
        st.side = side == 0 ? Side::Left : Side::Right;
        if (cells[side].size() != want) {
            raise(ErrorCode::ParseError, "model needs " + std::to_string(want) +
                                             " layer(s) per station, found " +
                                             std::to_string(cells[side].size()));
        }
        for (auto &layer_cells : cells[side]) {
            st.layers.emplace_back(std::move(layer_cells));  // Chart ctor validates
        }
    }
    return model;
}

RegionModelPair load_model(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open model file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

void save_model(const RegionModelPair &model, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorCode::IoError, "cannot write model file: " + path);
    }
    out << serialize_model(model);
    if (!out.good()) {
        raise(ErrorCode::IoError, "failed writing model file: " + path);
    }
}

namespace {

Primitive band(double x0, double x1, Curve lo, Curve hi) {
    Primitive p;
    p.kind = (lo.a == 0 && hi.a == 0) ? Primitive::Kind::Rect : Primitive::Kind::CurveBand;
    p.x0 = x0;
    p.x1 = x1;
    p.lo = lo;
    p.hi = hi;
    return p;
}

Chart quadrant_chart() {
    std::array<std::vector<Primitive>, 4> cells;
    Curve zero = Curve::flat(0), half = Curve::flat(0.5), one = Curve::flat(1);
    cells[OutcomeCell{1, Slot::Early}.index()].push_back(band(0, PI, zero, half));
    cells[OutcomeCell{-1, Slot::Early}.index()].push_back(band(PI, TWO_PI, zero, half));
    cells[OutcomeCell{1, Slot::Late}.index()].push_back(band(0, PI, half, one));
    cells[OutcomeCell{-1, Slot::Late}.index()].push_back(band(PI, TWO_PI, half, one));
    return Chart(std::move(cells));
}

}  // namespace

RegionModelPair reference_model() {
    // Half-amplitude boundary curves per column: the sliver rides the full
    // pi/8 sine, the cell boundary above it only half of it, so the two
    // same-sign slabs flanking the boundary keep equal area at every x.
    Curve zero = Curve::flat(0), half = Curve::flat(0.5), one = Curve::flat(1);
    Curve sliver1 = Curve::from_cst(0, PI / 8, 0);        // (pi/8) sin x
    Curve sliver2 = Curve::from_cst(0, -PI / 8, 0);       // (pi/8) sin (x - pi)
    Curve mid_bot1 = Curve::from_cst(0.25, PI / 16, 0);
    Curve mid_bot2 = Curve::from_cst(0.25, -PI / 16, 0);
    Curve base_top1 = Curve::from_cst(0.5, PI / 8, 0);
    Curve base_top2 = Curve::from_cst(0.5, -PI / 8, 0);
    Curve mid_top1 = Curve::from_cst(0.75, PI / 16, 0);
    Curve mid_top2 = Curve::from_cst(0.75, -PI / 16, 0);

    std::array<std::vector<Primitive>, 4> lc;
    int pe = OutcomeCell{1, Slot::Early}.index();
    int ne = OutcomeCell{-1, Slot::Early}.index();
    int pl = OutcomeCell{1, Slot::Late}.index();
    int nl = OutcomeCell{-1, Slot::Late}.index();
    // first column: positive-sign sliver at the bottom, its twin above 1/2
    lc[pe].push_back(band(0, PI, zero, sliver1));
    lc[pl].push_back(band(0, PI, sliver1, mid_bot1));
    lc[nl].push_back(band(0, PI, mid_bot1, half));
    lc[pl].push_back(band(0, PI, half, base_top1));
    lc[pe].push_back(band(0, PI, base_top1, mid_top1));
    lc[ne].push_back(band(0, PI, mid_top1, one));
    // second column: the sliver flips sign along with the phase
    lc[ne].push_back(band(PI, TWO_PI, zero, sliver2));
    lc[pl].push_back(band(PI, TWO_PI, sliver2, mid_bot2));
    lc[nl].push_back(band(PI, TWO_PI, mid_bot2, half));
    lc[nl].push_back(band(PI, TWO_PI, half, base_top2));
    lc[pe].push_back(band(PI, TWO_PI, base_top2, mid_top2));
    lc[ne].push_back(band(PI, TWO_PI, mid_top2, one));

    RegionModelPair model;
    model.left = StationModel{Side::Left, {Chart(std::move(lc))}};
    model.right = StationModel{Side::Right, {quadrant_chart()}};
    model.d = 1;
    return model;
}

RegionModelPair quadrant_model() {
    RegionModelPair model;
    model.left = StationModel{Side::Left, {quadrant_chart()}};
    model.right = StationModel{Side::Right, {quadrant_chart()}};
    model.d = 1;
    return model;
}

}  // namespace franson
