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

#include "core/quadrature.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "core/angles.h"
#include "core/error.h"

namespace franson {

namespace {

// The partition is half-open in x, so integrand values can jump exactly at a
// mapped breakpoint. Segments are shrunk by this margin on both ends so every
// sample sees a single column configuration; the omitted strips contribute
// far less than the quadrature tolerance.
constexpr double EDGE_MARGIN = 1e-12;
constexpr int MAX_DEPTH = 50;

using VectorFn = std::function<void(double, double *)>;

struct Samples {
    std::vector<double> f;  // n values per node
};

void simpson_sum(const double *fa, const double *fm, const double *fb, double h, int n,
                 double *out) {
    for (int i = 0; i < n; i++) {
        out[i] = h / 6 * (fa[i] + 4 * fm[i] + fb[i]);
    }
}

struct AdaptiveState {
    const VectorFn &fn;
    int n;
    double *total;
    double worst_a = 0, worst_b = 0, worst_err = 0;
};

void adapt(AdaptiveState &st, double a, double b, const double *fa, const double *fm,
           const double *fb, const double *whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    std::vector<double> flm(st.n), frm(st.n), left(st.n), right(st.n);
    st.fn(lm, flm.data());
    st.fn(rm, frm.data());
    simpson_sum(fa, flm.data(), fm, m - a, st.n, left.data());
    simpson_sum(fm, frm.data(), fb, b - m, st.n, right.data());
    double err = 0;
    for (int i = 0; i < st.n; i++) {
        err = std::max(err, std::fabs(left[i] + right[i] - whole[i]));
    }
    if (err <= 15 * tol) {
        for (int i = 0; i < st.n; i++) {
            st.total[i] += left[i] + right[i] + (left[i] + right[i] - whole[i]) / 15;
        }
        return;
    }
    if (depth >= MAX_DEPTH || b - a < 1e-14) {
        if (err > st.worst_err) {
            st.worst_err = err;
            st.worst_a = a;
            st.worst_b = b;
        }
        char buf[160];
        snprintf(buf, sizeof buf,
                 "quadrature did not converge below tolerance; worst subinterval [%.12g, %.12g] "
                 "with error estimate %.3g",
                 st.worst_a, st.worst_b, st.worst_err);
        raise(ErrorCode::Convergence, buf);
    }
    adapt(st, a, m, fa, flm.data(), fm, left.data(), tol / 2, depth + 1);
    adapt(st, m, b, fm, frm.data(), fb, right.data(), tol / 2, depth + 1);
}

// Integrates fn (writing n values per call) over the union of [splits[k],
// splits[k+1]] segments, each shrunk by EDGE_MARGIN. abs_tol bounds the
// total error per component.
std::vector<double> integrate_segments(const VectorFn &fn, int n, const std::vector<double> &splits,
                                       double abs_tol) {
    std::vector<double> total(n, 0.0);
    double span = splits.back() - splits.front();
    for (size_t k = 0; k + 1 < splits.size(); k++) {
        double a = splits[k] + EDGE_MARGIN, b = splits[k + 1] - EDGE_MARGIN;
        if (b <= a) {
            continue;
        }
        double m = 0.5 * (a + b);
        std::vector<double> fa(n), fm(n), fb(n), whole(n);
        fn(a, fa.data());
        fn(m, fm.data());
        fn(b, fb.data());
        simpson_sum(fa.data(), fm.data(), fb.data(), b - a, n, whole.data());
        AdaptiveState st{fn, n, total.data()};
        double tol = abs_tol * (splits[k + 1] - splits[k]) / span;
        adapt(st, a, b, fa.data(), fm.data(), fb.data(), whole.data(), tol, 0);
    }
    return total;
}

void add_mapped_splits(const Chart &chart, double shift, std::vector<double> &splits) {
    // x = reduce(theta + shift) crosses chart breakpoints (and the wrap point
    // x = 0) at theta = reduce(b - shift)
    splits.push_back(reduce_angle(-shift));
    for (double b : chart.breakpoints()) {
        splits.push_back(reduce_angle(b - shift));
    }
}

std::vector<double> finish_splits(std::vector<double> splits) {
    splits.push_back(0);
    splits.push_back(TWO_PI);
    std::sort(splits.begin(), splits.end());
    // Splits closer together than the shrink margin collapse so that every
    // residual jump sits within the excluded strip of some segment end.
    splits.erase(std::unique(splits.begin(), splits.end(),
                             [](double a, double b) { return std::fabs(a - b) < EDGE_MARGIN; }),
                 splits.end());
    if (splits.back() < TWO_PI) {
        splits.push_back(TWO_PI);
    }
    return splits;
}

double interval_overlap(const std::vector<std::pair<double, double>> &a,
                        const std::vector<std::pair<double, double>> &b) {
    double total = 0;
    for (const auto &ia : a) {
        for (const auto &ib : b) {
            total += std::max(0.0, std::min(ia.second, ib.second) - std::max(ia.first, ib.first));
        }
    }
    return total;
}

// One layer pair's 16-entry integrand.
struct LayerIntegrand {
    const Chart *left;
    const Chart *right;
    double phi, psi;
    mutable std::array<std::vector<std::pair<double, double>>, 4> li, ri;

    void operator()(double theta, double *out) const {
        double xl = reduce_angle(theta - phi);
        double xr = reduce_angle(theta + psi);
        for (int c = 0; c < 4; c++) {
            li[c].clear();
            ri[c].clear();
            left->cell_intervals(c, xl, li[c]);
            right->cell_intervals(c, xr, ri[c]);
        }
        for (int l = 0; l < 4; l++) {
            for (int m = 0; m < 4; m++) {
                out[l * 4 + m] = interval_overlap(li[l], ri[m]);
            }
        }
    }
};

}  // namespace

JointTable joint_table_quadrature(const RegionModelPair &model, double phi, double psi,
                                  double tol) {
    model.validate_shape();
    if (tol <= 0) {
        raise(ErrorCode::DomainError, "quadrature tolerance must be positive");
    }
    size_t layers = model.left.layers.size();
    JointTable table;
    table.p.fill(0.0);
    for (size_t k = 0; k < layers; k++) {
        LayerIntegrand ig{&model.left.layers[k], &model.right.layers[k], phi, psi, {}, {}};
        std::vector<double> splits;
        add_mapped_splits(*ig.left, -phi, splits);
        add_mapped_splits(*ig.right, psi, splits);
        splits = finish_splits(std::move(splits));
        auto fn = [&ig](double theta, double *out) { ig(theta, out); };
        auto sums = integrate_segments(fn, 16, splits, tol * TWO_PI * 0.5);
        for (int i = 0; i < 16; i++) {
            table.p[i] += sums[i] / (TWO_PI * (double)layers);
        }
    }
    return table;
}

double band_overlap_quadrature(const Primitive &left_band, const Primitive &right_band, double phi,
                               double psi, double tol) {
    auto fn = [&](double theta, double *out) {
        double xl = reduce_angle(theta - phi);
        double xr = reduce_angle(theta + psi);
        double len = 0;
        if (xl >= left_band.x0 && xl < left_band.x1 && xr >= right_band.x0 && xr < right_band.x1) {
            double lo = std::max(left_band.lo.eval(xl), right_band.lo.eval(xr));
            double hi = std::min(left_band.hi.eval(xl), right_band.hi.eval(xr));
            len = std::max(0.0, hi - lo);
        }
        out[0] = len;
    };
    std::vector<double> splits{reduce_angle(left_band.x0 + phi), reduce_angle(left_band.x1 + phi),
                               reduce_angle(right_band.x0 - psi), reduce_angle(right_band.x1 - psi)};
    splits = finish_splits(std::move(splits));
    auto sums = integrate_segments(fn, 1, splits, tol * TWO_PI * 0.5);
    return sums[0] / TWO_PI;
}

Primitive seed_sliver_band() {
    Primitive p;
    p.kind = Primitive::Kind::CurveBand;
    p.x0 = 0;
    p.x1 = PI;
    p.lo = Curve::flat(0);
    p.hi = Curve{0, PI / 8, 0};
    return p;
}

Primitive seed_receptor_band() {
    Primitive p;
    p.kind = Primitive::Kind::Rect;
    p.x0 = PI;
    p.x1 = TWO_PI;
    p.lo = Curve::flat(0);
    p.hi = Curve::flat(0.5);
    return p;
}

double sliver_rectangle_overlap(double chi) {
    return (1 - std::cos(chi)) / 16;
}

double sliver_rectangle_overlap_quadrature(double chi, double tol) {
    return band_overlap_quadrature(seed_sliver_band(), seed_receptor_band(), chi, 0, tol);
}

}  // namespace franson
