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

#ifndef FRANSON_CORE_REGION_MODEL_H
#define FRANSON_CORE_REGION_MODEL_H

#include <array>
#include <string>
#include <vector>

#include "core/angles.h"
#include "core/cells.h"

namespace franson {

// Hidden variables carried by a photon pair: a source phase theta in [0, 2pi)
// and d auxiliary uniforms in [0, 1). Both stations read the same draw.
struct HiddenVars {
    double theta = 0;
    std::vector<double> r{0.0};
};

enum class Side { Left = 0, Right = 1 };

// Boundary curve r(x) = c + a sin(x - delta). Stored canonically as
// c + s sin x + t cos x so that curves equal as functions compare equal.
struct Curve {
    double c = 0, a = 0, delta = 0;

    double eval(double x) const {
        return c + a * std::sin(x - delta);
    }
    double eval_st(double sin_x, double cos_x) const {
        return c + s() * sin_x + t() * cos_x;
    }
    double s() const {
        return a * std::cos(delta);
    }
    double t() const {
        return -a * std::sin(delta);
    }
    bool same_function(const Curve &other, double tol = 1e-12) const;
    // Extrema of eval over [x0, x1] (endpoints and interior critical points).
    double min_on(double x0, double x1) const;
    double max_on(double x0, double x1) const;
    // Exact integral of eval over [x0, x1].
    double integral(double x0, double x1) const;

    static Curve flat(double level) {
        return Curve{level, 0, 0};
    }
    // Build from the canonical form c + s sin x + t cos x.
    static Curve from_cst(double c, double s, double t);
};

// A vertical band of one cell's region: x in [x0, x1), lo(x) <= r < hi(x).
struct Primitive {
    enum class Kind { Rect, CurveBand };
    Kind kind = Kind::Rect;
    double x0 = 0, x1 = 0;
    Curve lo, hi;

    double area() const {
        return hi.integral(x0, x1) - lo.integral(x0, x1);
    }
};

// A chart column as a bottom-to-top stack of cells with the interior
// boundary curves between them (outer bounds 0 and 1 implied). Adjacent
// same-cell slabs are merged.
struct ChartStack {
    double x0 = 0, x1 = 0;
    std::vector<int> slabs;
    std::vector<Curve> interior;  // size slabs.size() - 1
};

// One station chart layer: a partition of [0, 2pi) x [0, 1) into the four
// outcome cells. Construction validates the partition; evaluation is a total
// deterministic function with half-open ties (left-inclusive in x, a point on
// an r-boundary belongs to the region above the curve).
class Chart {
  public:
    Chart() = default;
    // Throws InvalidModel unless the primitives tile the chart and each
    // cell's area is pi/2 within area_tol.
    explicit Chart(std::array<std::vector<Primitive>, 4> cells, double area_tol = 1e-9);

    const std::array<std::vector<Primitive>, 4> &cells() const {
        return cells_;
    }
    OutcomeCell cell_at(double x, double r) const;
    std::array<double, 4> cell_areas() const;

    // The r-intervals occupied by a cell at abscissa x, bottom to top,
    // adjacent slabs merged. Appends (lo, hi) pairs to out.
    void cell_intervals(int cell_index, double x, std::vector<std::pair<double, double>> &out) const;

    // Interior x positions where the active primitive set changes.
    const std::vector<double> &breakpoints() const {
        return breakpoints_;
    }

    // The column decomposition, left to right.
    std::vector<ChartStack> stacks() const;

  private:
    struct Column {
        double x0, x1;
        std::vector<Curve> bounds;  // size slabs+1; bounds[0] = 0, bounds.back() = 1
        std::vector<int> slabs;     // cell index per slab, bottom to top
    };
    const Column &column_at(double x) const;

    std::array<std::vector<Primitive>, 4> cells_;
    std::vector<Column> columns_;
    std::vector<double> breakpoints_;
};

struct StationModel {
    Side side = Side::Left;
    std::vector<Chart> layers;  // one per value of floor(2 r[1]) etc.; d=1 -> one
};

// The full local model: one chart stack per station plus the hidden variable
// dimension d (number of r coordinates; theta is separate).
struct RegionModelPair {
    StationModel left, right;
    int d = 1;

    void validate_shape() const;  // throws InvalidModel on layer/d mismatch
    const Chart &chart(Side side, const std::vector<double> &r) const;
};

// Station response for a hidden-variable draw at a local phase setting.
// The left station reads its chart at x = theta - phi, the right at
// x = theta + psi.
OutcomeCell evaluate(const RegionModelPair &model, Side side, double setting, const HiddenVars &hv);

// The built-in exact model: each left chart column carries a sine sliver of
// amplitude pi/8 feeding quadrant receptors on the right chart, so the joint
// table equals the interference target at every setting pair.
RegionModelPair reference_model();

// Naive fixture: plain quadrant charts on both stations. Valid geometry, but
// far off the target table; kept around as a guaranteed-failing case.
RegionModelPair quadrant_model();

// Text serialization. One primitive per line:
//   side cell kind x0 x1 c_lo A_lo d_lo c_hi A_hi d_hi
// preceded by a header with the format version and d. Deterministic output;
// 12 significant digits round-trip exactly.
std::string serialize_model(const RegionModelPair &model);
RegionModelPair parse_model(const std::string &text);
RegionModelPair load_model(const std::string &path);
void save_model(const RegionModelPair &model, const std::string &path);

}  // namespace franson

#endif
