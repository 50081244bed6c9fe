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

#include "core/validate.h"

#include <cmath>
#include <cstdio>

#include "core/bell_math.h"
#include "core/error.h"
#include "core/quadrature.h"

namespace franson {

bool ValidationReport::passed(double tol_max) const {
    return residual_max <= tol_max;
}

std::string ValidationReport::str() const {
    char buf[512];
    snprintf(buf, sizeof buf,
             "area_max_dev      %.3e\n"
             "residual_max      %.6e\n"
             "residual_rms      %.6e\n"
             "nosignal_max_dev  %.3e\n"
             "chi_only_max_dev  %.3e\n"
             "grid_points       %d\n"
             "quad_tol          %.1e\n",
             area_max_dev, residual_max, residual_rms, nosignal_max_dev, chi_only_max_dev,
             grid_points, quad_tol);
    return buf;
}

void table_residual(const RegionModelPair &model, int grid_points, double quad_tol,
                    double &max_out, double &rms_out) {
    if (grid_points < 1) {
        raise(ErrorCode::DomainError, "residual grid needs at least one point");
    }
    double max_dev = 0, sq_sum = 0;
    for (int k = 0; k < grid_points; k++) {
        double chi = (k + 0.5) * TWO_PI / grid_points;
        JointTable got = joint_table_quadrature(model, chi, 0, quad_tol);
        JointTable want = target_table(chi);
        for (int i = 0; i < 16; i++) {
            double dev = std::fabs(got.p[i] - want.p[i]);
            max_dev = std::max(max_dev, dev);
            sq_sum += dev * dev;
        }
    }
    max_out = max_dev;
    rms_out = std::sqrt(sq_sum / (16.0 * grid_points));
}

ValidationReport validate_model(const RegionModelPair &model, int grid_points, double quad_tol) {
    model.validate_shape();
    ValidationReport rep;
    rep.grid_points = grid_points;
    rep.quad_tol = quad_tol;

    for (const StationModel *st : {&model.left, &model.right}) {
        for (const Chart &chart : st->layers) {
            for (double a : chart.cell_areas()) {
                rep.area_max_dev = std::max(rep.area_max_dev, std::fabs(a - PI / 2));
            }
        }
    }

    table_residual(model, grid_points, quad_tol, rep.residual_max, rep.residual_rms);

    // Single-side marginals must equal the cell areas over 2pi at every
    // setting; probe both stations on a coarser grid.
    int probes = std::min(grid_points, 16);
    for (int k = 0; k < probes; k++) {
        double chi = (k + 0.37) * TWO_PI / probes;
        JointTable table = joint_table_quadrature(model, chi * 0.5, chi * 0.5, quad_tol);
        for (int c = 0; c < 4; c++) {
            for (bool side_left : {true, false}) {
                double expect = 0;
                const StationModel &st = side_left ? model.left : model.right;
                for (const Chart &chart : st.layers) {
                    expect += chart.cell_areas()[c] / TWO_PI / (double)st.layers.size();
                }
                double dev = std::fabs(table.marginal(CELL_ORDER[c], side_left) - expect);
                rep.nosignal_max_dev = std::max(rep.nosignal_max_dev, dev);
            }
        }
    }

    // Joint tables at setting pairs with equal sums must match entrywise.
    const double probes_chi[] = {0.7, 2.9, 4.4};
    const double deltas[] = {0.31, 1.27};
    for (double chi : probes_chi) {
        JointTable base = joint_table_quadrature(model, chi, 0, quad_tol);
        for (double d : deltas) {
            JointTable shifted = joint_table_quadrature(model, chi + d, -d, quad_tol);
            rep.chi_only_max_dev = std::max(rep.chi_only_max_dev, base.max_abs_diff(shifted));
        }
    }
    return rep;
}

}  // namespace franson
