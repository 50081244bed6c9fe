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

#ifndef FRANSON_CORE_VALIDATE_H_
#define FRANSON_CORE_VALIDATE_H_

#include <string>

#include "core/region_model.h"

namespace franson {

// Outcome of checking a model pair against the interference contract. All
// deviations are absolute. The chi grid is offset by half a step so that no
// probe sits exactly on a region-corner alignment.
struct ValidationReport {
    double area_max_dev = 0;      // per-cell area vs pi/2, both stations
    double residual_max = 0;      // joint table vs target over the chi grid
    double residual_rms = 0;
    double nosignal_max_dev = 0;  // single-side marginals vs cell area / 2pi
    double chi_only_max_dev = 0;  // joint at (phi, psi) vs (phi + d, psi - d)
    int grid_points = 0;
    double quad_tol = 0;

    bool passed(double tol_max = 5e-3) const;
    std::string str() const;
};

// Default chi-grid residual used by both validation and synthesis descent:
// max and RMS deviation of the model's joint table from the target over
// grid_points offset-uniform chi values.
void table_residual(const RegionModelPair &model, int grid_points, double quad_tol,
                    double &max_out, double &rms_out);

ValidationReport validate_model(const RegionModelPair &model, int grid_points = 64,
                                double quad_tol = 1e-9);

}  // namespace franson

#endif  // FRANSON_CORE_VALIDATE_H_
