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

#ifndef FRANSON_CORE_BELL_MATH_H
#define FRANSON_CORE_BELL_MATH_H

#include <functional>
#include <optional>
#include <vector>

#include "core/joint_table.h"

namespace franson {

// Measurement angles for a chained Bell test: n settings per station, plus
// optional filter angles used only by the event-ready selection rule.
struct AngleSet {
    int n = 0;
    std::vector<double> phis;  // left station, reduced to [0, 2pi)
    std::vector<double> psis;  // right station
    std::optional<double> phi0;
    std::optional<double> psi0;

    void validate() const;  // throws DomainError on bad shape
    bool has_filter() const {
        return phi0.has_value() && psi0.has_value();
    }
};

// Probability that the left detector fires with sign l and the right with
// sign m in the same slot (one of the two coincident classes), for local
// phases phi, psi and interference visibility v in [0, 1].
double coincidence_probability(int l, int m, double phi, double psi, double v);

// Probability of one specific mixed-slot outcome (left early right late or
// vice versa, fixed signs): settings drop out entirely.
double noncoincidence_probability(int l, int m);

// Full 16-entry joint table at phase sum chi and unit visibility.
// Same-slot entries pair up to exactly 1/8 so marginals are exact.
JointTable target_table(double chi);

// Correlation E = <l*m> conditioned on coincidence: v*cos(phi+psi).
double conditional_correlation_qm(double phi, double psi, double v);

// Correlation lookup for the chained quantity: E(i, j) for measurement
// settings i, j in [0, n). Empty optional means the estimate is missing.
using CorrelationLookup = std::function<std::optional<double>(int, int)>;

// S_n = sum_{k<n-1} |E(k,k) + E(k+1,k)| + |E(n-1,n-1) - E(0,n-1)|.
// Throws DataError naming the first missing (i, j) pair.
double chained_quantity(const CorrelationLookup &corr, int n);

// Convenience: chained quantity of a full n x n grid (row-major, NaN = missing).
double chained_quantity(const std::vector<double> &grid, int n);

enum class Ensemble {
    PureLL,      // subensemble fixed before the late settings act: bound 2n-2
    Coincident,  // post-selected coincidences: bound 2n-1
};

double lhv_bound(int n, Ensemble ensemble);

// Largest chained quantity quantum mechanics allows: 2n cos(pi/2n).
double qm_max(int n);

// Visibility above which the coincident-ensemble bound is beaten: (2n-1)/(2n cos(pi/2n)).
double visibility_threshold(int n);

// Standard angle pattern phi_j = -(j-1)pi/n, psi_k = (2k-1)pi/(2n), reduced.
// Every chained term then involves cos(pi/2n), so the quantum value is qm_max(n).
AngleSet canonical_angles(int n);

}  // namespace franson

#endif
