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

#include "core/bell_math.h"

#include <cmath>

#include "core/angles.h"
#include "core/error.h"

namespace franson {

static void check_sign(int s, const char *name) {
    if (s != 1 && s != -1) {
        raise(ErrorCode::DomainError, std::string(name) + " must be +1 or -1");
    }
}

void AngleSet::validate() const {
    if (n < 2) {
        raise(ErrorCode::DomainError, "angle set needs n >= 2, got " + std::to_string(n));
    }
    if ((int)phis.size() != n || (int)psis.size() != n) {
        raise(ErrorCode::DomainError, "angle list lengths must equal n");
    }
    if (phi0.has_value() != psi0.has_value()) {
        raise(ErrorCode::DomainError, "filter angles must be given for both stations or neither");
    }
}

double coincidence_probability(int l, int m, double phi, double psi, double v) {
    check_sign(l, "l");
    check_sign(m, "m");
    if (!(v >= 0.0 && v <= 1.0)) {
        raise(ErrorCode::DomainError, "visibility must lie in [0, 1]");
    }
    return (1.0 + v * l * m * std::cos(phi + psi)) / 8.0;
}

double noncoincidence_probability(int l, int m) {
    check_sign(l, "l");
    check_sign(m, "m");
    return 1.0 / 16.0;
}

JointTable target_table(double chi) {
    double c = std::cos(chi);
    // Computing the anti-correlated entry as the exact complement of the
    // correlated one keeps each same-slot pair summing to exactly 1/8, so
    // every marginal is exactly 1/4 regardless of chi.
    double agree = (1.0 + c) / 16.0;
    double disagree = 0.125 - agree;
    JointTable t;
    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < 4; j++) {
            OutcomeCell a = CELL_ORDER[i], b = CELL_ORDER[j];
            if (a.slot == b.slot) {
                t.p[i * 4 + j] = (a.sign == b.sign) ? agree : disagree;
            } else {
                t.p[i * 4 + j] = 1.0 / 16.0;
            }
        }
    }
    return t;
}

double conditional_correlation_qm(double phi, double psi, double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        raise(ErrorCode::DomainError, "visibility must lie in [0, 1]");
    }
    return v * std::cos(phi + psi);
}

double chained_quantity(const CorrelationLookup &corr, int n) {
    if (n < 2) {
        raise(ErrorCode::DomainError, "chained quantity needs n >= 2");
    }
    auto fetch = [&](int i, int j) {
        auto e = corr(i, j);
        if (!e.has_value()) {
            raise(ErrorCode::DataError, "missing correlation estimate at settings (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
        }
        return *e;
    };
    double total = 0;
    for (int k = 0; k + 1 < n; k++) {
        total += std::fabs(fetch(k, k) + fetch(k + 1, k));
    }
    total += std::fabs(fetch(n - 1, n - 1) - fetch(0, n - 1));
    return total;
}

double chained_quantity(const std::vector<double> &grid, int n) {
    if ((int)grid.size() != n * n) {
        raise(ErrorCode::DomainError, "correlation grid must be n*n");
    }
    return chained_quantity(
        [&](int i, int j) -> std::optional<double> {
            double e = grid[i * n + j];
            if (std::isnan(e)) {
                return std::nullopt;
            }
            return e;
        },
        n);
}

double lhv_bound(int n, Ensemble ensemble) {
    if (n < 2) {
        raise(ErrorCode::DomainError, "chained bound needs n >= 2");
    }
    switch (ensemble) {
        case Ensemble::PureLL:
            return 2.0 * n - 2.0;
        case Ensemble::Coincident:
            return 2.0 * n - 1.0;
    }
    raise(ErrorCode::DomainError, "unknown ensemble");
}

double qm_max(int n) {
    if (n < 2) {
        raise(ErrorCode::DomainError, "qm_max needs n >= 2");
    }
    return 2.0 * n * std::cos(PI / (2 * n));
}

double visibility_threshold(int n) {
    if (n < 2) {
        raise(ErrorCode::DomainError, "visibility threshold needs n >= 2");
    }
    return (2.0 * n - 1.0) / qm_max(n);
}

AngleSet canonical_angles(int n) {
    if (n < 2) {
        raise(ErrorCode::DomainError, "canonical angles need n >= 2");
    }
    AngleSet a;
    a.n = n;
    for (int j = 1; j <= n; j++) {
        a.phis.push_back(reduce_angle(-(j - 1) * PI / n));
        a.psis.push_back(reduce_angle((2 * j - 1) * PI / (2 * n)));
    }
    return a;
}

}  // namespace franson
