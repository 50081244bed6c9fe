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

#include "core/joint_table.h"

#include <cmath>
#include <cstdio>

#include "core/error.h"

namespace franson {

double JointTable::sum() const {
    double s = 0;
    for (double v : p) {
        s += v;
    }
    return s;
}

double JointTable::marginal(OutcomeCell cell, bool side_left) const {
    double s = 0;
    for (int k = 0; k < 4; k++) {
        s += side_left ? p[cell.index() * 4 + k] : p[k * 4 + cell.index()];
    }
    return s;
}

double JointTable::max_abs_diff(const JointTable &other) const {
    double worst = 0;
    for (size_t k = 0; k < p.size(); k++) {
        worst = std::max(worst, std::fabs(p[k] - other.p[k]));
    }
    return worst;
}

double JointTable::rms_diff(const JointTable &other) const {
    double s = 0;
    for (size_t k = 0; k < p.size(); k++) {
        double d = p[k] - other.p[k];
        s += d * d;
    }
    return std::sqrt(s / p.size());
}

void JointTable::check_normalized(double tol) const {
    for (size_t k = 0; k < p.size(); k++) {
        if (!(p[k] >= -tol && p[k] <= 1 + tol)) {
            raise(ErrorCode::DomainError, "joint table entry " + std::to_string(k) + " out of range");
        }
    }
    if (std::fabs(sum() - 1.0) > tol) {
        raise(ErrorCode::DomainError, "joint table sum deviates from 1 beyond tolerance");
    }
}

std::string JointTable::str() const {
    std::string out = "L\\R      +E        -E        +L        -L\n";
    char buf[64];
    for (int i = 0; i < 4; i++) {
        out += CELL_ORDER[i].str();
        for (int j = 0; j < 4; j++) {
            snprintf(buf, sizeof buf, "  %.6f", p[i * 4 + j]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace franson
