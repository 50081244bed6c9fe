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

#ifndef FRANSON_CORE_JOINT_TABLE_H
#define FRANSON_CORE_JOINT_TABLE_H

#include <array>
#include <string>

#include "core/cells.h"

namespace franson {

// Joint probability over the 4x4 outcome cells of the two stations.
// Rows index the left station cell, columns the right, in CELL_ORDER.
struct JointTable {
    std::array<double, 16> p{};

    double &at(OutcomeCell left, OutcomeCell right) {
        return p[left.index() * 4 + right.index()];
    }
    double at(OutcomeCell left, OutcomeCell right) const {
        return p[left.index() * 4 + right.index()];
    }
    double sum() const;
    // Marginal probability of one station's cell (left if side_left).
    double marginal(OutcomeCell cell, bool side_left) const;
    // Largest absolute entry difference against another table.
    double max_abs_diff(const JointTable &other) const;
    double rms_diff(const JointTable &other) const;
    // Throws if entries are outside [0,1] or the sum strays from 1.
    void check_normalized(double tol = 1e-12) const;
    std::string str() const;
};

}  // namespace franson

#endif
