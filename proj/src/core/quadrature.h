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

#ifndef FRANSON_CORE_QUADRATURE_H_
#define FRANSON_CORE_QUADRATURE_H_

#include "core/joint_table.h"
#include "core/region_model.h"

namespace franson {

// Joint outcome-cell probabilities of a model pair at phase settings
// (phi, psi): entry (l, m) is the shared-hidden-variable measure of the set
// where the left chart at x = theta - phi gives cell l and the right chart at
// x = theta + psi gives cell m. Adaptive quadrature over theta, absolute
// tolerance per entry. Throws Convergence naming the worst subinterval if the
// tolerance cannot be met.
JointTable joint_table_quadrature(const RegionModelPair &model, double phi, double psi,
                                  double tol = 1e-9);

// Overlap probability contributed by a single left band against a single
// right band under the same shifts, by the same quadrature.
double band_overlap_quadrature(const Primitive &left_band, const Primitive &right_band,
                               double phi, double psi, double tol = 1e-9);

// The half-chart sine sliver and the complementary half-chart receptor
// rectangle whose isolated overlap follows the closed-form law below. Every
// synthesis seed embeds a congruent pair.
Primitive seed_sliver_band();
Primitive seed_receptor_band();

// Closed form (1/16)(1 - cos chi) for the isolated sliver/receptor overlap.
double sliver_rectangle_overlap(double chi);

// The same quantity by quadrature of the concrete seed pair.
double sliver_rectangle_overlap_quadrature(double chi, double tol = 1e-9);

}  // namespace franson

#endif  // FRANSON_CORE_QUADRATURE_H_
