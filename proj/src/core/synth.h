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

#ifndef FRANSON_CORE_SYNTH_H_
#define FRANSON_CORE_SYNTH_H_

#include <cstdint>
#include <string>
#include <utility>

#include "core/region_model.h"

namespace franson {

struct SynthesisOptions {
    int grid = 64;              // gating chi grid (offset-uniform points)
    int descent_grid = 16;      // cheaper grid driving the descent objective
    double tol_max = 5e-3;      // max-norm acceptance gate
    long long budget = 2000;    // candidate evaluations per dimension attempt
    uint64_t rng_seed = 1;
    double descent_quad_tol = 1e-7;
    double gate_quad_tol = 1e-9;
};

struct SynthesisResult {
    RegionModelPair model;
    double residual_max = 0;  // computed exactly as validation computes them
    double residual_rms = 0;
    long long iterations = 0;  // candidate evaluations spent
    uint64_t seed = 0;
    bool succeeded = false;
    bool used_fallback = false;  // search re-ran with a second r coordinate
    // diagnostics for failed runs: the worst table entry and where
    std::string worst_entry;
    double worst_chi = 0;
    double worst_dev = 0;
};

// Locates the embedded sliver/receptor pair a seed must carry: a half-chart
// sine sliver of amplitude pi/8 in one station and a rectangle of height at
// least pi/8 over the complementary half in the other station's
// opposite-sign same-slot cell. Throws InvalidModel when absent. Returned as
// (sliver, receptor).
std::pair<Primitive, Primitive> find_seed_pair(const RegionModelPair &seed);

// Refines the free boundary curves of the seed layout until the joint table
// matches the target within options.tol_max (max norm over the gating grid),
// keeping partition and per-cell areas exact on every candidate. Curves whose
// sinusoidal amplitude is pi/8 in the seed are frozen. Deterministic given
// options.rng_seed. If the search fails within budget it re-runs once with a
// second hidden coordinate (two chart layers per station) and flags that.
SynthesisResult synthesize(const RegionModelPair &seed, const SynthesisOptions &options = {});

}  // namespace franson

#endif  // FRANSON_CORE_SYNTH_H_
