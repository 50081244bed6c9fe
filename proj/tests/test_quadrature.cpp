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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "core/angles.h"
#include "core/bell_math.h"
#include "core/error.h"
#include "core/quadrature.h"
#include "core/region_model.h"
#include "core/rng.h"
#include "core/validate.h"
#include "doctest.h"

using namespace franson;

namespace {

// Monte Carlo estimate of the joint cell distribution for shared uniform
// hidden variables, the statistical oracle for the quadrature.
JointTable mc_joint(const RegionModelPair &model, double phi, double psi, long long samples,
                    uint64_t seed) {
    CounterRng rng(seed, 42);
    std::array<long long, 16> counts{};
    for (long long i = 0; i < samples; i++) {
        HiddenVars hv{rng.uniform() * TWO_PI, {rng.uniform()}};
        OutcomeCell l = evaluate(model, Side::Left, phi, hv);
        OutcomeCell r = evaluate(model, Side::Right, psi, hv);
        counts[l.index() * 4 + r.index()]++;
    }
    JointTable t;
    for (int i = 0; i < 16; i++) {
        t.p[i] = double(counts[i]) / double(samples);
    }
    return t;
}

Primitive flat_band(double x0, double x1, double lo, double hi) {
    Primitive p;
    p.kind = Primitive::Kind::Rect;
    p.x0 = x0;
    p.x1 = x1;
    p.lo = Curve::flat(lo);
    p.hi = Curve::flat(hi);
    return p;
}

}  // namespace

TEST_CASE("joint table of the exact model hits the closed form") {
    RegionModelPair m = reference_model();
    OutcomeCell pe{+1, Slot::Early};
    OutcomeCell pl{+1, Slot::Late}, ml{-1, Slot::Late};

    // chi = pi/2 kills the fringe: every same-slot cell sits at 1/16.
    JointTable t = joint_table_quadrature(m, PI / 4, PI / 4);
    CHECK(t.at(pe, pe) == doctest::Approx(0.0625).epsilon(1e-7));
    CHECK(t.at(pl, ml) == doctest::Approx(0.0625).epsilon(1e-7));

    for (double chi : {0.0, 0.3, PI / 2, 2.5, PI}) {
        double phi = 0.4 * chi, psi = 0.6 * chi;
        JointTable got = joint_table_quadrature(m, phi, psi);
        JointTable want = target_table(chi);
        CAPTURE(chi);
        CHECK(got.max_abs_diff(want) < 1e-7);
        CHECK(std::fabs(got.sum() - 1.0) < 1e-7);
    }
}

TEST_CASE("quadrature agrees with a large Monte Carlo sample") {
    RegionModelPair m = reference_model();

    // Large single-point check at chi = pi/2.
    long long n = 10'000'000;
    JointTable mc = mc_joint(m, PI / 3, PI / 2 - PI / 3, n, 101);
    OutcomeCell pe{+1, Slot::Early};
    double p = joint_table_quadrature(m, PI / 3, PI / 2 - PI / 3).at(pe, pe);
    CHECK(p == doctest::Approx(0.0625).epsilon(1e-7));
    double sigma = std::sqrt(p * (1 - p) / double(n));
    CHECK(std::fabs(mc.at(pe, pe) - p) < 5 * sigma);

    // Full-table checks at random settings.
    CounterRng rng(55, 1);
    for (int trial = 0; trial < 3; trial++) {
        double phi = rng.uniform() * TWO_PI;
        double psi = rng.uniform() * TWO_PI;
        long long samples = 1'000'000;
        JointTable quad = joint_table_quadrature(m, phi, psi);
        JointTable sampled = mc_joint(m, phi, psi, samples, 200 + trial);
        for (int i = 0; i < 16; i++) {
            double q = quad.p[i];
            double s = std::sqrt(std::max(q * (1 - q), 1e-12) / double(samples));
            CAPTURE(trial);
            CAPTURE(i);
            CHECK(std::fabs(sampled.p[i] - q) < 5 * s);
        }
    }
}

TEST_CASE("joint table depends on the phases only through their sum") {
    RegionModelPair m = reference_model();
    CounterRng rng(77, 2);
    for (int trial = 0; trial < 8; trial++) {
        double phi = rng.uniform() * TWO_PI;
        double psi = rng.uniform() * TWO_PI;
        double shift = (rng.uniform() - 0.5) * 3.0;
        JointTable a = joint_table_quadrature(m, phi, psi);
        JointTable b = joint_table_quadrature(m, phi + shift, psi - shift);
        CAPTURE(trial);
        CHECK(a.max_abs_diff(b) < 1e-7);
    }
}

TEST_CASE("isolated sliver against its receptor follows the fringe law") {
    int grid = 256;
    for (int i = 0; i < grid; i++) {
        double chi = (i + 0.5) * TWO_PI / grid;
        double got = sliver_rectangle_overlap_quadrature(chi);
        double want = sliver_rectangle_overlap(chi);
        CAPTURE(chi);
        CHECK(std::fabs(want - (1.0 - std::cos(chi)) / 16.0) < 1e-15);
        CHECK(std::fabs(got - want) <= 1e-6);
    }
}

TEST_CASE("band overlap has simple closed forms for rectangles") {
    // Full-height arcs: overlap is arc intersection over 2 pi times r overlap.
    Primitive left = flat_band(0, PI, 0.0, 0.5);
    Primitive right = flat_band(0, PI, 0.25, 0.75);
    CHECK(band_overlap_quadrature(left, right, 0, 0) == doctest::Approx(0.125).epsilon(1e-7));
    // Shifting the left setting by pi/2 halves the arc intersection.
    CHECK(band_overlap_quadrature(left, right, PI / 2, 0) ==
          doctest::Approx(0.0625).epsilon(1e-6));
    // Disjoint r bands never overlap.
    Primitive top = flat_band(0, TWO_PI, 0.6, 0.8);
    CHECK(band_overlap_quadrature(left, top, 0, 0) == doctest::Approx(0.0).epsilon(1e-9));
    // Opposite arcs at zero shift.
    Primitive other = flat_band(PI, TWO_PI, 0.0, 0.5);
    CHECK(band_overlap_quadrature(left, other, 0, 0) == doctest::Approx(0.0).epsilon(1e-9));

    // The seed pair reproduces the fringe law through the generic entry too.
    double chi = 1.3;
    double via_bands =
        band_overlap_quadrature(seed_sliver_band(), seed_receptor_band(), chi, 0.0);
    CHECK(via_bands == doctest::Approx(sliver_rectangle_overlap(chi)).epsilon(1e-6));
}

TEST_CASE("validation report for the exact model") {
    ValidationReport rep = validate_model(reference_model());
    CHECK(rep.area_max_dev < 1e-12);
    CHECK(rep.residual_max < 1e-9);
    CHECK(rep.residual_rms <= rep.residual_max);
    CHECK(rep.nosignal_max_dev < 1e-9);
    CHECK(rep.chi_only_max_dev < 1e-9);
    CHECK(rep.grid_points == 64);
    CHECK(rep.passed());
    CHECK(rep.str().find("residual") != std::string::npos);
}

TEST_CASE("validation flags the naive quadrant model") {
    ValidationReport rep = validate_model(quadrant_model());
    // No sign correlation at all: the fringe residual is macroscopic.
    CHECK(rep.residual_max > 0.1);
    CHECK_FALSE(rep.passed());
    // Yet the dull invariants still hold: areas and marginals are fine.
    CHECK(rep.area_max_dev < 1e-12);
    CHECK(rep.nosignal_max_dev < 1e-9);
    CHECK(rep.chi_only_max_dev < 1e-9);
}

TEST_CASE("table residual matches the validation residual") {
    double max_dev = 0, rms = 0;
    table_residual(reference_model(), 64, 1e-9, max_dev, rms);
    ValidationReport rep = validate_model(reference_model(), 64, 1e-9);
    CHECK(max_dev == rep.residual_max);
    CHECK(rms == rep.residual_rms);

    // Coarser grids still catch the quadrant model.
    table_residual(quadrant_model(), 16, 1e-7, max_dev, rms);
    CHECK(max_dev > 0.1);
}
