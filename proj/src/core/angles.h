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

#ifndef FRANSON_CORE_ANGLES_H
#define FRANSON_CORE_ANGLES_H

#include <cmath>
#include <numbers>

namespace franson {

constexpr double PI = std::numbers::pi;
constexpr double TWO_PI = 2 * std::numbers::pi;

// Reduce an angle to [0, 2pi). fmod is exact, so reducing an already reduced
// value is the identity and the result never touches 2pi itself.
inline double reduce_angle(double x) {
    double r = std::fmod(x, TWO_PI);
    if (r < 0) {
        r += TWO_PI;
    }
    if (r >= TWO_PI) {
        r = 0;  // r == 2pi can only appear through the += above rounding up
    }
    return r;
}

// Printing convention: angles are stored in [0, 2pi) but reported symmetric
// about zero, so 3pi/2 prints as -pi/2.
inline double signed_angle(double reduced) {
    return reduced > PI ? reduced - TWO_PI : reduced;
}

}  // namespace franson

#endif
