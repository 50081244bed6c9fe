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

#ifndef FRANSON_CORE_CELLS_H
#define FRANSON_CORE_CELLS_H

#include <cstdint>
#include <string>

#include "core/error.h"

namespace franson {

// Detection slot within a coincidence window: early (short-short) or late
// (long-long arm of the local interferometer).
enum class Slot : uint8_t { Early = 0, Late = 1 };

// One of the four per-station outcomes: a sign (+1/-1 detector) in a slot.
// The total order used for tables and serialization is +E, -E, +L, -L.
struct OutcomeCell {
    int sign;   // +1 or -1
    Slot slot;

    int index() const {
        return (slot == Slot::Late ? 2 : 0) + (sign < 0 ? 1 : 0);
    }
    static OutcomeCell from_index(int i) {
        if (i < 0 || i > 3) {
            raise(ErrorCode::DomainError, "outcome cell index out of range: " + std::to_string(i));
        }
        return OutcomeCell{(i & 1) ? -1 : +1, (i & 2) ? Slot::Late : Slot::Early};
    }
    bool operator==(const OutcomeCell &other) const {
        return sign == other.sign && slot == other.slot;
    }
    bool operator<(const OutcomeCell &other) const {
        return index() < other.index();
    }
    std::string str() const {
        std::string s(1, sign < 0 ? '-' : '+');
        s += (slot == Slot::Late ? 'L' : 'E');
        return s;
    }
    static OutcomeCell parse(const std::string &text) {
        if (text.size() == 2 && (text[0] == '+' || text[0] == '-') &&
            (text[1] == 'E' || text[1] == 'L')) {
            return OutcomeCell{text[0] == '-' ? -1 : +1, text[1] == 'L' ? Slot::Late : Slot::Early};
        }
        raise(ErrorCode::ParseError, "bad outcome cell '" + text + "' (want +E, -E, +L or -L)");
    }
};

inline const OutcomeCell CELL_ORDER[4] = {
    {+1, Slot::Early},
    {-1, Slot::Early},
    {+1, Slot::Late},
    {-1, Slot::Late},
};

}  // namespace franson

#endif
