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

#ifndef FRANSON_CORE_SCHEDULE_H_
#define FRANSON_CORE_SCHEDULE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/region_model.h"

namespace franson {

enum class Switching { Static = 0, Slow = 1, Fast = 2 };

Switching parse_switching(const std::string &text);
std::string switching_name(Switching s);

// One station's phase-setting timeline. Slots of fixed length carry iid
// uniform draws over the station's angle list; the draw for a slot comes
// from a counter RNG, so lookups at arbitrary ticks need no materialized
// storage and the schedule is the same however it is traversed. Static mode
// is a single endless slot.
class SettingSchedule {
  public:
    SettingSchedule(uint64_t seed, Side station, Switching mode, int64_t slot_ticks,
                    int n_settings);

    int setting_at(int64_t tick) const;
    int64_t slot_ticks() const {
        return slot_ticks_;
    }
    int n_settings() const {
        return n_settings_;
    }
    Switching mode() const {
        return mode_;
    }

    // Writes `station,slot_start_tick,setting_index` rows covering
    // [0, end_tick). Refuses absurdly long materializations.
    void append_csv(std::string &out, int64_t end_tick) const;

  private:
    uint64_t seed_;
    uint64_t stream_;
    Switching mode_;
    int64_t slot_ticks_;
    int n_settings_;
};

// A schedule read back from settings.csv: explicit slots, uniform length.
struct MaterializedSchedule {
    int64_t slot_ticks = 0;
    std::vector<int> settings;

    int setting_at(int64_t tick) const;
};

// Lookup signature shared by the functional and materialized forms.
using SettingLookup = std::function<int(Side, int64_t)>;

void save_settings_csv(const std::string &path, const SettingSchedule &left,
                       const SettingSchedule &right, int64_t end_tick);
// Returns the two station schedules parsed from a settings.csv file.
std::pair<MaterializedSchedule, MaterializedSchedule> load_settings_csv(const std::string &path);

}  // namespace franson

#endif  // FRANSON_CORE_SCHEDULE_H_
