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

#include "core/schedule.h"

#include <fstream>
#include <sstream>

#include "core/error.h"
#include "core/rng.h"

namespace franson {

namespace {
// Stream ids reserved for the two station schedules; the simulator uses
// higher stream numbers for its own substreams.
constexpr uint64_t SCHEDULE_STREAM_LEFT = 1;
constexpr uint64_t SCHEDULE_STREAM_RIGHT = 2;
constexpr int64_t MAX_MATERIALIZED_SLOTS = 20'000'000;
}  // namespace

Switching parse_switching(const std::string &text) {
    if (text == "static") {
        return Switching::Static;
    }
    if (text == "slow") {
        return Switching::Slow;
    }
    if (text == "fast") {
        return Switching::Fast;
    }
    raise(ErrorCode::InvalidConfig, "unknown switching mode '" + text + "'");
}

std::string switching_name(Switching s) {
    switch (s) {
        case Switching::Static:
            return "static";
        case Switching::Slow:
            return "slow";
        default:
            return "fast";
    }
}

SettingSchedule::SettingSchedule(uint64_t seed, Side station, Switching mode, int64_t slot_ticks,
                                 int n_settings)
    : seed_(seed),
      stream_(station == Side::Left ? SCHEDULE_STREAM_LEFT : SCHEDULE_STREAM_RIGHT),
      mode_(mode),
      slot_ticks_(slot_ticks),
      n_settings_(n_settings) {
    if (n_settings < 1) {
        raise(ErrorCode::InvalidConfig, "schedule needs a non-empty angle list");
    }
    if (mode != Switching::Static && slot_ticks < 1) {
        raise(ErrorCode::InvalidConfig, "schedule slot length must be positive");
    }
}

int SettingSchedule::setting_at(int64_t tick) const {
    if (tick < 0) {
        raise(ErrorCode::DomainError, "schedule queried before the run start");
    }
    uint64_t slot = mode_ == Switching::Static ? 0 : (uint64_t)(tick / slot_ticks_);
    return (int)index_at(seed_, stream_, slot, (uint64_t)n_settings_);
}

void SettingSchedule::append_csv(std::string &out, int64_t end_tick) const {
    const char *name = stream_ == SCHEDULE_STREAM_LEFT ? "L" : "R";
    if (mode_ == Switching::Static) {
        out += name;
        out += ",0,";
        out += std::to_string(setting_at(0));
        out += '\n';
        return;
    }
    int64_t slots = (end_tick + slot_ticks_ - 1) / slot_ticks_;
    if (slots > MAX_MATERIALIZED_SLOTS) {
        raise(ErrorCode::IoError,
              "settings.csv would need " + std::to_string(slots) +
                  " slots; this run is too long to materialize, use the in-memory pipeline");
    }
    for (int64_t s = 0; s < slots; s++) {
        out += name;
        out += ',';
        out += std::to_string(s * slot_ticks_);
        out += ',';
        out += std::to_string(setting_at(s * slot_ticks_));
        out += '\n';
    }
}

int MaterializedSchedule::setting_at(int64_t tick) const {
    if (tick < 0) {
        raise(ErrorCode::DomainError, "schedule queried before the run start");
    }
    if (settings.empty()) {
        raise(ErrorCode::DataError, "empty schedule");
    }
    if (slot_ticks == 0) {
        return settings[0];  // single endless slot
    }
    int64_t slot = tick / slot_ticks;
    if (slot >= (int64_t)settings.size()) {
        raise(ErrorCode::DataError, "schedule does not cover tick " + std::to_string(tick));
    }
    return settings[(size_t)slot];
}

void save_settings_csv(const std::string &path, const SettingSchedule &left,
                       const SettingSchedule &right, int64_t end_tick) {
    std::string out = "station,slot_start_tick,setting_index\n";
    left.append_csv(out, end_tick);
    right.append_csv(out, end_tick);
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        raise(ErrorCode::IoError, "cannot write settings file: " + path);
    }
    f << out;
    if (!f.good()) {
        raise(ErrorCode::IoError, "failed writing settings file: " + path);
    }
}

std::pair<MaterializedSchedule, MaterializedSchedule> load_settings_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open settings file: " + path);
    }
    MaterializedSchedule left, right;
    std::vector<int64_t> starts_left, starts_right;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty() || line == "station,slot_start_tick,setting_index") {
            continue;
        }
        std::istringstream ls(line);
        std::string station, start_text, idx_text;
        if (!std::getline(ls, station, ',') || !std::getline(ls, start_text, ',') ||
            !std::getline(ls, idx_text)) {
            raise(ErrorCode::ParseError, "settings line " + std::to_string(lineno) + ": bad row");
        }
        int64_t start;
        int idx;
        try {
            start = std::stoll(start_text);
            idx = std::stoi(idx_text);
        } catch (...) {
            raise(ErrorCode::ParseError,
                  "settings line " + std::to_string(lineno) + ": bad number");
        }
        if (station == "L") {
            starts_left.push_back(start);
            left.settings.push_back(idx);
        } else if (station == "R") {
            starts_right.push_back(start);
            right.settings.push_back(idx);
        } else {
            raise(ErrorCode::ParseError,
                  "settings line " + std::to_string(lineno) + ": unknown station");
        }
    }
    auto derive = [](MaterializedSchedule &sch, const std::vector<int64_t> &starts) {
        if (starts.empty()) {
            raise(ErrorCode::DataError, "settings file misses one station");
        }
        if (starts[0] != 0) {
            raise(ErrorCode::DataError, "settings slots must start at tick 0");
        }
        if (starts.size() == 1) {
            sch.slot_ticks = 0;
            return;
        }
        int64_t step = starts[1] - starts[0];
        for (size_t i = 1; i < starts.size(); i++) {
            if (starts[i] - starts[i - 1] != step || step <= 0) {
                raise(ErrorCode::DataError, "settings slots must be uniform and increasing");
            }
        }
        sch.slot_ticks = step;
    };
    derive(left, starts_left);
    derive(right, starts_right);
    return {left, right};
}

}  // namespace franson
