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

#include "core/report.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/error.h"

namespace franson {

static std::string render_number(double v) {
    if (v == 0) {
        v = 0;
    }
    char buf[40];
    snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

Report::Entry *Report::find(const std::string &key) {
    for (auto &e : entries_) {
        if (e.key == key) {
            return &e;
        }
    }
    return nullptr;
}

const Report::Entry *Report::find(const std::string &key) const {
    for (const auto &e : entries_) {
        if (e.key == key) {
            return &e;
        }
    }
    return nullptr;
}

void Report::set(const std::string &key, double value) {
    if (Entry *e = find(key)) {
        e->is_number = true;
        e->num = value;
        e->text.clear();
        return;
    }
    entries_.push_back({key, true, value, ""});
}

void Report::set_text(const std::string &key, const std::string &value) {
    if (Entry *e = find(key)) {
        e->is_number = false;
        e->num = 0;
        e->text = value;
        return;
    }
    entries_.push_back({key, false, 0, value});
}

bool Report::has(const std::string &key) const {
    return find(key) != nullptr;
}

double Report::number(const std::string &key) const {
    const Entry *e = find(key);
    if (!e || !e->is_number) {
        raise(ErrorCode::DataError, "report has no numeric entry '" + key + "'");
    }
    return e->num;
}

const std::string &Report::text(const std::string &key) const {
    const Entry *e = find(key);
    if (!e || e->is_number) {
        raise(ErrorCode::DataError, "report has no text entry '" + key + "'");
    }
    return e->text;
}

std::string Report::str() const {
    std::string out;
    for (const auto &e : entries_) {
        out += e.key;
        out += " = ";
        out += e.is_number ? render_number(e.num) : e.text;
        out += '\n';
    }
    return out;
}

void Report::save(const std::string &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorCode::IoError, "cannot write report file: " + path);
    }
    out << str();
    if (!out.good()) {
        raise(ErrorCode::IoError, "failed writing report file: " + path);
    }
}

Report Report::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open report file: " + path);
    }
    Report rep;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto sep = line.find(" = ");
        if (sep == std::string::npos) {
            raise(ErrorCode::ParseError,
                  "report line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key = line.substr(0, sep);
        std::string value = line.substr(sep + 3);
        char *end = nullptr;
        double num = std::strtod(value.c_str(), &end);
        if (end && *end == '\0' && end != value.c_str()) {
            rep.set(key, num);
        } else {
            rep.set_text(key, value);
        }
    }
    return rep;
}

}  // namespace franson
