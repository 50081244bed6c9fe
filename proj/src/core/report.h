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

#ifndef FRANSON_CORE_REPORT_H_
#define FRANSON_CORE_REPORT_H_

#include <string>
#include <vector>

namespace franson {

// Flat, insertion-ordered key/value results container. Numeric values keep
// full precision internally and render with 12 significant digits, so a
// saved report reloads to the values it displays.
class Report {
  public:
    struct Entry {
        std::string key;
        bool is_number;
        double num;
        std::string text;
    };

    void set(const std::string &key, double value);
    void set_text(const std::string &key, const std::string &value);

    bool has(const std::string &key) const;
    // Throw DataError when the key is missing or holds the other kind.
    double number(const std::string &key) const;
    const std::string &text(const std::string &key) const;

    const std::vector<Entry> &entries() const {
        return entries_;
    }

    std::string str() const;
    void save(const std::string &path) const;
    static Report load(const std::string &path);

  private:
    Entry *find(const std::string &key);
    const Entry *find(const std::string &key) const;

    std::vector<Entry> entries_;
};

}  // namespace franson

#endif  // FRANSON_CORE_REPORT_H_
