// SPDX-License-Identifier: Apache-2.0
//
// losmimo - LOS MIMO link design and simulation for multibeam GEO satellites
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace losmimo {

/// Keyed sweep results: one row per sweep point, stable column order,
/// metadata identifying the producing configuration and seed. Floats are
/// carried at 9 significant digits end to end, so emit/parse round-trips are
/// exact.
struct SweepTable {
    using Cell = std::variant<double, std::string>;

    std::string kind;
    std::string version;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> cells);
    double number(std::size_t row, const std::string &column) const;
    const std::string &text(std::size_t row, const std::string &column) const;
};

/// Render to "csv" (metadata as leading # comments) or "json".
std::string render_report(const SweepTable &table, const std::string &format);

void emit_report(const SweepTable &table, const std::string &format, const std::string &path);

SweepTable parse_report(const std::string &text, const std::string &format);

SweepTable load_report(const std::string &path);

/// Format helper used everywhere a float leaves the process.
std::string format_float(double v);

} // namespace losmimo
