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

#include "losmimo/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace losmimo {

std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void SweepTable::add_row(std::vector<Cell> cells) {
    if (cells.size() != columns.size())
        throw std::invalid_argument("row width does not match the column list");
    // Pin floats to their 9-digit representation immediately, so every output
    // format and the in-memory value agree.
    for (auto &c : cells)
        if (auto *d = std::get_if<double>(&c))
            *d = std::strtod(format_float(*d).c_str(), nullptr);
    rows.push_back(std::move(cells));
}

namespace {

std::size_t column_index(const SweepTable &t, const std::string &column) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == column)
            return i;
    throw std::out_of_range("no column '" + column + "'");
}

} // namespace

double SweepTable::number(std::size_t row, const std::string &column) const {
    return std::get<double>(rows.at(row).at(column_index(*this, column)));
}

const std::string &SweepTable::text(std::size_t row, const std::string &column) const {
    return std::get<std::string>(rows.at(row).at(column_index(*this, column)));
}

namespace {

std::string render_csv(const SweepTable &t) {
    std::ostringstream out;
    out << "# " << t.version << "\n";
    out << "# kind = " << t.kind << "\n";
    char hash[32];
    std::snprintf(hash, sizeof hash, "0x%016llx", static_cast<unsigned long long>(t.config_hash));
    out << "# config_hash = " << hash << "\n";
    out << "# seed = " << t.seed << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto &row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out << ",";
            if (const auto *d = std::get_if<double>(&row[i]))
                out << format_float(*d);
            else
                out << std::get<std::string>(row[i]);
        }
        out << "\n";
    }
    return out.str();
}

std::string render_json(const SweepTable &t) {
    nlohmann::json j;
    j["version"] = t.version;
    j["kind"] = t.kind;
    char hash[32];
    std::snprintf(hash, sizeof hash, "0x%016llx", static_cast<unsigned long long>(t.config_hash));
    j["config_hash"] = hash;
    j["seed"] = t.seed;
    j["columns"] = t.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : t.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto &cell : row) {
            if (const auto *d = std::get_if<double>(&cell))
                r.push_back(*d);
            else
                r.push_back(std::get<std::string>(cell));
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

SweepTable parse_csv(const std::string &text) {
    SweepTable t;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.front() == '#') {
            const std::string body = line.substr(1);
            const auto eq = body.find('=');
            if (eq == std::string::npos) {
                const auto start = body.find_first_not_of(' ');
                if (start != std::string::npos)
                    t.version = body.substr(start);
                continue;
            }
            const auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                const auto e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            const std::string key = trim(body.substr(0, eq));
            const std::string value = trim(body.substr(eq + 1));
            if (key == "kind")
                t.kind = value;
            else if (key == "config_hash")
                t.config_hash = std::strtoull(value.c_str(), nullptr, 16);
            else if (key == "seed")
                t.seed = std::strtoull(value.c_str(), nullptr, 10);
            continue;
        }

        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ','))
            cells.push_back(tok);
        if (!have_header) {
            t.columns = cells;
            have_header = true;
            continue;
        }
        std::vector<SweepTable::Cell> row;
        for (const auto &c : cells) {
            char *end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (end != c.c_str() && *end == '\0')
                row.emplace_back(v);
            else
                row.emplace_back(c);
        }
        t.add_row(std::move(row));
    }
    return t;
}

SweepTable parse_json(const std::string &text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SweepTable t;
    t.version = j.value("version", "");
    t.kind = j.value("kind", "");
    if (j.contains("config_hash"))
        t.config_hash = std::strtoull(j["config_hash"].get<std::string>().c_str(), nullptr, 16);
    t.seed = j.value("seed", 0ULL);
    t.columns = j["columns"].get<std::vector<std::string>>();
    for (const auto &row : j["rows"]) {
        std::vector<SweepTable::Cell> cells;
        for (const auto &cell : row) {
            if (cell.is_number())
                cells.emplace_back(cell.get<double>());
            else
                cells.emplace_back(cell.get<std::string>());
        }
        t.add_row(std::move(cells));
    }
    return t;
}

} // namespace

std::string render_report(const SweepTable &table, const std::string &format) {
    if (format == "csv")
        return render_csv(table);
    if (format == "json")
        return render_json(table);
    throw std::invalid_argument("unsupported report format '" + format + "'");
}

void emit_report(const SweepTable &table, const std::string &format, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << render_report(table, format);
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

SweepTable parse_report(const std::string &text, const std::string &format) {
    if (format == "csv")
        return parse_csv(text);
    if (format == "json")
        return parse_json(text);
    throw std::invalid_argument("unsupported report format '" + format + "'");
}

SweepTable load_report(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto start = text.find_first_not_of(" \t\r\n");
    const bool json = start != std::string::npos && text[start] == '{';
    return parse_report(text, json ? "json" : "csv");
}

} // namespace losmimo
