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

#include "losmimo/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace losmimo {

namespace {

std::string trim(const std::string &s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string &raw, const std::string &where) {
    char *end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || trim(end).size())
        throw config_error(where + ": '" + raw + "' is not a number");
    return v;
}

// Either a bracketed list [a, b, c] or a range min:step:max (inclusive).
std::vector<double> parse_list(const std::string &raw, const std::string &where) {
    std::string body = trim(raw);
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']')
            throw config_error(where + ": unterminated list");
        body = body.substr(1, body.size() - 2);
    }
    std::vector<double> values;
    if (trim(body).empty())
        return values;

    if (body.find(':') != std::string::npos && body.find(',') == std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(body);
        std::string tok;
        while (std::getline(ss, tok, ':'))
            parts.push_back(parse_number(trim(tok), where));
        if (parts.size() != 3)
            throw config_error(where + ": range must be min:step:max");
        const double lo = parts[0], step = parts[1], hi = parts[2];
        if (step <= 0.0)
            throw config_error(where + ": range step must be positive");
        if (lo > hi)
            throw config_error(where + ": range min exceeds max");
        for (double v = lo; v <= hi + 1e-9 * step; v += step)
            values.push_back(v);
        return values;
    }

    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ','))
        values.push_back(parse_number(trim(tok), where));
    return values;
}

std::string unquote(const std::string &raw) {
    std::string s = trim(raw);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt(const std::vector<double> &v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? ", " : "") + fmt(v[i]);
    return out + "]";
}

struct KeyBinding {
    std::function<void(ScenarioConfig &, const std::string &, const std::string &)> set;
    std::function<std::string(const ScenarioConfig &)> get;
};

std::map<std::string, KeyBinding> build_registry() {
    std::map<std::string, KeyBinding> reg;

    const auto bind_num = [&reg](const std::string &key, std::function<double &(ScenarioConfig &)> ref) {
        reg[key] = KeyBinding{
            [ref, key](ScenarioConfig &c, const std::string &raw, const std::string &where) {
                ref(c) = parse_number(raw, where);
            },
            [ref](const ScenarioConfig &c) { return fmt(ref(const_cast<ScenarioConfig &>(c))); }};
    };
    const auto bind_int = [&reg](const std::string &key, std::function<int &(ScenarioConfig &)> ref) {
        reg[key] = KeyBinding{
            [ref, key](ScenarioConfig &c, const std::string &raw, const std::string &where) {
                const double v = parse_number(raw, where);
                if (v != std::floor(v))
                    throw config_error(where + ": expected an integer");
                ref(c) = static_cast<int>(v);
            },
            [ref](const ScenarioConfig &c) {
                return std::to_string(ref(const_cast<ScenarioConfig &>(c)));
            }};
    };
    const auto bind_seed = [&reg](const std::string &key,
                                  std::function<std::uint64_t &(ScenarioConfig &)> ref) {
        reg[key] = KeyBinding{
            [ref, key](ScenarioConfig &c, const std::string &raw, const std::string &where) {
                const double v = parse_number(raw, where);
                if (v < 0 || v != std::floor(v))
                    throw config_error(where + ": expected a non-negative integer seed");
                ref(c) = static_cast<std::uint64_t>(v);
            },
            [ref](const ScenarioConfig &c) {
                return std::to_string(ref(const_cast<ScenarioConfig &>(c)));
            }};
    };
    const auto bind_list = [&reg](const std::string &key,
                                  std::function<std::vector<double> &(ScenarioConfig &)> ref) {
        reg[key] = KeyBinding{
            [ref, key](ScenarioConfig &c, const std::string &raw, const std::string &where) {
                ref(c) = parse_list(raw, where);
            },
            [ref](const ScenarioConfig &c) {
                return fmt(ref(const_cast<ScenarioConfig &>(c)));
            }};
    };
    const auto bind_str = [&reg](const std::string &key,
                                 std::function<std::string &(ScenarioConfig &)> ref,
                                 std::vector<std::string> allowed) {
        reg[key] = KeyBinding{
            [ref, key, allowed](ScenarioConfig &c, const std::string &raw,
                                const std::string &where) {
                const std::string v = unquote(raw);
                if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
                    std::string msg = where + ": '" + v + "' not one of {";
                    for (std::size_t i = 0; i < allowed.size(); ++i)
                        msg += (i ? ", " : "") + allowed[i];
                    throw config_error(msg + "}");
                }
                ref(c) = v;
            },
            [ref](const ScenarioConfig &c) { return ref(const_cast<ScenarioConfig &>(c)); }};
    };

#define NUM_FIELD(key, path) bind_num(key, [](ScenarioConfig &c) -> double & { return c.path; })
#define INT_FIELD(key, path) bind_int(key, [](ScenarioConfig &c) -> int & { return c.path; })
#define SEED_FIELD(key, path) \
    bind_seed(key, [](ScenarioConfig &c) -> std::uint64_t & { return c.path; })
#define LIST_FIELD(key, path) \
    bind_list(key, [](ScenarioConfig &c) -> std::vector<double> & { return c.path; })

    NUM_FIELD("satellite.lon_deg", satellite_lon_deg);

    NUM_FIELD("gateway.lat_deg", gateway.lat_deg);
    NUM_FIELD("gateway.lon_deg", gateway.lon_deg);
    NUM_FIELD("gateway.orientation_deg", gateway.orientation_deg);
    NUM_FIELD("gateway.spacing_km", gateway.spacing_km);
    INT_FIELD("gateway.antenna_count", gateway.count);
    NUM_FIELD("gateway.antenna_gain_dbi", gateway.antenna_gain_dbi);
    NUM_FIELD("gateway.tx_power_dbw_mimo", gateway.tx_power_dbw_mimo);
    NUM_FIELD("gateway.tx_power_dbw_siso", gateway.tx_power_dbw_siso);

    NUM_FIELD("sat_rx.spacing_m", sat_rx.spacing_m);
    INT_FIELD("sat_rx.antenna_count", sat_rx.count);
    NUM_FIELD("sat_rx.g_over_t_dbk", sat_rx.g_over_t_dbk);
    NUM_FIELD("sat_rx.dish_diameter_m", sat_rx.dish_diameter_m);

    NUM_FIELD("feeder.band1_min_ghz", feeder.band1_min_ghz);
    NUM_FIELD("feeder.band1_max_ghz", feeder.band1_max_ghz);
    NUM_FIELD("feeder.band2_min_ghz", feeder.band2_min_ghz);
    NUM_FIELD("feeder.band2_max_ghz", feeder.band2_max_ghz);
    NUM_FIELD("feeder.block_bandwidth_mhz", feeder.block_bandwidth_mhz);

    INT_FIELD("downlink.beam_count", downlink.beam_count);
    NUM_FIELD("downlink.band_min_ghz", downlink.band_min_ghz);
    NUM_FIELD("downlink.band_max_ghz", downlink.band_max_ghz);
    NUM_FIELD("downlink.eirp_dbw", downlink.eirp_dbw);
    LIST_FIELD("downlink.eirp_sweep_dbw", downlink.eirp_sweep_dbw);
    NUM_FIELD("downlink.cnr_bc_db", downlink.cnr_bc_db);
    NUM_FIELD("downlink.user_g_over_t_dbk", downlink.user_g_over_t_dbk);
    INT_FIELD("downlink.reflector_count", downlink.reflector_count);
    NUM_FIELD("downlink.reflector_diameter_m", downlink.reflector_diameter_m);
    NUM_FIELD("downlink.uca_diameter_m", downlink.uca_diameter_m);
    NUM_FIELD("downlink.focal_length_m", downlink.focal_length_m);

    NUM_FIELD("beams.center_lat_deg", beams.center_lat_deg);
    NUM_FIELD("beams.center_lon_deg", beams.center_lon_deg);
    NUM_FIELD("beams.lat_step_deg", beams.lat_step_deg);
    NUM_FIELD("beams.lon_step_deg", beams.lon_step_deg);

    INT_FIELD("users.total", users.total);
    INT_FIELD("users.paper_total", users.paper_total);
    LIST_FIELD("users.region_lat_deg", users.region_lat_deg);
    LIST_FIELD("users.region_lon_deg", users.region_lon_deg);
    SEED_FIELD("users.seed", users.seed);

    NUM_FIELD("scheduling.epsilon", scheduling.epsilon);
    SEED_FIELD("scheduling.seed", scheduling.seed);

    NUM_FIELD("link.symbol_rate_hz", link.symbol_rate_hz);
    NUM_FIELD("link.carrier_spacing_factor", link.carrier_spacing_factor);

    bind_str("mode.uplink", [](ScenarioConfig &c) -> std::string & { return c.mode.uplink; },
             {"mimo", "siso"});
    bind_str("mode.reuse", [](ScenarioConfig &c) -> std::string & { return c.mode.reuse; },
             {"ffr", "fr4"});
    bind_str("mode.payload", [](ScenarioConfig &c) -> std::string & { return c.mode.payload; },
             {"four-reflector", "single-reflector"});

    INT_FIELD("mc.samples", mc.samples);
    SEED_FIELD("mc.seed", mc.seed);

    NUM_FIELD("sweep.spacing_min_km", sweep.spacing_min_km);
    NUM_FIELD("sweep.spacing_max_km", sweep.spacing_max_km);
    NUM_FIELD("sweep.spacing_step_km", sweep.spacing_step_km);
    LIST_FIELD("sweep.rain_a1_db", sweep.rain_a1_db);
    NUM_FIELD("sweep.rain_a2_db", sweep.rain_a2_db);
    LIST_FIELD("sweep.capacity_dsl_m", sweep.capacity_dsl_m);
    NUM_FIELD("sweep.capacity_freq_ghz", sweep.capacity_freq_ghz);
    NUM_FIELD("sweep.capacity_cnr_db", sweep.capacity_cnr_db);
    NUM_FIELD("sweep.capacity_min_km", sweep.capacity_min_km);
    NUM_FIELD("sweep.capacity_max_km", sweep.capacity_max_km);
    NUM_FIELD("sweep.capacity_step_km", sweep.capacity_step_km);
    NUM_FIELD("sweep.capacity_site_lat_deg", sweep.capacity_site_lat_deg);
    NUM_FIELD("sweep.capacity_site_dlon_deg", sweep.capacity_site_dlon_deg);
    NUM_FIELD("sweep.capacity_site_orientation_deg", sweep.capacity_site_orientation_deg);

#undef NUM_FIELD
#undef INT_FIELD
#undef SEED_FIELD
#undef LIST_FIELD

    return reg;
}

const std::map<std::string, KeyBinding> &registry() {
    static const std::map<std::string, KeyBinding> reg = build_registry();
    return reg;
}

void validate(const ScenarioConfig &c) {
    std::vector<std::string> errors;
    const auto require = [&errors](bool ok, const std::string &msg) {
        if (!ok)
            errors.push_back(msg);
    };

    require(std::abs(c.gateway.lat_deg) <= 90.0, "gateway.lat_deg outside [-90, 90]");
    require(c.gateway.spacing_km > 0.0, "gateway.spacing_km must be positive");
    require(c.gateway.count >= 1, "gateway.antenna_count must be at least 1");
    require(c.sat_rx.spacing_m > 0.0, "sat_rx.spacing_m must be positive");
    require(c.sat_rx.count >= 1, "sat_rx.antenna_count must be at least 1");
    require(c.feeder.band1_min_ghz < c.feeder.band1_max_ghz, "feeder band 1 empty");
    require(c.feeder.band2_min_ghz < c.feeder.band2_max_ghz, "feeder band 2 empty");
    require(c.feeder.block_bandwidth_mhz > 0.0, "feeder.block_bandwidth_mhz must be positive");
    require(c.downlink.beam_count >= 1, "downlink.beam_count must be at least 1");
    require(c.downlink.band_min_ghz < c.downlink.band_max_ghz, "downlink band empty");
    require(!c.downlink.eirp_sweep_dbw.empty(), "downlink.eirp_sweep_dbw must be non-empty");
    require(c.downlink.reflector_count >= 1, "downlink.reflector_count must be at least 1");
    require(c.downlink.reflector_diameter_m > 0.0, "downlink.reflector_diameter_m must be positive");
    require(c.downlink.uca_diameter_m > 0.0, "downlink.uca_diameter_m must be positive");
    require(c.downlink.focal_length_m > 0.0, "downlink.focal_length_m must be positive");
    require(c.users.total >= 0, "users.total must be non-negative");
    require(c.users.paper_total >= 0, "users.paper_total must be non-negative");
    require(c.users.region_lat_deg.size() == c.users.region_lon_deg.size(),
            "users.region_lat_deg and users.region_lon_deg differ in length");
    require(c.users.region_lat_deg.empty() || c.users.region_lat_deg.size() >= 3,
            "region polygon needs at least 3 vertices");
    require(c.scheduling.epsilon > 0.0 && c.scheduling.epsilon < 1.0,
            "scheduling.epsilon outside (0, 1)");
    require(c.link.symbol_rate_hz > 0.0, "link.symbol_rate_hz must be positive");
    require(c.link.carrier_spacing_factor >= 1.0, "link.carrier_spacing_factor below 1");
    require(c.mc.samples >= 1000, "mc.samples below 1000");
    require(c.sweep.spacing_min_km <= c.sweep.spacing_max_km,
            "sweep.spacing_min_km exceeds sweep.spacing_max_km");
    require(c.sweep.spacing_step_km > 0.0, "sweep.spacing_step_km must be positive");
    require(c.sweep.capacity_min_km <= c.sweep.capacity_max_km,
            "sweep.capacity_min_km exceeds sweep.capacity_max_km");
    require(c.sweep.capacity_step_km > 0.0, "sweep.capacity_step_km must be positive");
    require(!c.sweep.capacity_dsl_m.empty(), "sweep.capacity_dsl_m must be non-empty");
    require(!c.sweep.rain_a1_db.empty(), "sweep.rain_a1_db must be non-empty");
    for (double a : c.sweep.rain_a1_db)
        require(a >= 0.0, "sweep.rain_a1_db entries must be non-negative");
    require(c.sweep.rain_a2_db >= 0.0, "sweep.rain_a2_db must be non-negative");

    if (!errors.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto &e : errors)
            msg += "\n  - " + e;
        throw config_error(msg);
    }
}

} // namespace

ScenarioConfig parse_scenario(const std::string &text, const std::string &origin) {
    ScenarioConfig config;
    const auto &reg = registry();

    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    std::vector<std::string> errors;

    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(line_no);
        if (eq == std::string::npos) {
            errors.push_back(where + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        const auto it = reg.find(key);
        if (it == reg.end()) {
            errors.push_back(where + ": unknown key '" + key + "'");
            continue;
        }
        try {
            it->second.set(config, value, where);
        } catch (const config_error &e) {
            errors.push_back(e.what());
        }
    }

    if (!errors.empty()) {
        std::string msg = "cannot parse " + origin + ":";
        for (const auto &e : errors)
            msg += "\n  - " + e;
        throw config_error(msg);
    }

    validate(config);
    return config;
}

ScenarioConfig load_scenario(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

std::string canonical_text(const ScenarioConfig &config) {
    std::string out;
    for (const auto &[key, binding] : registry())
        out += key + " = " + binding.get(config) + "\n";
    return out;
}

std::uint64_t config_hash(const ScenarioConfig &config) {
    const std::string text = canonical_text(config);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace losmimo
