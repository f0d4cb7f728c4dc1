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
#include <stdexcept>
#include <string>
#include <vector>

namespace losmimo {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key = value scenario description with dotted sections. Unknown keys
/// are rejected; every field has a documented default (Tables of the feeder
/// and user link evaluations ship as presets).
struct ScenarioConfig {
    double satellite_lon_deg = -115.0;

    struct Gateway {
        double lat_deg = 38.0;
        double lon_deg = -98.0;
        double orientation_deg = 0.0;
        double spacing_km = 40.0;
        int count = 2;
        double antenna_gain_dbi = 61.4;
        double tx_power_dbw_mimo = 19.0;
        double tx_power_dbw_siso = 22.0;
    } gateway;

    struct SatRx {
        double spacing_m = 3.0;
        int count = 2;
        double g_over_t_dbk = 26.0;
        double dish_diameter_m = 1.2;
    } sat_rx;

    struct Feeder {
        double band1_min_ghz = 42.5;
        double band1_max_ghz = 43.5;
        double band2_min_ghz = 47.2;
        double band2_max_ghz = 50.2;
        double block_bandwidth_mhz = 500.0;
    } feeder;

    struct Downlink {
        int beam_count = 16;
        double band_min_ghz = 19.7;
        double band_max_ghz = 20.2;
        double eirp_dbw = 61.0;
        std::vector<double> eirp_sweep_dbw = {51, 52, 53, 54, 55, 56, 57, 58,
                                              59, 60, 61, 62, 63, 64, 65};
        double cnr_bc_db = 10.0;
        double user_g_over_t_dbk = 16.9;
        int reflector_count = 4;
        double reflector_diameter_m = 2.6;
        double uca_diameter_m = 3.0;
        double focal_length_m = 2.6;
    } downlink;

    struct Beams {
        double center_lat_deg = 38.0;
        double center_lon_deg = -116.0;
        double lat_step_deg = 2.6;
        double lon_step_deg = 2.8;
    } beams;

    struct Users {
        int total = 400;
        int paper_total = 4000;
        std::vector<double> region_lat_deg; // polygon vertices; empty = box
        std::vector<double> region_lon_deg; // around the beam lattice
        std::uint64_t seed = 1;
    } users;

    struct Scheduling {
        double epsilon = 0.25;
        std::uint64_t seed = 2;
    } scheduling;

    struct Link {
        double symbol_rate_hz = 10e6;
        double carrier_spacing_factor = 1.05;
    } link;

    struct Mode {
        std::string uplink = "mimo";          // mimo | siso
        std::string reuse = "ffr";            // ffr | fr4
        std::string payload = "four-reflector"; // four-reflector | single-reflector
    } mode;

    struct Mc {
        int samples = 20000;
        std::uint64_t seed = 7;
    } mc;

    struct Sweep {
        double spacing_min_km = 10.0;
        double spacing_max_km = 100.0;
        double spacing_step_km = 2.5;
        std::vector<double> rain_a1_db = {0.0, 6.0};
        double rain_a2_db = 0.0;
        std::vector<double> capacity_dsl_m = {3.0, 6.0, 10.0};
        double capacity_freq_ghz = 20.0;
        double capacity_cnr_db = 10.0;
        double capacity_min_km = 5.0;
        double capacity_max_km = 200.0;
        double capacity_step_km = 0.5;
        double capacity_site_lat_deg = 0.0;
        double capacity_site_dlon_deg = 0.0;
        double capacity_site_orientation_deg = 0.0;
    } sweep;

    bool paper_scale = false; // CLI flag, not a file key

    int user_count() const { return paper_scale ? users.paper_total : users.total; }
};

/// Parse a scenario text; origin names the source in diagnostics.
ScenarioConfig parse_scenario(const std::string &text, const std::string &origin = "<string>");

ScenarioConfig load_scenario(const std::string &path);

/// Deterministic serialization of every key (sorted), used for echoing
/// defaults and for hashing.
std::string canonical_text(const ScenarioConfig &config);

std::uint64_t config_hash(const ScenarioConfig &config);

inline constexpr const char *kVersionString = "losmimo 0.1.0";

} // namespace losmimo
