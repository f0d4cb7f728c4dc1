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

#include "losmimo/channel.hpp"
#include "losmimo/config.hpp"
#include "losmimo/rate.hpp"
#include "losmimo/scheduling.hpp"

namespace losmimo {

struct infeasible_scenario_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Beam boresights on a hexagonal-offset lattice over the service region
/// (row-major, rows = latitude).
std::vector<std::pair<double, double>> beam_lattice(const ScenarioConfig &config);

/// Interleaved reflector-to-beam map: each reflector serves one beam of every
/// 2x2 cell, so its beams are never adjacent.
std::vector<int> reflector_assignment(int beam_count);

/// Four-color frequency plan over the same lattice; adjacent beams (including
/// the hex-offset diagonals) never share a color.
std::vector<int> fr4_colors(int beam_count);

PayloadGeometry make_payload(const ScenarioConfig &config, bool single_reflector);

/// Region polygon as parallel lat/lon vertex lists; defaults to a box around
/// the beam lattice grown by three quarters of a beam step.
struct Region {
    std::vector<double> lat_deg;
    std::vector<double> lon_deg;
};

Region service_region(const ScenarioConfig &config);

bool region_contains(const Region &region, double lat_deg, double lon_deg);

/// Uniform draw over the spherical surface inside the region; deterministic
/// per seed.
std::vector<UserTerminal> generate_users(int count, const Region &region, std::uint64_t seed,
                                         double g_over_t_db);

/// Per-resource-block power budget and carrier plan derived from the config.
/// A resource block is one FDMA carrier index across all beams: per-antenna
/// EIRP divides by the number of carriers the antenna transmits, noise is
/// taken in the symbol-rate bandwidth.
struct LinkBudgets {
    std::vector<CarrierConfig> feeder_carriers; // FDMA block centers
    CarrierConfig downlink_carrier;             // downlink band center
    int carriers_ffr = 0;
    int carriers_siso = 0;
    int carriers_fr4 = 0;
    double p_ul_rb_w = 0.0;      // per gateway antenna (MIMO plan)
    double p_ul_rb_siso_w = 0.0; // single active gateway (SISO plan)
    double sigma_ul_sq = 0.0;    // per real dimension
    double sigma_dl_sq = 0.0;
    double mean_beam_range_m = 0.0;
    double downlink_gain = 0.0; // free-space amplitude at the mean beam range

    double p_dl_rb_from_eirp(double eirp_dbw, int carriers) const;
    double cnr_bc_linear(double p_dl_rb_w) const;
    double p_dl_rb_from_cnr_bc(double cnr_bc_db) const;
};

LinkBudgets link_budgets(const ScenarioConfig &config, const PayloadGeometry &payload);

/// Clear-sky uplink CNR of the Table-I budget: per-carrier EIRP, free-space
/// loss at the highest FDMA block (worst case), satellite G/T, noise in the
/// symbol-rate bandwidth. The MIMO figure includes the eigenmode combining
/// gain of the optimally spaced 2x2 link.
double uplink_cnr_db(const ScenarioConfig &config, bool mimo);

/// All-user downlink rows at the given feeds (order follows users).
void populate_channel_rows(std::vector<UserTerminal> &users, const std::vector<Feed> &feeds,
                           const CarrierConfig &carrier, double mean_range_m);

enum class PrecoderVariant { joint, cascaded };

struct GroupEvaluation {
    int group_index = 0;
    bool zf_feasible = true;
    double min_user_gain = 0.0; // mu * a_sl
    std::vector<UserRateRow> users;
};

struct SystemEvaluation {
    RateReport report;
    int infeasible_groups = 0;
    double min_user_gain = 0.0; // worst over feasible groups
};

/// End-to-end rates of scheduled groups through a common uplink matrix.
SystemEvaluation evaluate_groups(const std::vector<UserTerminal> &users,
                                 const std::vector<UserGroup> &groups,
                                 const Eigen::MatrixXcd &h_ul, const PowerBudget &budget,
                                 const std::vector<Eigen::VectorXd> &selectors,
                                 PrecoderVariant variant, int n_carriers, double symbol_rate_hz,
                                 int mc_samples, std::uint64_t mc_seed);

/// Replace every channel row phase by a seeded uniform draw: the channel of
/// the phase-blind comparison, whose amplitude is exact but whose phase
/// carries no geometric structure.
void randomize_row_phases(std::vector<UserTerminal> &users, std::uint64_t seed);

/// Four-color SISO baseline: users served by their strongest beam, co-channel
/// interference from the same-color beams, TDMA inside each beam.
SystemEvaluation evaluate_fr4(const std::vector<UserTerminal> &users,
                              const std::vector<int> &colors, double p_dl_rb_w,
                              double sigma_dl_sq, double uplink_cnr_linear, int n_carriers,
                              double symbol_rate_hz, int beam_count, int mc_samples,
                              std::uint64_t mc_seed);

} // namespace losmimo
