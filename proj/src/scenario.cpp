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

#include "losmimo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "losmimo/capacity.hpp"
#include "losmimo/rng.hpp"

namespace losmimo {

std::vector<std::pair<double, double>> beam_lattice(const ScenarioConfig &config) {
    const int beams = config.downlink.beam_count;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(beams))));
    const int rows = (beams + cols - 1) / cols;

    std::vector<std::pair<double, double>> aims;
    aims.reserve(beams);
    for (int b = 0; b < beams; ++b) {
        const int r = b / cols;
        const int c = b % cols;
        const double lat =
            config.beams.center_lat_deg + (r - 0.5 * (rows - 1)) * config.beams.lat_step_deg;
        const double hex = (r % 2 == 1) ? 0.5 * config.beams.lon_step_deg : 0.0;
        const double lon =
            config.beams.center_lon_deg + (c - 0.5 * (cols - 1)) * config.beams.lon_step_deg + hex;
        aims.emplace_back(lat, lon);
    }
    return aims;
}

std::vector<int> reflector_assignment(int beam_count) {
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(beam_count))));
    std::vector<int> assignment(beam_count);
    for (int b = 0; b < beam_count; ++b) {
        const int r = b / cols;
        const int c = b % cols;
        assignment[b] = (r % 2) * 2 + (c % 2);
    }
    return assignment;
}

std::vector<int> fr4_colors(int beam_count) { return reflector_assignment(beam_count); }

PayloadGeometry make_payload(const ScenarioConfig &config, bool single_reflector) {
    PayloadGeometry p;
    p.satellite_lon_deg = config.satellite_lon_deg;
    p.uca_diameter_m = config.downlink.uca_diameter_m;
    p.reflector_diameter_m = config.downlink.reflector_diameter_m;
    p.focal_length_m = config.downlink.focal_length_m;
    p.reflector_count = config.downlink.reflector_count;
    p.single_reflector = single_reflector;
    p.beam_aims = beam_lattice(config);
    p.reflector_of_beam = reflector_assignment(config.downlink.beam_count);
    return p;
}

Region service_region(const ScenarioConfig &config) {
    if (!config.users.region_lat_deg.empty())
        return Region{config.users.region_lat_deg, config.users.region_lon_deg};

    const auto aims = beam_lattice(config);
    double lat_min = 90.0, lat_max = -90.0, lon_min = 360.0, lon_max = -360.0;
    for (const auto &[lat, lon] : aims) {
        lat_min = std::min(lat_min, lat);
        lat_max = std::max(lat_max, lat);
        lon_min = std::min(lon_min, lon);
        lon_max = std::max(lon_max, lon);
    }
    // a quarter step of margin keeps the population inside the composite
    // beam coverage
    const double mlat = 0.25 * config.beams.lat_step_deg;
    const double mlon = 0.25 * config.beams.lon_step_deg;
    return Region{{lat_min - mlat, lat_min - mlat, lat_max + mlat, lat_max + mlat},
                  {lon_min - mlon, lon_max + mlon, lon_max + mlon, lon_min - mlon}};
}

bool region_contains(const Region &region, double lat_deg, double lon_deg) {
    // Ray casting in the (lon, lat) plane.
    const std::size_t n = region.lat_deg.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double yi = region.lat_deg[i], xi = region.lon_deg[i];
        const double yj = region.lat_deg[j], xj = region.lon_deg[j];
        if ((yi > lat_deg) != (yj > lat_deg) &&
            lon_deg < (xj - xi) * (lat_deg - yi) / (yj - yi) + xi)
            inside = !inside;
    }
    return inside;
}

std::vector<UserTerminal> generate_users(int count, const Region &region, std::uint64_t seed,
                                         double g_over_t_db) {
    if (region.lat_deg.size() < 3 || region.lat_deg.size() != region.lon_deg.size())
        throw std::invalid_argument("degenerate region polygon");

    double lat_min = 90.0, lat_max = -90.0, lon_min = 360.0, lon_max = -360.0;
    for (std::size_t i = 0; i < region.lat_deg.size(); ++i) {
        lat_min = std::min(lat_min, region.lat_deg[i]);
        lat_max = std::max(lat_max, region.lat_deg[i]);
        lon_min = std::min(lon_min, region.lon_deg[i]);
        lon_max = std::max(lon_max, region.lon_deg[i]);
    }
    if (lat_min >= lat_max || lon_min >= lon_max)
        throw std::invalid_argument("degenerate region polygon");

    // Uniform over the spherical surface: longitude uniform, latitude drawn
    // through its sine; rejection against the polygon.
    const double s_min = std::sin(deg2rad(lat_min));
    const double s_max = std::sin(deg2rad(lat_max));

    Rng rng(seed);
    std::vector<UserTerminal> users;
    users.reserve(count);
    int id = 0;
    long guard = 0;
    while (static_cast<int>(users.size()) < count) {
        if (++guard > 1000L * (count + 16))
            throw std::invalid_argument("region rejection sampling is not terminating");
        const double lat = rad2deg(std::asin(rng.uniform(s_min, s_max)));
        const double lon = rng.uniform(lon_min, lon_max);
        if (!region_contains(region, lat, lon))
            continue;
        UserTerminal u;
        u.id = id++;
        u.lat_deg = lat;
        u.lon_deg = lon;
        u.g_over_t_db = g_over_t_db;
        users.push_back(std::move(u));
    }
    return users;
}

namespace {

std::vector<CarrierConfig> feeder_block_centers(const ScenarioConfig &config) {
    const double block_hz = config.feeder.block_bandwidth_mhz * 1e6;
    std::vector<CarrierConfig> carriers;
    const auto add_band = [&](double min_ghz, double max_ghz) {
        const double lo = min_ghz * 1e9;
        const double hi = max_ghz * 1e9;
        const int blocks = static_cast<int>(std::round((hi - lo) / block_hz));
        for (int b = 0; b < blocks; ++b)
            carriers.push_back(CarrierConfig::from_frequency(lo + (b + 0.5) * block_hz));
    };
    add_band(config.feeder.band1_min_ghz, config.feeder.band1_max_ghz);
    add_band(config.feeder.band2_min_ghz, config.feeder.band2_max_ghz);
    return carriers;
}

} // namespace

double LinkBudgets::p_dl_rb_from_eirp(double eirp_dbw, int carriers) const {
    return db_to_linear(eirp_dbw) / carriers;
}

double LinkBudgets::cnr_bc_linear(double p_dl_rb_w) const {
    return downlink_gain * downlink_gain * p_dl_rb_w / (2.0 * sigma_dl_sq);
}

double LinkBudgets::p_dl_rb_from_cnr_bc(double cnr_bc_db) const {
    return db_to_linear(cnr_bc_db) * 2.0 * sigma_dl_sq / (downlink_gain * downlink_gain);
}

LinkBudgets link_budgets(const ScenarioConfig &config, const PayloadGeometry &payload) {
    LinkBudgets b;
    b.feeder_carriers = feeder_block_centers(config);
    if (2 * static_cast<int>(b.feeder_carriers.size()) != config.downlink.beam_count)
        throw infeasible_scenario_error(
            "feeder FDMA plan does not carry the downlink feeds: " +
            std::to_string(b.feeder_carriers.size()) + " blocks for " +
            std::to_string(config.downlink.beam_count) + " beams");

    const double band_hz = (config.downlink.band_max_ghz - config.downlink.band_min_ghz) * 1e9;
    b.downlink_carrier = CarrierConfig::from_frequency(
        0.5 * (config.downlink.band_min_ghz + config.downlink.band_max_ghz) * 1e9);
    b.carriers_ffr = carriers_per_beam(band_hz, config.link.symbol_rate_hz,
                                       config.link.carrier_spacing_factor);
    b.carriers_siso = carriers_per_beam(band_hz / 2.0, config.link.symbol_rate_hz,
                                        config.link.carrier_spacing_factor);
    b.carriers_fr4 = carriers_per_beam(band_hz / 4.0, config.link.symbol_rate_hz,
                                       config.link.carrier_spacing_factor);

    // Per-antenna EIRP split over every carrier the antenna transmits.
    const double eirp_mimo =
        db_to_linear(config.gateway.tx_power_dbw_mimo + config.gateway.antenna_gain_dbi);
    const double eirp_siso =
        db_to_linear(config.gateway.tx_power_dbw_siso + config.gateway.antenna_gain_dbi);
    const int mimo_carriers = static_cast<int>(b.feeder_carriers.size()) * b.carriers_ffr;
    const int siso_carriers = config.downlink.beam_count * b.carriers_siso;
    // One resource block bundles one carrier index of every downlink feed:
    // beam_count/2 carriers per antenna for the MIMO plan, beam_count for the
    // single SISO antenna.
    b.p_ul_rb_w = eirp_mimo / mimo_carriers * (config.downlink.beam_count / 2);
    b.p_ul_rb_siso_w = eirp_siso / siso_carriers * config.downlink.beam_count;

    const double noise_bw = config.link.symbol_rate_hz;
    b.sigma_ul_sq =
        0.5 * constants::boltzmann_jpk * noise_bw / db_to_linear(config.sat_rx.g_over_t_dbk);
    b.sigma_dl_sq = 0.5 * constants::boltzmann_jpk * noise_bw /
                    db_to_linear(config.downlink.user_g_over_t_dbk);

    b.mean_beam_range_m = mean_beam_center_range_m(payload);
    b.downlink_gain =
        b.downlink_carrier.wavelength_m / (4.0 * constants::pi * b.mean_beam_range_m);
    return b;
}

double uplink_cnr_db(const ScenarioConfig &config, bool mimo) {
    const auto carriers = feeder_block_centers(config);
    const double worst_freq = carriers.back().frequency_hz;
    const double wavelength = constants::speed_of_light_mps / worst_freq;

    const GroundSite site{config.gateway.lat_deg,
                          config.gateway.lon_deg - config.satellite_lon_deg,
                          config.gateway.orientation_deg};
    const double range = range_factor(site.lat_deg, site.delta_lon_deg) *
                         constants::min_slant_range_m;
    const double fsl_gain = wavelength / (4.0 * constants::pi * range);

    const int ffr = carriers_per_beam((config.downlink.band_max_ghz - config.downlink.band_min_ghz) * 1e9,
                                      config.link.symbol_rate_hz, config.link.carrier_spacing_factor);
    const int siso = carriers_per_beam(
        (config.downlink.band_max_ghz - config.downlink.band_min_ghz) * 1e9 / 2.0,
        config.link.symbol_rate_hz, config.link.carrier_spacing_factor);

    const double eirp_dbw = mimo ? config.gateway.tx_power_dbw_mimo + config.gateway.antenna_gain_dbi
                                 : config.gateway.tx_power_dbw_siso + config.gateway.antenna_gain_dbi;
    const int n_carriers = mimo ? static_cast<int>(carriers.size()) * ffr
                                : config.downlink.beam_count * siso;
    const double eirp_per_carrier = db_to_linear(eirp_dbw) / n_carriers;

    const double noise = constants::boltzmann_jpk * config.link.symbol_rate_hz /
                         db_to_linear(config.sat_rx.g_over_t_dbk);

    // In the optimally designed MIMO link every eigenmode collects the power
    // of both gateway antennas.
    const double combining = mimo ? static_cast<double>(config.gateway.count) : 1.0;

    return linear_to_db(eirp_per_carrier * fsl_gain * fsl_gain * combining / noise);
}

void populate_channel_rows(std::vector<UserTerminal> &users, const std::vector<Feed> &feeds,
                           const CarrierConfig &carrier, double mean_range_m) {
    for (auto &u : users)
        u.channel_row = user_channel_row(u.lat_deg, u.lon_deg, feeds, carrier, mean_range_m);
}

void randomize_row_phases(std::vector<UserTerminal> &users, std::uint64_t seed) {
    for (auto &u : users) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(u.id)));
        for (Eigen::Index z = 0; z < u.channel_row.size(); ++z)
            u.channel_row(z) =
                std::polar(std::abs(u.channel_row(z)), rng.uniform(0.0, 2.0 * constants::pi));
    }
}

namespace {

GroupEvaluation evaluate_one_group(int group_index, const std::vector<UserTerminal> &users,
                                   const std::vector<Eigen::Index> &member_rows,
                                   const Eigen::MatrixXcd &h_ul, const PowerBudget &budget,
                                   const std::vector<Eigen::VectorXd> &selectors,
                                   PrecoderVariant variant, int n_carriers,
                                   double symbol_rate_hz, int mc_samples, std::uint64_t mc_seed) {
    GroupEvaluation ev;
    ev.group_index = group_index;

    Eigen::MatrixXcd h_d(member_rows.size(), h_ul.rows());
    for (std::size_t k = 0; k < member_rows.size(); ++k)
        h_d.row(static_cast<Eigen::Index>(k)) =
            users[member_rows[k]].channel_row.transpose();

    PrecoderSolution precoder;
    try {
        precoder = variant == PrecoderVariant::joint
                       ? joint_precoder(h_d, h_ul, budget, selectors)
                       : cascaded_precoder(h_d, h_ul, budget, selectors);
    } catch (const zf_infeasible_error &) {
        ev.zf_feasible = false;
        for (std::size_t k = 0; k < member_rows.size(); ++k) {
            UserRateRow row;
            row.group_index = group_index;
            row.user_id = users[member_rows[k]].id;
            ev.users.push_back(row);
        }
        return ev;
    }

    ev.min_user_gain = precoder.mu * precoder.a_sl;
    const EffectiveChannel eff = effective_channel(h_d, h_ul, precoder, budget);

    for (std::size_t k = 0; k < member_rows.size(); ++k) {
        const int ki = static_cast<int>(k);
        UserRateRow row;
        row.group_index = group_index;
        row.user_id = users[member_rows[k]].id;
        row.cinr_linear = per_user_cinr(eff, ki);
        row.spectral_eff_bshz = spectral_efficiency_bshz(row.cinr_linear);
        const ModcodChoice mc =
            best_modcod_mi(default_alphabets(), eff.c_matrix(ki, ki),
                           0.5 * eff.total_disturbance_var(ki), mc_samples,
                           derive_seed(mc_seed, static_cast<std::uint64_t>(group_index),
                                       static_cast<std::uint64_t>(row.user_id)));
        row.mi_bits_per_cu = mc.bits;
        row.modcod = mc.name;
        row.rate_bps = user_rate_bps(mc.bits, symbol_rate_hz, n_carriers);
        ev.users.push_back(std::move(row));
    }
    return ev;
}

} // namespace

SystemEvaluation evaluate_groups(const std::vector<UserTerminal> &users,
                                 const std::vector<UserGroup> &groups,
                                 const Eigen::MatrixXcd &h_ul, const PowerBudget &budget,
                                 const std::vector<Eigen::VectorXd> &selectors,
                                 PrecoderVariant variant, int n_carriers, double symbol_rate_hz,
                                 int mc_samples, std::uint64_t mc_seed) {
    if (groups.empty())
        throw std::invalid_argument("no groups to evaluate");

    // id -> row index
    std::vector<Eigen::Index> row_of_id(users.size());
    for (std::size_t i = 0; i < users.size(); ++i)
        row_of_id[static_cast<std::size_t>(users[i].id)] = static_cast<Eigen::Index>(i);

    std::vector<std::vector<Eigen::Index>> member_rows(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int id : groups[g].member_ids)
            member_rows[g].push_back(row_of_id[static_cast<std::size_t>(id)]);

    std::vector<GroupEvaluation> evals(groups.size());
    const unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t g = w; g < groups.size(); g += workers)
                evals[g] = evaluate_one_group(static_cast<int>(g), users, member_rows[g], h_ul,
                                              budget, selectors, variant, n_carriers,
                                              symbol_rate_hz, mc_samples, mc_seed);
        });
    }
    for (auto &t : pool)
        t.join();

    SystemEvaluation sys;
    sys.report.symbol_rate_hz = symbol_rate_hz;
    sys.report.carriers = n_carriers;
    sys.min_user_gain = std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> rates(groups.size());
    std::vector<std::vector<double>> gauss(groups.size());
    for (auto &ev : evals) {
        double group_sum = 0.0;
        for (auto &row : ev.users) {
            rates[ev.group_index].push_back(row.rate_bps);
            gauss[ev.group_index].push_back(
                user_rate_bps(row.spectral_eff_bshz, symbol_rate_hz, n_carriers));
            group_sum += row.rate_bps;
            sys.report.per_user.push_back(row);
        }
        sys.report.per_group_sum_bps.push_back(group_sum);
        if (!ev.zf_feasible)
            ++sys.infeasible_groups;
        else
            sys.min_user_gain = std::min(sys.min_user_gain, ev.min_user_gain);
    }

    if (!std::isfinite(sys.min_user_gain))
        sys.min_user_gain = 0.0;

    const int z_t = static_cast<int>(h_ul.rows());
    const SumRate sr = sum_rate(rates, z_t);
    const SumRate sg = sum_rate(gauss, z_t);
    sys.report.sum_rate_bps = sr.sum_rate_bps;
    sys.report.rate_per_beam_bps = sr.rate_per_beam_bps;
    sys.report.sum_rate_gaussian_bps = sg.sum_rate_bps;
    sys.report.rate_per_beam_gaussian_bps = sg.rate_per_beam_bps;
    return sys;
}

SystemEvaluation evaluate_fr4(const std::vector<UserTerminal> &users,
                              const std::vector<int> &colors, double p_dl_rb_w,
                              double sigma_dl_sq, double uplink_cnr_linear, int n_carriers,
                              double symbol_rate_hz, int beam_count, int mc_samples,
                              std::uint64_t mc_seed) {
    if (users.empty())
        throw std::invalid_argument("no users");
    if (static_cast<int>(colors.size()) != beam_count)
        throw std::invalid_argument("color map does not cover the beams");

    struct BeamBucket {
        std::vector<std::size_t> members;
    };
    std::vector<BeamBucket> beams(beam_count);

    for (std::size_t i = 0; i < users.size(); ++i) {
        Eigen::Index best = 0;
        users[i].channel_row.cwiseAbs().maxCoeff(&best);
        beams[static_cast<int>(best)].members.push_back(i);
    }

    SystemEvaluation sys;
    sys.report.symbol_rate_hz = symbol_rate_hz;
    sys.report.carriers = n_carriers;
    sys.min_user_gain = 0.0;

    double total = 0.0;
    double total_gauss = 0.0;
    for (int z = 0; z < beam_count; ++z) {
        if (beams[z].members.empty()) {
            sys.report.per_group_sum_bps.push_back(0.0);
            continue;
        }
        double beam_rate = 0.0;
        double beam_gauss = 0.0;
        for (std::size_t idx : beams[z].members) {
            const auto &row = users[idx].channel_row;
            const double signal = p_dl_rb_w * std::norm(row(z));
            double cci = 0.0;
            for (int zz = 0; zz < beam_count; ++zz)
                if (zz != z && colors[zz] == colors[z])
                    cci += p_dl_rb_w * std::norm(row(zz));
            const double relayed = signal / uplink_cnr_linear; // bent-pipe noise share
            const double var_total = cci + relayed + 2.0 * sigma_dl_sq;
            const double cinr = signal / var_total;

            UserRateRow r;
            r.group_index = z;
            r.user_id = users[idx].id;
            r.cinr_linear = cinr;
            r.spectral_eff_bshz = spectral_efficiency_bshz(cinr);
            const ModcodChoice mc = best_modcod_mi(
                default_alphabets(), std::sqrt(signal), 0.5 * var_total, mc_samples,
                derive_seed(mc_seed, static_cast<std::uint64_t>(z),
                            static_cast<std::uint64_t>(r.user_id)));
            r.mi_bits_per_cu = mc.bits;
            r.modcod = mc.name;
            r.rate_bps = user_rate_bps(mc.bits, symbol_rate_hz, n_carriers);
            beam_rate += r.rate_bps;
            beam_gauss += user_rate_bps(r.spectral_eff_bshz, symbol_rate_hz, n_carriers);
            sys.report.per_user.push_back(std::move(r));
        }
        // TDMA time share inside the beam
        beam_rate /= static_cast<double>(beams[z].members.size());
        beam_gauss /= static_cast<double>(beams[z].members.size());
        sys.report.per_group_sum_bps.push_back(beam_rate);
        total += beam_rate;
        total_gauss += beam_gauss;
    }

    sys.report.sum_rate_bps = total;
    sys.report.rate_per_beam_bps = total / beam_count;
    sys.report.sum_rate_gaussian_bps = total_gauss;
    sys.report.rate_per_beam_gaussian_bps = total_gauss / beam_count;
    return sys;
}

} // namespace losmimo
