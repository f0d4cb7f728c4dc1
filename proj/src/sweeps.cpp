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

#include "losmimo/sweeps.hpp"

#include <algorithm>
#include <cmath>

#include "losmimo/capacity.hpp"
#include "losmimo/rng.hpp"

namespace losmimo {

namespace {

SweepTable make_table(const ScenarioConfig &config, const std::string &kind,
                      std::vector<std::string> columns, std::uint64_t seed) {
    SweepTable t;
    t.kind = kind;
    t.version = kVersionString;
    t.config_hash = config_hash(config);
    t.seed = seed;
    t.columns = std::move(columns);
    return t;
}

std::vector<double> spacing_grid(double min_km, double max_km, double step_km,
                                 const std::vector<double> &extra_km) {
    std::vector<double> grid;
    for (double v = min_km; v <= max_km + 1e-9 * step_km; v += step_km)
        grid.push_back(v);
    for (double v : extra_km)
        if (v >= min_km && v <= max_km)
            grid.push_back(v);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               grid.end());
    return grid;
}

const char *condition_name(EigenCondition c) {
    switch (c) {
    case EigenCondition::optimal:
        return "optimal";
    case EigenCondition::keyhole:
        return "keyhole";
    default:
        return "intermediate";
    }
}

ReflectorPattern sat_rx_pattern(const ScenarioConfig &config, const OrbitArray &sat_rx, int z,
                                const Vec3 &gateway_center, const CarrierConfig &carrier) {
    const Vec3 pos = ecef_satellite_antenna(sat_rx, z);
    return ReflectorPattern{config.sat_rx.dish_diameter_m, carrier,
                            (gateway_center - pos).normalized()};
}

struct FeederSetup {
    GroundArray gateways;
    OrbitArray sat_rx;
    std::vector<CarrierConfig> carriers;
};

FeederSetup feeder_setup(const ScenarioConfig &config, double spacing_km,
                         const LinkBudgets &budgets) {
    FeederSetup s;
    s.gateways = GroundArray{config.gateway.lat_deg, config.gateway.lon_deg,
                             config.gateway.orientation_deg, spacing_km * 1e3,
                             config.gateway.count};
    s.sat_rx = OrbitArray{config.satellite_lon_deg, config.sat_rx.spacing_m, config.sat_rx.count};
    s.carriers = budgets.feeder_carriers;
    return s;
}

Eigen::MatrixXcd mimo_uplink(const ScenarioConfig &config, const FeederSetup &setup,
                             double a1_db, double a2_db) {
    AtmosphericState atm{{a1_db, a2_db}, {0.0, 0.0}};
    const Vec3 gw_center =
        0.5 * (ecef_ground_antenna(setup.gateways, 1) + ecef_ground_antenna(setup.gateways, 2));
    std::vector<ReflectorPattern> patterns;
    for (int z = 1; z <= 2; ++z)
        patterns.push_back(sat_rx_pattern(config, setup.sat_rx, z, gw_center,
                                          setup.carriers[setup.carriers.size() / 2]));
    return feeder_uplink_channel(setup.gateways, setup.sat_rx, setup.carriers, atm, patterns)
        .assembled;
}

/// SISO single-site diversity uplink: the clear-sky gateway is the only
/// active station, every feed stream rides its own frequency slot through
/// the same scalar channel.
Eigen::MatrixXcd siso_uplink(const ScenarioConfig &config, const FeederSetup &setup) {
    const int z_t = config.downlink.beam_count;
    const Vec3 gw = ecef_ground_antenna(setup.gateways, 2);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(z_t, z_t);
    for (int i = 0; i < z_t; ++i) {
        const CarrierConfig &carrier = setup.carriers[i / 2];
        const OrbitArray single{config.satellite_lon_deg, config.sat_rx.spacing_m, 1};
        const Vec3 sat = ecef_satellite_antenna(single, 1);
        const double range = (gw - sat).norm();
        h(i, i) = los_coefficient(range, range, carrier);
    }
    return h;
}

struct DownlinkState {
    std::vector<Feed> feeds;
    std::vector<UserTerminal> users;
    std::vector<UserGroup> groups;
};

enum class DownlinkMode { four_reflector, single_reflector, phase_blind };

DownlinkState downlink_state(const ScenarioConfig &config, const LinkBudgets &budgets,
                             DownlinkMode mode) {
    DownlinkState st;
    const PayloadGeometry payload =
        make_payload(config, mode == DownlinkMode::single_reflector);
    st.feeds = build_feed_layout(payload, budgets.downlink_carrier);
    st.users = generate_users(config.user_count(), service_region(config), config.users.seed,
                              config.downlink.user_g_over_t_dbk);
    populate_channel_rows(st.users, st.feeds, budgets.downlink_carrier,
                          budgets.mean_beam_range_m);
    if (mode == DownlinkMode::phase_blind) {
        // Amplitude-only scheduling: the grouping metric sees no phase at
        // all. The transmission itself then runs over the amplitude-exact
        // channel whose phases carry no geometric structure (independent
        // uniform draws), the channel model of the phase-agnostic designs.
        std::vector<UserTerminal> amplitude_only = st.users;
        for (auto &u : amplitude_only)
            u.channel_row = u.channel_row.cwiseAbs().cast<std::complex<double>>();
        st.groups = madoc_schedule(amplitude_only, config.scheduling.epsilon,
                                   config.downlink.beam_count, config.scheduling.seed);
        randomize_row_phases(st.users, derive_seed(config.users.seed, 0xb11d));
        return st;
    }
    st.groups = madoc_schedule(st.users, config.scheduling.epsilon, config.downlink.beam_count,
                               config.scheduling.seed);
    return st;
}

} // namespace

SweepTable run_spacing_capacity_sweep(const ScenarioConfig &config) {
    SweepTable t = make_table(config, "capacity-sweep",
                              {"d_sl_m", "d_es_km", "capacity_bshz", "condition"}, 0);

    const CarrierConfig carrier =
        CarrierConfig::from_frequency(config.sweep.capacity_freq_ghz * 1e9);
    const GroundSite site{config.sweep.capacity_site_lat_deg, config.sweep.capacity_site_dlon_deg,
                          config.sweep.capacity_site_orientation_deg};
    const double rho_gain = db_to_linear(config.sweep.capacity_cnr_db);

    for (double d_sl : config.sweep.capacity_dsl_m) {
        const OrbitArray orbit{config.satellite_lon_deg, d_sl, 2};
        std::vector<double> marks;
        for (int v : {1, 2, 3}) {
            const double d =
                v == 2 ? 2.0 * optimal_ground_spacing(orbit, carrier.frequency_hz, site, 1)
                       : optimal_ground_spacing(orbit, carrier.frequency_hz, site, v);
            marks.push_back(d / 1e3);
        }
        const auto grid = spacing_grid(config.sweep.capacity_min_km, config.sweep.capacity_max_km,
                                       config.sweep.capacity_step_km, marks);

        for (double d_es_km : grid) {
            const GroundArray ground{site.lat_deg, config.satellite_lon_deg + site.delta_lon_deg,
                                     site.orientation_deg, d_es_km * 1e3, 2};
            const LosMatrix h = los_matrix(ground, orbit, carrier);
            const double rho = rho_gain / (h.mean_gain * h.mean_gain);
            const double c = capacity_bshz(h.entries, rho);
            const EigenProfile profile = eigen_profile(h.entries);
            t.add_row({d_sl, d_es_km, c, std::string(condition_name(profile.condition))});
        }
    }
    return t;
}

SweepTable run_feeder_sweep(const ScenarioConfig &config) {
    SweepTable t = make_table(config, "feeder-sweep",
                              {"d_es_km", "weather", "variant", "sum_rate_bps",
                               "rate_per_beam_bps", "sum_rate_gaussian_bps", "min_user_gain",
                               "infeasible_groups", "n_groups"},
                              config.users.seed);

    const PayloadGeometry payload = make_payload(config, false);
    const LinkBudgets budgets = link_budgets(config, payload);
    DownlinkState dl = downlink_state(config, budgets, DownlinkMode::four_reflector);

    // Downlink EIRP pinned through the beam-center CNR of the feeder
    // experiment.
    const double p_dl_rb = budgets.p_dl_rb_from_cnr_bc(config.downlink.cnr_bc_db);

    PowerBudget mimo_budget{budgets.p_ul_rb_w, p_dl_rb, budgets.sigma_ul_sq, budgets.sigma_dl_sq};
    PowerBudget siso_budget{budgets.p_ul_rb_siso_w, p_dl_rb, budgets.sigma_ul_sq,
                            budgets.sigma_dl_sq};

    const auto grid = spacing_grid(config.sweep.spacing_min_km, config.sweep.spacing_max_km,
                                   config.sweep.spacing_step_km, {});
    const int z_t = config.downlink.beam_count;
    const double n_groups = static_cast<double>(dl.groups.size());

    // The SISO baseline does not depend on the gateway spacing.
    SystemEvaluation siso;
    {
        const FeederSetup setup = feeder_setup(config, config.gateway.spacing_km, budgets);
        const Eigen::MatrixXcd h_ul = siso_uplink(config, setup);
        const std::vector<Eigen::VectorXd> single_antenna = {Eigen::VectorXd::Ones(z_t)};
        siso = evaluate_groups(dl.users, dl.groups, h_ul, siso_budget, single_antenna,
                               PrecoderVariant::joint, budgets.carriers_siso,
                               config.link.symbol_rate_hz, config.mc.samples, config.mc.seed);
    }

    for (double d_es_km : grid) {
        const FeederSetup setup = feeder_setup(config, d_es_km, budgets);
        for (double a1 : config.sweep.rain_a1_db) {
            const Eigen::MatrixXcd h_ul =
                mimo_uplink(config, setup, a1, config.sweep.rain_a2_db);
            const std::string weather =
                a1 == 0.0 ? "clear" : "rain" + format_float(a1) + "db";
            for (const char *variant : {"joint", "cascaded"}) {
                const SystemEvaluation sys = evaluate_groups(
                    dl.users, dl.groups, h_ul, mimo_budget, gateway_selectors(z_t),
                    variant == std::string("joint") ? PrecoderVariant::joint
                                                    : PrecoderVariant::cascaded,
                    budgets.carriers_ffr, config.link.symbol_rate_hz, config.mc.samples,
                    config.mc.seed);
                t.add_row({d_es_km, weather, std::string(variant), sys.report.sum_rate_bps,
                           sys.report.rate_per_beam_bps, sys.report.sum_rate_gaussian_bps,
                           sys.min_user_gain, static_cast<double>(sys.infeasible_groups),
                           n_groups});
            }
        }
        t.add_row({d_es_km, std::string("clear"), std::string("siso"), siso.report.sum_rate_bps,
                   siso.report.rate_per_beam_bps, siso.report.sum_rate_gaussian_bps,
                   siso.min_user_gain, static_cast<double>(siso.infeasible_groups), n_groups});
    }
    return t;
}

SweepTable run_userlink_sweep(const ScenarioConfig &config) {
    SweepTable t = make_table(config, "userlink-sweep",
                              {"eirp_dbw", "system", "rate_per_beam_bps", "sum_rate_bps",
                               "sum_rate_gaussian_bps", "cnr_bc_db", "n_groups",
                               "mean_group_size", "infeasible_groups"},
                              config.users.seed);

    const PayloadGeometry payload4 = make_payload(config, false);
    const LinkBudgets budgets = link_budgets(config, payload4);
    const int z_t = config.downlink.beam_count;

    // Identical MIMO feeder uplink for every system (clear sky).
    const FeederSetup setup = feeder_setup(config, config.gateway.spacing_km, budgets);
    const Eigen::MatrixXcd h_ul = mimo_uplink(config, setup, 0.0, 0.0);
    const double cnr_ul = db_to_linear(uplink_cnr_db(config, true));

    DownlinkState four = downlink_state(config, budgets, DownlinkMode::four_reflector);
    DownlinkState single = downlink_state(config, budgets, DownlinkMode::single_reflector);
    DownlinkState blind = downlink_state(config, budgets, DownlinkMode::phase_blind);
    const std::vector<int> colors = fr4_colors(z_t);

    struct SystemCase {
        const char *name;
        DownlinkState *state;
    };
    std::vector<SystemCase> systems = {{"mimo4", &four}, {"mimo1", &single}, {"blind", &blind}};

    for (double eirp_dbw : config.downlink.eirp_sweep_dbw) {
        const double p_dl_ffr = budgets.p_dl_rb_from_eirp(eirp_dbw, budgets.carriers_ffr);
        const double p_dl_fr4 = budgets.p_dl_rb_from_eirp(eirp_dbw, budgets.carriers_fr4);

        for (const auto &sys_case : systems) {
            PowerBudget budget{budgets.p_ul_rb_w, p_dl_ffr, budgets.sigma_ul_sq,
                               budgets.sigma_dl_sq};
            const SystemEvaluation sys = evaluate_groups(
                sys_case.state->users, sys_case.state->groups, h_ul, budget,
                gateway_selectors(z_t), PrecoderVariant::joint, budgets.carriers_ffr,
                config.link.symbol_rate_hz, config.mc.samples, config.mc.seed);
            double members = 0.0;
            for (const auto &g : sys_case.state->groups)
                members += static_cast<double>(g.member_ids.size());
            t.add_row({eirp_dbw, std::string(sys_case.name), sys.report.rate_per_beam_bps,
                       sys.report.sum_rate_bps, sys.report.sum_rate_gaussian_bps,
                       linear_to_db(budgets.cnr_bc_linear(p_dl_ffr)),
                       static_cast<double>(sys_case.state->groups.size()),
                       members / static_cast<double>(sys_case.state->groups.size()),
                       static_cast<double>(sys.infeasible_groups)});
        }

        const SystemEvaluation fr4 = evaluate_fr4(
            four.users, colors, p_dl_fr4, budgets.sigma_dl_sq, cnr_ul, budgets.carriers_fr4,
            config.link.symbol_rate_hz, z_t, config.mc.samples, config.mc.seed);
        t.add_row({eirp_dbw, std::string("fr4"), fr4.report.rate_per_beam_bps,
                   fr4.report.sum_rate_bps, fr4.report.sum_rate_gaussian_bps,
                   linear_to_db(budgets.cnr_bc_linear(p_dl_fr4)), static_cast<double>(z_t),
                   static_cast<double>(four.users.size()) / z_t, 0.0});
    }
    return t;
}

ScheduleResult run_schedule(const ScenarioConfig &config) {
    const PayloadGeometry payload = make_payload(config, config.mode.payload == "single-reflector");
    const LinkBudgets budgets = link_budgets(config, payload);
    ScheduleResult result;
    DownlinkState st = downlink_state(config, budgets,
                                      payload.single_reflector ? DownlinkMode::single_reflector
                                                               : DownlinkMode::four_reflector);
    result.users = std::move(st.users);
    result.groups = std::move(st.groups);
    return result;
}

} // namespace losmimo
