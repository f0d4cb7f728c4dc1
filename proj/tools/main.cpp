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

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "losmimo/rng.hpp"
#include "losmimo/sweeps.hpp"

namespace {

using namespace losmimo;

struct GlobalOptions {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool paper_scale = false;
};

ScenarioConfig resolve_config(const GlobalOptions &opt) {
    ScenarioConfig config =
        opt.config_path.empty() ? ScenarioConfig{} : load_scenario(opt.config_path);
    config.paper_scale = opt.paper_scale;
    if (opt.seed_set) {
        config.users.seed = opt.seed;
        config.scheduling.seed = derive_seed(opt.seed, 1);
        config.mc.seed = derive_seed(opt.seed, 2);
    }
    return config;
}

void write_output(const std::string &content, const std::string &path) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

void emit_table(const SweepTable &table, const GlobalOptions &opt) {
    write_output(render_report(table, opt.format), opt.out_path);
}

int run_design_spacing(const GlobalOptions &opt) {
    const ScenarioConfig config = resolve_config(opt);
    const GroundSite site{config.gateway.lat_deg,
                          config.gateway.lon_deg - config.satellite_lon_deg,
                          config.gateway.orientation_deg};
    const GeometrySummary geo = geometry_summary(site);
    const OrbitArray orbit{config.satellite_lon_deg, config.sat_rx.spacing_m,
                           config.sat_rx.count};
    const PayloadGeometry payload = make_payload(config, false);
    const LinkBudgets budgets = link_budgets(config, payload);

    SweepTable t;
    t.kind = "design-spacing";
    t.version = kVersionString;
    t.config_hash = config_hash(config);
    t.columns = {"carrier_ghz", "v_index", "d_es_km", "residual_m", "condition"};

    for (const auto &carrier : budgets.feeder_carriers) {
        for (int v : {1, 3}) {
            const double d_es = optimal_ground_spacing(orbit, carrier.frequency_hz, site, v);
            const GroundArray ground{config.gateway.lat_deg, config.gateway.lon_deg,
                                     config.gateway.orientation_deg, d_es, config.gateway.count};
            const OrthogonalityCheck check =
                optimality_residual(ground, orbit, carrier.wavelength_m,
                                    std::max(config.gateway.count, config.sat_rx.count));
            t.add_row({carrier.frequency_hz / 1e9, static_cast<double>(v), d_es / 1e3,
                       check.residual_m,
                       std::string(check.condition == DesignCondition::orthogonal ? "orthogonal"
                                    : check.condition == DesignCondition::keyhole ? "keyhole"
                                                                                  : "non-orthogonal")});
        }
    }

    std::cerr << "site: lat " << site.lat_deg << " deg, dlon " << site.delta_lon_deg
              << " deg, orientation " << site.orientation_deg << " deg\n"
              << "range factor " << geo.range_factor << ", reduction factor "
              << geo.reduction_factor << ", mean range " << geo.mean_range_m / 1e3 << " km\n"
              << "configured gateway spacing: " << config.gateway.spacing_km << " km\n";
    emit_table(t, opt);
    return 0;
}

int run_schedule_cmd(const GlobalOptions &opt) {
    const ScenarioConfig config = resolve_config(opt);
    const ScheduleResult result = run_schedule(config);

    nlohmann::json out;
    out["version"] = kVersionString;
    out["epsilon"] = config.scheduling.epsilon;
    out["n_users"] = result.users.size();
    out["n_groups"] = result.groups.size();
    nlohmann::json groups = nlohmann::json::array();
    for (std::size_t g = 0; g < result.groups.size(); ++g) {
        nlohmann::json jg;
        jg["group"] = g;
        jg["members"] = result.groups[g].member_ids;
        jg["max_cos"] = result.groups[g].pairwise_max_cos;
        if (result.groups[g].zero_norm_flagged)
            jg["zero_norm"] = true;
        groups.push_back(std::move(jg));
    }
    out["groups"] = std::move(groups);
    write_output(out.dump(2) + "\n", opt.out_path);
    return 0;
}

int run_report_cmd(const GlobalOptions &opt, const std::string &input) {
    const SweepTable table = load_report(input);
    emit_table(table, opt);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"LOS MIMO link design and simulation for multibeam GEO satellites"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand

    GlobalOptions opt;
    app.add_option("--config", opt.config_path, "scenario file (key = value)");
    app.add_option("--out", opt.out_path, "output path (default: stdout)");
    app.add_option("--format", opt.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    auto *seed_opt = app.add_option("--seed", opt.seed, "master seed override");
    app.add_flag("--paper-scale", opt.paper_scale,
                 "run the full-population experiment instead of the desk-scale default");

    auto *design = app.add_subcommand("design-spacing",
                                      "optimal gateway spacings and design-condition residuals");
    auto *capacity = app.add_subcommand("capacity-sweep", "2x2 capacity vs ground spacing");
    auto *feeder = app.add_subcommand("feeder-sweep", "sum rate vs gateway spacing");
    auto *userlink = app.add_subcommand("userlink-sweep", "rate per beam vs downlink EIRP");
    auto *schedule = app.add_subcommand("schedule", "MADOC grouping dump (JSON)");
    auto *report = app.add_subcommand("report", "re-emit a sweep table in another format");
    std::string report_input;
    report->add_option("input", report_input, "existing csv/json table")->required();

    CLI11_PARSE(app, argc, argv);
    opt.seed_set = seed_opt->count() > 0;

    try {
        if (design->parsed())
            return run_design_spacing(opt);
        if (capacity->parsed()) {
            emit_table(run_spacing_capacity_sweep(resolve_config(opt)), opt);
            return 0;
        }
        if (feeder->parsed()) {
            emit_table(run_feeder_sweep(resolve_config(opt)), opt);
            return 0;
        }
        if (userlink->parsed()) {
            emit_table(run_userlink_sweep(resolve_config(opt)), opt);
            return 0;
        }
        if (schedule->parsed())
            return run_schedule_cmd(opt);
        if (report->parsed())
            return run_report_cmd(opt, report_input);
    } catch (const config_error &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const infeasible_scenario_error &e) {
        std::cerr << "infeasible scenario: " << e.what() << "\n";
        return 3;
    } catch (const zf_infeasible_error &e) {
        std::cerr << "infeasible scenario: " << e.what() << "\n";
        return 3;
    } catch (const degenerate_geometry_error &e) {
        std::cerr << "infeasible scenario: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
