#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "losmimo/report.hpp"
#include "losmimo/scenario.hpp"
#include "losmimo/sweeps.hpp"

using namespace losmimo;

TEST_CASE("scenario parsing") {
    SUBCASE("empty text yields the documented defaults") {
        const ScenarioConfig c = parse_scenario("");
        CHECK(c.satellite_lon_deg == -115.0);
        CHECK(c.gateway.lat_deg == 38.0);
        CHECK(c.gateway.tx_power_dbw_mimo == 19.0);
        CHECK(c.gateway.tx_power_dbw_siso == 22.0);
        CHECK(c.gateway.antenna_gain_dbi == 61.4);
        CHECK(c.sat_rx.g_over_t_dbk == 26.0);
        CHECK(c.downlink.user_g_over_t_dbk == 16.9);
        CHECK(c.downlink.beam_count == 16);
        CHECK(c.users.total == 400);
        CHECK(c.users.paper_total == 4000);
        CHECK(c.scheduling.epsilon == 0.25);
        CHECK(c.link.symbol_rate_hz == 10e6);
        const ScenarioConfig echoed = parse_scenario(canonical_text(c));
        CHECK(canonical_text(echoed) == canonical_text(c));
        CHECK(config_hash(echoed) == config_hash(c));
    }

    SUBCASE("values, comments, lists and ranges") {
        const ScenarioConfig c = parse_scenario("# comment\n"
                                                "gateway.spacing_km = 42.5  # trailing\n"
                                                "sweep.rain_a1_db = [0, 3, 6]\n"
                                                "downlink.eirp_sweep_dbw = 51:2:55\n"
                                                "mode.reuse = fr4\n");
        CHECK(c.gateway.spacing_km == 42.5);
        CHECK(c.sweep.rain_a1_db == std::vector<double>{0.0, 3.0, 6.0});
        CHECK(c.downlink.eirp_sweep_dbw == std::vector<double>{51.0, 53.0, 55.0});
        CHECK(c.mode.reuse == "fr4");
    }

    SUBCASE("unknown keys rejected with location") {
        try {
            parse_scenario("gateway.spacing_km = 40\nno.such_key = 1\n", "test.cfg");
            FAIL("expected config_error");
        } catch (const config_error &e) {
            const std::string msg = e.what();
            CHECK(msg.find("test.cfg:2") != std::string::npos);
            CHECK(msg.find("no.such_key") != std::string::npos);
        }
    }

    SUBCASE("malformed values rejected") {
        CHECK_THROWS_AS(parse_scenario("gateway.spacing_km = fast"), config_error);
        CHECK_THROWS_AS(parse_scenario("mode.uplink = duplex"), config_error);
        CHECK_THROWS_AS(parse_scenario("users.total = 1.5"), config_error);
    }

    SUBCASE("bound violations listed") {
        CHECK_THROWS_AS(parse_scenario("sweep.spacing_min_km = 90\nsweep.spacing_max_km = 30\n"),
                        config_error);
        CHECK_THROWS_AS(parse_scenario("scheduling.epsilon = 1.5"), config_error);
        CHECK_THROWS_AS(parse_scenario("gateway.lat_deg = 91"), config_error);
    }

    SUBCASE("region polygon shape checked") {
        CHECK_THROWS_AS(parse_scenario("users.region_lat_deg = [1, 2]\n"
                                       "users.region_lon_deg = [1, 2, 3]\n"),
                        config_error);
    }
}

TEST_CASE("table presets reproduce the published parameters") {
    SUBCASE("feeder preset") {
        const ScenarioConfig c = load_scenario("presets/feeder_tableI.cfg");
        CHECK(c.feeder.band1_min_ghz == 42.5);
        CHECK(c.feeder.band1_max_ghz == 43.5);
        CHECK(c.feeder.band2_min_ghz == 47.2);
        CHECK(c.feeder.band2_max_ghz == 50.2);
        CHECK(c.downlink.beam_count == 16);
        CHECK(c.gateway.antenna_gain_dbi == 61.4);
        CHECK(c.gateway.tx_power_dbw_mimo == 19.0);
        CHECK(c.gateway.tx_power_dbw_siso == 22.0);
        CHECK(c.sat_rx.g_over_t_dbk == 26.0);
        CHECK(c.downlink.cnr_bc_db == 10.0);
    }
    SUBCASE("user link preset") {
        const ScenarioConfig c = load_scenario("presets/userlink_tableII.cfg");
        CHECK(c.downlink.beam_count == 16);
        CHECK(c.downlink.eirp_sweep_dbw.front() == 51.0);
        CHECK(c.downlink.eirp_sweep_dbw.back() == 65.0);
        CHECK(c.downlink.user_g_over_t_dbk == 16.9);
        CHECK(c.gateway.spacing_km == 40.0);
        CHECK(c.downlink.band_min_ghz == 19.7);
        CHECK(c.downlink.band_max_ghz == 20.2);
    }
}

TEST_CASE("beam lattice and assignments") {
    const ScenarioConfig c = parse_scenario("");
    const auto aims = beam_lattice(c);
    REQUIRE(aims.size() == 16);

    const auto refl = reflector_assignment(16);
    std::set<int> used(refl.begin(), refl.end());
    CHECK(used == std::set<int>{0, 1, 2, 3});
    // each reflector serves 4 beams, never two adjacent in the 4x4 grid
    for (int b = 0; b < 16; ++b) {
        const int r = b / 4, col = b % 4;
        if (col + 1 < 4)
            CHECK(refl[b] != refl[b + 1]);
        if (r + 1 < 4) {
            CHECK(refl[b] != refl[b + 4]);
            // hex-offset diagonal neighbors
            if (col + 1 < 4)
                CHECK(refl[b] != refl[b + 5]);
        }
    }
    CHECK(fr4_colors(16) == refl);
}

TEST_CASE("user generation") {
    const ScenarioConfig c = parse_scenario("");
    const Region region = service_region(c);

    SUBCASE("zero users") { CHECK(generate_users(0, region, 1, 16.9).empty()); }

    SUBCASE("deterministic per seed") {
        const auto a = generate_users(200, region, 5, 16.9);
        const auto b = generate_users(200, region, 5, 16.9);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].lat_deg == b[i].lat_deg);
            CHECK(a[i].lon_deg == b[i].lon_deg);
        }
        const auto d = generate_users(200, region, 6, 16.9);
        bool same = true;
        for (std::size_t i = 0; i < a.size(); ++i)
            same = same && a[i].lat_deg == d[i].lat_deg;
        CHECK_FALSE(same);
    }

    SUBCASE("all inside the region") {
        const auto users = generate_users(500, region, 9, 16.9);
        for (const auto &u : users)
            CHECK(region_contains(region, u.lat_deg, u.lon_deg));
    }

    SUBCASE("chi-square uniformity over 10 equal-area cells") {
        // rectangular region split into 10 equal-area cells: 5 longitude
        // columns x 2 sine-latitude bands
        Region rect;
        rect.lat_deg = {30.0, 30.0, 46.0, 46.0};
        rect.lon_deg = {-124.0, -108.0, -108.0, -124.0};
        const int n = 4000;
        const auto users = generate_users(n, rect, 11, 16.9);
        const double s_lo = std::sin(deg2rad(30.0));
        const double s_hi = std::sin(deg2rad(46.0));
        int counts[2][5] = {};
        for (const auto &u : users) {
            const double s = std::sin(deg2rad(u.lat_deg));
            const int band = s < 0.5 * (s_lo + s_hi) ? 0 : 1;
            int col = static_cast<int>((u.lon_deg + 124.0) / (16.0 / 5.0));
            col = std::min(col, 4);
            counts[band][col] += 1;
        }
        const double expected = n / 10.0;
        double chi2 = 0.0;
        for (int b = 0; b < 2; ++b)
            for (int col = 0; col < 5; ++col)
                chi2 += (counts[b][col] - expected) * (counts[b][col] - expected) / expected;
        // chi-square with 9 dof, 1% critical value
        CHECK(chi2 < 21.666);
    }

    SUBCASE("degenerate regions rejected") {
        Region bad;
        bad.lat_deg = {10.0, 10.0, 10.0};
        bad.lon_deg = {0.0, 1.0, 2.0};
        CHECK_THROWS_AS(generate_users(10, bad, 1, 16.9), std::invalid_argument);
    }
}

TEST_CASE("link budgets") {
    const ScenarioConfig c = parse_scenario("");
    const PayloadGeometry payload = make_payload(c, false);
    const LinkBudgets b = link_budgets(c, payload);

    SUBCASE("carrier plan") {
        CHECK(b.feeder_carriers.size() == 8);
        CHECK(b.feeder_carriers.front().frequency_hz == doctest::Approx(42.75e9));
        CHECK(b.feeder_carriers.back().frequency_hz == doctest::Approx(49.95e9));
        CHECK(b.carriers_ffr == 47);
        CHECK(b.carriers_siso == 23);
        CHECK(b.carriers_fr4 == 11);
    }

    SUBCASE("clear-sky uplink CNR reproduces the published budget") {
        const double mimo = uplink_cnr_db(c, true);
        const double siso = uplink_cnr_db(c, false);
        CHECK(std::abs(mimo - 24.0) <= 0.5);
        CHECK(std::abs(siso - 24.0) <= 0.5);
        CHECK(std::abs(mimo - siso) < 0.2); // same budget in all cases
    }

    SUBCASE("beam-center CNR anchors the EIRP") {
        // 61 dBW per beam over 47 carriers gives about 10 dB at beam center
        const double p_rb = b.p_dl_rb_from_eirp(61.0, b.carriers_ffr);
        CHECK(linear_to_db(b.cnr_bc_linear(p_rb)) == doctest::Approx(10.0).epsilon(0.03));
        // and the inverse mapping round-trips
        const double p_rb2 = b.p_dl_rb_from_cnr_bc(10.0);
        CHECK(linear_to_db(b.cnr_bc_linear(p_rb2)) == doctest::Approx(10.0).epsilon(1e-9));
        // FR4 splits the same beam power over a quarter of the carriers
        const double p_fr4 = b.p_dl_rb_from_eirp(61.0, b.carriers_fr4);
        CHECK(linear_to_db(p_fr4 / p_rb) == doctest::Approx(6.3).epsilon(0.02));
    }

    SUBCASE("power parity between the plans") {
        // MIMO per-antenna power is 3 dB below the SISO antenna, so the total
        // gateway EIRP matches
        CHECK(c.gateway.tx_power_dbw_siso - c.gateway.tx_power_dbw_mimo == 3.0);
        const double total_mimo = 2.0 * db_to_linear(c.gateway.tx_power_dbw_mimo);
        const double total_siso = db_to_linear(c.gateway.tx_power_dbw_siso);
        CHECK(total_mimo == doctest::Approx(total_siso).epsilon(0.003));
        // per resource block, the SISO plan concentrates the same EIRP on
        // half of the carriers
        CHECK(b.p_ul_rb_w * 2.0 * static_cast<double>(b.carriers_ffr) ==
              doctest::Approx(b.p_ul_rb_siso_w * b.carriers_siso).epsilon(0.01));
    }

    SUBCASE("feeder plan must carry the downlink feeds") {
        ScenarioConfig wrong = c;
        wrong.downlink.beam_count = 12;
        const PayloadGeometry p12 = make_payload(wrong, false);
        CHECK_THROWS_AS(link_budgets(wrong, p12), infeasible_scenario_error);
    }
}

TEST_CASE("sweep table reports") {
    SweepTable t;
    t.kind = "capacity-sweep";
    t.version = kVersionString;
    t.config_hash = 0x1234abcd5678ef90ULL;
    t.seed = 42;
    t.columns = {"x", "label", "y"};
    t.add_row({1.5, std::string("alpha"), 0.123456789123});
    t.add_row({2.5, std::string("beta"), 97531.2468});

    SUBCASE("csv round trip is bit-identical at 9 digits") {
        const std::string csv = render_report(t, "csv");
        const SweepTable back = parse_report(csv, "csv");
        CHECK(render_report(back, "csv") == csv);
        CHECK(back.kind == t.kind);
        CHECK(back.config_hash == t.config_hash);
        CHECK(back.seed == t.seed);
        CHECK(back.number(0, "y") == t.number(0, "y"));
        CHECK(back.text(1, "label") == "beta");
    }

    SUBCASE("json round trip") {
        const std::string json = render_report(t, "json");
        const SweepTable back = parse_report(json, "json");
        CHECK(render_report(back, "json") == json);
        CHECK(back.number(1, "y") == t.number(1, "y"));
    }

    SUBCASE("empty table renders headers only") {
        SweepTable empty;
        empty.kind = "x";
        empty.version = kVersionString;
        empty.columns = {"a", "b"};
        const std::string csv = render_report(empty, "csv");
        CHECK(csv.find("a,b\n") != std::string::npos);
        const SweepTable back = parse_report(csv, "csv");
        CHECK(back.rows.empty());
        CHECK(back.columns == empty.columns);
    }

    SUBCASE("json output validates against the published schema") {
        const std::string json = render_report(t, "json");
        const nlohmann::json doc = nlohmann::json::parse(json);
        std::ifstream schema_file("schema/sweep_table.schema.json");
        REQUIRE(schema_file.good());
        const nlohmann::json schema = nlohmann::json::parse(schema_file);

        // structural validation against the published schema
        for (const auto &req : schema["required"])
            CHECK(doc.contains(req.get<std::string>()));
        CHECK(doc["version"].is_string());
        CHECK(doc["kind"].is_string());
        CHECK(doc["config_hash"].is_string());
        CHECK(doc["seed"].is_number_unsigned());
        CHECK(doc["columns"].is_array());
        for (const auto &col : doc["columns"])
            CHECK(col.is_string());
        CHECK(doc["rows"].is_array());
        for (const auto &row : doc["rows"]) {
            CHECK(row.is_array());
            CHECK(row.size() == doc["columns"].size());
            for (const auto &cell : row)
                CHECK((cell.is_number() || cell.is_string()));
        }
    }

    SUBCASE("io errors surface") {
        CHECK_THROWS(emit_report(t, "csv", "/nonexistent-dir/file.csv"));
        CHECK_THROWS_AS(render_report(t, "xml"), std::invalid_argument);
    }
}

TEST_CASE("schedule dump pipeline") {
    ScenarioConfig c = parse_scenario("users.total = 60\n");
    const ScheduleResult result = run_schedule(c);
    CHECK(result.users.size() == 60);
    std::size_t covered = 0;
    for (const auto &g : result.groups) {
        covered += g.member_ids.size();
        CHECK(g.member_ids.size() <= 16);
        CHECK(g.pairwise_max_cos <= c.scheduling.epsilon);
    }
    CHECK(covered == 60);
}
