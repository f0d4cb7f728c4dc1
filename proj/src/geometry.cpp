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

#include "losmimo/geometry.hpp"

#include <cmath>
#include <string>

namespace losmimo {

namespace {

// Treat smaller reduction-factor magnitudes as zero (no finite spacing).
constexpr double kReductionFactorFloor = 1e-6;

// Cross-term factor of the spacing condition, R_o R_E / r_min^2 (0.21 to two
// digits); carried at full precision so designed spacings track the exact
// channel.
constexpr double kCrossTermFactor =
    constants::geo_radius_m * constants::earth_radius_m /
    (constants::min_slant_range_m * constants::min_slant_range_m);

double element_offset(double spacing_m, int index, int count) {
    return spacing_m * (index - 0.5 - 0.5 * count);
}

void check_index(int index, int count, const char *what) {
    if (index < 1 || index > count)
        throw std::out_of_range(std::string(what) + " index " + std::to_string(index) +
                                " outside [1, " + std::to_string(count) + "]");
}

} // namespace

Vec3 ecef_ground_point(double lat_deg, double lon_deg) {
    const double lat = deg2rad(lat_deg);
    const double lon = deg2rad(lon_deg);
    return constants::earth_radius_m *
           Vec3{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

Vec3 ecef_geo_point(double lon_deg) {
    const double lon = deg2rad(lon_deg);
    return constants::geo_radius_m * Vec3{std::cos(lon), std::sin(lon), 0.0};
}

Vec3 ecef_ground_antenna(const GroundArray &array, int m) {
    check_index(m, array.count, "ground antenna");
    const double lat = deg2rad(array.center_lat_deg);
    const double lon = deg2rad(array.center_lon_deg);
    const double ori = deg2rad(array.orientation_deg);
    const double d = element_offset(array.spacing_m, m, array.count);
    const double re = constants::earth_radius_m;

    return {re * std::cos(lat) * std::cos(lon) -
                d * (std::sin(lon) * std::cos(ori) + std::sin(lat) * std::cos(lon) * std::sin(ori)),
            re * std::cos(lat) * std::sin(lon) +
                d * (std::cos(lon) * std::cos(ori) - std::sin(lat) * std::sin(lon) * std::sin(ori)),
            re * std::sin(lat) + d * std::cos(lat) * std::sin(ori)};
}

Vec3 ecef_satellite_antenna(const OrbitArray &array, int z) {
    check_index(z, array.count, "satellite antenna");
    const double lon = deg2rad(array.center_lon_deg);
    const double d = element_offset(array.spacing_m, z, array.count);
    const double ro = constants::geo_radius_m;

    return {ro * std::cos(lon) - d * std::sin(lon), ro * std::sin(lon) + d * std::cos(lon), 0.0};
}

double path_length(const Vec3 &ground, const Vec3 &sat) { return (ground - sat).norm(); }

double range_factor(double lat_deg, double delta_lon_deg) {
    return std::sqrt(1.42 - 0.42 * std::cos(deg2rad(lat_deg)) * std::cos(deg2rad(delta_lon_deg)));
}

GeometrySummary geometry_summary(const GroundSite &site) {
    const double lat = deg2rad(site.lat_deg);
    const double dlon = deg2rad(site.delta_lon_deg);
    const double ori = deg2rad(site.orientation_deg);

    GeometrySummary s;
    s.range_factor = range_factor(site.lat_deg, site.delta_lon_deg);
    s.mean_range_m = s.range_factor * constants::min_slant_range_m;
    s.alpha = std::cos(ori) * std::sin(dlon) + std::sin(lat) * std::sin(ori) * std::cos(dlon);
    s.beta = std::cos(lat) * std::sin(dlon);
    s.psi = std::sin(lat) * std::sin(ori) * std::sin(dlon) - std::cos(ori) * std::cos(dlon);
    s.reduction_factor =
        s.psi + kCrossTermFactor * s.alpha * s.beta / (s.range_factor * s.range_factor);
    s.range_in_envelope = s.range_factor <= constants::max_visible_range_factor;
    return s;
}

double path_length_taylor(const GroundArray &ground, const OrbitArray &orbit, int m, int z) {
    check_index(m, ground.count, "ground antenna");
    check_index(z, orbit.count, "satellite antenna");

    const GroundSite site{ground.center_lat_deg, ground.center_lon_deg - orbit.center_lon_deg,
                          ground.orientation_deg};
    const GeometrySummary s = geometry_summary(site);

    const double dm = element_offset(ground.spacing_m, m, ground.count);
    const double dz = element_offset(orbit.spacing_m, z, orbit.count);
    const double r = s.mean_range_m;

    const double delta = (2.0 * (dm * constants::geo_radius_m * s.alpha -
                                 dz * constants::earth_radius_m * s.beta + dm * dz * s.psi) +
                          dm * dm + dz * dz) /
                         (r * r);

    return r * (1.0 + 0.5 * delta - 0.125 * delta * delta);
}

OrthogonalityCheck optimality_residual(const GroundArray &ground, const OrbitArray &orbit,
                                       double wavelength_m, int n_divisor) {
    if (n_divisor < 2)
        throw std::invalid_argument("design-condition divisor must be at least 2");
    if (wavelength_m <= 0.0)
        throw std::invalid_argument("wavelength must be positive");

    const GroundSite site{ground.center_lat_deg, ground.center_lon_deg - orbit.center_lon_deg,
                          ground.orientation_deg};
    const GeometrySummary s = geometry_summary(site);
    if (std::abs(s.reduction_factor) < kReductionFactorFloor)
        throw degenerate_geometry_error("ground array collinear with iso-phase direction: no "
                                        "finite spacing satisfies the design condition");

    OrthogonalityCheck check;
    check.lhs_m =
        std::abs(orbit.spacing_m * ground.spacing_m / s.mean_range_m * s.reduction_factor);

    const double step = wavelength_m / n_divisor;
    const double x = check.lhs_m / step;
    // Nearest integer, ties resolved toward the smaller |v|.
    const int lo = static_cast<int>(std::floor(x));
    const int v = (x - lo <= (lo + 1) - x) ? lo : lo + 1;

    if (v == 0) {
        check.condition = DesignCondition::non_orthogonal;
        check.nearest_v = 1; // nearest valid candidate
    } else if (v % n_divisor == 0) {
        check.condition = DesignCondition::keyhole;
        check.nearest_v = v;
    } else {
        check.condition = DesignCondition::orthogonal;
        check.nearest_v = v;
    }
    check.residual_m = check.lhs_m - check.nearest_v * step;
    return check;
}

double optimal_ground_spacing(const OrbitArray &orbit, double carrier_hz, const GroundSite &site,
                              int v) {
    if (carrier_hz <= 0.0)
        throw std::invalid_argument("carrier frequency must be positive");
    if (orbit.count < 2)
        throw std::invalid_argument("orbit array needs at least 2 antennas");
    if (orbit.spacing_m <= 0.0)
        throw std::invalid_argument("orbit spacing must be positive");
    if (v == 0 || v % orbit.count == 0)
        throw std::invalid_argument("design index v must not be a multiple of the antenna count");

    const GeometrySummary s = geometry_summary(site);
    if (std::abs(s.reduction_factor) < kReductionFactorFloor)
        throw degenerate_geometry_error("ground array collinear with iso-phase direction");

    const double wavelength = constants::speed_of_light_mps / carrier_hz;
    return std::abs(v) * wavelength * s.mean_range_m /
           (orbit.count * orbit.spacing_m * std::abs(s.reduction_factor));
}

} // namespace losmimo
