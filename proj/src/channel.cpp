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

#include "losmimo/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace losmimo {

namespace {

// Slant ranges are ~4.2e7 m; double rounding alone is ~7e-9 m, a 1e-5 rad
// phase error at 50 GHz. Extended precision keeps constructed channels
// orthogonal to the level the design condition promises.
long double range_extended(const Vec3 &a, const Vec3 &b) {
    const long double dx = static_cast<long double>(a.x()) - static_cast<long double>(b.x());
    const long double dy = static_cast<long double>(a.y()) - static_cast<long double>(b.y());
    const long double dz = static_cast<long double>(a.z()) - static_cast<long double>(b.z());
    return sqrtl(dx * dx + dy * dy + dz * dz);
}

std::complex<double> los_coefficient_extended(long double range_m, double mean_range_m,
                                              const CarrierConfig &carrier) {
    constexpr long double two_pi = 2.0L * 3.141592653589793238462643383279502884L;
    const double amplitude = carrier.wavelength_m / (4.0 * constants::pi * mean_range_m);
    const long double lambda = static_cast<long double>(carrier.wavelength_m);
    double phase = static_cast<double>(-two_pi * fmodl(range_m, lambda) / lambda);
    phase = std::remainder(phase, 2.0 * constants::pi);
    if (phase <= -constants::pi)
        phase += 2.0 * constants::pi;
    return std::polar(amplitude, phase);
}

double wrap_phase(double phase) {
    double w = std::remainder(phase, 2.0 * constants::pi);
    if (w <= -constants::pi)
        w += 2.0 * constants::pi;
    return w;
}

// Local satellite frame: unit east (tangential) and north axes of the plane
// orthogonal to nadir.
struct SatFrame {
    Vec3 center;
    Vec3 east;
    Vec3 north;
};

SatFrame satellite_frame(double lon_deg) {
    const double lon = deg2rad(lon_deg);
    SatFrame f;
    f.center = ecef_geo_point(lon_deg);
    f.east = Vec3{-std::sin(lon), std::cos(lon), 0.0};
    f.north = Vec3::UnitZ();
    return f;
}

} // namespace

CarrierConfig CarrierConfig::from_frequency(double hz) {
    if (hz <= 0.0)
        throw std::invalid_argument("carrier frequency must be positive");
    return {hz, constants::speed_of_light_mps / hz};
}

std::complex<double> los_coefficient(double range_m, double mean_range_m,
                                     const CarrierConfig &carrier) {
    if (range_m <= 0.0 || mean_range_m <= 0.0)
        throw std::invalid_argument("ranges must be positive");
    const double amplitude = carrier.wavelength_m / (4.0 * constants::pi * mean_range_m);
    // fmod first so the wrapped phase does not lose precision over the ~1e9
    // wavelengths of a GEO path.
    const double phase =
        wrap_phase(-2.0 * constants::pi * std::fmod(range_m, carrier.wavelength_m) /
                   carrier.wavelength_m);
    return std::polar(amplitude, phase);
}

LosMatrix los_matrix(const std::vector<Vec3> &rx_positions, const std::vector<Vec3> &tx_positions,
                     const CarrierConfig &carrier) {
    if (rx_positions.empty() || tx_positions.empty())
        throw std::invalid_argument("antenna position lists must be non-empty");

    const Eigen::Index rows = static_cast<Eigen::Index>(rx_positions.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(tx_positions.size());

    std::vector<long double> ranges(static_cast<std::size_t>(rows * cols));
    long double sum = 0.0L;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const long double r = range_extended(rx_positions[i], tx_positions[j]);
            ranges[static_cast<std::size_t>(i * cols + j)] = r;
            sum += r;
        }

    LosMatrix m;
    m.carrier = carrier;
    m.mean_range_m = static_cast<double>(sum / (rows * cols));
    m.mean_gain = carrier.wavelength_m / (4.0 * constants::pi * m.mean_range_m);
    m.entries.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m.entries(i, j) = los_coefficient_extended(
                ranges[static_cast<std::size_t>(i * cols + j)], m.mean_range_m, carrier);
    return m;
}

LosMatrix los_matrix(const GroundArray &ground, const OrbitArray &orbit,
                     const CarrierConfig &carrier) {
    std::vector<Vec3> rx(ground.count);
    for (int m = 1; m <= ground.count; ++m)
        rx[m - 1] = ecef_ground_antenna(ground, m);
    std::vector<Vec3> tx(orbit.count);
    for (int z = 1; z <= orbit.count; ++z)
        tx[z - 1] = ecef_satellite_antenna(orbit, z);
    return los_matrix(rx, tx, carrier);
}

Eigen::MatrixXcd atmospheric_diagonal(const AtmosphericState &state) {
    if (state.attenuation_db.size() != state.phase_rad.size())
        throw std::invalid_argument("attenuation/phase lists differ in length");
    const Eigen::Index n = static_cast<Eigen::Index>(state.attenuation_db.size());
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double att = state.attenuation_db[i];
        if (att < 0.0)
            throw std::invalid_argument("attenuation must be non-negative dB");
        d(i, i) = std::polar(std::pow(10.0, -att / 20.0), -state.phase_rad[i]);
    }
    return d;
}

double pattern_gain_offaxis(const ReflectorPattern &pattern, double theta_rad) {
    if (pattern.diameter_m <= 0.0)
        throw std::invalid_argument("reflector diameter must be positive");
    const double u = constants::pi * pattern.diameter_m / pattern.carrier.wavelength_m *
                     std::abs(std::sin(theta_rad));
    if (u < 1e-3)
        return 1.0 - 5.0 * u * u / 64.0; // small-argument series of the limit
    return std::cyl_bessel_j(1, u) / (2.0 * u) + 36.0 * std::cyl_bessel_j(3, u) / (u * u * u);
}

double pattern_gain(const ReflectorPattern &pattern, const Vec3 &direction) {
    const Vec3 d = direction.normalized();
    const Vec3 b = pattern.boresight.normalized();
    const double theta = std::atan2(b.cross(d).norm(), b.dot(d));
    return pattern_gain_offaxis(pattern, theta);
}

FeederUplinkChannel feeder_uplink_channel(const GroundArray &gateways, const OrbitArray &sat_rx,
                                          const std::vector<CarrierConfig> &carriers,
                                          const AtmosphericState &atmosphere,
                                          const std::vector<ReflectorPattern> &rx_patterns) {
    if (gateways.count != 2 || sat_rx.count != 2)
        throw std::invalid_argument("feeder link expects 2 gateway and 2 satellite antennas");
    if (carriers.empty())
        throw std::invalid_argument("at least one carrier block required");
    if (atmosphere.attenuation_db.size() != 2)
        throw std::invalid_argument("atmospheric state must cover the 2 gateway antennas");
    if (rx_patterns.size() != 2)
        throw std::invalid_argument("need one receive pattern per satellite antenna");

    std::vector<Vec3> gw(2), sat(2);
    for (int i = 1; i <= 2; ++i) {
        gw[i - 1] = ecef_ground_antenna(gateways, i);
        sat[i - 1] = ecef_satellite_antenna(sat_rx, i);
    }

    Eigen::Matrix2cd d2;
    {
        const Eigen::MatrixXcd d = atmospheric_diagonal(atmosphere);
        d2 = d.topLeftCorner<2, 2>();
    }

    Eigen::Matrix2d g_ul;
    for (int z = 0; z < 2; ++z)
        for (int n = 0; n < 2; ++n)
            g_ul(z, n) = pattern_gain(rx_patterns[z], (gw[n] - sat[z]).normalized());

    FeederUplinkChannel ch;
    ch.block_carriers = carriers;
    const Eigen::Index zt = 2 * static_cast<Eigen::Index>(carriers.size());
    ch.assembled = Eigen::MatrixXcd::Zero(zt, zt);

    for (std::size_t l = 0; l < carriers.size(); ++l) {
        // Rows are the satellite receive antennas for the uplink.
        const LosMatrix los = los_matrix(sat, gw, carriers[l]);
        Eigen::Matrix2cd block = (los.entries * d2).cwiseProduct(g_ul.cast<std::complex<double>>());
        ch.blocks.push_back(block);
        ch.assembled.block<2, 2>(2 * static_cast<Eigen::Index>(l),
                                 2 * static_cast<Eigen::Index>(l)) = block;
    }
    return ch;
}

std::vector<Feed> build_feed_layout(const PayloadGeometry &payload, const CarrierConfig &carrier) {
    const std::size_t beams = payload.beam_aims.size();
    if (beams == 0)
        throw std::invalid_argument("payload has no beams");
    if (payload.reflector_of_beam.size() != beams)
        throw std::invalid_argument("reflector assignment must cover every beam");

    const SatFrame frame = satellite_frame(payload.satellite_lon_deg);

    std::vector<Vec3> aim_dirs(beams);
    for (std::size_t b = 0; b < beams; ++b) {
        const Vec3 ground = ecef_ground_point(payload.beam_aims[b].first, payload.beam_aims[b].second);
        aim_dirs[b] = (ground - frame.center).normalized();
    }

    // Reflector phase centers on the circular array (plane orthogonal to
    // nadir); a single-reflector payload collapses them to the array center.
    const int refl_count = payload.single_reflector ? 1 : payload.reflector_count;
    std::vector<Vec3> refl_center(refl_count);
    std::vector<Vec3> refl_axis(refl_count, Vec3::Zero());
    std::vector<int> refl_beams(refl_count, 0);
    const double radius = payload.single_reflector ? 0.0 : 0.5 * payload.uca_diameter_m;
    for (int rIdx = 0; rIdx < refl_count; ++rIdx) {
        const double ang = deg2rad(45.0 + 90.0 * rIdx);
        refl_center[rIdx] =
            frame.center + radius * (std::cos(ang) * frame.east + std::sin(ang) * frame.north);
    }
    for (std::size_t b = 0; b < beams; ++b) {
        const int rIdx = payload.single_reflector ? 0 : payload.reflector_of_beam[b];
        if (rIdx < 0 || rIdx >= refl_count)
            throw std::invalid_argument("reflector index out of range");
        refl_axis[rIdx] += aim_dirs[b];
        refl_beams[rIdx] += 1;
    }
    for (int rIdx = 0; rIdx < refl_count; ++rIdx) {
        if (refl_beams[rIdx] == 0)
            throw std::invalid_argument("reflector without assigned beams");
        refl_axis[rIdx].normalize();
    }

    std::vector<Feed> feeds(beams);
    for (std::size_t b = 0; b < beams; ++b) {
        const int rIdx = payload.single_reflector ? 0 : payload.reflector_of_beam[b];
        // Focal-plane displacement steering the beam away from the reflector
        // axis; the feed moves opposite to the beam offset.
        const Vec3 offset_dir = aim_dirs[b] - refl_axis[rIdx];
        const double du = payload.focal_length_m * offset_dir.dot(frame.east);
        const double dv = payload.focal_length_m * offset_dir.dot(frame.north);

        Feed f;
        f.phase_center = refl_center[rIdx] - du * frame.east - dv * frame.north;
        f.pattern = ReflectorPattern{payload.reflector_diameter_m, carrier, aim_dirs[b]};
        f.reflector_index = rIdx;
        f.aim_lat_deg = payload.beam_aims[b].first;
        f.aim_lon_deg = payload.beam_aims[b].second;
        feeds[b] = f;
    }
    return feeds;
}

double mean_beam_center_range_m(const PayloadGeometry &payload) {
    if (payload.beam_aims.empty())
        throw std::invalid_argument("payload has no beams");
    const Vec3 sat = ecef_geo_point(payload.satellite_lon_deg);
    double sum = 0.0;
    for (const auto &[lat, lon] : payload.beam_aims)
        sum += (ecef_ground_point(lat, lon) - sat).norm();
    return sum / static_cast<double>(payload.beam_aims.size());
}

Eigen::VectorXcd user_channel_row(double lat_deg, double lon_deg, const std::vector<Feed> &feeds,
                                  const CarrierConfig &carrier, double mean_range_m) {
    if (feeds.empty())
        throw std::invalid_argument("no feeds");
    const Vec3 user = ecef_ground_point(lat_deg, lon_deg);

    // Elevation check against the payload position; the feeds sit within a
    // few meters of each other, so the first one stands in for all.
    const Vec3 to_sat = feeds.front().phase_center - user;
    const double elevation = std::asin(to_sat.normalized().dot(user.normalized()));
    if (elevation <= 0.0)
        throw std::domain_error("terminal below the satellite horizon");

    Eigen::VectorXcd row(static_cast<Eigen::Index>(feeds.size()));
    for (std::size_t z = 0; z < feeds.size(); ++z) {
        const Vec3 d = user - feeds[z].phase_center;
        const double gain = pattern_gain(feeds[z].pattern, d.normalized());
        row(static_cast<Eigen::Index>(z)) =
            los_coefficient_extended(range_extended(user, feeds[z].phase_center), mean_range_m,
                                     carrier) *
            gain;
    }
    return row;
}

DownlinkChannel downlink_channel(const std::vector<TerminalSite> &users,
                                 const std::vector<Feed> &feeds, const CarrierConfig &carrier,
                                 double mean_range_m) {
    if (users.empty())
        throw std::invalid_argument("empty user group");
    if (users.size() > feeds.size())
        throw std::invalid_argument("group larger than the number of feeds");

    DownlinkChannel ch;
    ch.entries.resize(static_cast<Eigen::Index>(users.size()),
                      static_cast<Eigen::Index>(feeds.size()));
    for (std::size_t k = 0; k < users.size(); ++k) {
        ch.entries.row(static_cast<Eigen::Index>(k)) =
            user_channel_row(users[k].lat_deg, users[k].lon_deg, feeds, carrier, mean_range_m)
                .transpose();
        ch.user_ids.push_back(users[k].id);
    }
    return ch;
}

} // namespace losmimo
