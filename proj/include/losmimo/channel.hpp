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

#include <complex>
#include <utility>
#include <vector>

#include "losmimo/geometry.hpp"

namespace losmimo {

struct CarrierConfig {
    double frequency_hz = 0.0;
    double wavelength_m = 0.0;

    static CarrierConfig from_frequency(double hz);
};

/// LOS channel matrix (rows = receive, cols = transmit). All entries share
/// the common free-space amplitude lambda/(4 pi mean_range); phases come from
/// the exact per-pair path lengths.
struct LosMatrix {
    Eigen::MatrixXcd entries;
    CarrierConfig carrier;
    double mean_gain = 0.0;
    double mean_range_m = 0.0;
};

/// Per-ground-antenna tropospheric attenuation and phase shift. Identical
/// impairments are assumed for all signal paths of one antenna.
struct AtmosphericState {
    std::vector<double> attenuation_db;
    std::vector<double> phase_rad;
};

/// Normalized parabolic-reflector pattern, J1(u)/2u + 36 J3(u)/u^3 with
/// u = pi D / lambda sin(theta); boresight gain is 1.
struct ReflectorPattern {
    double diameter_m = 0.0;
    CarrierConfig carrier;
    Vec3 boresight = Vec3::UnitX(); // unit direction
};

/// Block-diagonal feeder uplink: one 2x2 block per FDMA center frequency,
/// rows = satellite receive antennas, cols = gateway antennas.
struct FeederUplinkChannel {
    std::vector<Eigen::Matrix2cd> blocks;
    std::vector<CarrierConfig> block_carriers;
    Eigen::MatrixXcd assembled;
};

/// One downlink feed: phase center in ECEF, its radiation pattern aimed at
/// the beam center, and the reflector it is mounted on.
struct Feed {
    Vec3 phase_center = Vec3::Zero();
    ReflectorPattern pattern;
    int reflector_index = 0;
    double aim_lat_deg = 0.0;
    double aim_lon_deg = 0.0;
};

/// Single-feed-per-beam payload: reflectors on a uniform circular array,
/// feeds displaced in each reflector's focal plane to steer its beams.
struct PayloadGeometry {
    double satellite_lon_deg = 0.0;
    double uca_diameter_m = 3.0;
    double reflector_diameter_m = 2.6;
    double focal_length_m = 2.6;
    int reflector_count = 4;
    bool single_reflector = false;
    std::vector<std::pair<double, double>> beam_aims; // (lat, lon) per beam
    std::vector<int> reflector_of_beam;
};

struct DownlinkChannel {
    Eigen::MatrixXcd entries; // K x Z_t
    std::vector<int> user_ids;
};

struct TerminalSite {
    int id = 0;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

/// Free-space coefficient: common amplitude lambda/(4 pi mean_range), phase
/// -2 pi range / lambda wrapped to (-pi, pi].
std::complex<double> los_coefficient(double range_m, double mean_range_m,
                                     const CarrierConfig &carrier);

LosMatrix los_matrix(const std::vector<Vec3> &rx_positions, const std::vector<Vec3> &tx_positions,
                     const CarrierConfig &carrier);

/// Downlink orientation: ground antennas receive (rows), satellite transmits.
LosMatrix los_matrix(const GroundArray &ground, const OrbitArray &orbit,
                     const CarrierConfig &carrier);

/// diag(|s_m| e^{-j xi_m}) with |s_m| = 10^(-A_m/20).
Eigen::MatrixXcd atmospheric_diagonal(const AtmosphericState &state);

double pattern_gain_offaxis(const ReflectorPattern &pattern, double theta_rad);

/// Gain toward a unit direction seen from the antenna.
double pattern_gain(const ReflectorPattern &pattern, const Vec3 &direction);

/// Uplink blocks H_ul,l * D (Hadamard) G_ul for N = 2 gateways and Z_r = 2
/// satellite receive antennas, assembled block-diagonally over the carriers.
FeederUplinkChannel feeder_uplink_channel(const GroundArray &gateways, const OrbitArray &sat_rx,
                                          const std::vector<CarrierConfig> &carriers,
                                          const AtmosphericState &atmosphere,
                                          const std::vector<ReflectorPattern> &rx_patterns);

std::vector<Feed> build_feed_layout(const PayloadGeometry &payload, const CarrierConfig &carrier);

/// Mean satellite-to-beam-center range; anchors the common downlink amplitude.
double mean_beam_center_range_m(const PayloadGeometry &payload);

/// Channel row of one terminal toward all feeds. Throws std::domain_error if
/// the satellite is below the terminal's horizon.
Eigen::VectorXcd user_channel_row(double lat_deg, double lon_deg, const std::vector<Feed> &feeds,
                                  const CarrierConfig &carrier, double mean_range_m);

DownlinkChannel downlink_channel(const std::vector<TerminalSite> &users,
                                 const std::vector<Feed> &feeds, const CarrierConfig &carrier,
                                 double mean_range_m);

} // namespace losmimo
