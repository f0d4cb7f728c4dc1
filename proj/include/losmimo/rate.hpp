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
#include <cstdint>
#include <string>
#include <vector>

#include "losmimo/precoding.hpp"

namespace losmimo {

/// End-to-end channel C = a_sl h_dl h_ul B together with the per-user total
/// disturbance variance (inter-stream interference + relayed uplink noise +
/// downlink noise).
struct EffectiveChannel {
    Eigen::MatrixXcd c_matrix;
    Eigen::VectorXd total_disturbance_var; // 2 sigma_bar^2 per user
};

EffectiveChannel effective_channel(const Eigen::MatrixXcd &h_dl, const Eigen::MatrixXcd &h_ul,
                                   const PrecoderSolution &precoder, const PowerBudget &budget);

/// |c_kk|^2 over the total disturbance variance.
double per_user_cinr(const EffectiveChannel &eff, int k);

double spectral_efficiency_bshz(double cinr_linear);

/// Unit-average-power ring constellation (4/8/16/32 points).
struct ConstellationAlphabet {
    std::string name;
    std::vector<std::complex<double>> symbols;
};

ConstellationAlphabet ring_alphabet(int points);
const std::vector<ConstellationAlphabet> &default_alphabets();

struct MiEstimate {
    double bits = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo mutual information of y = c s + n, s uniform over the
/// alphabet, n circularly-symmetric Gaussian with variance var_per_real per
/// real dimension. Samples are stratified over the transmit symbols;
/// deterministic for a fixed seed.
MiEstimate mutual_information_mc(const ConstellationAlphabet &alphabet, std::complex<double> c_kk,
                                 double var_per_real, int n_samples, std::uint64_t seed);

/// Highest mutual information over a modcod list, with the winning name.
struct ModcodChoice {
    double bits = 0.0;
    double std_error = 0.0;
    std::string name;
};

ModcodChoice best_modcod_mi(const std::vector<ConstellationAlphabet> &alphabets,
                            std::complex<double> c_kk, double var_per_real, int n_samples,
                            std::uint64_t seed);

/// FDMA carriers fitting a band at the given symbol rate and carrier spacing
/// factor (floor(bandwidth / (spacing_factor * symbol_rate))).
int carriers_per_beam(double bandwidth_hz, double symbol_rate_hz, double spacing_factor = 1.05);

double user_rate_bps(double metric_bits_per_cu, double symbol_rate_hz, int n_carriers);

struct SumRate {
    double sum_rate_bps = 0.0;
    double rate_per_beam_bps = 0.0;
};

/// Groups time-share the frame: R = (1/N_G) sum_g sum_k R_k, R_bar = R / Z_t.
/// n_groups defaults to the number of groups passed in.
SumRate sum_rate(const std::vector<std::vector<double>> &per_group_user_rates_bps, int z_t,
                 int n_groups = -1);

struct UserRateRow {
    int group_index = 0;
    int user_id = 0;
    double cinr_linear = 0.0;
    double spectral_eff_bshz = 0.0;
    double mi_bits_per_cu = 0.0;
    double rate_bps = 0.0;
    std::string modcod;
};

struct RateReport {
    std::vector<UserRateRow> per_user;
    std::vector<double> per_group_sum_bps;
    double sum_rate_bps = 0.0;
    double rate_per_beam_bps = 0.0;
    double sum_rate_gaussian_bps = 0.0; // spectral-efficiency-based counterpart
    double rate_per_beam_gaussian_bps = 0.0;
    double symbol_rate_hz = 0.0;
    int carriers = 0;
};

} // namespace losmimo
