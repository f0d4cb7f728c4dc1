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

#include "losmimo/rate.hpp"

#include <cmath>

#include "losmimo/constants.hpp"
#include "losmimo/rng.hpp"

namespace losmimo {

EffectiveChannel effective_channel(const Eigen::MatrixXcd &h_dl, const Eigen::MatrixXcd &h_ul,
                                   const PrecoderSolution &precoder, const PowerBudget &budget) {
    if (h_dl.cols() != h_ul.rows() || h_ul.cols() != precoder.b_matrix.rows())
        throw std::invalid_argument("channel/precoder dimensions do not match");

    EffectiveChannel eff;
    eff.c_matrix = precoder.a_sl * (h_dl * (h_ul * precoder.b_matrix));

    const Eigen::Index k_users = eff.c_matrix.rows();
    eff.total_disturbance_var.resize(k_users);
    for (Eigen::Index k = 0; k < k_users; ++k) {
        double interference = 0.0;
        for (Eigen::Index j = 0; j < eff.c_matrix.cols(); ++j)
            if (j != k)
                interference += std::norm(eff.c_matrix(k, j));
        const double relayed =
            precoder.a_sl * precoder.a_sl * h_dl.row(k).squaredNorm() * 2.0 * budget.sigma_ul_sq;
        eff.total_disturbance_var(k) = interference + relayed + 2.0 * budget.sigma_dl_sq;
    }
    return eff;
}

double per_user_cinr(const EffectiveChannel &eff, int k) {
    if (k < 0 || k >= eff.c_matrix.rows())
        throw std::out_of_range("user index out of range");
    const double var = eff.total_disturbance_var(k);
    if (var <= 0.0)
        throw std::domain_error("non-positive disturbance variance");
    return std::norm(eff.c_matrix(k, k)) / var;
}

double spectral_efficiency_bshz(double cinr_linear) { return std::log2(1.0 + cinr_linear); }

namespace {

ConstellationAlphabet make_rings(const std::string &name,
                                 const std::vector<std::pair<int, double>> &rings,
                                 const std::vector<double> &offsets) {
    ConstellationAlphabet a;
    a.name = name;
    double power = 0.0;
    for (std::size_t r = 0; r < rings.size(); ++r) {
        const auto [count, radius] = rings[r];
        for (int i = 0; i < count; ++i) {
            const double ang = offsets[r] + 2.0 * constants::pi * i / count;
            a.symbols.push_back(std::polar(radius, ang));
            power += radius * radius;
        }
    }
    const double norm = std::sqrt(power / static_cast<double>(a.symbols.size()));
    for (auto &s : a.symbols)
        s /= norm;
    return a;
}

} // namespace

ConstellationAlphabet ring_alphabet(int points) {
    const double q = constants::pi / 4.0;
    switch (points) {
    case 4:
        return make_rings("QPSK", {{4, 1.0}}, {q});
    case 8:
        return make_rings("8PSK", {{8, 1.0}}, {q});
    case 16:
        // 4+12 rings, ring ratio 2.57
        return make_rings("16APSK", {{4, 1.0}, {12, 2.57}}, {q, constants::pi / 12.0});
    case 32:
        // 4+12+16 rings, ring ratios 2.53 and 4.30
        return make_rings("32APSK", {{4, 1.0}, {12, 2.53}, {16, 4.30}},
                          {q, constants::pi / 12.0, 0.0});
    default:
        throw std::invalid_argument("unsupported constellation size");
    }
}

const std::vector<ConstellationAlphabet> &default_alphabets() {
    static const std::vector<ConstellationAlphabet> alphabets = {
        ring_alphabet(4), ring_alphabet(8), ring_alphabet(16), ring_alphabet(32)};
    return alphabets;
}

namespace {

double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double result = 0.0;
    double digit = 1.0 / static_cast<double>(base);
    while (index) {
        result += static_cast<double>(index % base) * digit;
        index /= base;
        digit /= static_cast<double>(base);
    }
    return result;
}

} // namespace

MiEstimate mutual_information_mc(const ConstellationAlphabet &alphabet, std::complex<double> c_kk,
                                 double var_per_real, int n_samples, std::uint64_t seed) {
    const std::size_t size = alphabet.symbols.size();
    if (size < 2)
        throw std::invalid_argument("alphabet needs at least 2 symbols");
    if (var_per_real <= 0.0)
        throw std::invalid_argument("noise variance must be positive");
    if (n_samples < 1)
        throw std::invalid_argument("need at least one sample");

    const double var_total = 2.0 * var_per_real;
    const double log2a = std::log2(static_cast<double>(size));

    std::vector<std::complex<double>> scaled(size);
    for (std::size_t s = 0; s < size; ++s)
        scaled[s] = c_kk * alphabet.symbols[s];

    // The ring constellations are invariant under a rotation subgroup, and a
    // rotation of the transmitted symbol leaves its conditional information
    // unchanged (the noise is circularly symmetric). Evaluating one
    // representative per rotation orbit concentrates the sample budget.
    int fold = 1;
    for (int m = static_cast<int>(size); m >= 2; --m) {
        const std::complex<double> rot = std::polar(1.0, 2.0 * constants::pi / m);
        bool invariant = true;
        for (std::size_t s = 0; s < size && invariant; ++s) {
            const std::complex<double> rotated = alphabet.symbols[s] * rot;
            bool found = false;
            for (std::size_t t = 0; t < size && !found; ++t)
                found = std::abs(rotated - alphabet.symbols[t]) < 1e-9;
            invariant = found;
        }
        if (invariant) {
            fold = m;
            break;
        }
    }
    std::vector<std::size_t> representatives;
    {
        std::vector<bool> covered(size, false);
        const std::complex<double> rot = std::polar(1.0, 2.0 * constants::pi / fold);
        for (std::size_t s = 0; s < size; ++s) {
            if (covered[s])
                continue;
            representatives.push_back(s);
            std::complex<double> point = alphabet.symbols[s];
            for (int r = 0; r < fold; ++r) {
                for (std::size_t t = 0; t < size; ++t)
                    if (std::abs(point - alphabet.symbols[t]) < 1e-9)
                        covered[t] = true;
                point *= rot;
            }
        }
    }

    // Randomized quasi-Monte-Carlo: Halton points with a seeded
    // Cranley-Patterson rotation per replicate, mapped exactly onto the
    // circular Gaussian via (|n|^2, phase) = (-var ln(1-u), 2 pi v). The
    // replicate spread gives the standard error.
    constexpr int replicates = 4;
    const int per_symbol = std::max(
        1, n_samples / (replicates * static_cast<int>(representatives.size())));
    Rng rng(seed);

    double mean_sum = 0.0;
    double mean_sq = 0.0;
    for (int rep = 0; rep < replicates; ++rep) {
        const double shift_u = rng.uniform();
        const double shift_v = rng.uniform();
        double loss = 0.0;
        for (int k = 0; k < per_symbol; ++k) {
            double u = radical_inverse(static_cast<std::uint64_t>(k) + 1, 2) + shift_u;
            double v = radical_inverse(static_cast<std::uint64_t>(k) + 1, 3) + shift_v;
            u -= std::floor(u);
            v -= std::floor(v);
            const double radius = std::sqrt(-var_total * std::log1p(-std::min(u, 1.0 - 1e-16)));
            const std::complex<double> noise = std::polar(radius, 2.0 * constants::pi * v);
            const double d_tx = std::norm(noise);

            for (std::size_t tx : representatives) {
                const std::complex<double> y = scaled[tx] + noise;
                double acc = 0.0;
                for (std::size_t s = 0; s < size; ++s)
                    acc += std::exp(-(std::norm(y - scaled[s]) - d_tx) / var_total);
                loss += std::log2(acc);
            }
        }
        const double estimate =
            log2a - loss / (static_cast<double>(per_symbol) * representatives.size());
        mean_sum += estimate;
        mean_sq += estimate * estimate;
    }

    MiEstimate est;
    est.bits = mean_sum / replicates;
    const double variance =
        std::max(0.0, mean_sq / replicates - est.bits * est.bits);
    est.std_error = std::sqrt(variance / replicates);
    return est;
}

ModcodChoice best_modcod_mi(const std::vector<ConstellationAlphabet> &alphabets,
                            std::complex<double> c_kk, double var_per_real, int n_samples,
                            std::uint64_t seed) {
    if (alphabets.empty())
        throw std::invalid_argument("empty modcod list");
    ModcodChoice best;
    best.bits = -1.0;
    for (std::size_t i = 0; i < alphabets.size(); ++i) {
        const MiEstimate est = mutual_information_mc(alphabets[i], c_kk, var_per_real, n_samples,
                                                     derive_seed(seed, i));
        if (est.bits > best.bits) {
            best.bits = est.bits;
            best.std_error = est.std_error;
            best.name = alphabets[i].name;
        }
    }
    return best;
}

int carriers_per_beam(double bandwidth_hz, double symbol_rate_hz, double spacing_factor) {
    if (bandwidth_hz <= 0.0 || symbol_rate_hz <= 0.0 || spacing_factor <= 0.0)
        throw std::invalid_argument("carrier plan parameters must be positive");
    return static_cast<int>(std::floor(bandwidth_hz / (spacing_factor * symbol_rate_hz)));
}

double user_rate_bps(double metric_bits_per_cu, double symbol_rate_hz, int n_carriers) {
    return metric_bits_per_cu * symbol_rate_hz * n_carriers;
}

SumRate sum_rate(const std::vector<std::vector<double>> &per_group_user_rates_bps, int z_t,
                 int n_groups) {
    if (per_group_user_rates_bps.empty())
        throw std::invalid_argument("at least one group required");
    if (z_t < 1)
        throw std::invalid_argument("beam count must be positive");
    const int groups = n_groups > 0 ? n_groups : static_cast<int>(per_group_user_rates_bps.size());

    double total = 0.0;
    for (const auto &g : per_group_user_rates_bps)
        for (double r : g)
            total += r;

    SumRate s;
    s.sum_rate_bps = total / groups;
    s.rate_per_beam_bps = s.sum_rate_bps / z_t;
    return s;
}

} // namespace losmimo
