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

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace losmimo {

/// Power constraints and noise variances of one resource block. EIRP values
/// are linear watts; noise variances are per real dimension.
struct PowerBudget {
    double p_ul_w = 0.0;     // max EIRP per gateway antenna
    double p_dl_w = 0.0;     // max EIRP per downlink beam
    double sigma_ul_sq = 0.0;
    double sigma_dl_sq = 0.0;
};

struct zf_infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 0/1 diagonal selecting the streams of gateway antenna n (1-based): odd
/// stream indices for n = 1, even for n = 2. The two selectors sum to the
/// identity.
Eigen::VectorXd selector_diagonal(int z_t, int n);

/// Default per-gateway-antenna selector pair for an interleaved feeder link.
std::vector<Eigen::VectorXd> gateway_selectors(int z_t);

/// Pseudo-inverse root of the zero-forcing family B = mu (b_bar0 + p_perp W):
/// b_bar0 = pinv(h_ul) pinv(h_dl), p_perp the projector onto the null space
/// of the cascade h_dl h_ul.
struct ZfBase {
    Eigen::MatrixXcd b_bar0;
    Eigen::MatrixXcd p_perp;
};

ZfBase zf_base(const Eigen::MatrixXcd &h_dl, const Eigen::MatrixXcd &h_ul);

struct SocpOptions {
    int max_iterations = 50000;
    double objective_tol = 1e-9; // relative change treated as converged
    int patience = 100;          // iterations the change must stay below tol
};

/// min over W of max_z [h_ul (b_bar0 + p_perp W) (.)^H h_ul^H]_zz, solved by
/// smoothed log-sum-exp descent with continuation. W = 0 is always feasible.
Eigen::MatrixXcd minimize_max_feed_power(const Eigen::MatrixXcd &h_ul,
                                         const Eigen::MatrixXcd &b_bar0,
                                         const Eigen::MatrixXcd &p_perp,
                                         const SocpOptions &options = {});

struct ScaleFactors {
    double mu = 0.0;
    double a_sl = 0.0;
};

/// Closed-form scale factors of the relaxed max-min problem:
/// mu = sqrt(P_ul / max_n tr(B^H Qbar_n B)),
/// a_sl = sqrt(P_dl / (mu^2 max_z [h_ul B B^H h_ul^H]_zz)).
ScaleFactors scale_factors(const Eigen::MatrixXcd &b_bar, const Eigen::MatrixXcd &h_ul,
                           const PowerBudget &budget,
                           const std::vector<Eigen::VectorXd> &selectors);

struct PrecoderSolution {
    Eigen::MatrixXcd b_matrix; // Z_t x K
    double mu = 0.0;
    double a_sl = 0.0;
    Eigen::MatrixXcd w_matrix;
    Eigen::VectorXd diag_target;    // per-user diagonal magnitude (= mu each)
    Eigen::VectorXd gateway_power;  // tr(B^H Qbar_n B) per selector
    Eigen::VectorXd beam_power;     // a_sl^2 ([h_ul B B^H h_ul^H]_zz + 2 sigma_ul^2)
};

/// Full pipeline on the cascaded channel; the relaxed solution is followed by
/// an exact per-beam rescale of a_sl that restores the unrelaxed constraint
/// including the relayed uplink noise.
PrecoderSolution joint_precoder(const Eigen::MatrixXcd &h_dl, const Eigen::MatrixXcd &h_ul,
                                const PowerBudget &budget,
                                const std::vector<Eigen::VectorXd> &selectors = {});

/// Uplink inverse composed with a downlink-only max-min precoder; matches the
/// joint solution's minimum user gain.
PrecoderSolution cascaded_precoder(const Eigen::MatrixXcd &h_dl, const Eigen::MatrixXcd &h_ul,
                                   const PowerBudget &budget,
                                   const std::vector<Eigen::VectorXd> &selectors = {});

} // namespace losmimo
