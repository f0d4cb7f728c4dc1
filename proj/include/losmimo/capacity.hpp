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

namespace losmimo {

enum class EigenCondition { optimal, keyhole, intermediate };

/// Eigenvalues of H*H^H (squared singular values of H), sorted descending.
struct EigenProfile {
    Eigen::VectorXd eigenvalues;
    double trace = 0.0;
    EigenCondition condition = EigenCondition::intermediate;
};

/// Per-antenna transmit CNR against per-receive-antenna noise, together with
/// the squared common channel amplitude it refers to.
struct CnrSpec {
    double rho = 0.0;
    double reference_gain_sq = 1.0;
};

EigenProfile eigen_profile(const Eigen::MatrixXcd &h);

/// log2 det(I + rho H H^H), evaluated as the eigenmode sum.
double capacity_bshz(const Eigen::MatrixXcd &h, double rho);

/// Capacity of the optimal (equal-eigenvalue) profile: U log2(1 + rho V |a|^2).
double optimal_capacity_bshz(int m, int n, double rho, double gain_sq);

/// Rank-one lower bound: log2(1 + rho M N |a|^2).
double keyhole_capacity_bshz(int m, int n, double rho, double gain_sq);

/// Largest pairwise |cos angle| between rows (rows <= cols) or columns.
/// 0 for optimal matrices, 1 for keyhole.
double orthogonality_defect(const Eigen::MatrixXcd &h);

} // namespace losmimo
