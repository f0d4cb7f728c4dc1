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

#include "losmimo/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace losmimo {

EigenProfile eigen_profile(const Eigen::MatrixXcd &h) {
    if (h.size() == 0)
        throw std::invalid_argument("empty channel matrix");

    // Squared singular values of H instead of forming H H^H: better
    // conditioned for the near-singular matrices this gets called on.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
    const Eigen::VectorXd sv = svd.singularValues();

    EigenProfile profile;
    profile.eigenvalues = sv.array().square();
    profile.trace = profile.eigenvalues.sum();

    const double clamp = 1e-12 * profile.trace;
    for (auto &v : profile.eigenvalues)
        if (v < clamp)
            v = std::max(v, 0.0);

    const double lmax = profile.eigenvalues(0);
    const double lmin = profile.eigenvalues(profile.eigenvalues.size() - 1);
    const double l2 = profile.eigenvalues.size() > 1 ? profile.eigenvalues(1) : 0.0;
    if (lmax <= 0.0 || profile.eigenvalues.size() == 1)
        profile.condition = EigenCondition::keyhole;
    else if (lmin >= lmax * (1.0 - 1e-6))
        profile.condition = EigenCondition::optimal;
    else if (l2 <= lmax * 1e-6)
        profile.condition = EigenCondition::keyhole;
    else
        profile.condition = EigenCondition::intermediate;
    return profile;
}

double capacity_bshz(const Eigen::MatrixXcd &h, double rho) {
    const EigenProfile profile = eigen_profile(h);
    double c = 0.0;
    for (Eigen::Index u = 0; u < profile.eigenvalues.size(); ++u)
        c += std::log2(1.0 + rho * profile.eigenvalues(u));
    return c;
}

double optimal_capacity_bshz(int m, int n, double rho, double gain_sq) {
    if (m < 1 || n < 1)
        throw std::invalid_argument("antenna counts must be at least 1");
    const int u = std::min(m, n);
    const int v = std::max(m, n);
    return u * std::log2(1.0 + rho * v * gain_sq);
}

double keyhole_capacity_bshz(int m, int n, double rho, double gain_sq) {
    if (m < 1 || n < 1)
        throw std::invalid_argument("antenna counts must be at least 1");
    return std::log2(1.0 + rho * static_cast<double>(m) * n * gain_sq);
}

double orthogonality_defect(const Eigen::MatrixXcd &h) {
    const bool by_rows = h.rows() <= h.cols();
    const Eigen::Index count = by_rows ? h.rows() : h.cols();
    if (count < 2)
        throw std::invalid_argument("orthogonality defect needs at least 2 vectors");

    double worst = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
        for (Eigen::Index j = i + 1; j < count; ++j) {
            const Eigen::VectorXcd a = by_rows ? h.row(i).transpose().eval() : h.col(i).eval();
            const Eigen::VectorXcd b = by_rows ? h.row(j).transpose().eval() : h.col(j).eval();
            const double na = a.norm();
            const double nb = b.norm();
            if (na == 0.0 || nb == 0.0)
                throw std::invalid_argument("zero vector in orthogonality defect");
            worst = std::max(worst, std::abs(a.dot(b)) / (na * nb));
        }
    }
    return worst;
}

} // namespace losmimo
