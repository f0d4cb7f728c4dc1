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

#include "losmimo/precoding.hpp"

#include <cmath>

namespace losmimo {

namespace {

constexpr double kPinvCutoff = 1e-12;      // relative singular-value cutoff
constexpr double kRankDeficient = 1e-9;    // relative threshold for "no ZF"

Eigen::MatrixXcd pinv(const Eigen::MatrixXcd &m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double cutoff = sv.size() ? kPinvCutoff * sv(0) : 0.0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

double condition_ratio(const Eigen::MatrixXcd &m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const Eigen::VectorXd sv = svd.singularValues();
    const Eigen::Index r = std::min(m.rows(), m.cols());
    if (sv(0) == 0.0)
        return 0.0;
    return sv(r - 1) / sv(0);
}

Eigen::VectorXd feed_diagonal(const Eigen::MatrixXcd &h_ul, const Eigen::MatrixXcd &b_bar) {
    const Eigen::MatrixXcd m = h_ul * b_bar;
    return m.rowwise().squaredNorm().real();
}

// Builds the solution record for B = mu * b_bar with the unrelaxed a_sl.
PrecoderSolution assemble_solution(const Eigen::MatrixXcd &b_bar, const Eigen::MatrixXcd &w,
                                   const Eigen::MatrixXcd &h_ul, const PowerBudget &budget,
                                   const std::vector<Eigen::VectorXd> &selectors) {
    const ScaleFactors relaxed = scale_factors(b_bar, h_ul, budget, selectors);

    PrecoderSolution sol;
    sol.mu = relaxed.mu;
    sol.w_matrix = w;
    sol.b_matrix = relaxed.mu * b_bar;

    // Restore the exact per-beam constraint: the relaxation drops the relayed
    // uplink noise 2 sigma_ul^2, which matters near singular uplink blocks.
    const Eigen::VectorXd fd = feed_diagonal(h_ul, sol.b_matrix);
    const double worst = (fd.array() + 2.0 * budget.sigma_ul_sq).maxCoeff();
    if (worst <= 0.0)
        throw std::domain_error("degenerate channel: zero downlink feed power");
    sol.a_sl = std::sqrt(budget.p_dl_w / worst);

    sol.diag_target = Eigen::VectorXd::Constant(b_bar.cols(), sol.mu);
    sol.gateway_power.resize(static_cast<Eigen::Index>(selectors.size()));
    for (std::size_t n = 0; n < selectors.size(); ++n)
        sol.gateway_power(static_cast<Eigen::Index>(n)) =
            (selectors[n].array() * sol.b_matrix.rowwise().squaredNorm().real().array()).sum();
    sol.beam_power = sol.a_sl * sol.a_sl * (fd.array() + 2.0 * budget.sigma_ul_sq);
    return sol;
}

std::vector<Eigen::VectorXd> default_selectors_for(Eigen::Index z_t,
                                                   const std::vector<Eigen::VectorXd> &selectors) {
    if (!selectors.empty())
        return selectors;
    return gateway_selectors(static_cast<int>(z_t));
}

} // namespace

Eigen::VectorXd selector_diagonal(int z_t, int n) {
    if (z_t < 1)
        throw std::invalid_argument("selector size must be positive");
    if (n != 1 && n != 2)
        throw std::invalid_argument("selector index must be 1 or 2");
    Eigen::VectorXd d = Eigen::VectorXd::Zero(z_t);
    for (int i = n - 1; i < z_t; i += 2)
        d(i) = 1.0;
    return d;
}

std::vector<Eigen::VectorXd> gateway_selectors(int z_t) {
    return {selector_diagonal(z_t, 1), selector_diagonal(z_t, 2)};
}

ZfBase zf_base(const Eigen::MatrixXcd &h_dl, const Eigen::MatrixXcd &h_ul) {
    if (h_ul.rows() != h_ul.cols())
        throw std::invalid_argument("uplink matrix must be square");
    if (h_dl.cols() != h_ul.rows())
        throw std::invalid_argument("downlink/uplink dimensions do not match");
    if (h_dl.rows() > h_dl.cols())
        throw std::invalid_argument("more users than channel inputs");

    if (condition_ratio(h_ul) < kRankDeficient)
        throw zf_infeasible_error("uplink channel is rank deficient: no zero forcing possible");

    const Eigen::MatrixXcd cascade = h_dl * h_ul;
    if (condition_ratio(cascade) < kRankDeficient)
        throw zf_infeasible_error("cascaded channel is rank deficient: no zero forcing possible");

    ZfBase base;
    base.b_bar0 = pinv(h_ul) * pinv(h_dl);
    base.p_perp = Eigen::MatrixXcd::Identity(h_ul.rows(), h_ul.cols()) - pinv(cascade) * cascade;
    return base;
}

Eigen::MatrixXcd minimize_max_feed_power(const Eigen::MatrixXcd &h_ul,
                                         const Eigen::MatrixXcd &b_bar0,
                                         const Eigen::MatrixXcd &p_perp,
                                         const SocpOptions &options) {
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(b_bar0.rows(), b_bar0.cols());
    if (p_perp.norm() < 1e-12 * std::sqrt(static_cast<double>(p_perp.rows())))
        return w; // no null space, nothing to optimize

    const Eigen::MatrixXcd a0_raw = h_ul * b_bar0;
    const Eigen::MatrixXcd ap_raw = h_ul * p_perp;
    const Eigen::Index z = a0_raw.rows();

    // Work on unit-scale factors: physical channels span tens of orders of
    // magnitude.
    const double a0_norm = a0_raw.norm();
    const double ap_norm = ap_raw.norm();
    // reachable null space through the uplink?
    if (a0_norm <= 0.0 || ap_norm <= 1e-13 * h_ul.norm() * p_perp.norm())
        return w;
    const Eigen::MatrixXcd a0 = a0_raw / a0_norm;
    const Eigen::MatrixXcd ap = ap_raw / ap_norm;
    // W = (a0_norm / ap_norm) * W_tilde

    // min_W max_z q_z(W) = max_{weights in the simplex} min_W sum w_z q_z(W).
    // The inner problem is a weighted least squares with a closed form, the
    // outer one is solved by multiplicative-weights ascent; the duality gap
    // gives a certified stopping rule.
    const auto weighted_solution = [&](const Eigen::VectorXd &wgt) {
        const Eigen::MatrixXcd awh = ap.adjoint() * wgt.asDiagonal();
        Eigen::MatrixXcd gram = awh * ap;
        const Eigen::MatrixXcd rhs = awh * a0;
        // gram is positive semidefinite and rank deficient; a relative ridge
        // keeps the solve stable without disturbing the objective
        const double ridge = 1e-13 * gram.trace().real();
        gram.diagonal().array() += ridge;
        return (-gram.ldlt().solve(rhs)).eval();
    };

    const auto row_powers = [&](const Eigen::MatrixXcd &wt) {
        return (a0 + ap * wt).rowwise().squaredNorm().real().eval();
    };

    const auto project_simplex = [z](Eigen::VectorXd v) {
        std::vector<double> u(v.data(), v.data() + z);
        std::sort(u.begin(), u.end(), std::greater<double>());
        double cumulative = 0.0;
        double theta = 0.0;
        int rho = 0;
        for (int i = 0; i < static_cast<int>(u.size()); ++i) {
            cumulative += u[i];
            const double candidate = (cumulative - 1.0) / (i + 1);
            if (u[i] - candidate > 0.0) {
                rho = i + 1;
                theta = candidate;
            }
        }
        (void)rho;
        return ((v.array() - theta).max(0.0)).matrix().eval();
    };

    Eigen::VectorXd weights = Eigen::VectorXd::Constant(z, 1.0 / static_cast<double>(z));
    Eigen::MatrixXcd best_wt = Eigen::MatrixXcd::Zero(b_bar0.rows(), b_bar0.cols());
    double best_f = row_powers(best_wt).maxCoeff();
    double best_dual = 0.0;
    double dual_here = 0.0;

    const auto evaluate = [&](const Eigen::VectorXd &w_probe, Eigen::MatrixXcd &wt_out) {
        wt_out = weighted_solution(w_probe);
        const Eigen::VectorXd q = row_powers(wt_out);
        const double f = q.maxCoeff();
        if (f < best_f) {
            best_f = f;
            best_wt = wt_out;
        }
        dual_here = w_probe.dot(q);
        best_dual = std::max(best_dual, dual_here);
        return q;
    };

    // Phase 1: projected supergradient ascent on the concave dual
    // g(w) = min_W sum_z w_z q_z(W); monotone through the line search. This
    // localizes the active set cheaply.
    Eigen::MatrixXcd wt;
    Eigen::VectorXd q = evaluate(weights, wt);
    double g_current = dual_here;
    double step = 0.5;
    int evaluations = 1;
    const int ascent_budget = std::min(options.max_iterations, 60);
    while (evaluations < ascent_budget) {
        if (best_f - best_dual <= options.objective_tol * best_f)
            return (a0_norm / ap_norm) * best_wt;
        const Eigen::VectorXd grad = q / std::max(q.maxCoeff(), 1e-300);
        bool improved = false;
        for (int ls = 0; ls < 30 && evaluations < ascent_budget; ++ls) {
            const Eigen::VectorXd w_try = project_simplex(weights + step * grad);
            Eigen::MatrixXcd wt_try;
            const Eigen::VectorXd q_try = evaluate(w_try, wt_try);
            ++evaluations;
            if (dual_here > g_current) {
                weights = w_try;
                q = q_try;
                g_current = dual_here;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved)
            break;
    }

    // Phase 2: active-set Newton equalization. At the optimum every active
    // row power is equal and the inactive weights vanish; equalize q over
    // the active set by Newton on the face of the simplex, growing or
    // shrinking the set as violations appear.
    std::vector<int> active;
    for (int zi = 0; zi < z; ++zi)
        if (q(zi) >= 0.995 * best_f || weights(zi) > 1e-6)
            active.push_back(zi);

    const auto eval_on_face = [&](const std::vector<int> &set, const Eigen::VectorXd &ws,
                                  Eigen::VectorXd &q_out, Eigen::MatrixXcd &wt_out) {
        Eigen::VectorXd w_full = Eigen::VectorXd::Zero(z);
        for (std::size_t i = 0; i < set.size(); ++i)
            w_full(set[i]) = ws(static_cast<Eigen::Index>(i));
        q_out = evaluate(w_full, wt_out);
    };

    for (int round = 0; round < 6; ++round) {
        const int m = static_cast<int>(active.size());
        Eigen::VectorXd ws = Eigen::VectorXd::Zero(m);
        double mass = 0.0;
        for (int i = 0; i < m; ++i)
            mass += std::max(weights(active[i]), 1e-8);
        for (int i = 0; i < m; ++i)
            ws(i) = std::max(weights(active[i]), 1e-8) / mass;

        Eigen::VectorXd q_face;
        Eigen::MatrixXcd wt_face;
        eval_on_face(active, ws, q_face, wt_face);

        bool newton_done = m < 2;
        for (int nit = 0; nit < 25 && !newton_done; ++nit) {
            Eigen::VectorXd residual(m - 1);
            for (int i = 0; i + 1 < m; ++i)
                residual(i) = q_face(active[i]) - q_face(active[m - 1]);
            const double fmax = q_face(active[m - 1]);
            if (residual.cwiseAbs().maxCoeff() <= 1e-12 * std::abs(fmax)) {
                newton_done = true;
                break;
            }

            // finite-difference Jacobian in the face coordinates
            Eigen::MatrixXd jac(m - 1, m - 1);
            const double delta = 1e-6;
            for (int j = 0; j + 1 < m; ++j) {
                Eigen::VectorXd ws_p = ws;
                ws_p(j) += delta;
                ws_p(m - 1) -= delta;
                if (ws_p(j) < 0.0 || ws_p(m - 1) < 0.0) {
                    ws_p = ws;
                    ws_p(j) -= delta;
                    ws_p(m - 1) += delta;
                }
                Eigen::VectorXd q_p;
                Eigen::MatrixXcd wt_p;
                eval_on_face(active, ws_p, q_p, wt_p);
                const double sign = ws_p(j) > ws(j) ? 1.0 : -1.0;
                for (int i = 0; i + 1 < m; ++i)
                    jac(i, j) = sign *
                                ((q_p(active[i]) - q_p(active[m - 1])) - residual(i)) / delta;
            }

            const Eigen::VectorXd dx =
                jac.colPivHouseholderQr().solve(-residual);
            double damp = 1.0;
            bool accepted = false;
            for (int bt = 0; bt < 12; ++bt) {
                Eigen::VectorXd ws_try = ws;
                double last = 1.0;
                for (int j = 0; j + 1 < m; ++j) {
                    ws_try(j) = ws(j) + damp * dx(j);
                    last -= ws_try(j);
                }
                ws_try(m - 1) = last;
                if (ws_try.minCoeff() < 0.0) {
                    damp *= 0.5;
                    continue;
                }
                Eigen::VectorXd q_try;
                Eigen::MatrixXcd wt_try;
                eval_on_face(active, ws_try, q_try, wt_try);
                double res_try = 0.0;
                for (int i = 0; i + 1 < m; ++i)
                    res_try = std::max(res_try, std::abs(q_try(active[i]) -
                                                         q_try(active[m - 1])));
                if (res_try < residual.cwiseAbs().maxCoeff()) {
                    ws = ws_try;
                    q_face = q_try;
                    accepted = true;
                    break;
                }
                damp *= 0.5;
            }
            if (!accepted)
                break;
        }

        // manage the active set: add violators, drop vanished weights
        const double t_level = q_face(active[m - 1]);
        bool changed = false;
        for (int zi = 0; zi < z && static_cast<int>(active.size()) < z; ++zi) {
            if (std::find(active.begin(), active.end(), zi) == active.end() &&
                q_face(zi) > t_level * (1.0 + 1e-10)) {
                active.push_back(zi);
                changed = true;
            }
        }
        std::vector<int> kept;
        for (int i = 0; i < m; ++i)
            if (ws(i) > 1e-10 ||
                std::abs(q_face(active[i]) - t_level) <= 1e-8 * std::abs(t_level))
                kept.push_back(active[i]);
        if (kept.size() != active.size() && kept.size() >= 1) {
            active = kept;
            changed = true;
        }
        for (std::size_t i = 0; i < active.size() && i < static_cast<std::size_t>(m); ++i)
            weights(active[i]) = i < static_cast<std::size_t>(ws.size())
                                     ? std::max(ws(static_cast<Eigen::Index>(i)), 1e-10)
                                     : 1e-10;
        if (!changed)
            break;
    }
    return (a0_norm / ap_norm) * best_wt;
}

ScaleFactors scale_factors(const Eigen::MatrixXcd &b_bar, const Eigen::MatrixXcd &h_ul,
                           const PowerBudget &budget,
                           const std::vector<Eigen::VectorXd> &selectors) {
    if (!b_bar.allFinite())
        throw std::invalid_argument("precoder base must be finite");
    if (selectors.empty())
        throw std::invalid_argument("at least one power selector required");

    const Eigen::VectorXd row_power = b_bar.rowwise().squaredNorm().real();
    double worst_trace = 0.0;
    for (const auto &sel : selectors) {
        if (sel.size() != b_bar.rows())
            throw std::invalid_argument("selector length does not match precoder");
        worst_trace = std::max(worst_trace, (sel.array() * row_power.array()).sum());
    }
    if (worst_trace <= 0.0)
        throw std::domain_error("degenerate channel: zero gateway power");

    ScaleFactors s;
    s.mu = std::sqrt(budget.p_ul_w / worst_trace);

    const double worst_feed = feed_diagonal(h_ul, b_bar).maxCoeff();
    if (worst_feed <= 0.0)
        throw std::domain_error("degenerate channel: zero feed power");
    s.a_sl = std::sqrt(budget.p_dl_w / (s.mu * s.mu * worst_feed));
    return s;
}

PrecoderSolution joint_precoder(const Eigen::MatrixXcd &h_dl, const Eigen::MatrixXcd &h_ul,
                                const PowerBudget &budget,
                                const std::vector<Eigen::VectorXd> &selectors) {
    const auto sel = default_selectors_for(h_ul.rows(), selectors);
    const ZfBase base = zf_base(h_dl, h_ul);
    const Eigen::MatrixXcd w = minimize_max_feed_power(h_ul, base.b_bar0, base.p_perp);
    const Eigen::MatrixXcd b_bar = base.b_bar0 + base.p_perp * w;
    return assemble_solution(b_bar, w, h_ul, budget, sel);
}

PrecoderSolution cascaded_precoder(const Eigen::MatrixXcd &h_dl, const Eigen::MatrixXcd &h_ul,
                                   const PowerBudget &budget,
                                   const std::vector<Eigen::VectorXd> &selectors) {
    if (h_ul.rows() != h_ul.cols())
        throw std::invalid_argument("uplink matrix must be square");
    if (condition_ratio(h_ul) < kRankDeficient)
        throw zf_infeasible_error("uplink channel is rank deficient: no zero forcing possible");
    if (h_dl.rows() > h_dl.cols())
        throw std::invalid_argument("more users than channel inputs");
    if (condition_ratio(h_dl) < kRankDeficient)
        throw zf_infeasible_error("downlink channel is rank deficient: no zero forcing possible");

    const auto sel = default_selectors_for(h_ul.rows(), selectors);

    // Downlink-only max-min: the per-feed powers of b_dl are exactly the
    // relayed powers of the cascade, so the same minimization applies with an
    // identity uplink.
    const Eigen::MatrixXcd dl_pinv = pinv(h_dl);
    const Eigen::MatrixXcd p_perp_dl =
        Eigen::MatrixXcd::Identity(h_dl.cols(), h_dl.cols()) - pinv(h_dl) * h_dl;
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(h_dl.cols(), h_dl.cols());
    const Eigen::MatrixXcd w_dl = minimize_max_feed_power(identity, dl_pinv, p_perp_dl);
    const Eigen::MatrixXcd b_dl = dl_pinv + p_perp_dl * w_dl;

    // Uplink inversion composes the cascade.
    const Eigen::MatrixXcd b_bar = pinv(h_ul) * b_dl;
    return assemble_solution(b_bar, w_dl, h_ul, budget, sel);
}

} // namespace losmimo
