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

#include "losmimo/scheduling.hpp"

#include <numeric>
#include <stdexcept>

#include "losmimo/rng.hpp"

namespace losmimo {

double channel_cos(const Eigen::VectorXcd &h_i, const Eigen::VectorXcd &h_j) {
    if (h_i.size() != h_j.size())
        throw std::invalid_argument("channel vectors differ in length");
    const double ni = h_i.norm();
    const double nj = h_j.norm();
    if (ni == 0.0 || nj == 0.0)
        throw std::invalid_argument("zero channel vector");
    return std::abs(h_i.dot(h_j)) / (ni * nj);
}

std::vector<UserGroup> madoc_schedule(const std::vector<UserTerminal> &users, double epsilon,
                                      int max_group_size, std::uint64_t ordering_seed) {
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (max_group_size < 1)
        throw std::invalid_argument("group size limit must be positive");

    // Seeded Fisher-Yates visiting order; the draw algorithm is pinned down
    // so the grouping reproduces across platforms.
    std::vector<std::size_t> order(users.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(ordering_seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_index(i)]);

    struct OpenGroup {
        std::vector<std::size_t> members;
        double max_cos = 0.0;
    };
    std::vector<OpenGroup> open;
    std::vector<UserGroup> flagged;

    for (std::size_t idx : order) {
        const UserTerminal &u = users[idx];
        if (u.channel_row.size() == 0)
            throw std::invalid_argument("user channel row not populated");
        if (u.channel_row.norm() == 0.0) {
            UserGroup g;
            g.member_ids = {u.id};
            g.epsilon_used = epsilon;
            g.zero_norm_flagged = true;
            flagged.push_back(std::move(g));
            continue;
        }

        bool placed = false;
        for (auto &g : open) {
            if (g.members.size() >= static_cast<std::size_t>(max_group_size))
                continue;
            double worst = 0.0;
            bool ok = true;
            for (std::size_t other : g.members) {
                const double c = channel_cos(u.channel_row, users[other].channel_row);
                if (c > epsilon) {
                    ok = false;
                    break;
                }
                worst = std::max(worst, c);
            }
            if (ok) {
                g.members.push_back(idx);
                g.max_cos = std::max(g.max_cos, worst);
                placed = true;
                break;
            }
        }
        if (!placed)
            open.push_back(OpenGroup{{idx}, 0.0});
    }

    std::vector<UserGroup> groups;
    groups.reserve(open.size() + flagged.size());
    for (const auto &g : open) {
        UserGroup out;
        out.epsilon_used = epsilon;
        out.pairwise_max_cos = g.max_cos;
        for (std::size_t idx : g.members)
            out.member_ids.push_back(users[idx].id);
        groups.push_back(std::move(out));
    }
    for (auto &g : flagged)
        groups.push_back(std::move(g));
    return groups;
}

} // namespace losmimo
