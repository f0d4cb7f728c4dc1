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
#include <cstdint>
#include <vector>

namespace losmimo {

/// Fixed single-antenna user terminal. The channel row toward the Z_t feeds
/// is filled in by the channel module before scheduling.
struct UserTerminal {
    int id = 0;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double g_over_t_db = 0.0;
    Eigen::VectorXcd channel_row;
};

/// One epsilon-orthogonal group: every intra-group pair of channel rows has
/// |cos angle| <= epsilon_used.
struct UserGroup {
    std::vector<int> member_ids;
    double epsilon_used = 0.0;
    double pairwise_max_cos = 0.0;
    bool zero_norm_flagged = false; // singleton holding an out-of-coverage user
};

/// |h_i^H h_j| / (||h_i|| ||h_j||); throws on zero vectors.
double channel_cos(const Eigen::VectorXcd &h_i, const Eigen::VectorXcd &h_j);

/// Greedy first-fit epsilon-orthogonal grouping: users are visited in a
/// seeded random order and placed into the first open group where the pair
/// metric stays at or below epsilon against every member and the group has
/// room; otherwise a new group opens. Zero-norm rows become flagged
/// singletons. Deterministic for a fixed seed.
std::vector<UserGroup> madoc_schedule(const std::vector<UserTerminal> &users, double epsilon,
                                      int max_group_size, std::uint64_t ordering_seed);

} // namespace losmimo
