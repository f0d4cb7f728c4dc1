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

#include "losmimo/report.hpp"
#include "losmimo/scenario.hpp"

namespace losmimo {

/// 2x2 capacity versus ground antenna spacing for each configured orbit
/// spacing; the grid always includes the exact v = 1..3 design spacings.
SweepTable run_spacing_capacity_sweep(const ScenarioConfig &config);

/// End-to-end sum rate versus gateway spacing for the configured weather
/// cases, with joint and cascaded precoders and the SISO single-site
/// diversity baseline.
SweepTable run_feeder_sweep(const ScenarioConfig &config);

/// Rate per beam versus downlink EIRP for the four-reflector MU-MIMO FFR
/// system, the single-reflector MIMO payload, the phase-blind baseline and
/// the four-color SISO scheme.
SweepTable run_userlink_sweep(const ScenarioConfig &config);

/// MADOC grouping of the configured user population on the downlink rows.
struct ScheduleResult {
    std::vector<UserTerminal> users;
    std::vector<UserGroup> groups;
};

ScheduleResult run_schedule(const ScenarioConfig &config);

} // namespace losmimo
