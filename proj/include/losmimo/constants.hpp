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

namespace losmimo {
namespace constants {

// Spherical Earth, ideal geostationary orbit.
inline constexpr double earth_radius_m = 6378.1e3;
inline constexpr double geo_radius_m = 42164.2e3;
inline constexpr double min_slant_range_m = 35786.1e3; // geo_radius - earth_radius
inline constexpr double speed_of_light_mps = 299792458.0;
inline constexpr double boltzmann_jpk = 1.380649e-23;

inline constexpr double pi = 3.14159265358979323846;

// The closed-form spacing condition exceeds this bound only for ground sites
// outside the visibility-limited envelope; values above it are flagged.
inline constexpr double max_visible_range_factor = 1.16;

} // namespace constants

inline constexpr double deg2rad(double deg) { return deg * constants::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / constants::pi; }

inline double db_to_linear(double db);
inline double linear_to_db(double linear);

} // namespace losmimo

#include <cmath>

namespace losmimo {
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
} // namespace losmimo
