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

#include "losmimo/constants.hpp"

namespace losmimo {

using Vec3 = Eigen::Vector3d;

/// Uniform linear antenna array on the ground. The orientation angle is
/// measured from the local east-west direction; (lat, lon) locate the array
/// center. Earth curvature across the array is neglected.
struct GroundArray {
    double center_lat_deg = 0.0;
    double center_lon_deg = 0.0;
    double orientation_deg = 0.0;
    double spacing_m = 0.0;
    int count = 1;
};

/// Uniform linear antenna array in the geostationary orbit, laid out
/// tangentially in the equatorial plane around the given longitude.
struct OrbitArray {
    double center_lon_deg = 0.0;
    double spacing_m = 0.0;
    int count = 1;
};

/// Ground site seen from a satellite: latitude, longitude relative to the
/// sub-satellite point, and array orientation.
struct GroundSite {
    double lat_deg = 0.0;
    double delta_lon_deg = 0.0;
    double orientation_deg = 0.0;
};

/// Closed-form substitutions of the spacing design condition for one
/// site/orientation. reduction_factor = psi + 0.21*alpha*beta/range_factor^2
/// lies in [-1, 1]; its magnitude scales the required spacing product.
struct GeometrySummary {
    double mean_range_m = 0.0;
    double range_factor = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double psi = 0.0;
    double reduction_factor = 0.0;
    bool range_in_envelope = true; // range_factor <= 1.16
};

/// Accepted spacing solution: |residual_m| must stay well below the carrier
/// wavelength for the constructed channel to be orthogonal.
struct DesignSolution {
    double ground_spacing_m = 0.0;
    int v_index = 1;
    double residual_m = 0.0;
};

enum class DesignCondition {
    orthogonal,     // nearest v is valid (not a multiple of the divisor)
    keyhole,        // nearest v is a nonzero multiple of the divisor
    non_orthogonal, // nearest v is 0 (spacing product too small)
};

/// Result of evaluating the spacing condition for a concrete geometry.
/// lhs_m is |d_SL*d_ES/r * reduction_factor|; residual_m compares it against
/// nearest_v * lambda / n.
struct OrthogonalityCheck {
    double lhs_m = 0.0;
    int nearest_v = 0;
    double residual_m = 0.0;
    DesignCondition condition = DesignCondition::non_orthogonal;
};

struct degenerate_geometry_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// ECEF position of a point on the spherical Earth surface.
Vec3 ecef_ground_point(double lat_deg, double lon_deg);

/// ECEF position of a point on the ideal geostationary arc.
Vec3 ecef_geo_point(double lon_deg);

/// ECEF position of the m-th ground antenna (1-based index).
Vec3 ecef_ground_antenna(const GroundArray &array, int m);

/// ECEF position of the z-th satellite antenna (1-based index); the array is
/// tangential in the equatorial plane, so the z-coordinate is exactly 0.
Vec3 ecef_satellite_antenna(const OrbitArray &array, int z);

double path_length(const Vec3 &ground, const Vec3 &sat);

/// Relative increase of the slant range over the sub-satellite minimum,
/// (1.42 - 0.42 cos(lat) cos(dlon))^(1/2).
double range_factor(double lat_deg, double delta_lon_deg);

GeometrySummary geometry_summary(const GroundSite &site);

/// Second-degree Taylor approximation of the exact antenna-pair distance.
double path_length_taylor(const GroundArray &ground, const OrbitArray &orbit, int m, int z);

/// Evaluate the spacing design condition for the given arrays and carrier
/// wavelength; n_divisor is max(M, Z) of the link. Throws
/// degenerate_geometry_error when the reduction factor vanishes.
OrthogonalityCheck optimality_residual(const GroundArray &ground, const OrbitArray &orbit,
                                       double wavelength_m, int n_divisor);

/// Minimum ground spacing satisfying the design condition for design index v
/// (v must not be a multiple of the orbit antenna count).
double optimal_ground_spacing(const OrbitArray &orbit, double carrier_hz, const GroundSite &site,
                              int v);

} // namespace losmimo
