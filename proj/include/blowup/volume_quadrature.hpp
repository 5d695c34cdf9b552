#pragma once

#include <functional>
#include <vector>

#include "blowup/domain.hpp"

namespace blowup {

/// Integrand on the domain. `node` is the grid index when x is a grid node
/// (so callers can use stored node data) and -1 otherwise.
using VolumeIntegrand = std::function<double(const Point& x, long node)>;

struct VolumeQuadratureOptions {
  int azimuth_points = 32;
  double min_radius_cells = 6.0;
};

/// Smooth cutoff: 1 on [0, 1/2], 0 on [1, ∞), C^∞ in between.
double smooth_cutoff(double s);

/// Cutoff radius used around each singular point: as large as the boundary
/// (4h margin) and the other points (less than half the gap) allow.
std::vector<double> cutoff_radii(const Grid& grid, const std::vector<Point>& points,
                                 double min_radius_cells = 6.0);

/// ∫_Ω F for F smooth except for singularities up to |x - p|^{-2} at the
/// listed points. A partition of unity splits F: near each point the piece
/// χF is integrated in spherical coordinates around the point (Gauss–
/// Legendre in r and cos θ, trapezoid in the azimuth), the rest by the node
/// sum with weight h^3. F must vanish on the boundary of Ω for the node sum
/// to be second order there.
double integrate_singular(const Grid& grid, const VolumeIntegrand& F,
                          const std::vector<Point>& points,
                          const VolumeQuadratureOptions& opt = {});

}  // namespace blowup
