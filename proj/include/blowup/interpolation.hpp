#pragma once

#include <vector>

#include "blowup/domain.hpp"

namespace blowup {

/// Tensor Lagrange interpolation of node data. Tries 6 points per axis and
/// falls back to 4, then 2, when the stencil reaches nodes without data.
/// Returns false when even the trilinear stencil is incomplete.
bool lagrange_interpolate(const Grid& grid, const std::vector<double>& values,
                          const std::vector<char>& valid, const Point& x, double* value,
                          Eigen::Vector3d* gradient = nullptr);

}  // namespace blowup
