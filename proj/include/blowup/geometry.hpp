#pragma once

#include <Eigen/Core>
#include <numbers>

namespace blowup {

using Point = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt3 = std::numbers::sqrt3;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

}  // namespace blowup
