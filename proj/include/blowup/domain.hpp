#pragma once

#include <array>
#include <cstddef>
#include <variant>
#include <vector>

#include "blowup/geometry.hpp"

namespace blowup {

struct Ball {
  Point center = Point::Zero();
  double radius = 1.0;
};

struct Box {
  Point lo = Point::Constant(-1.0);
  Point hi = Point::Constant(1.0);
};

/// Geometry plus the number of grid nodes per axis.
struct DomainSpec {
  std::variant<Ball, Box> shape = Ball{};
  int resolution = 64;

  bool is_ball() const { return std::holds_alternative<Ball>(shape); }
  const Ball& ball() const { return std::get<Ball>(shape); }
  const Box& box() const { return std::get<Box>(shape); }

  /// Throws InvalidParameter / GeometryError on a malformed spec.
  void validate() const;

  /// Signed distance to the boundary, positive inside.
  double inside_distance(const Point& x) const;
  double diameter() const;
  bool contains(const Point& x) const { return inside_distance(x) > 0.0; }
};

/// Uniform tensor grid covering the bounding box of a domain.
class Grid {
 public:
  explicit Grid(const DomainSpec& dom);

  int n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  const Point& lo() const { return lo_; }
  const Eigen::Vector3d& spacing() const { return h_; }
  double hmax() const { return h_.maxCoeff(); }
  double cell_volume() const { return h_.prod(); }
  const DomainSpec& domain() const { return dom_; }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_) * (j + static_cast<std::size_t>(n_) * k);
  }
  std::array<int, 3> ijk(std::size_t idx) const {
    const int i = static_cast<int>(idx % n_);
    const int j = static_cast<int>((idx / n_) % n_);
    const int k = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
    return {i, j, k};
  }
  Point node(int i, int j, int k) const {
    return lo_ + Point(i * h_[0], j * h_[1], k * h_[2]);
  }
  Point node(std::size_t idx) const {
    const auto c = ijk(idx);
    return node(c[0], c[1], c[2]);
  }

  /// Nodes where the solution is unknown (strictly inside, off the boundary).
  bool is_interior(std::size_t idx) const { return interior_[idx]; }
  const std::vector<char>& interior_mask() const { return interior_; }

 private:
  DomainSpec dom_;
  int n_;
  Point lo_;
  Eigen::Vector3d h_;
  std::vector<char> interior_;
};

}  // namespace blowup
