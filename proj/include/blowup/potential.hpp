#pragma once

#include <array>
#include <memory>
#include <vector>

#include "blowup/domain.hpp"

namespace blowup {

enum class PotentialKind { Constant, Polynomial, GridSamples };

/// Potential a(x) or V(x): a quadratic polynomial plus optional grid samples
/// (trilinearly interpolated). Sums and scalings stay inside this family.
class PotentialSpec {
 public:
  PotentialSpec() = default;

  static PotentialSpec constant(double c);
  /// c0 + b·x + x^T Q x with Q symmetric.
  static PotentialSpec polynomial(double c0, const Eigen::Vector3d& b, const Eigen::Matrix3d& Q);
  /// Samples indexed like Grid (i fastest); the grid box is taken from dom.
  static PotentialSpec grid_samples(const DomainSpec& dom, std::vector<double> values);

  PotentialKind kind() const;
  bool is_constant() const { return kind() == PotentialKind::Constant; }
  double constant_value() const { return c0_; }
  double c0() const { return c0_; }
  const Eigen::Vector3d& linear() const { return b_; }
  const Eigen::Matrix3d& quadratic() const { return Q_; }
  bool has_samples() const { return samples_ != nullptr; }
  const std::vector<double>& samples() const;
  const DomainSpec& sample_domain() const;

  double operator()(const Point& x) const;
  Eigen::Vector3d gradient(const Point& x) const;

  PotentialSpec scaled(double s) const;
  PotentialSpec plus(const PotentialSpec& other) const;

  bool is_zero() const;

 private:
  struct Samples {
    DomainSpec dom;
    Point lo;
    Eigen::Vector3d h;
    int n = 0;
    std::vector<double> values;
  };

  double c0_ = 0.0;
  Eigen::Vector3d b_ = Eigen::Vector3d::Zero();
  Eigen::Matrix3d Q_ = Eigen::Matrix3d::Zero();
  std::shared_ptr<const Samples> samples_;
};

}  // namespace blowup
