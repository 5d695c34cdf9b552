#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "blowup/green.hpp"

namespace blowup {

struct BubbleConfiguration {
  std::vector<Point> points;
  std::optional<Eigen::VectorXd> weights;  // Λ with Λ_1 = 1
  std::vector<double> a_values;
  std::vector<double> V_values;

  int size() const { return static_cast<int>(points.size()); }
  /// Distinct points, positive weights with Λ_1 = 1.
  void validate() const;
};

struct InteractionSpectrum {
  Eigen::MatrixXd matrix;
  double rho = 0.0;
  Eigen::VectorXd perron;       // Λ_1 = 1
  Eigen::VectorXd gradient;     // ∂ρ/∂x_{i,l} at 3i + l; empty unless requested
  double spectral_gap = 0.0;    // +inf for n = 1
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;
};

using FieldProvider = std::function<std::shared_ptr<const GreenField>(const Point&)>;

/// The discrete interaction model. Off-diagonal entries are symmetrized,
/// m_ij = -(G_h(x_i; x_j) + G_h(x_j; x_i))/2, so M is exactly symmetric and
/// ρ is a smooth function of the points; M̃^l is its exact derivative.
class InteractionModel {
 public:
  InteractionModel(const GreenSolver& solver, std::vector<Point> points, bool with_gradient,
                   int threads = 1);
  InteractionModel(const GreenSolver& solver, std::vector<Point> points, bool with_gradient,
                   const FieldProvider& provider);

  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<Point>& points() const { return points_; }
  const GreenField& field(int i) const { return *fields_[i]; }
  const std::vector<std::shared_ptr<const GreenField>>& fields() const { return fields_; }

  const Eigen::MatrixXd& matrix() const { return M_; }
  /// Diagonal ∂_lφ_a(x_i), off-diagonal -2∂_l^x G_a(x_i, x_j).
  Eigen::MatrixXd mtilde(int l) const;
  InteractionSpectrum spectrum() const;

 private:
  void validate(const GreenSolver& solver) const;
  void assemble();

  std::vector<Point> points_;
  std::vector<std::shared_ptr<const GreenField>> fields_;
  bool with_gradient_;
  Eigen::MatrixXd M_;
};

/// Eigendecomposition with Perron normalization (largest entry positive,
/// then Λ_1 = 1). Throws SpectralDegeneracy when the gap is below 1e-10.
InteractionSpectrum analyze_matrix(const Eigen::MatrixXd& M);

/// ∂_l^{x_i} ρ = Λ̂_i (M̃^l Λ̂)_i with Λ̂ the unit Perron vector.
Eigen::VectorXd rho_gradient(const InteractionSpectrum& spectrum,
                             const std::array<Eigen::MatrixXd, 3>& mtilde);

InteractionSpectrum build_matrix(const DomainSpec& dom, const PotentialSpec& a,
                                 const BubbleConfiguration& config);
Eigen::MatrixXd build_mtilde(const DomainSpec& dom, const PotentialSpec& a,
                             const BubbleConfiguration& config, int l);

/// ρ_a >= -1e-10.
bool positive_semidefinite_check(const InteractionSpectrum& spectrum);

}  // namespace blowup
