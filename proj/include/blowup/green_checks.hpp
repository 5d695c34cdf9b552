#pragma once

#include <vector>

#include "blowup/green.hpp"

namespace blowup {

/// Least-squares fit of G_a(z,y) - 1/(4π|z-y|) ≈ c0 + c1·(z-y) + c2|z-y| on
/// the shell 4h <= |z-y| <= 12h, augmented with the six quadratic monomials and
/// |z-y|^3 so that the curvature of H_a and the next odd term do not leak
/// into c1 and c2.
struct ExpansionReport {
  double c0 = 0.0;
  Eigen::Vector3d c1 = Eigen::Vector3d::Zero();
  double c2 = 0.0;
  double expected_c0 = 0.0;                            // -φ_a(y)
  Eigen::Vector3d expected_c1 = Eigen::Vector3d::Zero();  // -∇φ_a(y)/2
  double expected_c2 = 0.0;                            // a(y)/(8π)
  int samples = 0;
  double condition = 0.0;
  double rms_residual = 0.0;
};

ExpansionReport ha_local_expansion_check(const GreenSolver& solver, const Point& y);
ExpansionReport ha_local_expansion_check(const DomainSpec& dom, const PotentialSpec& a,
                                         const Point& y);

/// Σ_{k=0}^{K} h_k(x, y) for constant a.
double hk_series_partial_sum(double a_const, const Point& x, const Point& y, int K);

struct ResolventReport {
  std::vector<double> eps;
  std::vector<double> difference_quotients;  // (φ_{a+εV}(y) - φ_a(y)) / ε
  double extrapolated_slope = 0.0;           // linear extrapolation to ε = 0
  double integral = 0.0;                     // ∫ G_a(y,·)^2 V
  double relative_gap = 0.0;
};

/// First-order check of φ_{a+εV} - φ_a = ε∫G_a² V. Only the slope is
/// compared; the remainder order is not asserted. Throws NotCoercive naming
/// the first ε at which a + εV loses coercivity.
ResolventReport resolvent_perturbation_check(const DomainSpec& dom, const PotentialSpec& a,
                                             const PotentialSpec& V, const Point& y,
                                             const std::vector<double>& eps_list);

/// ∫_Ω G_a(x, y)^2 V(x) dx with the singular quadrature.
double green_squared_integral(const GreenField& field, const PotentialSpec& V);

}  // namespace blowup
