#pragma once

#include "blowup/geometry.hpp"

namespace blowup::profiles {

/// Scale and center of a rescaled bubble B_{mu,x0}.
struct BubbleParams {
  double mu = 1.0;
  Point center = Point::Zero();
};

/// Value together with first and second radial derivatives.
struct RadialJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// B_{mu,x0}(x) = mu^{1/2} / (mu^2 + |x - x0|^2 / 3)^{1/2}; solves -ΔB = B^5 on R^3.
/// Throws InvalidParameter when mu <= 0.
double eval_bubble(const BubbleParams& p, const Point& x);

/// Unit bubble B(r) = (1 + r^2/3)^{-1/2} and its radial derivatives.
RadialJet bubble_jet(double r);
inline double bubble(double r) { return bubble_jet(r).value; }

/// v(r) = (3 - r^2)/(3 + r^2)^{3/2}, the dilation mode of B (-Δv = 5 B^4 v).
RadialJet homogeneous_v_jet(double r);
inline double homogeneous_v(double r) { return homogeneous_v_jet(r).value; }

/// h(r) = -r + 2√3 arctan(r/√3) - 3r/(r^2+3) = O(r^3). Uses a Taylor
/// expansion for r < 1e-2 where the closed form cancels catastrophically.
double cancellation_h(double r);

/// Integrand of the variation-of-constants formula,
/// psi(r) = √3 h(r) (3+r^2)^3 / (r^2 (3-r^2)^2). Has a double pole at r = √3.
double psi(double r);

/// Radial correction profile W: -ΔW - 5 B^4 W = -B, W(0) = W'(0) = 0.
///
/// Evaluated from the integrated form of W = v ∫_0^r psi: since
/// 1/(r^2 v^2) has the rational antiderivative (r^4-18r^2+9)/(r(r^2-3)),
/// integrating by parts gives
///   W = -A(r) η(r) - v(r) J(r),
///   A = (r^4 - 18 r^2 + 9) / (r (3+r^2)^{3/2}),  η = √3 h,
///   J = √3 (-r^2/2 + 12 log(1 + r^2/3) - 12 r^2/(r^2+3)),
/// which is analytic on [0, ∞), including r = √3 where v vanishes.
/// Derivatives come from the product rule on this form.
RadialJet correction_w_jet(double r);
double eval_correction_w(double r);

enum class ProfileKind { Bubble, CorrectionW, HomogeneousV, PsiIntegrand };

/// Tagged radial profile, evaluable at any r >= 0.
struct RadialProfile {
  ProfileKind kind = ProfileKind::Bubble;
  double operator()(double r) const;
};

}  // namespace blowup::profiles
