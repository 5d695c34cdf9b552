#pragma once

#include <functional>

namespace blowup::profiles {

/// Extra radial weight w(|x|) multiplying the integrand.
enum class RadialWeight { One, InvR, R };

struct RadialIntegralResult {
  double value = 0.0;
  double tail = 0.0;         // analytic tail added beyond r_cut
  double tail_exponent = 0.; // fitted decay exponent of r^2 f w at r_cut
  double r_cut = 0.0;
};

/// ∫_{R^3} f(|x|) w(|x|) dx = 4π ∫_0^∞ f(r) w(r) r^2 dr.
///
/// Gauss–Kronrod on geometric panels [0,1], [1,2], [2,4], ...; once the
/// integrand behaves like C r^{-q} with q > 1 the remainder is added from
/// that majorant. Throws NotIntegrable when the fitted exponent says the
/// tail diverges.
RadialIntegralResult radial_integral_report(const std::function<double(double)>& f,
                                            RadialWeight weight, double rel_tol = 1e-12);

inline double radial_integral(const std::function<double(double)>& f, RadialWeight weight) {
  return radial_integral_report(f, weight).value;
}

/// Plain 1-D integral of g over [a, b] (adaptive Gauss–Kronrod).
double integrate_interval(const std::function<double(double)>& g, double a, double b,
                          double rel_tol = 1e-13);

}  // namespace blowup::profiles
