#include "blowup/radial_quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/geometry.hpp"

namespace blowup::profiles {

namespace {

using boost::math::quadrature::gauss_kronrod;

double weight_value(RadialWeight w, double r) {
  switch (w) {
    case RadialWeight::One:
      return 1.0;
    case RadialWeight::InvR:
      return 1.0 / r;
    case RadialWeight::R:
      return r;
  }
  return 1.0;
}

constexpr double kMaxRadius = 1e12;

}  // namespace

double integrate_interval(const std::function<double(double)>& g, double a, double b,
                          double rel_tol) {
  return gauss_kronrod<double, 61>::integrate(g, a, b, 15, rel_tol);
}

RadialIntegralResult radial_integral_report(const std::function<double(double)>& f,
                                            RadialWeight weight, double rel_tol) {
  // r^2 w(r) f(r); the Kronrod nodes never touch r = 0 so 1/r is safe.
  auto g = [&](double r) { return r * r * weight_value(weight, r) * f(r); };

  RadialIntegralResult out;
  double sum = integrate_interval(g, 0.0, 1.0);
  double a = 1.0;
  double prev_tail = NAN;

  while (true) {
    const double b = 2.0 * a;
    sum += integrate_interval(g, a, b);
    a = b;

    // local exponent from g(b) vs g(b/2); need a clean power law before trusting it
    const double g1 = g(0.5 * a), g2 = g(a);
    if (g1 == 0.0 && g2 == 0.0) {
      out.tail = 0.0;
      out.r_cut = a;
      break;
    }
    if (g1 == 0.0 || g2 == 0.0 || (g1 > 0) != (g2 > 0)) {
      if (a > kMaxRadius) throw NotIntegrable("radial_integral: integrand does not settle");
      continue;
    }
    const double q = std::log(g1 / g2) / std::log(2.0);
    if (a >= 1e4 && q <= 1.0 + 1e-3) {
      throw NotIntegrable("radial_integral: tail decays like r^-" + std::to_string(q) +
                          " after the r^2 Jacobian");
    }
    if (q <= 1.0) {
      if (a > kMaxRadius) throw NotIntegrable("radial_integral: tail not integrable");
      continue;
    }
    const double tail = g2 * a / (q - 1.0);
    out.tail_exponent = q;
    const double scale = std::abs(sum) + std::abs(tail);
    const bool small = std::abs(tail) < rel_tol * scale;
    const bool settled = std::isfinite(prev_tail) &&
                         std::abs(tail - prev_tail / std::pow(2.0, q - 1.0)) < rel_tol * scale;
    prev_tail = tail;
    if (small || (a >= 64.0 && settled) || a > kMaxRadius) {
      out.tail = tail;
      out.r_cut = a;
      break;
    }
  }
  out.value = kFourPi * (sum + out.tail);
  out.tail *= kFourPi;
  return out;
}

}  // namespace blowup::profiles
