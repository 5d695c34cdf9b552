#include "blowup/profiles.hpp"

#include <cmath>
#include <string>

#include "blowup/errors.hpp"

namespace blowup::profiles {

namespace {

void require_nonnegative(double r, const char* what) {
  if (!(r >= 0.0)) throw InvalidParameter(std::string(what) + ": radius must be >= 0");
}

// Below this radius W and its derivatives come from the Taylor series.
constexpr double kWSeriesRadius = 1e-3;

}  // namespace

double eval_bubble(const BubbleParams& p, const Point& x) {
  if (!(p.mu > 0.0)) throw InvalidParameter("eval_bubble: mu must be positive");
  const double d2 = (x - p.center).squaredNorm();
  return std::sqrt(p.mu) / std::sqrt(p.mu * p.mu + d2 / 3.0);
}

RadialJet bubble_jet(double r) {
  require_nonnegative(r, "bubble");
  const double u = 1.0 + r * r / 3.0;
  const double s = 1.0 / std::sqrt(u);
  const double s3 = s / u;
  const double s5 = s3 / u;
  return {s, -(r / 3.0) * s3, -s3 / 3.0 + (r * r / 3.0) * s5};
}

RadialJet homogeneous_v_jet(double r) {
  require_nonnegative(r, "homogeneous_v");
  const double q = 3.0 + r * r;
  const double sq = std::sqrt(q);
  const double q32 = q * sq;
  const double q52 = q32 * q;
  const double q72 = q52 * q;
  const double r2 = r * r;
  return {(3.0 - r2) / q32, r * (r2 - 15.0) / q52, -(2.0 * r2 * r2 - 69.0 * r2 + 45.0) / q72};
}

double cancellation_h(double r) {
  require_nonnegative(r, "cancellation_h");
  if (r < 1e-2) {
    const double r2 = r * r;
    return r * r2 *
           (1.0 / 9.0 + r2 * (-1.0 / 15.0 + r2 * (5.0 / 189.0 + r2 * (-7.0 / 729.0 + r2 / 297.0))));
  }
  return -r + 2.0 * kSqrt3 * std::atan(r / kSqrt3) - 3.0 * r / (r * r + 3.0);
}

double psi(double r) {
  require_nonnegative(r, "psi");
  if (r == 0.0) return 0.0;
  const double q = 3.0 + r * r;
  const double d = 3.0 - r * r;
  return kSqrt3 * cancellation_h(r) * q * q * q / (r * r * d * d);
}

RadialJet correction_w_jet(double r) {
  require_nonnegative(r, "correction_w");
  const double r2 = r * r;
  if (r < kWSeriesRadius) {
    // W = r^2/6 - r^4/20 + 61 r^6/3024 - 421 r^8/54432 + ...
    const double c2 = 1.0 / 6.0, c4 = -1.0 / 20.0, c6 = 61.0 / 3024.0, c8 = -421.0 / 54432.0;
    const double value = r2 * (c2 + r2 * (c4 + r2 * (c6 + r2 * c8)));
    const double d1 = r * (2.0 * c2 + r2 * (4.0 * c4 + r2 * (6.0 * c6 + r2 * 8.0 * c8)));
    const double d2 = 2.0 * c2 + r2 * (12.0 * c4 + r2 * (30.0 * c6 + r2 * 56.0 * c8));
    return {value, d1, d2};
  }

  const double q = 3.0 + r2;
  const double sq = std::sqrt(q);
  const double q32 = q * sq;
  const double q52 = q32 * q;
  const double q72 = q52 * q;
  const double r4 = r2 * r2;
  const double r6 = r4 * r2;

  const double a0 = (r4 - 18.0 * r2 + 9.0) / (r * q32);
  const double a1 = 9.0 * (5.0 * r4 - 10.0 * r2 - 3.0) / (r2 * q52);
  const double a2 = -9.0 * (15.0 * r6 - 80.0 * r4 - 21.0 * r2 - 18.0) / (r2 * r * q72);

  const double e0 = kSqrt3 * cancellation_h(r);
  const double e1 = kSqrt3 * r2 * (3.0 - r2) / (q * q);
  const double e2 = -18.0 * kSqrt3 * r * (r2 - 1.0) / (q * q * q);

  const double j0 = kSqrt3 * (-0.5 * r2 + 12.0 * std::log1p(r2 / 3.0) - 12.0 * r2 / q);
  const double j1 = -kSqrt3 * r * (r4 - 18.0 * r2 + 9.0) / (q * q);
  const double j2 = -kSqrt3 * (r6 + 33.0 * r4 - 189.0 * r2 + 27.0) / (q * q * q);

  const RadialJet v = homogeneous_v_jet(r);

  RadialJet w;
  w.value = -a0 * e0 - v.value * j0;
  w.d1 = -(a1 * e0 + a0 * e1) - (v.d1 * j0 + v.value * j1);
  w.d2 = -(a2 * e0 + 2.0 * a1 * e1 + a0 * e2) - (v.d2 * j0 + 2.0 * v.d1 * j1 + v.value * j2);
  return w;
}

double eval_correction_w(double r) { return correction_w_jet(r).value; }

double RadialProfile::operator()(double r) const {
  switch (kind) {
    case ProfileKind::Bubble:
      return bubble(r);
    case ProfileKind::CorrectionW:
      return eval_correction_w(r);
    case ProfileKind::HomogeneousV:
      return homogeneous_v(r);
    case ProfileKind::PsiIntegrand:
      return psi(r);
  }
  return 0.0;
}

}  // namespace blowup::profiles
