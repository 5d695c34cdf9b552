#include "blowup/linearized.hpp"

#include <algorithm>
#include <array>
#include <boost/math/differentiation/autodiff.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup::linearized {

namespace {

using State = std::array<double, 2>;  // (u, du/dt) with u(t) = v(e^t)

struct ModeSystem {
  int N, k;
  void operator()(const State& x, State& dxdt, double t) const {
    const double c = std::cosh(t);
    const double g = N * (N + 2.0) / (4.0 * c * c);  // N(N+2) r^2 (1+r^2)^{-2}
    dxdt[0] = x[1];
    dxdt[1] = -(N - 2.0) * x[1] - (g - k * (k + N - 2.0)) * x[0];
  }
};

std::vector<double> log_times(double t0, double t1, double dt) {
  // uniform in t on the lattice j*dt, so t = 0 (r = 1) is always a sample
  std::vector<double> t{t0};
  const long jlo = static_cast<long>(std::floor(t0 / dt + 1e-9)) + 1;
  const long jhi = static_cast<long>(std::ceil(t1 / dt - 1e-9)) - 1;
  for (long j = jlo; j <= jhi; ++j) {
    const double tj = j * dt;
    if (tj - t.back() > 1e-9 * dt) t.push_back(tj);
  }
  if (t1 - t.back() > 1e-9 * dt) t.push_back(t1);
  else t.back() = t1;
  return t;
}

RateFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
  RateFit f;
  if (cxx <= 0.0) throw FitDegenerate("rate fit: degenerate abscissae");
  f.slope = cxy / cxx;
  f.r_squared = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
  return f;
}

template <class X>
X closed_form(int N, int k, X r) {
  using std::pow;
  const X q = 1.0 + r * r;
  if (k == 0) return (1.0 - r * r) / pow(q, 0.5 * N);
  return r / pow(q, 0.5 * N);
}

}  // namespace

double mode_residual(int N, int k, double r, double v, double dv, double d2v) {
  const double q = 1.0 + r * r;
  return d2v + (N - 1.0) / r * dv + (N * (N + 2.0) / (q * q) - k * (k + N - 2.0) / (r * r)) * v;
}

double exact_mode_value(int N, int k, double r) {
  if (k != 0 && k != 1) throw InvalidParameter("closed-form modes exist for k = 0, 1 only");
  return closed_form<double>(N, k, r);
}

double exact_mode_residual(int N, int k, double r_lo, double r_hi) {
  if (k != 0 && k != 1) throw InvalidParameter("closed-form modes exist for k = 0, 1 only");
  using boost::math::differentiation::make_fvar;
  double worst = 0.0;
  const int m = 601;
  for (int i = 0; i < m; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, i / (m - 1.0));
    const auto x = make_fvar<double, 2>(r);
    const auto v = closed_form(N, k, x);
    const double v0 = v.derivative(0), v1 = v.derivative(1), v2 = v.derivative(2);
    const double q = 1.0 + r * r;
    const double scale = std::abs(v2) + (N - 1.0) / r * std::abs(v1) +
                         (N * (N + 2.0) / (q * q) + k * (k + N - 2.0) / (r * r)) * std::abs(v0);
    const double res = std::abs(mode_residual(N, k, r, v0, v1, v2));
    worst = std::max(worst, scale > 0.0 ? res / scale : res);
  }
  return worst;
}

LinearizedMode solve_mode(int N, int k, Branch branch, double r_max, const ModeOptions& opt) {
  if (N < 3) throw InvalidParameter("solve_mode: N must be >= 3");
  if (k < 0) throw InvalidParameter("solve_mode: k must be >= 0");
  if (r_max < 1e3) throw InvalidParameter("solve_mode: r_max must be >= 1e3");
  if (!(opt.r0 > 0.0 && opt.r0 < 1.0)) throw InvalidParameter("solve_mode: r0 must lie in (0, 1)");

  namespace ode = boost::numeric::odeint;
  const ModeSystem sys{N, k};
  const double dt = std::log(10.0) / opt.samples_per_decade;
  std::vector<double> times = log_times(std::log(opt.r0), std::log(r_max), dt);
  const bool inward = branch == Branch::Singular;
  if (inward) std::reverse(times.begin(), times.end());

  State x;
  const double ts = times.front();
  const double rs = std::exp(ts);
  if (!inward) {
    const double c1 = -N * (N + 2.0) / (2.0 * (2.0 * k + N));
    const double rk = std::pow(rs, k);
    x = {rk * (1.0 + c1 * rs * rs), rk * (k + (k + 2.0) * c1 * rs * rs)};
  } else {
    const double m = -(N - 2.0 + k);
    const double d1 = -N * (N + 2.0) / (2.0 * (N + 2.0 * k));
    const double rm = std::pow(rs, m);
    x = {rm * (1.0 + d1 / (rs * rs)), rm * (m + (m - 2.0) * d1 / (rs * rs))};
  }

  auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(opt.abs_tol, opt.rel_tol);
  std::vector<State> states{x};
  double t = ts;
  double h = inward ? -dt : dt;
  double rescale = 1.0;
  long steps = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double target = times[i];
    while ((target - t) * (inward ? -1.0 : 1.0) > 0.0) {
      if ((t + h - target) * (inward ? -1.0 : 1.0) > 0.0) h = target - t;
      const double t_before = t;
      if (stepper.try_step(sys, x, t, h) == ode::fail) {
        if (std::abs(h) < 1e-12 * dt) throw StiffnessError("solve_mode: step size collapsed");
        continue;
      }
      if (++steps > 2000000) throw StiffnessError("solve_mode: too many steps");
      if (t == t_before) throw StiffnessError("solve_mode: no progress");
    }
    t = target;
    // keep the state representable; the solution is only defined up to scale
    const double mag = std::max(std::abs(x[0]), std::abs(x[1]));
    if (mag > 1e150) {
      for (auto& s : states) {
        s[0] /= mag;
        s[1] /= mag;
      }
      x[0] /= mag;
      x[1] /= mag;
      rescale *= mag;
    }
    states.push_back(x);
  }
  if (inward) {
    std::reverse(times.begin(), times.end());
    std::reverse(states.begin(), states.end());
  }

  LinearizedMode mode;
  mode.N = N;
  mode.k = k;
  mode.mu_k = 0.5 * (N - 2) + k;
  mode.branch = branch;
  mode.r.resize(times.size());
  mode.v.resize(times.size());
  mode.dv.resize(times.size());
  double vmax = 0.0, v_at_one = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double r = std::exp(times[i]);
    mode.r[i] = r;
    mode.v[i] = states[i][0];
    mode.dv[i] = states[i][1] / r;
    vmax = std::max(vmax, std::abs(mode.v[i]));
    if (std::abs(times[i]) < 1e-12) v_at_one = mode.v[i];
  }
  double scale = 1.0 / rescale;
  if (std::abs(v_at_one) > 1e-8 * vmax) {
    scale = 1.0 / v_at_one;
    mode.normalization = "v(1) = 1";
  } else {
    mode.normalization = inward ? "v ~ r^(2-N-k) at r_max" : "v ~ r^k at 0";
    scale = 1.0;
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    mode.v[i] *= scale;
    mode.dv[i] *= scale;
  }
  mode.scale = scale;
  return mode;
}

LogCoordinateReport log_coordinate_check(const LinearizedMode& mode) {
  const std::size_t m = mode.r.size();
  if (m < 20) throw InvalidParameter("log_coordinate_check: too few samples");
  const double a = 0.5 * (mode.N - 2);
  LogCoordinateReport rep;
  rep.mu_k = mode.mu_k;
  rep.t.resize(m);
  rep.psi.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    rep.t[i] = std::log(mode.r[i]);
    rep.psi[i] = std::exp(a * rep.t[i]) * mode.v[i];
    const double back = std::exp(-a * rep.t[i]) * rep.psi[i];
    if (mode.v[i] != 0.0)
      rep.inverse_transform_error =
          std::max(rep.inverse_transform_error, std::abs(back - mode.v[i]) / std::abs(mode.v[i]));
  }

  // fourth-order second difference on uniformly spaced stretches
  for (std::size_t i = 2; i + 2 < m; ++i) {
    const double h = rep.t[i + 1] - rep.t[i];
    bool uniform = true;
    for (std::size_t j = i - 2; j < i + 2; ++j)
      if (std::abs((rep.t[j + 1] - rep.t[j]) - h) > 1e-9 * h) uniform = false;
    if (!uniform) continue;
    const auto& p = rep.psi;
    const double d2 =
        (-p[i - 2] + 16.0 * p[i - 1] - 30.0 * p[i] + 16.0 * p[i + 1] - p[i + 2]) / (12.0 * h * h);
    const double c = std::cosh(rep.t[i]);
    const double g = mode.N * (mode.N + 2.0) / (4.0 * c * c);
    const double res = d2 - mode.mu_k * mode.mu_k * p[i] + g * p[i];
    const double scale = std::abs(d2) + mode.mu_k * mode.mu_k * std::abs(p[i]) + std::abs(g * p[i]);
    if (scale > 0.0) rep.max_residual = std::max(rep.max_residual, std::abs(res) / scale);
  }

  const double t0 = rep.t.front(), t1 = rep.t.back();
  const double span = 0.2 * (t1 - t0);
  std::vector<double> xl, yl, xr, yr;
  for (std::size_t i = 0; i < m; ++i) {
    if (rep.psi[i] == 0.0) continue;
    if (rep.t[i] <= t0 + span) {
      xl.push_back(rep.t[i]);
      yl.push_back(std::log(std::abs(rep.psi[i])));
    } else if (rep.t[i] >= t1 - span) {
      xr.push_back(rep.t[i]);
      yr.push_back(std::log(std::abs(rep.psi[i])));
    }
  }
  rep.left = fit_line(xl, yl);
  rep.right = fit_line(xr, yr);
  return rep;
}

GrowthBounds growth_bounds(const LinearizedMode& mode, double r_lo, double r_hi) {
  GrowthBounds b;
  bool any = false, pos = false, neg = false;
  for (std::size_t i = 0; i < mode.r.size(); ++i) {
    const double r = mode.r[i];
    if (r < r_lo * (1 - 1e-12) || r > r_hi * (1 + 1e-12)) continue;
    const double q = mode.v[i] / std::pow(r, mode.k);
    pos |= q > 0.0;
    neg |= q < 0.0;
    const double aq = std::abs(q);
    if (!any) {
      b.c_minus = b.c_plus = aq;
      any = true;
    }
    b.c_minus = std::min(b.c_minus, aq);
    b.c_plus = std::max(b.c_plus, aq);
  }
  b.one_signed = any && !(pos && neg) && b.c_minus > 0.0;
  return b;
}

double wronskian_variation(const LinearizedMode& regular, const LinearizedMode& singular,
                           std::vector<double>* values) {
  if (regular.r.size() != singular.r.size())
    throw InvalidParameter("wronskian: modes sampled on different grids");
  std::vector<double> w(regular.r.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = regular.r[i];
    if (std::abs(singular.r[i] / r - 1.0) > 1e-12)
      throw InvalidParameter("wronskian: modes sampled on different grids");
    w[i] = std::pow(r, regular.N - 1) *
           (regular.v[i] * singular.dv[i] - regular.dv[i] * singular.v[i]);
  }
  std::vector<double> sorted = w;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double med = sorted[sorted.size() / 2];
  double worst = 0.0;
  for (double x : w) worst = std::max(worst, std::abs(x - med) / std::abs(med));
  if (values) *values = std::move(w);
  return worst;
}

LiouvilleReport liouville_certificate(int N, double tau, const std::vector<int>& k_range) {
  if (!(tau > 1.0)) throw InvalidParameter("liouville_certificate: τ must exceed 1");
  if (std::abs(tau - std::round(tau)) < 1e-12) {
    std::ostringstream msg;
    msg << "liouville_certificate: integer τ = " << tau
        << " rejected; the restriction to non-integer τ is necessary (v = v_"
        << static_cast<int>(std::round(tau)) << "⁻ Y_" << static_cast<int>(std::round(tau))
        << " satisfies |v| ≲ |x|^τ)";
    throw InvalidParameter(msg.str());
  }
  LiouvilleReport rep;
  rep.N = N;
  rep.tau = tau;
  bool all = true;
  for (int k : k_range) {
    const LinearizedMode mode = solve_mode(N, k, Branch::Regular, 1e3);
    const LogCoordinateReport lc = log_coordinate_check(mode);
    DegreeVerdict d;
    d.k = k;
    d.exponent_at_origin = lc.left.slope - 0.5 * (N - 2);
    d.exponent_at_infinity = lc.right.slope - 0.5 * (N - 2);
    std::ostringstream why;
    why.precision(4);
    if (d.exponent_at_origin < tau) {
      d.excluded = true;
      why << "origin: regular branch ~ r^" << d.exponent_at_origin << ", so |v|/|x|^τ ~ |x|^"
          << d.exponent_at_origin - tau << " is unbounded at 0; the singular branch ~ r^"
          << -(N - 2 + k) << " is worse";
    } else if (d.exponent_at_infinity > tau) {
      d.excluded = true;
      why << "infinity: regular branch grows like r^" << d.exponent_at_infinity
          << " > r^τ; any singular component is unbounded at 0";
    } else {
      d.excluded = false;
      why << "not excluded: regular branch compatible with the bound at both ends";
    }
    d.reason = why.str();
    all = all && d.excluded;
    rep.degrees.push_back(d);
  }
  rep.verdict = all ? "only trivial solution" : "nontrivial degrees remain";
  return rep;
}

std::string mode_csv(const LinearizedMode& mode) {
  std::ostringstream out;
  out.precision(15);
  out << "r,v,dv\n";
  for (std::size_t i = 0; i < mode.r.size(); ++i)
    out << mode.r[i] << ',' << mode.v[i] << ',' << mode.dv[i] << '\n';
  return out.str();
}

}  // namespace blowup::linearized
