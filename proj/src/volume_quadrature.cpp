#include "blowup/volume_quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

constexpr int kRadialPoints = 24;  // per radial piece; the ball is split at ρ/2
constexpr int kPolarPoints = 16;

double step_kernel(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// full Gauss–Legendre rule on [-1, 1] from boost's half tables
template <int N>
void gauss_legendre(std::vector<double>& x, std::vector<double>& w) {
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& a = rule::abscissa();
  const auto& wt = rule::weights();
  x.clear();
  w.clear();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      x.push_back(0.0);
      w.push_back(wt[i]);
      continue;
    }
    x.push_back(a[i]);
    w.push_back(wt[i]);
    x.push_back(-a[i]);
    w.push_back(wt[i]);
  }
}

}  // namespace

double smooth_cutoff(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const double t = 2.0 * s - 1.0;  // 0 -> 1 across the transition
  const double a = step_kernel(1.0 - t), b = step_kernel(t);
  return a / (a + b);
}

std::vector<double> cutoff_radii(const Grid& grid, const std::vector<Point>& points,
                                 double min_radius_cells) {
  const double h = grid.hmax();
  std::vector<double> rho(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double r = grid.domain().inside_distance(points[i]) - 4.0 * h;
    for (std::size_t j = 0; j < points.size(); ++j)
      if (j != i) r = std::min(r, 0.45 * (points[i] - points[j]).norm());
    if (r < min_radius_cells * h)
      throw GeometryError("volume quadrature: singular point too close to the boundary or "
                          "to another singular point");
    rho[i] = r;
  }
  return rho;
}

double integrate_singular(const Grid& grid, const VolumeIntegrand& F,
                          const std::vector<Point>& points, const VolumeQuadratureOptions& opt) {
  const std::vector<double> rho = cutoff_radii(grid, points, opt.min_radius_cells);

  std::vector<double> xr, wr, xt, wt;
  gauss_legendre<kRadialPoints>(xr, wr);
  gauss_legendre<kPolarPoints>(xt, wt);
  const int np = opt.azimuth_points;

  double inner = 0.0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double R = rho[p];
    double sum = 0.0;
    for (int piece = 0; piece < 2; ++piece) {
      const double r0 = piece == 0 ? 0.0 : 0.5 * R;
      const double r1 = piece == 0 ? 0.5 * R : R;
      for (std::size_t ir = 0; ir < xr.size(); ++ir) {
        const double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * xr[ir];
        const double chi = smooth_cutoff(r / R);
        if (chi == 0.0) continue;
        const double wrad = 0.5 * (r1 - r0) * wr[ir] * r * r * chi;
        for (std::size_t it = 0; it < xt.size(); ++it) {
          const double ct = xt[it];
          const double st = std::sqrt(1.0 - ct * ct);
          double ring = 0.0;
          for (int ip = 0; ip < np; ++ip) {
            const double ph = 2.0 * kPi * (ip + 0.5) / np;
            const Point x = points[p] + r * Point(st * std::cos(ph), st * std::sin(ph), ct);
            ring += F(x, -1);
          }
          sum += wrad * wt[it] * ring * (2.0 * kPi / np);
        }
      }
    }
    inner += sum;
  }

  double outer = 0.0;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!grid.is_interior(idx)) continue;
    const Point x = grid.node(idx);
    double w = 1.0;
    for (std::size_t p = 0; p < points.size(); ++p) w -= smooth_cutoff((x - points[p]).norm() / rho[p]);
    if (w <= 0.0) continue;
    outer += w * F(x, static_cast<long>(idx));
  }
  return inner + outer * grid.cell_volume();
}

}  // namespace blowup
