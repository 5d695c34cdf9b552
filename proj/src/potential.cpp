#include "blowup/potential.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/errors.hpp"

namespace blowup {

PotentialSpec PotentialSpec::constant(double c) {
  PotentialSpec p;
  p.c0_ = c;
  return p;
}

PotentialSpec PotentialSpec::polynomial(double c0, const Eigen::Vector3d& b,
                                        const Eigen::Matrix3d& Q) {
  PotentialSpec p;
  p.c0_ = c0;
  p.b_ = b;
  p.Q_ = 0.5 * (Q + Q.transpose());
  return p;
}

PotentialSpec PotentialSpec::grid_samples(const DomainSpec& dom, std::vector<double> values) {
  const Grid g(dom);
  if (values.size() != g.size())
    throw InvalidParameter("potential: grid sample count does not match the domain grid");
  auto s = std::make_shared<Samples>();
  s->dom = dom;
  s->lo = g.lo();
  s->h = g.spacing();
  s->n = g.n();
  s->values = std::move(values);
  PotentialSpec p;
  p.samples_ = std::move(s);
  return p;
}

PotentialKind PotentialSpec::kind() const {
  if (samples_) return PotentialKind::GridSamples;
  if (b_.isZero(0.0) && Q_.isZero(0.0)) return PotentialKind::Constant;
  return PotentialKind::Polynomial;
}

const std::vector<double>& PotentialSpec::samples() const {
  if (!samples_) throw InvalidParameter("potential: no grid samples");
  return samples_->values;
}

const DomainSpec& PotentialSpec::sample_domain() const {
  if (!samples_) throw InvalidParameter("potential: no grid samples");
  return samples_->dom;
}

namespace {

// trilinear interpolation with clamping to the sample box
template <class F>
void trilinear(const Point& lo, const Eigen::Vector3d& h, int n, const Point& x, F&& visit) {
  int i0[3];
  double t[3];
  for (int d = 0; d < 3; ++d) {
    double s = (x[d] - lo[d]) / h[d];
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    int i = std::min(static_cast<int>(std::floor(s)), n - 2);
    i0[d] = i;
    t[d] = s - i;
  }
  for (int c = 0; c < 8; ++c) {
    const int di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
    const double w = (di ? t[0] : 1 - t[0]) * (dj ? t[1] : 1 - t[1]) * (dk ? t[2] : 1 - t[2]);
    visit(i0[0] + di, i0[1] + dj, i0[2] + dk, w, di, dj, dk, t);
  }
}

}  // namespace

double PotentialSpec::operator()(const Point& x) const {
  double v = c0_ + b_.dot(x) + x.dot(Q_ * x);
  if (samples_) {
    const Samples& s = *samples_;
    trilinear(s.lo, s.h, s.n, x, [&](int i, int j, int k, double w, int, int, int, const double*) {
      v += w * s.values[i + static_cast<std::size_t>(s.n) * (j + static_cast<std::size_t>(s.n) * k)];
    });
  }
  return v;
}

Eigen::Vector3d PotentialSpec::gradient(const Point& x) const {
  Eigen::Vector3d g = b_ + 2.0 * Q_ * x;
  if (samples_) {
    const Samples& s = *samples_;
    trilinear(s.lo, s.h, s.n, x,
              [&](int i, int j, int k, double, int di, int dj, int dk, const double* t) {
                const double f = s.values[i + static_cast<std::size_t>(s.n) *
                                                  (j + static_cast<std::size_t>(s.n) * k)];
                const double wx = di ? t[0] : 1 - t[0];
                const double wy = dj ? t[1] : 1 - t[1];
                const double wz = dk ? t[2] : 1 - t[2];
                g[0] += f * (di ? 1.0 : -1.0) / s.h[0] * wy * wz;
                g[1] += f * wx * (dj ? 1.0 : -1.0) / s.h[1] * wz;
                g[2] += f * wx * wy * (dk ? 1.0 : -1.0) / s.h[2];
              });
  }
  return g;
}

PotentialSpec PotentialSpec::scaled(double s) const {
  PotentialSpec p;
  p.c0_ = s * c0_;
  p.b_ = s * b_;
  p.Q_ = s * Q_;
  if (samples_) {
    auto copy = std::make_shared<Samples>(*samples_);
    for (double& v : copy->values) v *= s;
    p.samples_ = std::move(copy);
  }
  return p;
}

PotentialSpec PotentialSpec::plus(const PotentialSpec& other) const {
  PotentialSpec p;
  p.c0_ = c0_ + other.c0_;
  p.b_ = b_ + other.b_;
  p.Q_ = Q_ + other.Q_;
  if (samples_ && other.samples_) {
    const Samples& a = *samples_;
    const Samples& b = *other.samples_;
    if (a.n != b.n || !a.lo.isApprox(b.lo) || !a.h.isApprox(b.h))
      throw InvalidParameter("potential: cannot add grid samples on different grids");
    auto copy = std::make_shared<Samples>(a);
    for (std::size_t i = 0; i < copy->values.size(); ++i) copy->values[i] += b.values[i];
    p.samples_ = std::move(copy);
  } else {
    p.samples_ = samples_ ? samples_ : other.samples_;
  }
  return p;
}

bool PotentialSpec::is_zero() const {
  if (c0_ != 0.0 || !b_.isZero(0.0) || !Q_.isZero(0.0)) return false;
  if (!samples_) return true;
  return std::all_of(samples_->values.begin(), samples_->values.end(),
                     [](double v) { return v == 0.0; });
}

}  // namespace blowup
