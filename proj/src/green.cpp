#include "blowup/green.hpp"

#include <cmath>
#include <limits>

#include "blowup/errors.hpp"
#include "blowup/interpolation.hpp"
#include "blowup/parallel.hpp"

namespace blowup {

namespace {

// highest term kept in the analytic subtraction S = h_0 + ... + h_kTop
constexpr int kTop = 2;

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

double hk_denominator(int k) { return kFourPi * factorial(2 * k + 2); }

struct Series {
  double value = 0.0, da = 0.0, dr = 0.0;
};

// sum of h_k for k in [0, upto]
Series partial(double a, double r, int upto) {
  Series s;
  for (int k = 0; k <= upto; ++k) {
    s.value += hk_term(a, r, k);
    s.da += hk_term_da(a, r, k);
    s.dr += hk_term_dr(a, r, k);
  }
  return s;
}

}  // namespace

double hk_term(double a, double r, int k) {
  return -std::pow(a, k + 1) * std::pow(r, 2 * k + 1) / hk_denominator(k);
}

double hk_term_da(double a, double r, int k) {
  return -(k + 1) * std::pow(a, k) * std::pow(r, 2 * k + 1) / hk_denominator(k);
}

double hk_term_dr(double a, double r, int k) {
  return -(2 * k + 1) * std::pow(a, k + 1) * std::pow(r, 2 * k) / hk_denominator(k);
}

// ---------------------------------------------------------------------------

const Grid& GreenField::grid() const { return op_->grid(); }

const Eigen::Vector3d& GreenField::robin_gradient() const {
  if (!has_gradient_) throw InvalidParameter("green field was solved without gradient data");
  return grad_phi_;
}

double GreenField::singular_part(double r) const { return partial(a_y_, r, kTop).value; }

double GreenField::regular(const Point& x) const {
  double kx = 0.0;
  if (!lagrange_interpolate(grid(), k_, op_->valid_mask(), x, &kx)) {
    if (grid().domain().inside_distance(x) <= 0.0) {
      // outside: H = 1/(4πr) keeps G = 0
      return 1.0 / (kFourPi * (x - y_).norm());
    }
    throw GeometryError("green field: no interpolation stencil at the requested point");
  }
  return singular_part((x - y_).norm()) + kx;
}

double GreenField::green(const Point& x) const {
  if (grid().domain().inside_distance(x) <= 0.0) return 0.0;
  const double r = (x - y_).norm();
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (kFourPi * r) - regular(x);
}

Eigen::Vector3d GreenField::gradient_x(const Point& x) const {
  const Eigen::Vector3d d = x - y_;
  const double r = d.norm();
  if (r <= 3.0 * grid().hmax())
    throw NearSingularity("green gradient: |x - y| is inside the 3h exclusion radius");
  double kx = 0.0;
  Eigen::Vector3d gk;
  if (!lagrange_interpolate(grid(), k_, op_->valid_mask(), x, &kx, &gk))
    throw GeometryError("green gradient: no interpolation stencil at the requested point");
  const Series s = partial(a_y_, r, kTop);
  return -d / (kFourPi * r * r * r) - s.dr * d / r - gk;
}

Eigen::Vector3d GreenField::gradient_y(const Point& x) const {
  if (!has_tangents_) throw InvalidParameter("green field has no tangent data");
  const Eigen::Vector3d d = x - y_;
  const double r = d.norm();
  if (r <= 3.0 * grid().hmax())
    throw NearSingularity("green gradient: |x - y| is inside the 3h exclusion radius");
  const Series s = partial(a_y_, r, kTop);
  Eigen::Vector3d out = d / (kFourPi * r * r * r) - (s.da * grad_a_y_ - s.dr * d / r);
  for (int l = 0; l < 3; ++l) {
    double t = 0.0;
    if (!lagrange_interpolate(grid(), dk_[l], op_->valid_mask(), x, &t))
      throw GeometryError("green gradient: no interpolation stencil at the requested point");
    out[l] -= t;
  }
  return out;
}

double GreenField::green_at_node(std::size_t idx) const {
  if (!grid().is_interior(idx)) return 0.0;
  const double r = (grid().node(idx) - y_).norm();
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (kFourPi * r) - singular_part(r) - k_[idx];
}

std::vector<double> GreenField::values() const {
  std::vector<double> out(grid().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = green_at_node(i);
  return out;
}

std::vector<double> GreenField::regular_part() const {
  std::vector<double> out(grid().size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!grid().is_interior(i)) continue;
    out[i] = singular_part((grid().node(i) - y_).norm()) + k_[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

GreenSolver::GreenSolver(const DomainSpec& dom, const PotentialSpec& a, GreenOptions opt)
    : a_(a), opt_(opt) {
  op_ = std::make_shared<const DiscreteOperator>(Grid(dom), a, opt.preconditioner);
  if (opt_.check_coercivity) lambda_min_ = check_coercivity(*op_, a_);
}

void GreenSolver::require_interior(const Point& y) const {
  if (!(domain().inside_distance(y) > 2.0 * grid().hmax()))
    throw GeometryError("source must lie more than two grid cells inside the domain");
}

std::vector<double> GreenSolver::solve_k(const Point& y, std::array<std::vector<double>, 3>* out_tangents) const {
  const double ay = a_(y);
  const Eigen::Vector3d ga = a_.gradient(y);
  const double hmin = grid().spacing().minCoeff();

  // (-Δ + a) K = (a - a_y)/(4πr) + (a_y - a) Σ_{k<top} h_k - a h_top
  auto f = [&](const Point& x) {
    const double r = (x - y).norm();
    if (r < 1e-12 * hmin) return 0.0;
    const double ax = a_(x);
    return (ax - ay) / (kFourPi * r) + (ay - ax) * partial(ay, r, kTop - 1).value -
           ax * hk_term(ay, r, kTop);
  };
  auto g = [&](const Point& x) {
    const double r = (x - y).norm();
    return 1.0 / (kFourPi * r) - partial(ay, r, kTop).value;
  };
  const Eigen::VectorXd u = op_->solve(op_->assemble_rhs(f, g), opt_.cg_tol);
  std::vector<double> k = op_->to_grid(u, g, nullptr);

  if (out_tangents) {
    for (int l = 0; l < 3; ++l) {
      auto df = [&](const Point& x) {
        const Eigen::Vector3d d = x - y;
        const double r = d.norm();
        if (r < 1e-12 * hmin) return 0.0;
        const double ax = a_(x);
        const double dr = -d[l] / r;  // ∂r/∂y_l
        const Series p = partial(ay, r, kTop - 1);
        double v = -ga[l] / (kFourPi * r) + (ax - ay) / kFourPi * d[l] / (r * r * r);
        v += ga[l] * p.value + (ay - ax) * (p.da * ga[l] + p.dr * dr);
        v -= ax * (hk_term_da(ay, r, kTop) * ga[l] + hk_term_dr(ay, r, kTop) * dr);
        return v;
      };
      auto dg = [&](const Point& x) {
        const Eigen::Vector3d d = x - y;
        const double r = d.norm();
        const Series s = partial(ay, r, kTop);
        return d[l] / (kFourPi * r * r * r) - (s.da * ga[l] - s.dr * d[l] / r);
      };
      const Eigen::VectorXd du = op_->solve(op_->assemble_rhs(df, dg), opt_.cg_tol);
      (*out_tangents)[l] = op_->to_grid(du, dg, nullptr);
    }
  }
  return k;
}

double GreenSolver::phi_only(const Point& y) const {
  const std::vector<double> k = solve_k(y, nullptr);
  double v = 0.0;
  if (!lagrange_interpolate(grid(), k, op_->valid_mask(), y, &v))
    throw GeometryError("robin function: no interpolation stencil at the source");
  return v;
}

std::shared_ptr<const GreenField> GreenSolver::solve(const Point& y, bool with_gradient) const {
  require_interior(y);
  auto field = std::make_shared<GreenField>();
  field->op_ = op_;
  field->y_ = y;
  field->a_y_ = a_(y);
  field->grad_a_y_ = a_.gradient(y);

  const bool tangents = with_gradient && opt_.gradient == GradientMethod::Tangent;
  field->k_ = solve_k(y, tangents ? &field->dk_ : nullptr);
  field->has_tangents_ = tangents;

  Eigen::Vector3d gk;
  if (!lagrange_interpolate(grid(), field->k_, op_->valid_mask(), y, &field->phi_, &gk))
    throw GeometryError("robin function: no interpolation stencil at the source");

  if (with_gradient) {
    if (tangents) {
      // φ(y) = K(y; y): total derivative = ∇_x K + ∂_y K
      field->grad_phi_ = gk;
      for (int l = 0; l < 3; ++l) {
        double t = 0.0;
        lagrange_interpolate(grid(), field->dk_[l], op_->valid_mask(), y, &t);
        field->grad_phi_[l] += t;
      }
    } else {
      const double h = grid().hmax();
      for (int l = 0; l < 3; ++l) {
        auto central = [&](double step) {
          Point yp = y, ym = y;
          yp[l] += step;
          ym[l] -= step;
          return (phi_only(yp) - phi_only(ym)) / (2.0 * step);
        };
        const double coarse = central(2.0 * h);
        const double fine = central(h);
        field->grad_phi_[l] = (4.0 * fine - coarse) / 3.0;
      }
    }
    field->has_gradient_ = true;
  }
  return field;
}

std::vector<std::shared_ptr<const GreenField>> GreenSolver::solve_many(
    const std::vector<Point>& ys, bool with_gradient, int threads) const {
  std::vector<std::shared_ptr<const GreenField>> out(ys.size());
  parallel_for(static_cast<int>(ys.size()), threads,
               [&](int i) { out[i] = solve(ys[i], with_gradient); });
  return out;
}

// ---------------------------------------------------------------------------

GreenField solve_green(const DomainSpec& dom, const PotentialSpec& a, const Point& y) {
  return *GreenSolver(dom, a).solve(y, true);
}

double robin_function(const DomainSpec& dom, const PotentialSpec& a, const Point& y) {
  return GreenSolver(dom, a).robin(y);
}

Eigen::Vector3d robin_gradient(const DomainSpec& dom, const PotentialSpec& a, const Point& y) {
  return GreenSolver(dom, a).robin_gradient(y);
}

Eigen::Vector3d green_gradient_x(const GreenField& field, const Point& x) {
  return field.gradient_x(x);
}

}  // namespace blowup
