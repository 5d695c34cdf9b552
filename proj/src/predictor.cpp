#include "blowup/predictor.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "blowup/errors.hpp"
#include "blowup/radial_quadrature.hpp"
#include "blowup/volume_quadrature.hpp"

namespace blowup {

// ---------------------------------------------------------------------------
// exact constants

ExactConstant ExactConstant::make(std::int64_t num, std::int64_t den, int pi_power,
                                  int sqrt3_power) {
  if (den == 0) throw InvalidParameter("exact constant: zero denominator");
  // √3^2 = 3 goes into the rational part
  while (sqrt3_power >= 2) {
    num *= 3;
    sqrt3_power -= 2;
  }
  while (sqrt3_power < 0) {
    den *= 3;
    sqrt3_power += 2;
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) {
    den = 1;
    pi_power = 0;
    sqrt3_power = 0;
  }
  return {num, den, pi_power, sqrt3_power};
}

ExactConstant ExactConstant::operator*(const ExactConstant& o) const {
  return make(num * o.num, den * o.den, pi_power + o.pi_power, sqrt3_power + o.sqrt3_power);
}

ExactConstant ExactConstant::operator/(const ExactConstant& o) const {
  if (o.num == 0) throw InvalidParameter("exact constant: division by zero");
  return make(num * o.den, den * o.num, pi_power - o.pi_power, sqrt3_power - o.sqrt3_power);
}

bool ExactConstant::operator==(const ExactConstant& o) const {
  return num == o.num && den == o.den && pi_power == o.pi_power && sqrt3_power == o.sqrt3_power;
}

double ExactConstant::value() const {
  return static_cast<double>(num) / static_cast<double>(den) * std::pow(kPi, pi_power) *
         std::pow(kSqrt3, sqrt3_power);
}

std::string ExactConstant::str() const {
  std::ostringstream s;
  s << num;
  if (den != 1) s << '/' << den;
  if (pi_power != 0) s << "·π^" << pi_power;
  if (sqrt3_power != 0) s << "·√3";
  return s.str();
}

ExactConstant single_bubble_prefactor() {
  const ExactConstant rate_constant = ExactConstant::make(12, 1, 2, 1);  // 12π²√3
  const ExactConstant coeff = ExactConstant::make(4, 1, 1, 1);         // 4π√3
  return rate_constant / (coeff * coeff);
}

std::string to_string(RateKind k) {
  switch (k) {
    case RateKind::Finite:
      return "finite";
    case RateKind::Zero:
      return "zero";
    case RateKind::Infinite:
      return "infinite";
    case RateKind::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

// ---------------------------------------------------------------------------
// limit profile

namespace {
constexpr double kCoeff = 4.0 * kPi * kSqrt3;  // 4π√3
}

LimitProfile::LimitProfile(std::shared_ptr<const GreenSolver> solver, std::vector<Point> points,
                           Eigen::VectorXd weights, int threads)
    : solver_(std::move(solver)), points_(std::move(points)), lambda_(std::move(weights)) {
  if (lambda_.size() != static_cast<Eigen::Index>(points_.size()))
    throw InvalidParameter("limit profile: weight count mismatch");
  fields_ = solver_->solve_many(points_, false, threads);
  cache_nodes();
}

LimitProfile::LimitProfile(std::shared_ptr<const GreenSolver> solver,
                           std::vector<std::shared_ptr<const GreenField>> fields,
                           Eigen::VectorXd weights)
    : solver_(std::move(solver)), lambda_(std::move(weights)), fields_(std::move(fields)) {
  if (lambda_.size() != static_cast<Eigen::Index>(fields_.size()))
    throw InvalidParameter("limit profile: weight count mismatch");
  for (const auto& f : fields_) points_.push_back(f->source());
  cache_nodes();
}

void LimitProfile::cache_nodes() {
  node_g_.clear();
  for (const auto& f : fields_) node_g_.push_back(f->values());
}

std::vector<double> LimitProfile::node_values() const {
  std::vector<double> out(grid().size(), 0.0);
  for (int i = 0; i < size(); ++i)
    for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] += kCoeff * lambda_[i] * node_g_[i][idx];
  return out;
}

double LimitProfile::operator()(const Point& x) const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += lambda_[i] * fields_[i]->green(x);
  return kCoeff * s;
}

double LimitProfile::regular_value(int i) const {
  double s = -lambda_[i] * fields_[i]->robin_value();
  for (int j = 0; j < size(); ++j)
    if (j != i) s += lambda_[j] * fields_[j]->green(points_[i]);
  return kCoeff * s;
}

double LimitProfile::qv(const PotentialSpec& V, int k) const {
  if (k < 0 || k >= size()) throw InvalidParameter("Q_V: point index out of range");
  if (V.is_zero()) return 0.0;
  auto F = [&](const Point& x, long node) {
    if (node >= 0) {
      double g = 0.0;
      for (int i = 0; i < size(); ++i) g += lambda_[i] * node_g_[i][node];
      return V(x) * kCoeff * g * node_g_[k][node];
    }
    return V(x) * (*this)(x) * fields_[k]->green(x);
  };
  return integrate_singular(grid(), F, points_);
}

double LimitProfile::abs_vg2(const PotentialSpec& V) const {
  if (V.is_zero()) return 0.0;
  auto F = [&](const Point& x, long node) {
    double g;
    if (node >= 0) {
      g = 0.0;
      for (int i = 0; i < size(); ++i) g += lambda_[i] * node_g_[i][node];
      g *= kCoeff;
    } else {
      g = (*this)(x);
    }
    return std::abs(V(x)) * g * g;
  };
  return integrate_singular(grid(), F, points_);
}

double LimitProfile::vg2_direct(const PotentialSpec& V) const {
  if (V.is_zero()) return 0.0;
  const Grid& g = grid();
  const std::vector<double> rho = cutoff_radii(g, points_);
  const double tiny = 1e-12 * g.hmax();

  std::vector<double> c(size()), reg(size()), vi(size());
  std::vector<Eigen::Vector3d> dv(size());
  for (int i = 0; i < size(); ++i) {
    c[i] = kSqrt3 * lambda_[i];
    reg[i] = regular_value(i);
    vi[i] = V(points_[i]);
    dv[i] = V.gradient(points_[i]);
  }

  double sum = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!g.is_interior(idx)) continue;
    const Point x = g.node(idx);
    bool on_point = false;
    double t = 0.0;
    for (int i = 0; i < size(); ++i) {
      const Eigen::Vector3d d = x - points_[i];
      const double r = d.norm();
      if (r < tiny) {
        on_point = true;
        break;
      }
      if (r >= rho[i]) continue;
      const double chi = smooth_cutoff(r / rho[i]);
      t += chi * (vi[i] * (c[i] * c[i] / (r * r) + 2.0 * c[i] * reg[i] / r) +
                  c[i] * c[i] * dv[i].dot(d) / (r * r));
    }
    if (on_point) continue;
    double gx = 0.0;
    for (int i = 0; i < size(); ++i) gx += lambda_[i] * node_g_[i][idx];
    gx *= kCoeff;
    sum += V(x) * gx * gx - t;
  }
  sum *= g.cell_volume();

  // the dipole piece integrates to zero against the radial cutoff
  for (int i = 0; i < size(); ++i) {
    const double R = rho[i];
    auto chi = [R](double r) { return smooth_cutoff(r / R); };
    const double m0 = 0.5 * R + profiles::integrate_interval(chi, 0.5 * R, R);
    const double m1 = 0.125 * R * R +
                      profiles::integrate_interval([&](double r) { return r * chi(r); }, 0.5 * R, R);
    sum += vi[i] * kFourPi * (c[i] * c[i] * m0 + 2.0 * c[i] * reg[i] * m1);
  }
  return sum;
}

std::vector<double> limit_profile(const DomainSpec& dom, const PotentialSpec& a,
                                  const BubbleConfiguration& config) {
  config.validate();
  if (!config.weights) throw InvalidParameter("limit profile: configuration needs weights Λ");
  auto solver = std::make_shared<const GreenSolver>(dom, a);
  return LimitProfile(solver, config.points, *config.weights).node_values();
}

double qv_functional(const DomainSpec& dom, const PotentialSpec& a, const PotentialSpec& V,
                     const BubbleConfiguration& config, const Point& y) {
  config.validate();
  if (!config.weights) throw InvalidParameter("Q_V: configuration needs weights Λ");
  int k = -1;
  for (int i = 0; i < config.size(); ++i)
    if ((config.points[i] - y).norm() < 1e-12) k = i;
  if (k < 0) throw InvalidParameter("Q_V: y must be one of the configuration points");
  auto solver = std::make_shared<const GreenSolver>(dom, a);
  return LimitProfile(solver, config.points, *config.weights).qv(V, k);
}

// ---------------------------------------------------------------------------
// rates

BlowupPrediction evaluate_rate(const LimitProfile& profile, const PotentialSpec& a,
                               const PotentialSpec& V) {
  BlowupPrediction p;
  const int n = profile.size();
  const Eigen::VectorXd& lam = profile.weights();
  p.config.points = profile.points();
  p.config.weights = lam;
  p.limit_profile_coefficients = kCoeff * lam;
  p.qv_values.resize(n);

  double num_scale = 0.0;
  for (int j = 0; j < n; ++j) {
    const double aj = a(profile.points()[j]);
    p.config.a_values.push_back(aj);
    p.config.V_values.push_back(V(profile.points()[j]));
    p.numerator += aj * std::pow(lam[j], 4);
    num_scale += std::abs(aj) * std::pow(lam[j], 4);
  }
  for (int i = 0; i < n; ++i) p.qv_values[i] = profile.qv(V, i);
  p.denominator = kCoeff * lam.dot(p.qv_values);
  p.denominator_direct = profile.vg2_direct(V);

  const bool num_zero = num_scale == 0.0 || std::abs(p.numerator) <= 1e-14 * num_scale;
  const double den_scale = profile.abs_vg2(V);
  const bool den_zero = den_scale == 0.0 || std::abs(p.denominator) <= 1e-12 * den_scale;

  p.rates.resize(n);
  for (int i = 0; i < n; ++i) {
    RateValue& r = p.rates[i];
    if (num_zero && den_zero) {
      r.kind = RateKind::Indeterminate;
    } else if (num_zero) {
      r.kind = RateKind::Zero;
      r.value = 0.0;
    } else if (den_zero) {
      r.kind = RateKind::Infinite;
    } else {
      r.kind = RateKind::Finite;
      r.value = 12.0 * kPi * kPi * kSqrt3 * p.numerator / (lam[i] * lam[i] * p.denominator);
    }
  }
  if (num_zero && den_zero) {
    p.sign_consistent = false;
    p.diagnostic = "numerator and denominator both vanish";
  } else if (num_zero || den_zero) {
    p.sign_consistent = true;
    p.diagnostic = num_zero ? "numerator vanishes: rate 0" : "denominator vanishes: rate +inf";
  } else {
    p.sign_consistent = p.numerator * p.denominator > 0.0;
    p.diagnostic = p.sign_consistent
                       ? "finite positive rate"
                       : "numerator and denominator have opposite signs: signed rate is negative";
  }
  return p;
}

BlowupPrediction blowup_rate(const PredictionInputs& in) { return blowup_rate(in, nullptr); }

BlowupPrediction blowup_rate(const PredictionInputs& in, std::shared_ptr<const LimitProfile>* out) {
  auto solver = std::make_shared<const GreenSolver>(in.dom, in.a, in.green);
  const InteractionModel model(*solver, in.points, true, in.threads);
  const InteractionSpectrum s = model.spectrum();
  const double gnorm = s.gradient.norm();
  if (!(std::abs(s.rho) < in.rho_tol && gnorm < in.grad_tol)) {
    std::ostringstream msg;
    msg << "blowup_rate: configuration is not certified (|ρ| = " << std::abs(s.rho)
        << ", |∇ρ| = " << gnorm << ")";
    throw CertificationError(msg.str());
  }
  auto profile = std::make_shared<const LimitProfile>(solver, model.fields(), s.perron);
  BlowupPrediction p = evaluate_rate(*profile, in.a, in.V);
  if (out) *out = profile;
  p.matrix = s.matrix;
  p.rho = s.rho;
  p.grad_norm = gnorm;
  return p;
}

SingleBubbleRate single_bubble_rate(double a_x0, double vg2_integral) {
  const double c = single_bubble_prefactor().value();
  return {c * a_x0 / vg2_integral, c * std::abs(a_x0) / std::abs(vg2_integral)};
}

Eigen::VectorXd expansion_residual(const LimitProfile& profile, const Eigen::MatrixXd& M,
                                   const PotentialSpec& a, const PotentialSpec& V,
                                   const Eigen::VectorXd& lambda_eps,
                                   const Eigen::VectorXd& mu_eps, double eps) {
  const int n = profile.size();
  if (lambda_eps.size() != n || mu_eps.size() != n || M.rows() != n)
    throw InvalidParameter("expansion_residual: size mismatch");
  if (!(mu_eps.minCoeff() > 0.0)) throw InvalidScaling("expansion_residual: μ must be positive");
  for (int i = 0; i < n; ++i) {
    const double expect = std::sqrt(mu_eps[i] / mu_eps[0]);
    if (std::abs(lambda_eps[i] - expect) > 1e-12)
      throw InvalidScaling("expansion_residual: λ_i must equal (μ_i/μ_1)^{1/2}");
  }
  const Eigen::VectorXd Ml = M * lambda_eps;
  Eigen::VectorXd res(n);
  for (int i = 0; i < n; ++i) {
    const Point& x = profile.points()[i];
    const double lhs = eps * profile.qv(V, i);
    const double rhs = -kCoeff * Ml[i] + 3.0 * kPi * a(x) * lambda_eps[i] * mu_eps[i];
    res[i] = lhs - rhs;
  }
  return res;
}

Eigen::VectorXd expansion_residual(const DomainSpec& dom, const PotentialSpec& a,
                                   const PotentialSpec& V, const BubbleConfiguration& config,
                                   const Eigen::VectorXd& lambda_eps,
                                   const Eigen::VectorXd& mu_eps, double eps) {
  config.validate();
  auto solver = std::make_shared<const GreenSolver>(dom, a);
  const InteractionModel model(*solver, config.points, false);
  const Eigen::VectorXd w = config.weights ? *config.weights : model.spectrum().perron;
  const LimitProfile profile(solver, model.fields(), w);
  return expansion_residual(profile, model.matrix(), a, V, lambda_eps, mu_eps, eps);
}

}  // namespace blowup
