#include "blowup/verify_suite.hpp"

#include <cmath>
#include <sstream>

#include "blowup/errors.hpp"
#include "blowup/green_checks.hpp"
#include "blowup/interaction.hpp"
#include "blowup/linearized.hpp"
#include "blowup/predictor.hpp"
#include "blowup/profiles.hpp"
#include "blowup/radial_quadrature.hpp"

namespace blowup {

namespace {

void add(std::vector<CheckResult>& out, std::string name, double err, double tol,
         std::string detail = {}) {
  out.push_back({std::move(name), std::isfinite(err) && err <= tol, err, tol, std::move(detail)});
}

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// Each group runs in isolation so one numerical failure does not hide the rest.
template <class F>
void guarded(std::vector<CheckResult>& out, const std::string& group, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    out.push_back({group, false, std::nan(""), 0.0, std::string("error: ") + e.what()});
  }
}

void profile_checks(std::vector<CheckResult>& out) {
  using namespace profiles;
  auto B5 = [](double r) { return std::pow(bubble(r), 5); };
  add(out, "profiles/int_B5", rel(radial_integral(B5, RadialWeight::One), 4 * kPi * kSqrt3), 1e-8);
  add(out, "profiles/int_B5_over_r", rel(radial_integral(B5, RadialWeight::InvR), kFourPi), 1e-8);
  add(out, "profiles/int_r_B5", rel(radial_integral(B5, RadialWeight::R), 24 * kPi), 1e-8);
  auto f = [](double r) { return 5 * eval_correction_w(r) * std::pow(bubble(r), 4); };
  add(out, "profiles/int_5WB4_over_r", rel(radial_integral(f, RadialWeight::InvR), 12 * kPi * (kPi - 1)),
      1e-8);
  double worst = 0;
  for (int i = 0; i <= 600; ++i) {
    const double r = std::pow(10.0, -3.0 + i * 0.01);
    const RadialJet w = correction_w_jet(r);
    const double b = bubble(r);
    worst = std::max(worst, std::abs(-(w.d2 + 2 / r * w.d1) - 5 * w.value * std::pow(b, 4) + b));
  }
  add(out, "profiles/W_ode_residual", worst, 1e-7);
}

void green_checks(std::vector<CheckResult>& out, int res) {
  DomainSpec dom;
  dom.resolution = res;
  const GreenSolver laplace(dom, PotentialSpec::constant(0.0));
  add(out, "green/robin_center", std::abs(laplace.robin(Point::Zero()) - 1 / kFourPi), 1e-4);
  const Point y(0.5, 0, 0);
  auto f = laplace.solve(y, true);
  add(out, "green/robin_off_center", std::abs(f->robin_value() - 1 / (kFourPi * 0.75)), 1e-4);
  add(out, "green/robin_gradient", std::abs(f->robin_gradient()[0] - 0.5 / (2 * kPi * 0.75 * 0.75)), 1e-3);
  const Point z(-0.2, 0.3, 0.1);
  const double s = std::sqrt(1 - 2 * y.dot(z) + y.squaredNorm() * z.squaredNorm());
  const double images = 1 / (kFourPi * (z - y).norm()) - 1 / (kFourPi * s);
  add(out, "green/images_value", std::abs(f->green(z) - images), 1e-4);
  add(out, "green/symmetry", std::abs(f->green(z) - laplace.solve(z, false)->green(y)), 1e-4);

  // (-Δ - k²) in the ball: φ(0) = k cot k / 4π, zero at k = π/2
  const GreenSolver helm(dom, PotentialSpec::constant(-1.0));
  add(out, "green/helmholtz_center", std::abs(helm.robin(Point::Zero()) - 1 / std::tan(1.0) / kFourPi), 1e-4);

  const ExpansionReport e = ha_local_expansion_check(helm, Point::Zero());
  add(out, "green/local_expansion_c2", std::abs(e.c2 - e.expected_c2) / std::abs(e.expected_c2), 5e-2);
}

void interaction_checks(std::vector<CheckResult>& out, int res, int threads) {
  DomainSpec dom;
  dom.resolution = res;
  const GreenSolver solver(dom, PotentialSpec::constant(-1.0));
  const std::vector<Point> pts = {{0.35, 0.1, 0.0}, {-0.3, 0.2, 0.1}, {0.0, -0.4, -0.1}};
  const InteractionModel model(solver, pts, true, threads);
  const InteractionSpectrum s = model.spectrum();
  add(out, "interaction/symmetric", (s.matrix - s.matrix.transpose()).norm(), 1e-14);
  add(out, "interaction/perron_positive", s.perron.minCoeff() > 0 ? 0.0 : 1.0, 0.0);
  bool mixed = true;
  for (int c = 1; c < s.eigenvectors.cols(); ++c)
    mixed = mixed && s.eigenvectors.col(c).maxCoeff() > 0 && s.eigenvectors.col(c).minCoeff() < 0;
  add(out, "interaction/other_modes_mixed", mixed ? 0.0 : 1.0, 0.0);
  add(out, "interaction/simple_rho", s.spectral_gap > 1e-10 ? 0.0 : 1.0, 0.0);

  // Hellmann–Feynman against a central difference in x_{1,0}
  const double d = 1e-3;
  auto rho_at = [&](double dx) {
    auto q = pts;
    q[0][0] += dx;
    return InteractionModel(solver, q, false).spectrum().rho;
  };
  const double fd = (rho_at(d) - rho_at(-d)) / (2 * d);
  add(out, "interaction/hellmann_feynman", std::abs(fd - s.gradient[0]) / std::abs(s.gradient[0]), 1e-3);
}

void linearized_checks(std::vector<CheckResult>& out) {
  using namespace linearized;
  for (int N = 3; N <= 5; ++N)
    for (int k = 0; k <= 1; ++k)
      add(out, "linearized/exact_N" + std::to_string(N) + "_k" + std::to_string(k),
          exact_mode_residual(N, k), 1e-9);
  for (int k = 2; k <= 4; ++k) {
    const LinearizedMode m = solve_mode(3, k, Branch::Regular, 1e3);
    const GrowthBounds g = growth_bounds(m);
    add(out, "linearized/growth_ratio_k" + std::to_string(k), g.one_signed ? g.c_plus / g.c_minus : INFINITY,
        100.0);
    const LogCoordinateReport lc = log_coordinate_check(m);
    const double fit = std::max(std::abs(lc.left.slope - m.mu_k), std::abs(lc.right.slope - m.mu_k));
    add(out, "linearized/log_slope_k" + std::to_string(k), fit / m.mu_k, 1e-2);
  }
}

void predictor_checks(std::vector<CheckResult>& out, int res) {
  add(out, "predictor/exact_prefactor",
      single_bubble_prefactor() == ExactConstant::make(1, 4, 0, 1) ? 0.0 : 1.0, 0.0,
      single_bubble_prefactor().str());
  DomainSpec dom;
  dom.resolution = res;
  auto solver = std::make_shared<const GreenSolver>(dom, PotentialSpec::constant(0.0));
  Eigen::VectorXd w(1);
  w << 1.0;
  const LimitProfile profile(solver, {Point::Zero()}, w);
  const PotentialSpec one = PotentialSpec::constant(1.0);
  add(out, "predictor/qv_center", std::abs(profile.qv(one, 0) - kSqrt3 / 3), 1e-3);
  const double identity = 4 * kPi * kSqrt3 * profile.qv(one, 0);
  add(out, "predictor/two_paths", rel(profile.vg2_direct(one), identity), 1e-3);

  const PotentialSpec a = PotentialSpec::constant(-2.0);
  const BlowupPrediction p = evaluate_rate(profile, a, one);
  const SingleBubbleRate single = single_bubble_rate(-2.0, p.denominator / (48 * kPi * kPi));
  add(out, "predictor/single_bubble_reduction", rel(p.rates[0].value, single.signed_value), 1e-10);
}

}  // namespace

std::vector<CheckResult> run_verify_suite(int resolution, int threads) {
  std::vector<CheckResult> out;
  guarded(out, "profiles", [&] { profile_checks(out); });
  guarded(out, "green", [&] { green_checks(out, resolution); });
  guarded(out, "interaction", [&] { interaction_checks(out, resolution, threads); });
  guarded(out, "linearized", [&] { linearized_checks(out); });
  guarded(out, "predictor", [&] { predictor_checks(out, resolution); });
  return out;
}

}  // namespace blowup
