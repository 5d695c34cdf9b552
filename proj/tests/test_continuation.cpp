#include <doctest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "blowup/continuation.hpp"
#include "blowup/errors.hpp"
#include "oracles.hpp"

using namespace blowup;

namespace {

DomainSpec ball(int n) {
  DomainSpec d;
  d.resolution = n;
  return d;
}

}  // namespace

TEST_CASE("single bubble threshold in the ball") {
  BubbleConfiguration init;
  init.points = {Point(0.05, -0.03, 0.02)};
  ContinuationOptions opt;
  opt.tau0 = 2.0;
  const ContinuationResult r = find_blowup_configuration(ball(32), PotentialSpec::constant(-1.0), 1, init, opt);
  REQUIRE(r.converged);
  CHECK(std::abs(r.tau / (oracle::pi * oracle::pi / 4) - 1) < 1e-3);
  CHECK(r.config.points[0].norm() < 1e-3);
  CHECK(std::abs(r.rho_residual) < 1e-8);
  CHECK(r.grad_residual < 1e-6);
  CHECK(r.eigen_residual < 1e-8);
  CHECK(positive_semidefinite_check(r.spectrum));
  CHECK(r.config.a_values[0] == doctest::Approx(-r.tau));
  const std::string csv = trace_csv(r.trace);
  CHECK(csv.rfind("iteration,tau,rho,grad_norm,step_norm,damping,fresh_jacobian\n", 0) == 0);
  CHECK(last_trace().size() == r.trace.size());
}

TEST_CASE("fixed tau only solves the gradient equations") {
  BubbleConfiguration init;
  init.points = {Point(0.2, 0.1, 0)};
  ContinuationOptions opt;
  opt.tau0 = 1.0;
  opt.fix_tau = true;
  const ContinuationResult r = find_blowup_configuration(ball(32), PotentialSpec::constant(-1.0), 1, init, opt);
  CHECK(r.converged);
  CHECK(r.tau == 1.0);
  CHECK(r.config.points[0].norm() < 1e-4);
  CHECK(r.rho_residual == doctest::Approx(oracle::helmholtz_center_robin(1.0)).epsilon(1e-3));
}

TEST_CASE("leaving the coercive range is reported") {
  BubbleConfiguration init;
  init.points = {Point::Zero()};
  ContinuationOptions opt;
  opt.tau0 = 12.0;
  CHECK_THROWS_AS(find_blowup_configuration(ball(24), PotentialSpec::constant(-1.0), 1, init, opt),
                  ContinuationOutOfRange);
}

TEST_CASE("stagnation raises no-convergence with a trace") {
  // a ≡ 0 base: τ a_base never changes, ρ = φ_0 > 0 cannot vanish
  BubbleConfiguration init;
  init.points = {Point(0.1, 0, 0)};
  ContinuationOptions opt;
  opt.max_iterations = 4;
  CHECK_THROWS_AS(find_blowup_configuration(ball(24), PotentialSpec::constant(0.0), 1, init, opt), NoConvergence);
  CHECK(!last_trace().empty());
}

TEST_CASE("symmetric pair in a double well stays symmetric") {
  // a_base = 2 - 30 x1^2: wells at both ends of the x1-diameter. With constant a
  // the pair always drifts outward (∂ρ/∂s > 0), so there is nothing to find.
  const DomainSpec dom = ball(32);
  Eigen::Matrix3d Q = Eigen::Matrix3d::Zero();
  Q(0, 0) = -30;
  const PotentialSpec a_base = PotentialSpec::polynomial(2.0, Eigen::Vector3d::Zero(), Q);
  BubbleConfiguration init;
  init.points = {Point(0.55, 0, 0), Point(-0.55, 0, 0)};
  ContinuationOptions opt;
  opt.tau0 = 0.75;
  opt.threads = 2;
  const ContinuationResult r = find_blowup_configuration(dom, a_base, 2, init, opt);
  REQUIRE(r.converged);
  const Point& p = r.config.points[0];
  const Point& q = r.config.points[1];
  CHECK((p + q).norm() < 1e-6);
  CHECK(std::abs(p[1]) < 1e-6);
  CHECK(std::abs(p[2]) < 1e-6);
  CHECK((*r.config.weights)[1] == doctest::Approx(1.0).epsilon(1e-6));

  // reduced 1-D oracle at the returned τ: the symmetric pair (±s, 0, 0) has
  // ∂ρ/∂s = 0 at the same s
  const GreenSolver solver(dom, a_base.scaled(r.tau));
  auto drho = [&](double s) {
    const InteractionSpectrum sp = InteractionModel(solver, {Point(s, 0, 0), Point(-s, 0, 0)}, true).spectrum();
    return sp.gradient[0] - sp.gradient[3];
  };
  const double s_star = std::abs(p[0]);
  boost::uintmax_t iters = 30;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      drho, s_star - 0.05, s_star + 0.05, boost::math::tools::eps_tolerance<double>(30), iters);
  const double s_oracle = 0.5 * (lo + hi);
  CHECK(std::abs(s_oracle - s_star) < 1e-5);
  const InteractionSpectrum at =
      InteractionModel(solver, {Point(s_oracle, 0, 0), Point(-s_oracle, 0, 0)}, false).spectrum();
  CHECK(std::abs(at.rho) < 1e-6);
}
