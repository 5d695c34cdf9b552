#include <doctest.h>

#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/predictor.hpp"
#include "oracles.hpp"

using namespace blowup;

namespace {

DomainSpec ball(int n) {
  DomainSpec d;
  d.resolution = n;
  return d;
}

std::shared_ptr<const GreenSolver> solver(int n, double a) {
  return std::make_shared<const GreenSolver>(ball(n), PotentialSpec::constant(a));
}

Eigen::VectorXd ones(int n) { return Eigen::VectorXd::Ones(n); }

const double c4 = 4 * oracle::pi * std::sqrt(3.0);

}  // namespace

TEST_CASE("exact constants") {
  CHECK(ExactConstant::make(6, 8, 0, 0) == ExactConstant::make(3, 4, 0, 0));
  CHECK(ExactConstant::make(1, 1, 0, 2) == ExactConstant::make(3, 1, 0, 0));
  CHECK(ExactConstant::make(1, 1, 0, -1) == ExactConstant::make(1, 3, 0, 1));
  CHECK(ExactConstant::make(2, -4, 1, 0) == ExactConstant::make(-1, 2, 1, 0));
  // 12π²√3 / (4π√3)² = 12π²√3 / 48π² = √3/4
  const ExactConstant p = single_bubble_prefactor();
  CHECK(p == ExactConstant::make(1, 4, 0, 1));
  CHECK(ExactConstant::make(12, 1, 2, 1) / ExactConstant::make(48, 1, 2, 0) == p);
  CHECK(std::abs(p.value() - std::sqrt(3.0) / 4) < 1e-15);
  CHECK(p.str() == "1/4·√3");
  CHECK_THROWS_AS(ExactConstant::make(1, 0, 0, 0), InvalidParameter);
}

TEST_CASE("limit profile samples") {
  auto s = solver(32, 0.0);
  const Point y(0.2, 0, 0);
  const LimitProfile one(s, {y}, ones(1));
  const auto field = s->solve(y, false);
  const std::vector<double> g = one.node_values();
  const Grid& grid = s->grid();
  for (std::size_t idx = 0; idx < grid.size(); idx += 97) {
    if (!grid.is_interior(idx)) {
      CHECK(g[idx] == 0.0);
    } else if ((grid.node(idx) - y).norm() > 0) {
      CHECK(g[idx] == doctest::Approx(c4 * field->green_at_node(idx)).epsilon(1e-14));
    }
  }

  const LimitProfile two(s, {Point(0.3, 0, 0), Point(-0.3, 0, 0)}, ones(2));
  for (const Point& x : {Point(0.1, 0.2, -0.1), Point(0.5, -0.3, 0.2)})
    CHECK(two(x) == doctest::Approx(two(Point(-x[0], x[1], x[2]))).epsilon(1e-6));

  BubbleConfiguration c;
  c.points = {y};
  CHECK_THROWS_AS(limit_profile(ball(32), PotentialSpec::constant(0.0), c), InvalidParameter);
}

TEST_CASE("Q_V at the ball center") {
  auto s = solver(48, 0.0);
  const LimitProfile p(s, {Point::Zero()}, ones(1));
  CHECK(p.qv(PotentialSpec::constant(0.0), 0) == 0.0);
  // 4π√3 ∫G_0(0,·)² = 4π√3/(12π)
  CHECK(std::abs(p.qv(PotentialSpec::constant(1.0), 0) - std::sqrt(3.0) / 3) < 1e-4);
  BubbleConfiguration c;
  c.points = {Point::Zero()};
  c.weights = ones(1);
  CHECK(qv_functional(ball(32), PotentialSpec::constant(0.0), PotentialSpec::constant(1.0), c, Point::Zero()) ==
        doctest::Approx(std::sqrt(3.0) / 3).epsilon(1e-3));
  CHECK_THROWS_AS(qv_functional(ball(32), PotentialSpec::constant(0.0), PotentialSpec::constant(1.0), c,
                                Point(0.1, 0, 0)),
                  InvalidParameter);
}

TEST_CASE("two quadrature paths for the denominator") {
  // the polar patches need radius >= 6h: separation >= 0.57, |x| <= 0.57 at 48^3
  auto s = solver(48, -1.0);
  Eigen::Vector3d w(1.0, 0.8, 1.3);
  std::vector<Point> x;
  for (int i = 0; i < 3; ++i)
    x.emplace_back(0.4 * std::cos(2 * oracle::pi * i / 3), 0.4 * std::sin(2 * oracle::pi * i / 3), 0.05 * i);
  const LimitProfile p(s, x, w);
  Eigen::Matrix3d Q = Eigen::Matrix3d::Identity();
  const PotentialSpec V = PotentialSpec::polynomial(-1.0, Eigen::Vector3d(0.5, 0, 0), Q);
  double identity = 0;
  for (int i = 0; i < 3; ++i) identity += c4 * w[i] * p.qv(V, i);
  CHECK(std::abs(p.vg2_direct(V) - identity) < 1e-3 * std::abs(identity));
}

TEST_CASE("rate kinds and the Lambda invariance") {
  auto s = solver(40, -1.0);
  Eigen::Vector2d w(1.0, 0.7);
  const LimitProfile p(s, {Point(0.34, 0.1, 0), Point(-0.34, -0.1, 0.1)}, w);

  const BlowupPrediction f = evaluate_rate(p, PotentialSpec::constant(-1.0), PotentialSpec::constant(-1.0));
  REQUIRE(f.rates[0].kind == RateKind::Finite);
  CHECK(f.sign_consistent);
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(f.rates[i].value * w[i] * w[i] - f.rates[0].value) < 1e-10 * std::abs(f.rates[0].value));
  CHECK(f.numerator == doctest::Approx(-(1 + std::pow(0.7, 4))));

  const BlowupPrediction neg = evaluate_rate(p, PotentialSpec::constant(-1.0), PotentialSpec::constant(1.0));
  CHECK(neg.rates[0].kind == RateKind::Finite);
  CHECK(neg.rates[0].value < 0);
  CHECK_FALSE(neg.sign_consistent);

  CHECK(evaluate_rate(p, PotentialSpec::constant(0.0), PotentialSpec::constant(1.0)).rates[1].kind == RateKind::Zero);
  CHECK(evaluate_rate(p, PotentialSpec::constant(-1.0), PotentialSpec::constant(0.0)).rates[0].kind ==
        RateKind::Infinite);
  const BlowupPrediction both = evaluate_rate(p, PotentialSpec::constant(0.0), PotentialSpec::constant(0.0));
  CHECK(both.rates[0].kind == RateKind::Indeterminate);
  CHECK_FALSE(both.diagnostic.empty());
  CHECK(to_string(RateKind::Infinite) == "infinite");
}

TEST_CASE("single bubble reduction") {
  const double lambda = oracle::pi * oracle::pi / 4;
  auto s = solver(48, -lambda);
  const LimitProfile p(s, {Point::Zero()}, ones(1));
  const BlowupPrediction r = evaluate_rate(p, PotentialSpec::constant(-lambda), PotentialSpec::constant(1.0));
  const double g2 = r.denominator / (c4 * c4);  // ∫ V G_a(0,·)²
  const SingleBubbleRate sb = single_bubble_rate(-lambda, g2);
  CHECK(std::abs(r.rates[0].value - sb.signed_value) < 1e-10 * std::abs(sb.signed_value));
  CHECK(sb.absolute_value == doctest::Approx(std::abs(sb.signed_value)));
  // against the radial closed form of ∫ G_a(0,·)²
  const double exact = std::sqrt(3.0) / 4 * -lambda / oracle::helmholtz_center_green_squared(lambda);
  CHECK(std::abs(r.rates[0].value - exact) < 1e-3 * std::abs(exact));
}

TEST_CASE("certification is required") {
  PredictionInputs in;
  in.dom = ball(24);
  in.a = PotentialSpec::constant(-1.0);
  in.V = PotentialSpec::constant(1.0);
  in.points = {Point::Zero()};
  CHECK_THROWS_AS(blowup_rate(in), CertificationError);
}

TEST_CASE("expansion residual") {
  auto s = solver(32, 0.0);
  const std::vector<Point> x = {Point(0.3, 0, 0), Point(-0.3, 0, 0)};
  const InteractionModel m(*s, x, false);
  const LimitProfile p(s, m.fields(), ones(2));
  const PotentialSpec zero = PotentialSpec::constant(0.0);
  Eigen::Vector2d mu(1e-3, 1e-3), lam(1, 1);
  const Eigen::VectorXd r = expansion_residual(p, m.matrix(), zero, zero, lam, mu, 1e-2);
  const Eigen::VectorXd expect = c4 * (m.matrix() * lam);
  CHECK((r - expect).norm() < 1e-14);

  Eigen::Vector2d bad(1, 2);
  CHECK_THROWS_AS(expansion_residual(p, m.matrix(), zero, zero, bad, mu, 1e-2), InvalidScaling);
  Eigen::Vector2d negative(-1e-3, -1e-3);
  CHECK_THROWS_AS(expansion_residual(p, m.matrix(), zero, zero, lam, negative, 1e-2), InvalidScaling);

  // n = 1 with μ from the rate: everything cancels except 4π√3 φ_a(x_1)
  auto h = solver(32, -1.0);
  const LimitProfile q(h, {Point::Zero()}, ones(1));
  const PotentialSpec a = PotentialSpec::constant(-1.0), V = PotentialSpec::constant(-1.0);
  const BlowupPrediction pr = evaluate_rate(q, a, V);
  Eigen::MatrixXd M(1, 1);
  M(0, 0) = h->robin(Point::Zero());
  for (double eps : {1e-2, 1e-3}) {
    Eigen::VectorXd mu1(1), l1(1);
    mu1[0] = eps / pr.rates[0].value;
    l1[0] = 1;
    const Eigen::VectorXd res = expansion_residual(q, M, a, V, l1, mu1, eps);
    CHECK(res[0] == doctest::Approx(c4 * M(0, 0)).epsilon(1e-10));
  }
}
