#include "blowup/green_checks.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "blowup/errors.hpp"
#include "blowup/volume_quadrature.hpp"

namespace blowup {

ExpansionReport ha_local_expansion_check(const GreenSolver& solver, const Point& y) {
  const auto field = solver.solve(y, true);
  const Grid& grid = solver.grid();
  const double h = grid.hmax();
  const double rlo = 4.0 * h, rhi = 12.0 * h;

  std::vector<Eigen::Matrix<double, 1, 12>> rows;
  std::vector<double> rhs;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!grid.is_interior(idx)) continue;
    const Eigen::Vector3d d = grid.node(idx) - y;
    const double r = d.norm();
    if (r < rlo || r > rhi) continue;
    Eigen::Matrix<double, 1, 12> row;
    row << 1.0, d[0], d[1], d[2], r, d[0] * d[0], d[1] * d[1], d[2] * d[2], d[0] * d[1],
        d[0] * d[2], d[1] * d[2], r * r * r;
    rows.push_back(row);
    rhs.push_back(field->green_at_node(idx) - 1.0 / (kFourPi * r));
  }
  if (rows.size() < 24) throw FitDegenerate("expansion fit: too few samples on the shell");

  Eigen::MatrixXd A(rows.size(), 12);
  Eigen::VectorXd b(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    A.row(i) = rows[i];
    b[i] = rhs[i];
  }
  // column scaling keeps the conditioning meaningful
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (int j = 0; j < 12; ++j) A.col(j) /= scale[j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv[0] / sv[sv.size() - 1];
  if (!(cond < 1e10)) throw FitDegenerate("expansion fit: ill-conditioned design matrix");
  Eigen::VectorXd c = svd.solve(b);
  const double rms = std::sqrt((A * c - b).squaredNorm() / b.size());
  c = c.cwiseQuotient(scale);

  ExpansionReport rep;
  rep.c0 = c[0];
  rep.c1 = c.segment<3>(1);
  rep.c2 = c[4];
  rep.expected_c0 = -field->robin_value();
  rep.expected_c1 = -0.5 * field->robin_gradient();
  rep.expected_c2 = solver.potential()(y) / (8.0 * kPi);
  rep.samples = static_cast<int>(rows.size());
  rep.condition = cond;
  rep.rms_residual = rms;
  return rep;
}

ExpansionReport ha_local_expansion_check(const DomainSpec& dom, const PotentialSpec& a,
                                         const Point& y) {
  return ha_local_expansion_check(GreenSolver(dom, a), y);
}

double hk_series_partial_sum(double a_const, const Point& x, const Point& y, int K) {
  if (K < 0) throw InvalidParameter("hk_series_partial_sum: K must be >= 0");
  const double r = (x - y).norm();
  double s = 0.0;
  for (int k = 0; k <= K; ++k) s += hk_term(a_const, r, k);
  return s;
}

double green_squared_integral(const GreenField& field, const PotentialSpec& V) {
  if (V.is_zero()) return 0.0;
  const Grid& grid = field.grid();
  auto F = [&](const Point& x, long node) {
    const double g = node >= 0 ? field.green_at_node(static_cast<std::size_t>(node)) : field.green(x);
    return g * g * V(x);
  };
  return integrate_singular(grid, F, {field.source()});
}

ResolventReport resolvent_perturbation_check(const DomainSpec& dom, const PotentialSpec& a,
                                             const PotentialSpec& V, const Point& y,
                                             const std::vector<double>& eps_list) {
  if (eps_list.empty()) throw InvalidParameter("resolvent check: empty ε list");
  const GreenSolver base(dom, a);
  const auto field = base.solve(y, false);

  ResolventReport rep;
  rep.eps = eps_list;
  for (double eps : eps_list) {
    if (eps == 0.0) throw InvalidParameter("resolvent check: ε must be nonzero");
    if (V.is_zero()) {
      rep.difference_quotients.push_back(0.0);
      continue;
    }
    std::unique_ptr<GreenSolver> pert;
    try {
      pert = std::make_unique<GreenSolver>(dom, a.plus(V.scaled(eps)));
    } catch (const NotCoercive& e) {
      std::ostringstream msg;
      msg << "resolvent check: a + εV not coercive at ε = " << eps << " (" << e.what() << ")";
      throw NotCoercive(msg.str());
    }
    rep.difference_quotients.push_back((pert->robin(y) - field->robin_value()) / eps);
  }

  const auto& d = rep.difference_quotients;
  if (d.size() >= 2) {
    const double e1 = eps_list[0], e2 = eps_list[1];
    rep.extrapolated_slope = (e1 * d[1] - e2 * d[0]) / (e1 - e2);
  } else {
    rep.extrapolated_slope = d[0];
  }
  rep.integral = green_squared_integral(*field, V);
  const double gap = std::abs(rep.extrapolated_slope - rep.integral);
  rep.relative_gap = rep.integral != 0.0 ? gap / std::abs(rep.integral) : gap;
  return rep;
}

}  // namespace blowup
