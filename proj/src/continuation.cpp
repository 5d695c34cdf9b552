#include "blowup/continuation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <list>
#include <map>
#include <sstream>
#include <tuple>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

thread_local std::vector<ContinuationStep> g_last_trace;

using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t>;

Key round_point(const Point& p) {
  return {std::llround(p[0] * 1e9), std::llround(p[1] * 1e9), std::llround(p[2] * 1e9)};
}

// Green solvers per τ and fields per (τ, point). Bounded so a long run does
// not hold every field it ever touched.
class FieldCache {
 public:
  FieldCache(const DomainSpec& dom, const PotentialSpec& a_base, const GreenOptions& opt)
      : dom_(dom), a_base_(a_base), opt_(opt) {}

  const GreenSolver& solver(double tau) {
    auto it = solvers_.find(tau);
    if (it != solvers_.end()) return *it->second;
    std::unique_ptr<GreenSolver> s;
    try {
      s = std::make_unique<GreenSolver>(dom_, a_base_.scaled(tau), opt_);
    } catch (const NotCoercive& e) {
      std::ostringstream msg;
      msg << "continuation left the coercive range at τ = " << tau << ": " << e.what();
      throw ContinuationOutOfRange(msg.str());
    }
    if (solvers_.size() >= 6) {
      solvers_.erase(solver_order_.front());
      solver_order_.pop_front();
    }
    solver_order_.push_back(tau);
    return *(solvers_[tau] = std::move(s));
  }

  std::shared_ptr<const GreenField> field(double tau, const Point& p) {
    const auto key = std::make_pair(tau, round_point(p));
    auto it = fields_.find(key);
    if (it != fields_.end()) return it->second;
    auto f = solver(tau).solve(p, true);
    if (fields_.size() >= 48) {
      fields_.erase(field_order_.front());
      field_order_.pop_front();
    }
    field_order_.push_back(key);
    fields_[key] = f;
    return f;
  }

 private:
  DomainSpec dom_;
  PotentialSpec a_base_;
  GreenOptions opt_;
  std::map<double, std::unique_ptr<GreenSolver>> solvers_;
  std::list<double> solver_order_;
  std::map<std::pair<double, Key>, std::shared_ptr<const GreenField>> fields_;
  std::list<std::pair<double, Key>> field_order_;
};

struct Evaluation {
  Eigen::VectorXd F;  // (ρ, ∇ρ) or ∇ρ alone with fixed τ
  InteractionSpectrum spectrum;
};

}  // namespace

const std::vector<ContinuationStep>& last_trace() { return g_last_trace; }

std::string trace_csv(const std::vector<ContinuationStep>& trace) {
  std::ostringstream out;
  out.precision(12);
  out << "iteration,tau,rho,grad_norm,step_norm,damping,fresh_jacobian\n";
  for (const auto& s : trace)
    out << s.iteration << ',' << s.tau << ',' << s.rho << ',' << s.grad_norm << ','
        << s.step_norm << ',' << s.damping << ',' << (s.fresh_jacobian ? 1 : 0) << '\n';
  return out.str();
}

ContinuationResult find_blowup_configuration(const DomainSpec& dom, const PotentialSpec& a_base,
                                             int n, const BubbleConfiguration& init,
                                             const ContinuationOptions& opt) {
  if (n < 1) throw InvalidParameter("find_blowup_configuration: n must be >= 1");
  if (init.size() != n) throw InvalidParameter("find_blowup_configuration: init has wrong size");
  init.validate();
  g_last_trace.clear();

  FieldCache cache(dom, a_base, opt.green);
  const Grid& grid = cache.solver(opt.tau0).grid();
  const double margin = 2.0 * grid.hmax();
  const double diam = dom.diameter();
  const int offset = opt.fix_tau ? 0 : 1;
  const int dim = 3 * n + offset;

  auto unpack = [&](const Eigen::VectorXd& z, double& tau, std::vector<Point>& pts) {
    tau = opt.fix_tau ? opt.tau0 : z[0];
    pts.resize(n);
    for (int i = 0; i < n; ++i) pts[i] = z.segment<3>(offset + 3 * i);
  };
  auto admissible = [&](const Eigen::VectorXd& z) {
    double tau;
    std::vector<Point> pts;
    unpack(z, tau, pts);
    for (const Point& p : pts)
      if (!(dom.inside_distance(p) > margin)) return false;
    return true;
  };
  auto evaluate = [&](const Eigen::VectorXd& z) {
    double tau;
    std::vector<Point> pts;
    unpack(z, tau, pts);
    const GreenSolver& s = cache.solver(tau);
    InteractionModel model(s, pts, true, [&](const Point& p) { return cache.field(tau, p); });
    Evaluation ev;
    ev.spectrum = model.spectrum();
    ev.F.resize(dim);
    if (!opt.fix_tau) ev.F[0] = ev.spectrum.rho;
    ev.F.tail(3 * n) = ev.spectrum.gradient;
    return ev;
  };

  Eigen::VectorXd z(dim);
  if (!opt.fix_tau) z[0] = opt.tau0;
  for (int i = 0; i < n; ++i) z.segment<3>(offset + 3 * i) = init.points[i];
  if (!admissible(z)) throw GeometryError("find_blowup_configuration: init point too close to the boundary");

  Evaluation cur = evaluate(z);
  Eigen::MatrixXd J;
  int jac_age = opt.jacobian_reuse;  // forces a fresh Jacobian first
  bool fresh = false;

  auto record = [&](int it, double step, double damping) {
    ContinuationStep st;
    st.iteration = it;
    st.tau = opt.fix_tau ? opt.tau0 : z[0];
    st.rho = cur.spectrum.rho;
    st.grad_norm = cur.spectrum.gradient.norm();
    st.step_norm = step;
    st.damping = damping;
    st.fresh_jacobian = fresh;
    g_last_trace.push_back(st);
  };
  auto done = [&] {
    const bool grad_ok = cur.spectrum.gradient.norm() < opt.grad_tol;
    return opt.fix_tau ? grad_ok : (std::abs(cur.spectrum.rho) < opt.rho_tol && grad_ok);
  };
  auto fail = [&](const std::string& why) {
    std::ostringstream msg;
    msg << "find_blowup_configuration: " << why << "\n" << trace_csv(g_last_trace);
    throw NoConvergence(msg.str());
  };

  record(0, 0.0, 0.0);
  for (int it = 1; it <= opt.max_iterations && !done(); ++it) {
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (jac_age >= opt.jacobian_reuse || attempt == 1) {
        J.resize(dim, dim);
        for (int c = 0; c < dim; ++c) {
          const double step = (!opt.fix_tau && c == 0) ? 1e-5 * std::abs(z[0]) : 1e-5 * diam;
          Eigen::VectorXd zp = z;
          zp[c] += step;
          J.col(c) = (evaluate(zp).F - cur.F) / step;
        }
        jac_age = 0;
        fresh = true;
      } else {
        fresh = false;
      }
      const Eigen::VectorXd delta = J.colPivHouseholderQr().solve(-cur.F);
      const double f0 = cur.F.norm();
      double alpha = 1.0;
      for (int k = 0; k < 12; ++k, alpha *= 0.5) {
        const Eigen::VectorXd trial = z + alpha * delta;
        if (!admissible(trial)) continue;
        if (!opt.fix_tau && !(trial[0] > 0.0)) continue;
        Evaluation ev;
        try {
          ev = evaluate(trial);
        } catch (const SpectralDegeneracy&) {
          continue;
        }
        if (ev.F.norm() <= (1.0 - 1e-4 * alpha) * f0) {
          z = trial;
          cur = std::move(ev);
          accepted = true;
          ++jac_age;
          record(it, alpha * delta.norm(), alpha);
          break;
        }
      }
      if (!accepted && fresh) break;
    }
    if (!accepted) fail("line search stagnated");
  }
  if (!done()) fail("iteration limit reached");

  // The tolerances only certify |ρ| < 1e-8; a couple of cheap steps with the
  // last Jacobian push ρ well below the semidefiniteness threshold.
  for (int k = 0; k < opt.polish_steps && J.size() > 0; ++k) {
    const Eigen::VectorXd trial = z + J.colPivHouseholderQr().solve(-cur.F);
    if (!admissible(trial)) break;
    Evaluation ev;
    try {
      ev = evaluate(trial);
    } catch (const SpectralDegeneracy&) {
      break;
    }
    if (!(ev.F.norm() < cur.F.norm())) break;
    const double step = (trial - z).norm();
    z = trial;
    cur = std::move(ev);
    fresh = false;
    record(static_cast<int>(g_last_trace.size()), step, 1.0);
  }

  ContinuationResult res;
  double tau;
  std::vector<Point> pts;
  unpack(z, tau, pts);
  res.tau = tau;
  res.spectrum = cur.spectrum;
  res.rho_residual = std::abs(cur.spectrum.rho);
  res.grad_residual = cur.spectrum.gradient.norm();
  res.eigen_residual = (cur.spectrum.matrix * cur.spectrum.perron).norm();
  res.converged = opt.fix_tau ? res.grad_residual < opt.grad_tol
                              : res.rho_residual < opt.rho_tol && res.grad_residual < opt.grad_tol;
  res.config.points = pts;
  res.config.weights = cur.spectrum.perron;
  const PotentialSpec a = a_base.scaled(tau);
  for (const Point& p : pts) res.config.a_values.push_back(a(p));
  res.trace = g_last_trace;
  return res;
}

}  // namespace blowup
