#include "blowup/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "blowup/checksum.hpp"
#include "blowup/continuation.hpp"
#include "blowup/errors.hpp"
#include "blowup/linearized.hpp"
#include "blowup/parallel.hpp"
#include "blowup/predictor.hpp"

namespace blowup {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json point_json(const Point& p) { return json::array({p[0], p[1], p[2]}); }

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_json(m.row(r).transpose()));
  return a;
}

Point domain_center(const DomainSpec& d) {
  return d.is_ball() ? d.ball().center : Point(0.5 * (d.box().lo + d.box().hi));
}

class Session {
 public:
  Session(const ProblemSpec& spec, const RunOptions& opt) : spec_(spec), opt_(opt) {
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec || !fs::is_directory(opt.out_dir))
      throw IoError("cannot create output directory " + opt.out_dir);
    report_.task = to_string(spec.task);
    report_.spec = to_json(spec);
    report_.residuals = json::object();
  }

  void log(int level, const std::string& msg) const {
    if (opt_.log && opt_.verbosity >= level) *opt_.log << msg << '\n';
  }

  template <class F>
  auto timed(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Stop {
      Session* s;
      std::string name;
      std::chrono::steady_clock::time_point t0;
      ~Stop() {
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        s->report_.timings.emplace_back(name, dt);
        s->log(2, "  " + name + ": " + num(dt) + " s");
      }
    } stop{this, name, t0};
    return f();
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = fs::path(opt_.out_dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << content;
    out.close();
    if (!out) throw IoError("write failed for " + p.string());
    report_.manifest.push_back({name, sha256_hex(content), content.size()});
    log(2, "  wrote " + name);
  }

  void csv(const std::string& name, const std::string& content) {
    if (spec_.outputs.csv) write(name, content);
  }

  RunReport finish(json result) {
    report_.result = std::move(result);
    // the result file goes first in the manifest
    std::vector<ManifestEntry> csvs = std::move(report_.manifest);
    report_.manifest.clear();
    write(spec_.outputs.result, report_.result.dump(2) + "\n");
    for (auto& e : csvs) report_.manifest.push_back(std::move(e));

    const fs::path p = fs::path(opt_.out_dir) / spec_.outputs.report;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << report_.to_json().dump(2) << "\n";
    if (!out) throw IoError("write failed for " + p.string());
    return report_;
  }

  const ProblemSpec& spec_;
  const RunOptions& opt_;
  RunReport report_;
};

// ---------------------------------------------------------------------------

json run_robin_map(Session& s) {
  const ProblemSpec& sp = s.spec_;
  const GreenSolver solver = s.timed("setup", [&] { return GreenSolver(sp.domain, sp.potential_a); });
  const Grid& g = solver.grid();
  const int m = sp.params.probe_resolution;
  const Point lo = g.lo();
  const Point hi = lo + (g.n() - 1) * g.spacing();

  std::vector<Point> probes;
  std::vector<char> ok;
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const Eigen::Vector3d t(i, j, k);
        const Point x = lo + ((hi - lo).array() * t.array() / std::max(1, m - 1)).matrix();
        probes.push_back(x);
        ok.push_back(sp.domain.inside_distance(x) > 2.5 * g.hmax());
      }
  std::vector<int> active;
  for (int i = 0; i < static_cast<int>(probes.size()); ++i)
    if (ok[i]) active.push_back(i);
  s.log(1, "robin_map: " + std::to_string(active.size()) + " admissible probes of " +
               std::to_string(probes.size()));

  std::vector<double> phi(probes.size(), std::nan(""));
  s.timed("solves", [&] {
    parallel_for(static_cast<int>(active.size()), s.opt_.threads,
                 [&](int q) { phi[active[q]] = solver.robin(probes[active[q]]); });
    return 0;
  });

  std::string all = "x,y,z,phi\n", plane = "x,y,z,phi\n";
  int best = -1;
  for (int i = 0; i < static_cast<int>(probes.size()); ++i) {
    const Point& x = probes[i];
    const std::string row = num(x[0]) + "," + num(x[1]) + "," + num(x[2]) + "," + num(phi[i]) + "\n";
    all += row;
    if (i / (m * m) == m / 2) plane += row;
    if (ok[i] && (best < 0 || phi[i] < phi[best])) best = i;
  }
  s.csv("robin_map.csv", all);
  s.csv("robin_map_plane.csv", plane);

  json r;
  r["probe_resolution"] = m;
  r["probes"] = probes.size();
  r["admissible"] = active.size();
  r["coercivity_estimate"] = solver.coercivity_estimate();
  if (best >= 0) r["minimum"] = {{"point", point_json(probes[best])}, {"phi", phi[best]}};
  const Point c = domain_center(sp.domain);
  for (int i = 0; i < static_cast<int>(probes.size()); ++i)
    if (ok[i] && (probes[i] - c).norm() < 1e-12) r["center_phi"] = phi[i];
  return r;
}

json run_green_eval(Session& s) {
  const ProblemSpec& sp = s.spec_;
  const GreenSolver solver = s.timed("setup", [&] { return GreenSolver(sp.domain, sp.potential_a); });
  const auto fields = s.timed("solves", [&] { return solver.solve_many(sp.params.sources, true, s.opt_.threads); });
  json out = json::array();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const GreenField& f = *fields[i];
    json e;
    e["source"] = point_json(f.source());
    e["phi"] = f.robin_value();
    e["grad_phi"] = point_json(f.robin_gradient());
    json probes = json::array();
    for (const Point& x : sp.params.probes) {
      json p{{"point", point_json(x)}};
      if ((x - f.source()).norm() < 1e-12) {
        p["G"] = nullptr;
        p["H"] = f.robin_value();
      } else {
        p["G"] = f.green(x);
        p["H"] = f.regular(x);
      }
      probes.push_back(p);
    }
    e["probes"] = probes;
    out.push_back(e);
    s.csv("green_" + std::to_string(i) + "_plane.csv", plane_slice_csv(solver.grid(), f.values(), f.source()));
  }
  json r;
  r["coercivity_estimate"] = solver.coercivity_estimate();
  r["sources"] = out;
  return r;
}

ContinuationOptions continuation_options(const Session& s) {
  ContinuationOptions o;
  o.tau0 = s.spec_.params.tau0;
  o.fix_tau = s.spec_.params.fix_tau;
  o.max_iterations = s.spec_.params.max_iterations;
  o.threads = s.opt_.threads;
  return o;
}

ContinuationResult continue_to_config(Session& s) {
  const ProblemSpec& sp = s.spec_;
  BubbleConfiguration init;
  init.points = sp.params.init;
  if (init.points.empty()) init.points = {domain_center(sp.domain)};
  try {
    return s.timed("continuation", [&] {
      return find_blowup_configuration(sp.domain, sp.potential_a, sp.params.n, init, continuation_options(s));
    });
  } catch (const NoConvergence&) {
    s.csv("continuation_trace.csv", trace_csv(last_trace()));
    throw;
  }
}

json config_json(const ContinuationResult& c) {
  json r;
  r["tau"] = c.tau;
  r["converged"] = c.converged;
  json pts = json::array();
  for (const Point& p : c.config.points) pts.push_back(point_json(p));
  r["points"] = pts;
  r["weights"] = vector_json(*c.config.weights);
  r["a_values"] = c.config.a_values;
  r["rho"] = c.rho_residual;
  r["grad_norm"] = c.grad_residual;
  r["eigen_residual"] = c.eigen_residual;
  r["iterations"] = c.trace.size();
  r["matrix"] = matrix_json(c.spectrum.matrix);
  return r;
}

json run_find_config(Session& s) {
  const ContinuationResult c = continue_to_config(s);
  s.csv("continuation_trace.csv", trace_csv(c.trace));
  s.report_.residuals["rho"] = c.rho_residual;
  s.report_.residuals["grad_norm"] = c.grad_residual;
  s.log(1, "find_config: tau = " + num(c.tau));
  return config_json(c);
}

json run_predict(Session& s) {
  const ProblemSpec& sp = s.spec_;
  PredictionInputs in;
  in.dom = sp.domain;
  in.a = sp.potential_a;
  in.V = sp.potential_V;
  in.points = sp.params.init;
  in.threads = s.opt_.threads;
  json r;
  if (sp.params.certify_by_continuation) {
    const ContinuationResult c = continue_to_config(s);
    s.csv("continuation_trace.csv", trace_csv(c.trace));
    in.a = sp.potential_a.scaled(c.tau);
    in.points = c.config.points;
    r["continuation"] = config_json(c);
  }
  std::shared_ptr<const LimitProfile> profile;
  const BlowupPrediction p = s.timed("prediction", [&] { return blowup_rate(in, &profile); });

  json pts = json::array();
  for (const Point& x : p.config.points) pts.push_back(point_json(x));
  r["points"] = pts;
  r["weights"] = vector_json(*p.config.weights);
  r["matrix"] = matrix_json(p.matrix);
  r["rho"] = p.rho;
  r["grad_norm"] = p.grad_norm;
  r["limit_profile_coefficients"] = vector_json(p.limit_profile_coefficients);
  r["qv"] = vector_json(p.qv_values);
  r["numerator"] = p.numerator;
  r["denominator"] = p.denominator;
  r["denominator_direct"] = p.denominator_direct;
  json rates = json::array();
  for (const RateValue& v : p.rates) {
    json e{{"kind", to_string(v.kind)}};
    e["value"] = v.kind == RateKind::Finite || v.kind == RateKind::Zero ? json(v.value) : json(nullptr);
    rates.push_back(e);
  }
  r["rates"] = rates;
  r["sign_consistent"] = p.sign_consistent;
  r["diagnostic"] = p.diagnostic;

  const double path_gap = std::abs(p.denominator_direct - p.denominator) / std::abs(p.denominator);
  s.report_.residuals["denominator_path_gap"] = path_gap;
  s.report_.residuals["rho"] = p.rho;
  s.report_.residuals["grad_norm"] = p.grad_norm;

  const int n = static_cast<int>(p.rates.size());
  bool finite_positive = true;
  for (const RateValue& v : p.rates) finite_positive = finite_positive && v.kind == RateKind::Finite && v.value > 0;
  if (finite_positive) {
    const Eigen::VectorXd& lam = *p.config.weights;
    double spread = 0.0;
    for (int i = 0; i < n; ++i)
      spread = std::max(spread, std::abs(p.rates[i].value * lam[i] * lam[i] - p.rates[0].value) /
                                    std::abs(p.rates[0].value));
    s.report_.residuals["rate_lambda_spread"] = spread;

    std::string sweep = "eps,i,mu,residual,residual_over_eps\n";
    json sw = json::array();
    for (double eps : sp.params.eps) {
      Eigen::VectorXd mu(n), lambda(n);
      for (int i = 0; i < n; ++i) mu[i] = eps / p.rates[i].value;
      for (int i = 0; i < n; ++i) lambda[i] = std::sqrt(mu[i] / mu[0]);
      const Eigen::VectorXd res = expansion_residual(*profile, p.matrix, in.a, in.V, lambda, mu, eps);
      for (int i = 0; i < n; ++i)
        sweep += num(eps) + "," + std::to_string(i) + "," + num(mu[i]) + "," + num(res[i]) + "," +
                 num(res[i] / eps) + "\n";
      sw.push_back({{"eps", eps}, {"residual", vector_json(res)}});
    }
    r["expansion_sweep"] = sw;
    s.csv("eps_sweep.csv", sweep);
  }
  s.csv("limit_profile_plane.csv", plane_slice_csv(profile->grid(), profile->node_values(), p.config.points[0]));
  return r;
}

json run_linearized(Session& s) {
  using namespace linearized;
  const TaskParams& t = s.spec_.params;
  const int count = static_cast<int>(t.k.size());
  std::vector<LinearizedMode> reg(count), sing(count);
  s.timed("modes", [&] {
    parallel_for(2 * count, s.opt_.threads, [&](int q) {
      const int i = q / 2;
      if (q % 2 == 0)
        reg[i] = solve_mode(t.N, t.k[i], Branch::Regular, t.r_max);
      else
        sing[i] = solve_mode(t.N, t.k[i], Branch::Singular, t.r_max);
    });
    return 0;
  });
  json modes = json::array();
  for (int i = 0; i < count; ++i) {
    const int k = t.k[i];
    json e{{"k", k}, {"mu_k", reg[i].mu_k}};
    const GrowthBounds gb = growth_bounds(reg[i]);
    e["growth"] = {{"c_minus", gb.c_minus}, {"c_plus", gb.c_plus}, {"one_signed", gb.one_signed}};
    const LogCoordinateReport lr = log_coordinate_check(reg[i]);
    e["log_fit"] = {{"left_slope", lr.left.slope}, {"right_slope", lr.right.slope},
                    {"max_residual", lr.max_residual}};
    e["wronskian_variation"] = wronskian_variation(reg[i], sing[i]);
    if (k <= 1) e["exact_residual"] = exact_mode_residual(t.N, k);
    modes.push_back(e);
    const std::string stem = "mode_N" + std::to_string(t.N) + "_k" + std::to_string(k);
    s.csv(stem + "_regular.csv", mode_csv(reg[i]));
    s.csv(stem + "_singular.csv", mode_csv(sing[i]));
  }
  json r{{"N", t.N}, {"modes", modes}};
  if (t.liouville_tau) {
    std::vector<int> ks;
    for (int k = 0; k <= static_cast<int>(std::ceil(*t.liouville_tau)) + 2; ++k) ks.push_back(k);
    const LiouvilleReport lr = liouville_certificate(t.N, *t.liouville_tau, ks);
    json d = json::array();
    for (const DegreeVerdict& v : lr.degrees)
      d.push_back({{"k", v.k}, {"excluded", v.excluded}, {"reason", v.reason},
                   {"exponent_at_origin", v.exponent_at_origin},
                   {"exponent_at_infinity", v.exponent_at_infinity}});
    r["liouville"] = {{"tau", lr.tau}, {"degrees", d}, {"verdict", lr.verdict}};
  }
  return r;
}

json run_verify(Session& s) {
  const auto checks = s.timed("suite", [&] {
    return run_verify_suite(s.spec_.params.verify_resolution, s.opt_.threads);
  });
  s.report_.checks = checks;
  json list = json::array();
  int passed = 0;
  for (const CheckResult& c : checks) {
    passed += c.passed;
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value},
                    {"tolerance", c.tolerance}, {"detail", c.detail}});
    s.log(1, std::string(c.passed ? "  pass  " : "  FAIL  ") + c.name + "  " + num(c.value));
  }
  return {{"checks", list}, {"passed", passed}, {"failed", static_cast<int>(checks.size()) - passed}};
}

template <class E>
[[noreturn]] void rethrow_with(const std::string& ctx, const E& e) {
  throw E(ctx + e.what());
}

}  // namespace

bool RunReport::all_checks_passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

json RunReport::to_json() const {
  json j;
  j["task"] = task;
  j["spec"] = spec;
  json t = json::object();
  for (const auto& [name, sec] : timings) t[name] = sec;
  j["timings"] = t;
  j["residuals"] = residuals;
  json c = json::array();
  int passed = 0;
  for (const CheckResult& r : checks) {
    passed += r.passed;
    c.push_back({{"name", r.name}, {"passed", r.passed}, {"value", r.value}, {"tolerance", r.tolerance}});
  }
  j["checks"] = c;
  j["checks_passed"] = passed;
  j["checks_failed"] = static_cast<int>(checks.size()) - passed;
  json m = json::array();
  for (const ManifestEntry& e : manifest)
    m.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  j["manifest"] = m;
  return j;
}

std::string plane_slice_csv(const Grid& grid, const std::vector<double>& values, const Point& through) {
  const int n = grid.n();
  int k = static_cast<int>(std::lround((through[2] - grid.lo()[2]) / grid.spacing()[2]));
  k = std::clamp(k, 0, n - 1);
  std::string out = "x,y,z,value\n";
  out.reserve(out.size() + static_cast<std::size_t>(n) * n * 64);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Point x = grid.node(i, j, k);
      out += num(x[0]) + "," + num(x[1]) + "," + num(x[2]) + "," + num(values[grid.index(i, j, k)]) + "\n";
    }
  return out;
}

RunReport run(const ProblemSpec& spec, const RunOptions& opt) {
  validate_problem_spec(spec);
  Session s(spec, opt);
  const std::string ctx = to_string(spec.task) + ": ";
  s.log(1, "task " + to_string(spec.task) + ", resolution " + std::to_string(spec.domain.resolution));
  json result;
  try {
    switch (spec.task) {
      case Task::RobinMap:
        result = run_robin_map(s);
        break;
      case Task::GreenEval:
        result = run_green_eval(s);
        break;
      case Task::FindConfig:
        result = run_find_config(s);
        break;
      case Task::Predict:
        result = run_predict(s);
        break;
      case Task::Linearized:
        result = run_linearized(s);
        break;
      case Task::Verify:
        result = run_verify(s);
        break;
    }
  } catch (const SpecError&) {
    throw;
  } catch (const CertificationError& e) {
    rethrow_with(ctx, e);
  } catch (const InputError& e) {
    rethrow_with(ctx, e);
  } catch (const IoError& e) {
    rethrow_with(ctx, e);
  } catch (const NumericalError& e) {
    rethrow_with(ctx, e);
  }
  result = json{{"task", to_string(spec.task)}, {"spec", to_json(spec)}, {"result", result}};
  return s.finish(std::move(result));
}

}  // namespace blowup
