#include "blowup/discrete_operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

constexpr double kThetaMin = 1e-3;
constexpr double kCoercivityMargin = 1e-8;

const int kDirs[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};

// fraction of the edge x -> x + s*h*e_d inside the ball
double ball_crossing(const Ball& b, const Point& x, int d, int s, double h) {
  const Point p = x - b.center;
  const double q = b.radius * b.radius - p.squaredNorm() + p[d] * p[d];
  const double t = (std::sqrt(std::max(q, 0.0)) - s * p[d]) / h;
  return std::clamp(t, 0.0, 1.0);
}

}  // namespace

DiscreteOperator::DiscreteOperator(const Grid& grid, const PotentialSpec& a, Preconditioner pc)
    : grid_(grid), pc_(pc) {
  const std::size_t nn = grid_.size();
  unknown_of_.assign(nn, -1);
  for (std::size_t idx = 0; idx < nn; ++idx) {
    if (grid_.is_interior(idx)) {
      unknown_of_[idx] = static_cast<int>(node_of_.size());
      node_of_.push_back(idx);
    }
  }
  const int m = unknowns();
  if (m == 0) throw GeometryError("discrete operator: grid has no interior nodes");

  const Eigen::Vector3d h = grid_.spacing();
  const Eigen::Vector3d ih2 = h.cwiseProduct(h).cwiseInverse();
  a_.resize(m);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * 7);
  valid_.assign(nn, 0);

  for (int row = 0; row < m; ++row) {
    const std::size_t idx = node_of_[row];
    valid_[idx] = 1;
    const auto c = grid_.ijk(idx);
    const Point x = grid_.node(c[0], c[1], c[2]);
    a_[row] = a(x);
    double diag = a_[row];
    for (const auto& dir : kDirs) {
      const int d = dir[0] != 0 ? 0 : (dir[1] != 0 ? 1 : 2);
      const int s = dir[d];
      const int ii = c[0] + dir[0], jj = c[1] + dir[1], kk = c[2] + dir[2];
      const std::size_t nb = grid_.index(ii, jj, kk);
      if (unknown_of_[nb] >= 0) {
        diag += ih2[d];
        trip.emplace_back(row, unknown_of_[nb], -ih2[d]);
        continue;
      }
      BoundaryLink link;
      link.row = row;
      link.ghost_node = nb;
      if (grid_.domain().is_ball())
        link.theta = std::max(ball_crossing(grid_.domain().ball(), x, d, s, h[d]), kThetaMin);
      link.point = x;
      link.point[d] += s * link.theta * h[d];
      link.coef = ih2[d] / link.theta;
      diag += link.coef;
      links_.push_back(link);
      valid_[nb] = 1;
    }
    trip.emplace_back(row, row, diag);
  }
  A_.resize(m, m);
  A_.setFromTriplets(trip.begin(), trip.end());
  A_.makeCompressed();

  // IC(0): the 7-point pattern has no fill, so only the pivots change
  diag_.resize(m);
  bool ok = pc_ == Preconditioner::IncompleteCholesky;
  for (int i = 0; i < m && ok; ++i) {
    double d = 0.0;
    double s = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A_, i); it; ++it) {
      if (it.col() == i) d = it.value();
      else if (it.col() < i) s += it.value() * it.value() / diag_[it.col()];
    }
    diag_[i] = d - s;
    if (!(diag_[i] > 0.0)) ok = false;
  }
  if (!ok) {
    pc_ = Preconditioner::Jacobi;
    diag_ = A_.diagonal();
    for (int i = 0; i < m; ++i)
      if (diag_[i] == 0.0) diag_[i] = 1.0;
  }
}

Eigen::VectorXd DiscreteOperator::assemble_rhs(const std::function<double(const Point&)>& f,
                                               const std::function<double(const Point&)>& g) const {
  Eigen::VectorXd b(unknowns());
  for (int row = 0; row < unknowns(); ++row) b[row] = f(grid_.node(node_of_[row]));
  for (const auto& link : links_) b[link.row] += link.coef * g(link.point);
  return b;
}

void DiscreteOperator::apply_preconditioner(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
  const int m = unknowns();
  if (pc_ == Preconditioner::Jacobi) {
    z = r.cwiseQuotient(diag_);
    return;
  }
  // (D+L) D^{-1} (D+L^T) z = r
  z.resize(m);
  for (int i = 0; i < m; ++i) {
    double s = r[i];
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A_, i); it; ++it)
      if (it.col() < i) s -= it.value() * z[it.col()];
    z[i] = s / diag_[i];
  }
  for (int i = m - 1; i >= 0; --i) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A_, i); it; ++it)
      if (it.col() > i) s += it.value() * z[it.col()];
    z[i] -= s / diag_[i];
  }
}

Eigen::VectorXd DiscreteOperator::solve(const Eigen::VectorXd& b, double rel_tol,
                                        SolveStats* stats) const {
  const int m = unknowns();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }
  const int max_iter = 20 * grid_.n();
  Eigen::VectorXd r = b, z(m), p(m), q(m);
  apply_preconditioner(r, z);
  p = z;
  double rz = r.dot(z);
  double res = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    q.noalias() = A_ * p;
    const double pq = p.dot(q);
    if (!(pq > 0.0))
      throw NotCoercive("operator is not positive definite (CG curvature " + std::to_string(pq) +
                        ")");
    const double alpha = rz / pq;
    x += alpha * p;
    r -= alpha * q;
    res = r.norm() / bnorm;
    if (res < rel_tol) {
      if (stats) *stats = {it, res};
      return x;
    }
    apply_preconditioner(r, z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolverError("CG did not reach the tolerance in " + std::to_string(max_iter) +
                        " iterations",
                    res);
}

std::vector<double> DiscreteOperator::to_grid(const Eigen::VectorXd& u,
                                              const std::function<double(const Point&)>& g,
                                              std::vector<char>* valid) const {
  std::vector<double> out(grid_.size(), 0.0);
  std::vector<int> count(grid_.size(), 0);
  for (int row = 0; row < unknowns(); ++row) out[node_of_[row]] = u[row];
  for (const auto& link : links_) {
    const double ui = u[link.row];
    const double ghost = ui + (g(link.point) - ui) / link.theta;
    if (count[link.ghost_node] == 0) out[link.ghost_node] = 0.0;
    out[link.ghost_node] += ghost;
    ++count[link.ghost_node];
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (count[i] > 1) out[i] /= count[i];
  if (valid) *valid = valid_;
  return out;
}

double DiscreteOperator::smallest_eigenvalue(int iterations) const {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(unknowns());
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd y = solve(x, 1e-10);
    y.normalize();
    lambda = y.dot(A_ * y);
    x = y;
  }
  return lambda;
}

double base_smallest_eigenvalue(const DomainSpec& dom) {
  static std::mutex mu;
  static std::map<std::string, double> cache;
  std::ostringstream key;
  key.precision(17);
  key << dom.resolution << ':';
  if (dom.is_ball())
    key << "ball " << dom.ball().center.transpose() << ' ' << dom.ball().radius;
  else
    key << "box " << dom.box().lo.transpose() << ' ' << dom.box().hi.transpose();
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key.str());
    if (it != cache.end()) return it->second;
  }
  const DiscreteOperator op(Grid(dom), PotentialSpec::constant(0.0));
  const double lambda = op.smallest_eigenvalue();
  std::lock_guard<std::mutex> lock(mu);
  cache[key.str()] = lambda;
  return lambda;
}

double check_coercivity(const DiscreteOperator& op, const PotentialSpec& a) {
  const double base = base_smallest_eigenvalue(op.grid().domain());
  double lambda;
  if (a.is_constant()) {
    lambda = base + a.constant_value();
  } else {
    lambda = base + op.potential_values().minCoeff();
    if (!(lambda > kCoercivityMargin)) lambda = op.smallest_eigenvalue();
  }
  if (!(lambda > kCoercivityMargin)) {
    std::ostringstream msg;
    msg << "-Δ + a is not coercive on this grid (smallest eigenvalue estimate " << lambda << ")";
    throw NotCoercive(msg.str());
  }
  return lambda;
}

}  // namespace blowup
