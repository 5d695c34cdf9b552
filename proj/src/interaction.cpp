#include "blowup/interaction.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "blowup/errors.hpp"

namespace blowup {

void BubbleConfiguration::validate() const {
  if (points.empty()) throw InvalidParameter("configuration: no points");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if ((points[i] - points[j]).norm() == 0.0)
        throw DegenerateConfiguration("configuration: coincident points");
  if (weights) {
    if (weights->size() != size()) throw InvalidParameter("configuration: weight count mismatch");
    if (!((*weights).minCoeff() > 0.0))
      throw InvalidParameter("configuration: weights must be strictly positive");
    if (std::abs((*weights)[0] - 1.0) > 1e-12)
      throw InvalidParameter("configuration: weights must satisfy Λ_1 = 1");
  }
}

InteractionModel::InteractionModel(const GreenSolver& solver, std::vector<Point> points,
                                   bool with_gradient, int threads)
    : points_(std::move(points)), with_gradient_(with_gradient) {
  validate(solver);
  fields_ = solver.solve_many(points_, with_gradient, threads);
  assemble();
}

InteractionModel::InteractionModel(const GreenSolver& solver, std::vector<Point> points,
                                   bool with_gradient, const FieldProvider& provider)
    : points_(std::move(points)), with_gradient_(with_gradient) {
  validate(solver);
  for (const Point& p : points_) fields_.push_back(provider(p));
  assemble();
}

void InteractionModel::validate(const GreenSolver& solver) const {
  const double min_gap = 4.0 * solver.grid().hmax();
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      if ((points_[i] - points_[j]).norm() < min_gap)
        throw DegenerateConfiguration("configuration: points closer than four grid cells");
}

void InteractionModel::assemble() {
  const int n = size();
  M_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    M_(i, i) = fields_[i]->robin_value();
    for (int j = 0; j < i; ++j) {
      const double g = 0.5 * (fields_[j]->green(points_[i]) + fields_[i]->green(points_[j]));
      M_(i, j) = M_(j, i) = -g;
    }
  }
}

Eigen::MatrixXd InteractionModel::mtilde(int l) const {
  if (l < 0 || l > 2) throw InvalidParameter("mtilde: axis index must be 0, 1 or 2");
  if (!with_gradient_) throw InvalidParameter("mtilde: model was built without gradients");
  const int n = size();
  Eigen::MatrixXd T(n, n);
  for (int i = 0; i < n; ++i) {
    T(i, i) = fields_[i]->robin_gradient()[l];
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      // derivative of G_h(x_i; x_j) in the field point plus that of
      // G_h(x_j; x_i) in the source, both taken with respect to x_i
      const double gx = fields_[j]->gradient_x(points_[i])[l];
      // without tangent data fall back on the symmetry of G
      const double source_term =
          fields_[i]->has_tangents() ? fields_[i]->gradient_y(points_[j])[l] : gx;
      T(i, j) = -2.0 * 0.5 * (gx + source_term);
    }
  }
  return T;
}

InteractionSpectrum analyze_matrix(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  InteractionSpectrum s;
  s.matrix = M;
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  s.rho = s.eigenvalues[0];
  const int n = static_cast<int>(M.rows());
  s.spectral_gap = n > 1 ? s.eigenvalues[1] - s.eigenvalues[0]
                         : std::numeric_limits<double>::infinity();
  if (s.spectral_gap < 1e-10)
    throw SpectralDegeneracy("lowest eigenvalue of the interaction matrix is not simple");

  Eigen::VectorXd v = s.eigenvectors.col(0);
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
  s.eigenvectors.col(0) = v;
  s.perron = v / v[0];
  return s;
}

Eigen::VectorXd rho_gradient(const InteractionSpectrum& spectrum,
                             const std::array<Eigen::MatrixXd, 3>& mtilde) {
  if (spectrum.spectral_gap < 1e-10)
    throw SpectralDegeneracy("rho_gradient: lowest eigenvalue is not simple");
  const Eigen::VectorXd v = spectrum.perron.normalized();
  const int n = static_cast<int>(v.size());
  Eigen::VectorXd g(3 * n);
  for (int l = 0; l < 3; ++l) {
    const Eigen::VectorXd mv = mtilde[l] * v;
    for (int i = 0; i < n; ++i) g[3 * i + l] = v[i] * mv[i];
  }
  return g;
}

InteractionSpectrum InteractionModel::spectrum() const {
  InteractionSpectrum s = analyze_matrix(M_);
  if (with_gradient_) s.gradient = rho_gradient(s, {mtilde(0), mtilde(1), mtilde(2)});
  return s;
}

InteractionSpectrum build_matrix(const DomainSpec& dom, const PotentialSpec& a,
                                 const BubbleConfiguration& config) {
  config.validate();
  const GreenSolver solver(dom, a);
  return InteractionModel(solver, config.points, true).spectrum();
}

Eigen::MatrixXd build_mtilde(const DomainSpec& dom, const PotentialSpec& a,
                             const BubbleConfiguration& config, int l) {
  config.validate();
  const GreenSolver solver(dom, a);
  return InteractionModel(solver, config.points, true).mtilde(l);
}

bool positive_semidefinite_check(const InteractionSpectrum& spectrum) {
  return spectrum.rho >= -1e-10;
}

}  // namespace blowup
