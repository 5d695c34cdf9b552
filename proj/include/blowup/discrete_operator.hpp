#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "blowup/domain.hpp"
#include "blowup/potential.hpp"

namespace blowup {

enum class Preconditioner { IncompleteCholesky, Jacobi };

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Row of the discrete operator touching the Dirichlet boundary. With the
/// crossing at fraction theta of the edge, the row carries 1/(theta h^2) on
/// the diagonal and coef * g(point) on the right side (symmetric ghost-fluid
/// treatment, second order for the solution).
struct BoundaryLink {
  int row = 0;
  std::size_t ghost_node = 0;  // grid node on the far side of the crossing
  Point point;                 // boundary crossing
  double theta = 1.0;
  double coef = 0.0;
};

/// 7-point discretization of -Δ + a on the unknown nodes of a grid, with a
/// PCG solver. Immutable after construction; solve() is safe to call
/// concurrently.
class DiscreteOperator {
 public:
  DiscreteOperator(const Grid& grid, const PotentialSpec& a,
                   Preconditioner pc = Preconditioner::IncompleteCholesky);

  const Grid& grid() const { return grid_; }
  int unknowns() const { return static_cast<int>(node_of_.size()); }
  int unknown_of(std::size_t node) const { return unknown_of_[node]; }
  std::size_t node_of(int row) const { return node_of_[row]; }
  const std::vector<BoundaryLink>& boundary_links() const { return links_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return A_; }
  const Eigen::VectorXd& potential_values() const { return a_; }

  /// Right side for Dirichlet data g: f(x_row) plus boundary contributions.
  Eigen::VectorXd assemble_rhs(const std::function<double(const Point&)>& f,
                               const std::function<double(const Point&)>& g) const;

  /// Preconditioned CG from a zero start. Throws SolverError past the cap
  /// of 20 iterations per grid line, NotCoercive on a non-positive curvature.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, double rel_tol = 1e-10,
                        SolveStats* stats = nullptr) const;

  /// Scatter unknowns onto the grid and fill the ghost nodes across the
  /// boundary by the same linear extrapolation the scheme uses. Returns the
  /// mask of nodes holding valid data.
  std::vector<double> to_grid(const Eigen::VectorXd& u,
                              const std::function<double(const Point&)>& g,
                              std::vector<char>* valid) const;

  /// Ghost-filled validity mask (same for every solution on this grid).
  const std::vector<char>& valid_mask() const { return valid_; }

  /// Smallest eigenvalue by inverse power iteration (Rayleigh quotient).
  double smallest_eigenvalue(int iterations = 20) const;

 private:
  void apply_preconditioner(const Eigen::VectorXd& r, Eigen::VectorXd& z) const;

  Grid grid_;
  std::vector<int> unknown_of_;
  std::vector<std::size_t> node_of_;
  std::vector<BoundaryLink> links_;
  std::vector<char> valid_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_;
  Eigen::VectorXd a_;
  Preconditioner pc_;
  Eigen::VectorXd diag_;     // IC(0) pivots, or the diagonal for Jacobi
};

/// λ_min of the a ≡ 0 operator on this grid, memoized per domain.
double base_smallest_eigenvalue(const DomainSpec& dom);

/// Throws NotCoercive unless -Δ_h + a is positive definite with margin 1e-8.
/// Returns the certified lower estimate of λ_min.
double check_coercivity(const DiscreteOperator& op, const PotentialSpec& a);

}  // namespace blowup
