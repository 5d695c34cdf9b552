#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "blowup/discrete_operator.hpp"

namespace blowup {

/// Term k of the constant-coefficient expansion of H_a near the diagonal,
/// h_k(r) = -a^{k+1} r^{2k+1} / (4π (2k+2)!), so that -Δh_0 = a/(4πr) and
/// -Δh_k = -a h_{k-1}.
double hk_term(double a, double r, int k);
double hk_term_da(double a, double r, int k);
double hk_term_dr(double a, double r, int k);

enum class GradientMethod {
  Tangent,           // differentiate the discrete problem in y (3 extra solves)
  SourceDifference,  // central differences in y, step 2h, one Richardson pass
};

struct GreenOptions {
  double cg_tol = 1e-10;
  Preconditioner preconditioner = Preconditioner::IncompleteCholesky;
  GradientMethod gradient = GradientMethod::Tangent;
  bool check_coercivity = true;
};

class GreenSolver;

/// G_a(·, y) on the grid, stored through its smooth remainder:
///   G = 1/(4π|x-y|) - S(x) - K(x),   H = S + K,
/// where S = h_0 + h_1 + h_2 (with a frozen at y) carries the non-smooth part
/// of H and K is the grid solution. Immutable.
class GreenField {
 public:
  const Point& source() const { return y_; }
  const Grid& grid() const;

  double robin_value() const { return phi_; }
  bool has_gradient() const { return has_gradient_; }
  bool has_tangents() const { return has_tangents_; }
  /// ∇φ_a(y); throws if the field was solved without gradient data.
  const Eigen::Vector3d& robin_gradient() const;

  /// G_a(x, y) for x ≠ y in the closed domain (0 outside).
  double green(const Point& x) const;
  /// H_a(x, y).
  double regular(const Point& x) const;
  /// ∇_x G_a(x, y); NearSingularity when |x - y| <= 3h.
  Eigen::Vector3d gradient_x(const Point& x) const;
  /// ∇_y G_a(x, y) at fixed x; needs tangent data.
  Eigen::Vector3d gradient_y(const Point& x) const;

  /// Node values of G (+inf at a node coinciding with y, 0 off the domain).
  double green_at_node(std::size_t idx) const;
  std::vector<double> values() const;
  std::vector<double> regular_part() const;

 private:
  friend class GreenSolver;
  double singular_part(double r) const;  // S(r)

  std::shared_ptr<const DiscreteOperator> op_;
  Point y_;
  double a_y_ = 0.0;
  Eigen::Vector3d grad_a_y_ = Eigen::Vector3d::Zero();
  std::vector<double> k_;
  std::array<std::vector<double>, 3> dk_;
  bool has_tangents_ = false;
  double phi_ = 0.0;
  Eigen::Vector3d grad_phi_ = Eigen::Vector3d::Zero();
  bool has_gradient_ = false;
};

/// Discrete Dirichlet Green's function of -Δ + a on one grid. Construction
/// assembles the operator and certifies coercivity; solve() is thread-safe.
class GreenSolver {
 public:
  GreenSolver(const DomainSpec& dom, const PotentialSpec& a, GreenOptions opt = {});

  const Grid& grid() const { return op_->grid(); }
  const DomainSpec& domain() const { return op_->grid().domain(); }
  const PotentialSpec& potential() const { return a_; }
  const GreenOptions& options() const { return opt_; }
  const DiscreteOperator& op() const { return *op_; }
  double coercivity_estimate() const { return lambda_min_; }

  /// with_gradient adds ∇φ_a(y) (and ∇_y G for the tangent method).
  std::shared_ptr<const GreenField> solve(const Point& y, bool with_gradient = true) const;
  std::vector<std::shared_ptr<const GreenField>> solve_many(const std::vector<Point>& ys,
                                                            bool with_gradient,
                                                            int threads = 1) const;

  double robin(const Point& y) const { return solve(y, false)->robin_value(); }
  Eigen::Vector3d robin_gradient(const Point& y) const {
    return solve(y, true)->robin_gradient();
  }

 private:
  void require_interior(const Point& y) const;
  std::vector<double> solve_k(const Point& y, std::array<std::vector<double>, 3>* out_tangents) const;
  double phi_only(const Point& y) const;

  std::shared_ptr<const DiscreteOperator> op_;
  PotentialSpec a_;
  GreenOptions opt_;
  double lambda_min_ = 0.0;
};

GreenField solve_green(const DomainSpec& dom, const PotentialSpec& a, const Point& y);
double robin_function(const DomainSpec& dom, const PotentialSpec& a, const Point& y);
Eigen::Vector3d robin_gradient(const DomainSpec& dom, const PotentialSpec& a, const Point& y);
Eigen::Vector3d green_gradient_x(const GreenField& field, const Point& x);

}  // namespace blowup
