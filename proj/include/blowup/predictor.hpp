#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "blowup/interaction.hpp"

namespace blowup {

/// Rational × π^p × √3^q, kept normalized (q ∈ {0, 1}).
struct ExactConstant {
  std::int64_t num = 1;
  std::int64_t den = 1;
  int pi_power = 0;
  int sqrt3_power = 0;

  static ExactConstant make(std::int64_t num, std::int64_t den, int pi_power, int sqrt3_power);
  ExactConstant operator*(const ExactConstant& o) const;
  ExactConstant operator/(const ExactConstant& o) const;
  bool operator==(const ExactConstant& o) const;
  double value() const;
  std::string str() const;
};

/// 12π²√3 divided by the (4π√3)² = 48π² that 𝒢² contributes for n = 1.
ExactConstant single_bubble_prefactor();

enum class RateKind { Finite, Zero, Infinite, Indeterminate };

struct RateValue {
  RateKind kind = RateKind::Indeterminate;
  double value = 0.0;  // meaningful for Finite (and 0 for Zero)
};

std::string to_string(RateKind k);

struct BlowupPrediction {
  BubbleConfiguration config;
  Eigen::MatrixXd matrix;
  double rho = 0.0;
  double grad_norm = 0.0;
  Eigen::VectorXd limit_profile_coefficients;  // 4π√3 Λ_i
  Eigen::VectorXd qv_values;
  double numerator = 0.0;            // Σ a(x_j) Λ_j^4
  double denominator = 0.0;          // 4π√3 Σ Λ_i Q_V(x_i)
  double denominator_direct = 0.0;   // singularity-subtracted grid sum of V𝒢²
  std::vector<RateValue> rates;
  bool sign_consistent = false;
  std::string diagnostic;
};

/// Limit profile 𝒢 = 4π√3 Σ Λ_i G_a(x_i, ·) with the quadrature machinery
/// for Q_V and ∫V𝒢². Holds one Green field per point.
class LimitProfile {
 public:
  LimitProfile(std::shared_ptr<const GreenSolver> solver, std::vector<Point> points,
               Eigen::VectorXd weights, int threads = 1);
  /// Reuses already solved fields (one per point, same solver).
  LimitProfile(std::shared_ptr<const GreenSolver> solver,
               std::vector<std::shared_ptr<const GreenField>> fields, Eigen::VectorXd weights);

  const GreenSolver& solver() const { return *solver_; }
  const Grid& grid() const { return solver_->grid(); }
  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<Point>& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return lambda_; }
  const GreenField& field(int i) const { return *fields_[i]; }

  /// 𝒢 at grid nodes (+inf at a node coinciding with some x_i, 0 off Ω).
  std::vector<double> node_values() const;
  /// 𝒢(x) for x off the singular points.
  double operator()(const Point& x) const;

  /// Q_V(x_k) = ∫ V 𝒢 G_a(·, x_k).
  double qv(const PotentialSpec& V, int k) const;
  /// ∫ |V| 𝒢², the scale against which a vanishing denominator is judged.
  double abs_vg2(const PotentialSpec& V) const;
  /// ∫ V 𝒢² by subtracting the c²/r² + 2cg/r (and dipole) behaviour near
  /// each point on the grid and integrating the subtracted part radially.
  double vg2_direct(const PotentialSpec& V) const;
  /// Regular value of 𝒢 at x_i, i.e. lim (𝒢 - √3 Λ_i/|x - x_i|).
  double regular_value(int i) const;

 private:
  void cache_nodes();

  std::shared_ptr<const GreenSolver> solver_;
  std::vector<Point> points_;
  Eigen::VectorXd lambda_;
  std::vector<std::shared_ptr<const GreenField>> fields_;
  std::vector<std::vector<double>> node_g_;
};

std::vector<double> limit_profile(const DomainSpec& dom, const PotentialSpec& a,
                                  const BubbleConfiguration& config);
double qv_functional(const DomainSpec& dom, const PotentialSpec& a, const PotentialSpec& V,
                     const BubbleConfiguration& config, const Point& y);

struct PredictionInputs {
  DomainSpec dom;
  PotentialSpec a;
  PotentialSpec V;
  std::vector<Point> points;
  GreenOptions green;
  int threads = 1;
  double rho_tol = 1e-8;
  double grad_tol = 1e-6;
};

/// Recomputes M_a, ρ, ∇ρ and Λ at the points, refuses uncertified input
/// (CertificationError), then evaluates the rate formula
///   lim ε u_ε(x_i)² = 12π²√3 Λ_i^{-2} Σ_j a(x_j)Λ_j^4 / ∫V𝒢²,
/// signed, with tagged 0 / ∞ / indeterminate outcomes.
BlowupPrediction blowup_rate(const PredictionInputs& in);
/// As above; also hands back the limit profile for follow-up evaluations.
BlowupPrediction blowup_rate(const PredictionInputs& in, std::shared_ptr<const LimitProfile>* profile);

/// Same as blowup_rate but on an existing profile (no certification check).
BlowupPrediction evaluate_rate(const LimitProfile& profile, const PotentialSpec& a,
                               const PotentialSpec& V);

/// (√3/4) a(x_0) / ∫ V G_a(x_0,·)² (signed) and the absolute-value form.
struct SingleBubbleRate {
  double signed_value = 0.0;
  double absolute_value = 0.0;
};
SingleBubbleRate single_bubble_rate(double a_x0, double vg2_integral);

/// ε Q_V(x_i) - (-4π√3 (M λ)_i + 3π a(x_i) λ_i μ_i) per point.
/// InvalidScaling unless λ_1 = 1 and λ_i = (μ_i/μ_1)^{1/2} to 1e-12.
Eigen::VectorXd expansion_residual(const LimitProfile& profile, const Eigen::MatrixXd& M,
                                   const PotentialSpec& a, const PotentialSpec& V,
                                   const Eigen::VectorXd& lambda_eps,
                                   const Eigen::VectorXd& mu_eps, double eps);
Eigen::VectorXd expansion_residual(const DomainSpec& dom, const PotentialSpec& a,
                                   const PotentialSpec& V, const BubbleConfiguration& config,
                                   const Eigen::VectorXd& lambda_eps,
                                   const Eigen::VectorXd& mu_eps, double eps);

}  // namespace blowup
