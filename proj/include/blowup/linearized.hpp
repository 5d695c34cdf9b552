#pragma once

#include <string>
#include <vector>

namespace blowup::linearized {

// Bubble normalization here is B̃(r) = (1 + r^2)^{-(N-2)/2}; it solves
// -ΔB̃ = N(N-2) B̃^p. The profiles module uses (1 + r^2/3)^{-1/2} in 3-D.

enum class Branch { Regular, Singular };

/// Radial factor of a degree-k solution of -Δv = N(N+2) B̃^{p-1} v.
struct LinearizedMode {
  int N = 3;
  int k = 0;
  double mu_k = 0.5;
  Branch branch = Branch::Regular;
  std::vector<double> r;   // strictly increasing, log-spaced
  std::vector<double> v;
  std::vector<double> dv;  // dv/dr
  double scale = 1.0;      // factor applied for the normalization
  std::string normalization;
};

struct ModeOptions {
  double r0 = 1e-4;
  int samples_per_decade = 200;
  double abs_tol = 1e-14;
  double rel_tol = 1e-13;
};

/// Integrates the mode equation in t = ln r with a controlled
/// Runge–Kutta–Fehlberg 7(8) stepper. The regular branch starts at r0 from
/// r^k(1 + c1 r^2), the singular branch at r_max from r^{2-N-k}(1 + d1/r^2)
/// going inward. Normalized to v(1) = 1; when v(1) vanishes (k = 0 has its
/// node at r = 1) the seed's leading coefficient is kept at 1 instead.
LinearizedMode solve_mode(int N, int k, Branch branch, double r_max, const ModeOptions& opt = {});

/// Mode ODE residual v'' + (N-1)/r v' + (N(N+2)(1+r^2)^{-2} - k(k+N-2)/r^2) v.
double mode_residual(int N, int k, double r, double v, double dv, double d2v);

/// Closed-form k = 0 and k = 1 solutions (1-r^2)/(1+r^2)^{N/2}, r/(1+r^2)^{N/2};
/// max |residual| / (|v''| + |v'|/r + |v|/r^2 ...) over log-spaced r in [r_lo, r_hi],
/// derivatives by automatic differentiation.
double exact_mode_residual(int N, int k, double r_lo = 1e-3, double r_hi = 1e3);
double exact_mode_value(int N, int k, double r);

struct RateFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

struct LogCoordinateReport {
  std::vector<double> t;
  std::vector<double> psi;
  double max_residual = 0.0;  // relative residual of ψ'' - μ²ψ + gψ
  RateFit left;               // t -> -∞ end
  RateFit right;              // t -> +∞ end
  double mu_k = 0.0;
  double inverse_transform_error = 0.0;
};

/// ψ_k(t) = e^{(N-2)t/2} v_k(e^t); checks ψ'' - μ_k²ψ + g ψ = 0 with
/// g = N(N+2)/(4 cosh² t) (ψ'' by fourth-order differences) and fits ln|ψ|
/// against t on the outer 20% of the range at each end.
LogCoordinateReport log_coordinate_check(const LinearizedMode& mode);

/// Max over [r_lo, r_hi] ∩ samples of v/r^k divided by the min (requires one sign).
struct GrowthBounds {
  double c_minus = 0.0;
  double c_plus = 0.0;
  bool one_signed = false;
};
GrowthBounds growth_bounds(const LinearizedMode& mode, double r_lo = 1e-3, double r_hi = 1e3);

/// r^{N-1}(v⁻ (v⁺)' - (v⁻)' v⁺) on the common samples; returns the max
/// relative deviation from its median.
double wronskian_variation(const LinearizedMode& regular, const LinearizedMode& singular,
                           std::vector<double>* values = nullptr);

struct DegreeVerdict {
  int k = 0;
  double exponent_at_origin = 0.0;    // fitted from the regular branch
  double exponent_at_infinity = 0.0;
  bool excluded = false;
  std::string reason;
};

struct LiouvilleReport {
  int N = 3;
  double tau = 0.0;
  std::vector<DegreeVerdict> degrees;
  std::string verdict;
};

/// For |v| ≲ |x|^τ with non-integer τ > 1: every degree k is excluded, by
/// the origin (k < τ: |v|/|x|^τ ∼ |x|^{k-τ} blows up at 0, and the singular
/// branch is worse) or by infinity (k > τ). Integer τ is rejected since
/// v = v_2⁻ Y_2 satisfies the bound with τ = 2.
LiouvilleReport liouville_certificate(int N, double tau, const std::vector<int>& k_range);

std::string mode_csv(const LinearizedMode& mode);

}  // namespace blowup::linearized
