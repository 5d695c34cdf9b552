#pragma once

#include <memory>
#include <string>
#include <vector>

#include "blowup/interaction.hpp"

namespace blowup {

struct ContinuationStep {
  int iteration = 0;
  double tau = 0.0;
  double rho = 0.0;
  double grad_norm = 0.0;
  double step_norm = 0.0;
  double damping = 0.0;
  bool fresh_jacobian = false;
};

struct ContinuationOptions {
  double tau0 = 1.0;
  bool fix_tau = false;  // solve only ∇ρ = 0 at a = tau0·a_base and report ρ raw
  int max_iterations = 40;
  int jacobian_reuse = 3;
  double rho_tol = 1e-8;
  double grad_tol = 1e-6;
  int polish_steps = 2;  // extra Newton steps after the tolerances are met
  GreenOptions green;
  int threads = 1;
};

struct ContinuationResult {
  double tau = 0.0;
  BubbleConfiguration config;  // points, Perron weights, a and V samples filled
  InteractionSpectrum spectrum;
  double rho_residual = 0.0;
  double grad_residual = 0.0;
  double eigen_residual = 0.0;  // |M Λ| at the returned point
  bool converged = false;
  std::vector<ContinuationStep> trace;
};

/// Damped Newton on (τ, x) for ρ_{τ a_base}(x) = 0, ∇_x ρ_{τ a_base}(x) = 0,
/// with a forward-difference Jacobian refreshed every few iterations and
/// Green fields memoized per (τ, point rounded to 1e-9).
/// Throws NoConvergence on stagnation (the trace is in the message and in
/// last_trace()), ContinuationOutOfRange when τ a_base stops being coercive.
ContinuationResult find_blowup_configuration(const DomainSpec& dom, const PotentialSpec& a_base,
                                             int n, const BubbleConfiguration& init,
                                             const ContinuationOptions& opt = {});

/// Trace of the most recent call on this thread (also on failure).
const std::vector<ContinuationStep>& last_trace();

std::string trace_csv(const std::vector<ContinuationStep>& trace);

}  // namespace blowup
