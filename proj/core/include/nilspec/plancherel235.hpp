#pragma once

#include <string>

#include "json.hpp"
#include "nilspec/oscillator.hpp"

namespace nilspec::plancherel {

// Fiber Hamiltonian of the (2,3,5) group sub-Laplacian in the
// representation (lambda, mu, nu): the positive operator
//   H = -(1/m) d^2/dtheta^2 + (m^2 theta^2 + nu)^2 / (4m),  m = lambda^2 + mu^2.
struct QuarticHamiltonian {
  double lambda = 0.0;
  double mu = 1.0;
  double nu = 0.0;

  double m() const { return lambda * lambda + mu * mu; }
  oscillator::Schrodinger1D schrodinger() const;
};

enum class DiscMethod { HermiteBasis, Grid };

struct OscillatorDiscretization {
  DiscMethod method = DiscMethod::HermiteBasis;
  int hermite_size = 250;    // base K; raised automatically for wide wells
  double grid_halfwidth = 0.0;  // 0 = choose from the turning region
  int grid_points = 800;     // base N; raised automatically
  double tolerance = 0.0;    // >0 enforces the K vs 2K convergence check
};

struct TraceResult {
  double value = 0.0;              // sum_k exp(-t e_k) over computed levels
  double convergence_error = 0.0;  // |K vs 2K| (or N vs 2N) plus level tail
};

// Trace of exp(-tH) for the fiber Hamiltonian.
TraceResult quartic_trace(const QuarticHamiltonian& h, double t,
                          const OscillatorDiscretization& disc);

// Truncated quadrature domain for the Plancherel integral, in the scale
// free coordinates: mu in [mu_min, mu_max] (times t^{-3/2} at time t) and
// nu in [-b_max m^{2/3}, b_max m^{2/3}]. Raising `refinement` tightens
// tolerances (x1/8) and widens the domain (x1.5), at least halving the
// truncation error.
struct PlancherelQuadrature {
  double mu_min = 0.15;
  double mu_max = 160.0;
  double b_max = 100.0;
  double rel_tol = 3e-4;
  int refinement = 0;

  double eff_tol() const;
  double eff_mu_min() const;
  double eff_mu_max() const;
  double eff_b_max() const;
};

struct ValueWithError {
  double value = 0.0;
  double quadrature_error = 0.0;
  double truncation_error = 0.0;

  double total_error() const { return quadrature_error + truncation_error; }
};

// Heat kernel of the (2,3,5) sub-Laplacian at the origin,
//   k_t(o) = 2 pi int_0^inf mu dmu int dnu tr exp(-t H^{0,mu,nu}),
// by adaptive quadrature over the truncated domain. Homogeneous of degree
// t^{-5} (n = 10, r = 2); the domain scales with t so truncation cancels
// in homogeneity ratios.
ValueWithError group_heat_origin(double t, const PlancherelQuadrature& quad,
                                 const OscillatorDiscretization& disc);

// Reduced single-parameter form: integrating out the Plancherel radial
// and scale directions against the s^4 Mellin weight collapses the double
// integral to
//   alpha0 = (3 pi / 5) int db sum_k e_k(K(b))^{-5},
// with K(b) = -d^2/dphi^2 + (phi^2 + b)^2 / 4 (the theta = m^{-2/3} phi
// substitution; exponents verified against the direct form in tests).
ValueWithError alpha0_reduced(const PlancherelQuadrature& quad,
                              const OscillatorDiscretization& disc, DiscMethod backend);

struct Alpha0Result {
  double alpha0 = 0.0;
  double error_bar = 0.0;
  ValueWithError reduced_hermite;
  ValueWithError reduced_coarse;  // one refinement level below
  ValueWithError reduced_grid;
  ValueWithError direct_quadrature;  // group_heat_origin(1)/Gamma(6)
  double reduced_vs_direct = 0.0;    // relative difference
  double hermite_vs_grid = 0.0;
  double homogeneity_ratio = 0.0;    // k_{2}(o) 2^5 / k_1(o)
  bool withheld = false;
  std::string diagnostics;
  nlohmann::json settings;
};

// Production estimate with the three cross-checks. Cross-check failure
// beyond combined error bars marks the result withheld.
Alpha0Result alpha0_estimate(const PlancherelQuadrature& quad,
                             const OscillatorDiscretization& disc);

// The same Plancherel pipeline on the 3-dim Heisenberg group, where the
// fibers are harmonic oscillators: k_t(0) = int |a| tr exp(-t H_a) da,
// H_a = -d^2/dtheta^2 + a^2 theta^2. Scales as t^{-2} (n = 4, r = 2).
struct Quadrature1D {
  double a_min = 1e-3;
  double a_max = 0.0;  // 0 = 60/t
  double rel_tol = 1e-8;
};

ValueWithError heisenberg_group_oracle(double t, const Quadrature1D& quad,
                                       const OscillatorDiscretization& disc);

// Closed-form fiber comparison: the same integral with the fiber trace
// replaced by the geometric series 1/(2 sinh(|a| t)).
double heisenberg_closed_form_integral(double t, const Quadrature1D& quad);

}  // namespace nilspec::plancherel
