#pragma once

#include <Eigen/Dense>
#include <array>

namespace nilspec::oscillator {

// H = -c_kin d^2/dx^2 + sum_{p=0}^{4} v[p] x^p on the line, bounded below.
struct Schrodinger1D {
  double c_kin = 1.0;
  std::array<double, 5> v{0.0, 0.0, 0.0, 0.0, 0.0};

  double potential(double x) const {
    return v[0] + x * (v[1] + x * (v[2] + x * (v[3] + x * v[4])));
  }
};

// Eigenvalues via a Hermite-function basis of size K scaled by alpha
// (basis functions are oscillator states in x/alpha). Matrix elements of
// polynomial potentials are exact band recurrences; the matrix is real
// symmetric with bandwidth 4.
Eigen::VectorXd eigenvalues_hermite(const Schrodinger1D& h, int K, double alpha);

// Eigenvalues via centered second differences on [-L, L] with Dirichlet
// walls, N interior points. Eigenvalues-only tridiagonal solve.
Eigen::VectorXd eigenvalues_grid(const Schrodinger1D& h, double L, int N);

// Two-grid Richardson combination (4 e_{h/2} - e_h)/3, removing the h^2
// error of the centered stencil. Returns the lower half of the spectrum
// (the part both grids resolve).
Eigen::VectorXd eigenvalues_grid_richardson(const Schrodinger1D& h, double L, int N);

// Basis scale balancing kinetic and potential terms for the given
// Hamiltonian; covers double wells when v[2] < 0.
double suggest_hermite_scale(const Schrodinger1D& h);

// sum_k exp(-t e_k) over computed levels plus a geometric tail estimate
// from the last level spacing. Returns {value, tail_estimate}.
struct TailSum {
  double value = 0.0;
  double tail = 0.0;
};
TailSum spectral_sum_exp(const Eigen::VectorXd& evals, double t);

// sum_k e_k^{-p} over computed levels plus an integral tail estimate from
// the local growth rate. Levels below `floor` are excluded.
TailSum spectral_sum_power(const Eigen::VectorXd& evals, double p, double floor = 0.0);

}  // namespace nilspec::oscillator
