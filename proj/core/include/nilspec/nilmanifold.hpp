#pragma once

#include <Eigen/Sparse>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "nilspec/invariant_ops.hpp"

namespace nilspec::nilmanifold {

enum class Manifold { Torus, HeisenbergNilmanifold };

// Grid over a fundamental domain. For the torus this is a d-dimensional
// periodic grid on [0,1)^d. For the Heisenberg nilmanifold functions are
// Fourier-decomposed along the center; the grid covers the (x, y) base
// with N x N points per fiber and center frequencies |m| <= m_max.
struct QuotientGrid {
  Manifold manifold = Manifold::Torus;
  int dim = 2;            // torus dimension; 2 for Heisenberg fibers
  int resolution = 8;     // grid points per coordinate direction
  double spacing = 0.0;   // 1/resolution
  double volume_weight = 0.0;
  int m_max = 0;          // Heisenberg only
  int fiber_m = 0;        // set when the grid is a single fiber
  bool single_fiber = false;

  static QuotientGrid torus(int d, int N);
  static QuotientGrid heisenberg(int N, int m_max);
  static QuotientGrid heisenberg_fiber_grid(int N, int m);

  long total_points() const;
};

// Sparse self-adjoint matrix with grid metadata. Symmetrization (M+M^H)/2
// is applied on assembly; the pre-symmetrization defect is recorded and
// matrices with relative defect above 1e-6 are marked unreliable.
struct DiscretizedOperator {
  Eigen::SparseMatrix<std::complex<double>> matrix;
  QuotientGrid grid;
  int continuum_order = 0;
  std::string label;
  double symmetrization_defect = 0.0;
  bool reliable = true;

  double hermiticity_defect() const;
};

// Standard (2d+1)-point stencil Laplacian on the unit d-torus, d in
// {1,2,3}, spacing 1/N. Continuum eigenvalues are 4 pi^2 |k|^2.
DiscretizedOperator torus_laplacian(int d, int N);

// One fiber of the center-Fourier decomposition of the sub-Laplacian on
// the Heisenberg nilmanifold: a magnetic Schrodinger operator on an N x N
// grid with Bloch boundary phases consistent with the lattice action.
// Non-integer m violates flux quantization and is rejected.
DiscretizedOperator heisenberg_fiber(int N, double m);

// All fibers m = -m_max..m_max; the spectrum of the sub-Laplacian is the
// union of the fiber spectra.
std::vector<DiscretizedOperator> heisenberg_sublaplacian(int N, int m_max);

// Discretizes a left-invariant operator on the grid's model manifold.
// Generators become forward/backward difference pairs along their
// coordinate flows (with the polynomial coefficients of exponential
// coordinates); words compose by matrix products with alternating
// difference signs so that X^2 lands on the classic second-difference
// stencil; terms are summed. With want_selfadjoint the result is
// symmetrized and the defect recorded.
DiscretizedOperator assemble(const ops::HomogeneousOperator& op, const QuotientGrid& grid,
                             bool want_selfadjoint = true);

// Coordinate text format: "rows cols nnz" header then "row col re im"
// lines, 0-based. Grid metadata travels as a JSON sidecar.
void write_coordinate(std::ostream& os, const DiscretizedOperator& op);
nlohmann::json grid_metadata(const DiscretizedOperator& op);
Eigen::SparseMatrix<std::complex<double>> read_coordinate(std::istream& is);

}  // namespace nilspec::nilmanifold
