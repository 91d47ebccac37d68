#include "nilspec/nilmanifold.hpp"

#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace nilspec::nilmanifold {

using Complex = std::complex<double>;
using SparseC = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

QuotientGrid QuotientGrid::torus(int d, int N) {
  if (d < 1 || d > 3) throw std::invalid_argument("torus grid: d must be in {1,2,3}");
  if (N < 4) throw std::invalid_argument("torus grid: resolution below stencil support");
  QuotientGrid g;
  g.manifold = Manifold::Torus;
  g.dim = d;
  g.resolution = N;
  g.spacing = 1.0 / N;
  g.volume_weight = std::pow(g.spacing, d);
  return g;
}

QuotientGrid QuotientGrid::heisenberg(int N, int m_max) {
  if (N < 8) throw std::invalid_argument("heisenberg grid: N must be >= 8");
  if (m_max < 1) throw std::invalid_argument("heisenberg grid: m_max must be >= 1");
  QuotientGrid g;
  g.manifold = Manifold::HeisenbergNilmanifold;
  g.dim = 2;
  g.resolution = N;
  g.spacing = 1.0 / N;
  g.m_max = m_max;
  g.volume_weight = g.spacing * g.spacing / (2 * m_max + 1);
  return g;
}

QuotientGrid QuotientGrid::heisenberg_fiber_grid(int N, int m) {
  if (N < 8) throw std::invalid_argument("heisenberg fiber: N must be >= 8");
  QuotientGrid g;
  g.manifold = Manifold::HeisenbergNilmanifold;
  g.dim = 2;
  g.resolution = N;
  g.spacing = 1.0 / N;
  g.m_max = std::abs(m);
  g.fiber_m = m;
  g.single_fiber = true;
  g.volume_weight = g.spacing * g.spacing;
  return g;
}

long QuotientGrid::total_points() const {
  long per_fiber = 1;
  for (int i = 0; i < dim; ++i) per_fiber *= resolution;
  if (manifold == Manifold::HeisenbergNilmanifold && !single_fiber)
    return per_fiber * (2L * m_max + 1);
  return per_fiber;
}

double DiscretizedOperator::hermiticity_defect() const {
  SparseC diff = SparseC(matrix.adjoint()) - matrix;
  double mx = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseC::InnerIterator it(diff, k); it; ++it)
      mx = std::max(mx, std::abs(it.value()));
  return mx;
}

namespace {

// Periodic shift by +1 grid step along direction `axis` on a d-dim grid,
// optionally twisted: wrapping entries are multiplied by a phase that may
// depend on the other coordinates (magnetic Bloch conditions).
SparseC shift_plus(int d, int N, int axis,
                   const std::function<Complex(const std::vector<int>&)>& wrap_phase) {
  long G = 1;
  for (int i = 0; i < d; ++i) G *= N;
  std::vector<Triplet> trips;
  trips.reserve(G);
  std::vector<int> idx(d, 0);
  for (long p = 0; p < G; ++p) {
    long rem = p;
    for (int i = 0; i < d; ++i) {
      idx[i] = static_cast<int>(rem % N);
      rem /= N;
    }
    // (S+ f)(idx) = phase * f(idx with axis+1)
    std::vector<int> src = idx;
    src[axis] = (idx[axis] + 1) % N;
    Complex phase = 1.0;
    if (idx[axis] + 1 == N && wrap_phase) phase = wrap_phase(idx);
    long q = 0;
    for (int i = d - 1; i >= 0; --i) q = q * N + src[i];
    trips.emplace_back(static_cast<int>(p), static_cast<int>(q), phase);
  }
  SparseC s(static_cast<int>(G), static_cast<int>(G));
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

SparseC identity(long G) {
  SparseC id(static_cast<int>(G), static_cast<int>(G));
  id.setIdentity();
  return id;
}

double max_abs(const SparseC& m) {
  double mx = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it)
      mx = std::max(mx, std::abs(it.value()));
  return mx;
}

struct FiberOps {
  // Forward/backward differences per coordinate direction plus the exact
  // spectral center direction (zero on the torus).
  std::vector<SparseC> d_plus, d_minus;
  SparseC center;  // i 2 pi m, diagonal
  long points = 0;
};

FiberOps build_fiber_ops(const QuotientGrid& grid, int m) {
  const int N = grid.resolution;
  const int d = grid.dim;
  const double h = grid.spacing;
  FiberOps ops;
  long G = 1;
  for (int i = 0; i < d; ++i) G *= N;
  ops.points = G;

  for (int axis = 0; axis < d; ++axis) {
    std::function<Complex(const std::vector<int>&)> phase;
    if (grid.manifold == Manifold::HeisenbergNilmanifold) {
      if (axis == 0) {
        // f(x+1, y) = exp(-i pi m y) f(x, y)
        phase = [m, h](const std::vector<int>& idx) {
          return std::exp(Complex(0.0, -M_PI * m * idx[1] * h));
        };
      } else {
        // f(x, y+1) = exp(+i pi m x) f(x, y)
        phase = [m, h](const std::vector<int>& idx) {
          return std::exp(Complex(0.0, M_PI * m * idx[0] * h));
        };
      }
    }
    SparseC sp = shift_plus(d, N, axis, phase);
    SparseC id = identity(G);
    SparseC dp = (sp - id) / h;
    SparseC dm = (id - SparseC(sp.adjoint())) / h;
    ops.d_plus.push_back(std::move(dp));
    ops.d_minus.push_back(std::move(dm));
  }
  ops.center = identity(G) * Complex(0.0, 2.0 * M_PI * m);
  return ops;
}

// Diagonal matrix of a coordinate function over the grid.
SparseC coordinate_diagonal(const QuotientGrid& grid, int axis) {
  const int N = grid.resolution;
  const int d = grid.dim;
  const double h = grid.spacing;
  long G = 1;
  for (int i = 0; i < d; ++i) G *= N;
  std::vector<Triplet> trips;
  trips.reserve(G);
  for (long p = 0; p < G; ++p) {
    long rem = p;
    int coord = 0;
    for (int i = 0; i <= axis; ++i) {
      coord = static_cast<int>(rem % N);
      rem /= N;
    }
    trips.emplace_back(static_cast<int>(p), static_cast<int>(p), Complex(coord * h, 0.0));
  }
  SparseC mdiag(static_cast<int>(G), static_cast<int>(G));
  mdiag.setFromTriplets(trips.begin(), trips.end());
  return mdiag;
}

}  // namespace

DiscretizedOperator torus_laplacian(int d, int N) {
  QuotientGrid grid = QuotientGrid::torus(d, N);
  const double h = grid.spacing;
  long G = grid.total_points();
  std::vector<Triplet> trips;
  trips.reserve(G * (2 * d + 1));
  std::vector<int> idx(d, 0);
  for (long p = 0; p < G; ++p) {
    long rem = p;
    for (int i = 0; i < d; ++i) {
      idx[i] = static_cast<int>(rem % N);
      rem /= N;
    }
    trips.emplace_back(static_cast<int>(p), static_cast<int>(p), Complex(2.0 * d / (h * h), 0));
    for (int axis = 0; axis < d; ++axis) {
      for (int dir : {-1, +1}) {
        std::vector<int> nb = idx;
        nb[axis] = (idx[axis] + dir + N) % N;
        long q = 0;
        for (int i = d - 1; i >= 0; --i) q = q * N + nb[i];
        trips.emplace_back(static_cast<int>(p), static_cast<int>(q),
                           Complex(-1.0 / (h * h), 0));
      }
    }
  }
  DiscretizedOperator out;
  out.matrix = SparseC(static_cast<int>(G), static_cast<int>(G));
  out.matrix.setFromTriplets(trips.begin(), trips.end());
  out.grid = grid;
  out.continuum_order = 2;
  out.label = "torus_laplacian(d=" + std::to_string(d) + ",N=" + std::to_string(N) + ")";
  return out;
}

DiscretizedOperator heisenberg_fiber(int N, double m) {
  // Holonomy around both torus cycles must close up: the x- and y-cycle
  // phases commute only when exp(2 pi i m) = 1.
  if (std::abs(m - std::round(m)) > 1e-12)
    throw std::invalid_argument("heisenberg fiber: flux quantization violated for m = " +
                                std::to_string(m));
  const int mi = static_cast<int>(std::lround(m));
  QuotientGrid grid = QuotientGrid::heisenberg_fiber_grid(N, mi);
  FiberOps fops = build_fiber_ops(grid, mi);

  // X = d/dx - (y/2) d/dz, Y = d/dy + (x/2) d/dz with d/dz -> 2 pi i m.
  SparseC ydiag = coordinate_diagonal(grid, 1);
  SparseC xdiag = coordinate_diagonal(grid, 0);
  SparseC xp = fops.d_plus[0] - SparseC(ydiag * fops.center) * 0.5;
  SparseC xm = fops.d_minus[0] - SparseC(ydiag * fops.center) * 0.5;
  SparseC yp = fops.d_plus[1] + SparseC(xdiag * fops.center) * 0.5;
  SparseC ym = fops.d_minus[1] + SparseC(xdiag * fops.center) * 0.5;

  SparseC lap = -Complex(1.0, 0.0) * SparseC(SparseC(xm * xp) + SparseC(ym * yp));

  DiscretizedOperator out;
  SparseC adj = SparseC(lap.adjoint());
  SparseC defect_m = lap - adj;
  double scale = std::max(1.0, max_abs(lap));
  out.symmetrization_defect = max_abs(defect_m) / scale;
  out.matrix = 0.5 * (lap + adj);

  out.grid = grid;
  out.continuum_order = 2;
  out.reliable = out.symmetrization_defect <= 1e-6;
  out.label = "heisenberg_sublaplacian_fiber(N=" + std::to_string(N) +
              ",m=" + std::to_string(mi) + ")";
  return out;
}

std::vector<DiscretizedOperator> heisenberg_sublaplacian(int N, int m_max) {
  if (N < 8) throw std::invalid_argument("heisenberg_sublaplacian: N must be >= 8");
  if (m_max < 1) throw std::invalid_argument("heisenberg_sublaplacian: m_max must be >= 1");
  std::vector<DiscretizedOperator> fibers;
  fibers.reserve(2 * m_max + 1);
  for (int m = -m_max; m <= m_max; ++m) fibers.push_back(heisenberg_fiber(N, m));
  return fibers;
}

namespace {

// Polynomial coefficients of the left-invariant field of basis direction
// `gen` in exponential coordinates: X_gen(g) = sum_j P_j(g) d/dx_j with
// P(g) = e_gen + [g, e_gen]/2 + [g, [g, e_gen]]/12 (exact for step <= 3).
Eigen::VectorXd invariant_field_coeffs(const carnot::GradedNilpotentLieAlgebra& alg,
                                       const Eigen::VectorXd& g, int gen) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(alg.dim());
  e[gen] = 1.0;
  Eigen::VectorXd ge = alg.bracket(g, e);
  return e + 0.5 * ge + alg.bracket(g, ge) / 12.0;
}

// Generator matrix on one fiber with the given difference sign.
SparseC generator_matrix(const carnot::GradedNilpotentLieAlgebra& alg,
                         const QuotientGrid& grid, const FiberOps& fops, int gen,
                         bool plus) {
  const int N = grid.resolution;
  const int d = grid.dim;
  const double h = grid.spacing;
  const long G = fops.points;

  if (grid.manifold == Manifold::Torus) {
    if (alg.dim() != d)
      throw std::invalid_argument("assemble: algebra dimension does not match torus grid");
    return plus ? fops.d_plus[gen] : fops.d_minus[gen];
  }

  // Heisenberg: coefficients of the field depend on the base point.
  if (alg.dim() != 3)
    throw std::invalid_argument("assemble: Heisenberg grid expects a 3-dim algebra");
  SparseC total(static_cast<int>(G), static_cast<int>(G));
  // Evaluate coefficients pointwise; they are polynomials in (x, y) only.
  std::vector<Triplet> diag_trips[3];
  std::vector<int> idx(d, 0);
  Eigen::VectorXd g(3);
  for (long p = 0; p < G; ++p) {
    long rem = p;
    for (int i = 0; i < d; ++i) {
      idx[i] = static_cast<int>(rem % N);
      rem /= N;
    }
    g << idx[0] * h, idx[1] * h, 0.0;
    Eigen::VectorXd coeff = invariant_field_coeffs(alg, g, gen);
    for (int j = 0; j < 3; ++j)
      if (coeff[j] != 0.0)
        diag_trips[j].emplace_back(static_cast<int>(p), static_cast<int>(p),
                                   Complex(coeff[j], 0.0));
  }
  for (int j = 0; j < 3; ++j) {
    if (diag_trips[j].empty()) continue;
    SparseC diag(static_cast<int>(G), static_cast<int>(G));
    diag.setFromTriplets(diag_trips[j].begin(), diag_trips[j].end());
    const SparseC& deriv = (j == 2) ? fops.center : (plus ? fops.d_plus[j] : fops.d_minus[j]);
    total += SparseC(diag * deriv);
  }
  return total;
}

SparseC assemble_word_on_fiber(const carnot::GradedNilpotentLieAlgebra& alg,
                               const QuotientGrid& grid, const FiberOps& fops,
                               const std::vector<int>& word) {
  const long G = fops.points;
  if (word.empty()) return identity(G);
  const int L = static_cast<int>(word.size());
  SparseC acc;
  bool started = false;
  // word[0] ... word[L-1]; word[L-1] acts first and takes the forward
  // difference, signs alternate leftwards so equal pairs become the
  // classic second difference.
  for (int p = L - 1; p >= 0; --p) {
    bool plus = ((L - 1 - p) % 2 == 0);
    SparseC m = generator_matrix(alg, grid, fops, word[p], plus);
    if (!started) {
      acc = std::move(m);
      started = true;
    } else {
      acc = SparseC(m * acc);
    }
  }
  return acc;
}

}  // namespace

DiscretizedOperator assemble(const ops::HomogeneousOperator& op, const QuotientGrid& grid,
                             bool want_selfadjoint) {
  const auto& alg = *op.algebra();
  if (op.rows() != op.cols() && want_selfadjoint)
    throw std::invalid_argument("assemble: self-adjoint matrix requested for a non-square block");

  std::vector<int> fiber_list;
  if (grid.manifold == Manifold::HeisenbergNilmanifold && !grid.single_fiber) {
    for (int m = -grid.m_max; m <= grid.m_max; ++m) fiber_list.push_back(m);
  } else if (grid.manifold == Manifold::HeisenbergNilmanifold) {
    fiber_list.push_back(grid.fiber_m);
  } else {
    fiber_list.push_back(0);
  }

  const int blk = op.rows();
  long fiber_points = 1;
  for (int i = 0; i < grid.dim; ++i) fiber_points *= grid.resolution;
  const long total_dim = static_cast<long>(fiber_list.size()) * fiber_points * blk;

  std::vector<Triplet> trips;
  long offset = 0;
  for (int m : fiber_list) {
    FiberOps fops = build_fiber_ops(grid, m);
    for (const auto& term : op.terms()) {
      SparseC word_m = assemble_word_on_fiber(alg, grid, fops, term.word);
      // Full term: coeff * block (x) word matrix, block-major layout.
      for (int a = 0; a < term.block.rows(); ++a)
        for (int b = 0; b < term.block.cols(); ++b) {
          Complex c = term.coeff * term.block(a, b);
          if (c == Complex(0.0, 0.0)) continue;
          for (int k = 0; k < word_m.outerSize(); ++k)
            for (SparseC::InnerIterator it(word_m, k); it; ++it) {
              trips.emplace_back(
                  static_cast<int>(offset + a * fiber_points + it.row()),
                  static_cast<int>(offset + b * fiber_points + it.col()), c * it.value());
            }
        }
    }
    offset += fiber_points * blk;
  }

  SparseC full(static_cast<int>(total_dim), static_cast<int>(total_dim));
  full.setFromTriplets(trips.begin(), trips.end());

  DiscretizedOperator out;
  out.grid = grid;
  out.continuum_order = op.order();
  out.label = "assembled(order=" + std::to_string(op.order()) + ")";
  if (want_selfadjoint) {
    SparseC adj = SparseC(full.adjoint());
    double scale = std::max(1.0, max_abs(full));
    out.symmetrization_defect = max_abs(SparseC(full - adj)) / scale;
    out.matrix = 0.5 * (full + adj);

    out.reliable = out.symmetrization_defect <= 1e-6;
  } else {
    out.matrix = std::move(full);
    out.symmetrization_defect = 0.0;
  }
  return out;
}

void write_coordinate(std::ostream& os, const DiscretizedOperator& op) {
  const auto& m = op.matrix;
  os << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value().real() << " "
         << it.value().imag() << "\n";
}

nlohmann::json grid_metadata(const DiscretizedOperator& op) {
  nlohmann::json j;
  j["manifold"] =
      op.grid.manifold == Manifold::Torus ? "torus" : "heisenberg_nilmanifold";
  j["dim"] = op.grid.dim;
  j["resolution"] = op.grid.resolution;
  j["spacing"] = op.grid.spacing;
  j["volume_weight"] = op.grid.volume_weight;
  if (op.grid.manifold == Manifold::HeisenbergNilmanifold) {
    j["m_max"] = op.grid.m_max;
    if (op.grid.single_fiber) j["fiber_m"] = op.grid.fiber_m;
  }
  j["continuum_order"] = op.continuum_order;
  j["label"] = op.label;
  j["symmetrization_defect"] = op.symmetrization_defect;
  return j;
}

Eigen::SparseMatrix<std::complex<double>> read_coordinate(std::istream& is) {
  long rows = 0, cols = 0, nnz = 0;
  if (!(is >> rows >> cols >> nnz))
    throw std::invalid_argument("coordinate format: bad header");
  std::vector<Triplet> trips;
  trips.reserve(nnz);
  for (long i = 0; i < nnz; ++i) {
    long r, c;
    double re, im;
    if (!(is >> r >> c >> re >> im))
      throw std::invalid_argument("coordinate format: truncated entries");
    trips.emplace_back(static_cast<int>(r), static_cast<int>(c), Complex(re, im));
  }
  SparseC m(static_cast<int>(rows), static_cast<int>(cols));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace nilspec::nilmanifold
