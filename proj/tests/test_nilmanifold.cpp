#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "nilspec/nilmanifold.hpp"

using namespace nilspec;
using namespace nilspec::nilmanifold;

namespace {

std::vector<double> dense_spectrum(const DiscretizedOperator& op) {
  Eigen::MatrixXcd dense(op.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense, Eigen::EigenvaluesOnly);
  REQUIRE(solver.info() == Eigen::Success);
  return std::vector<double>(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + solver.eigenvalues().size());
}

double max_abs_diff(const Eigen::SparseMatrix<std::complex<double>>& a,
                    const Eigen::SparseMatrix<std::complex<double>>& b) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd(a) - Eigen::MatrixXcd(b);
  return d.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("torus d=1 N=4 has the classic circulant spectrum") {
  auto op = torus_laplacian(1, 4);
  auto ev = dense_spectrum(op);
  REQUIRE(ev.size() == 4);
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(32.0));
  CHECK(ev[2] == doctest::Approx(32.0));
  CHECK(ev[3] == doctest::Approx(64.0));
  CHECK(op.hermiticity_defect() <= 1e-12);

  // Constants lie in the kernel.
  Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(4);
  CHECK((op.matrix * ones).norm() <= 1e-9 * 64.0);
}

TEST_CASE("torus d=2 eigenvalues approach the integer-lattice oracle") {
  auto op = torus_laplacian(2, 64);
  auto ev = dense_spectrum(op);
  // Integer-lattice enumeration oracle: 4 pi^2 (j^2 + k^2).
  std::vector<double> exact;
  for (int j = -10; j <= 10; ++j)
    for (int k = -10; k <= 10; ++k)
      if (j != 0 || k != 0) exact.push_back(4.0 * M_PI * M_PI * (j * j + k * k));
  std::sort(exact.begin(), exact.end());
  // 10th smallest nonzero of the discrete spectrum within 2%.
  CHECK(ev[10] == doctest::Approx(exact[9]).epsilon(0.02));
}

TEST_CASE("grid refinement is second order on the torus") {
  const double target = 4.0 * M_PI * M_PI;
  auto e16 = dense_spectrum(torus_laplacian(1, 16));
  auto e32 = dense_spectrum(torus_laplacian(1, 32));
  double err16 = target - e16[1];
  double err32 = target - e32[1];
  CHECK(err16 / err32 > 3.5);
  CHECK(err16 / err32 < 4.5);
}

TEST_CASE("assemble on the abelian torus reproduces the stencil laplacian") {
  auto alg = carnot::abelian(2);
  auto lap_op = ops::sublaplacian(alg);
  auto grid = QuotientGrid::torus(2, 16);
  auto assembled = assemble(lap_op, grid);
  auto direct = torus_laplacian(2, 16);
  CHECK(max_abs_diff(assembled.matrix, direct.matrix) <= 1e-12 * 16.0 * 16.0);
  CHECK(assembled.symmetrization_defect <= 1e-12);
  CHECK(assembled.reliable);
}

TEST_CASE("assemble of the order-0 identity block is the identity") {
  auto alg = carnot::abelian(2);
  ops::Term t;
  t.word = {};
  auto id_op = ops::HomogeneousOperator::create(alg, {t});
  auto grid = QuotientGrid::torus(2, 8);
  auto out = assemble(id_op, grid);
  Eigen::MatrixXcd dense(out.matrix);
  CHECK((dense - Eigen::MatrixXcd::Identity(64, 64)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("assembled rumin-seshadri equals the matrix square of the sublaplacian") {
  auto alg = carnot::abelian(2);
  auto lap_op = ops::sublaplacian(alg);
  auto seq = ops::ModelSequence::create(alg, {lap_op});
  auto delta = ops::rumin_seshadri(seq, 0, {1});  // (A* A)^1 with A = sublaplacian
  auto grid = QuotientGrid::torus(2, 12);
  auto assembled_delta = assemble(delta, grid);
  auto lap_matrix = assemble(lap_op, grid).matrix;
  Eigen::MatrixXcd square = Eigen::MatrixXcd(lap_matrix) * Eigen::MatrixXcd(lap_matrix);
  Eigen::MatrixXcd got(assembled_delta.matrix);
  double scale = square.cwiseAbs().maxCoeff();
  CHECK((got - square).cwiseAbs().maxCoeff() <= 1e-10 * scale);
}

TEST_CASE("heisenberg m=0 fiber is the flat 2-torus laplacian") {
  auto fiber = heisenberg_fiber(16, 0.0);
  auto torus = torus_laplacian(2, 16);
  CHECK(max_abs_diff(fiber.matrix, torus.matrix) <= 1e-12 * 16.0 * 16.0);
}

TEST_CASE("zero modes live only in the m=0 fiber") {
  auto fibers = heisenberg_sublaplacian(16, 1);
  REQUIRE(fibers.size() == 3);
  for (const auto& f : fibers) {
    auto ev = dense_spectrum(f);
    double scale = std::abs(ev.back());
    int m = f.grid.fiber_m;
    if (m == 0) {
      CHECK(ev[0] <= 1e-9 * scale);
      CHECK(ev[1] > 1e-6 * scale);  // kernel is exactly one-dimensional
    } else {
      CHECK(ev[0] > 1e-6 * scale);
    }
  }
}

TEST_CASE("fiber union matches the direct twisted assembly at N=8, m_max=2") {
  // Direct route: generic word assembly over all fibers of the quotient
  // grid; fibered route: the hand-built magnetic operators.
  auto alg = carnot::heisenberg(1);
  auto grid = QuotientGrid::heisenberg(8, 2);
  auto direct = assemble(ops::sublaplacian(alg), grid);
  auto direct_ev = dense_spectrum(direct);

  std::vector<double> union_ev;
  for (const auto& f : heisenberg_sublaplacian(8, 2)) {
    auto ev = dense_spectrum(f);
    union_ev.insert(union_ev.end(), ev.begin(), ev.end());
  }
  std::sort(union_ev.begin(), union_ev.end());
  REQUIRE(direct_ev.size() == union_ev.size());
  double scale = std::abs(union_ev.back());
  for (std::size_t i = 0; i < union_ev.size(); ++i)
    CHECK(std::abs(direct_ev[i] - union_ev[i]) <= 1e-8 * scale);
}

TEST_CASE("flux quantization violations are rejected per fiber") {
  CHECK_THROWS_WITH_AS(heisenberg_fiber(8, 0.5), doctest::Contains("flux quantization"),
                       std::invalid_argument);
}

TEST_CASE("trace consistency: volume weight times identity trace is vol(M)") {
  auto torus = QuotientGrid::torus(2, 12);
  CHECK(torus.volume_weight * torus.total_points() == doctest::Approx(1.0));
  auto torus3 = QuotientGrid::torus(3, 8);
  CHECK(torus3.volume_weight * torus3.total_points() == doctest::Approx(1.0));
  auto heis = QuotientGrid::heisenberg(8, 2);
  CHECK(heis.volume_weight * heis.total_points() == doctest::Approx(1.0));
}

TEST_CASE("fibers are nonnegative and hermitian") {
  for (int m : {-2, 1, 3}) {
    auto f = heisenberg_fiber(12, m);
    CHECK(f.hermiticity_defect() <= 1e-12);
    auto ev = dense_spectrum(f);
    CHECK(ev.front() >= -1e-9 * std::abs(ev.back()));
  }
}

TEST_CASE("coordinate export and import round trip") {
  auto op = torus_laplacian(2, 8);
  std::stringstream ss;
  write_coordinate(ss, op);
  auto back = read_coordinate(ss);
  CHECK(max_abs_diff(op.matrix, back) == doctest::Approx(0.0));
  auto meta = grid_metadata(op);
  CHECK(meta["manifold"] == "torus");
  CHECK(meta["resolution"] == 8);
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS(torus_laplacian(4, 16));
  CHECK_THROWS(torus_laplacian(2, 3));
  CHECK_THROWS(QuotientGrid::heisenberg(4, 1));
  CHECK_THROWS(heisenberg_sublaplacian(16, 0));
}
