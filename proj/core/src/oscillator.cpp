#include "nilspec/oscillator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nilspec::oscillator {

namespace {

// Position operator s = (a + a^dag)/sqrt(2) on the first n oscillator states.
Eigen::MatrixXd position_matrix(int n) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    double v = std::sqrt(0.5 * (k + 1));
    s(k, k + 1) = v;
    s(k + 1, k) = v;
  }
  return s;
}

}  // namespace

Eigen::VectorXd eigenvalues_hermite(const Schrodinger1D& h, int K, double alpha) {
  if (K < 8) throw std::invalid_argument("hermite basis: K too small");
  if (!(alpha > 0.0)) throw std::invalid_argument("hermite basis: scale must be positive");
  if (h.c_kin <= 0.0) throw std::invalid_argument("hermite basis: kinetic term must be positive");

  // Work in s = x/alpha. Powers of s are exact on the K x K block when
  // computed with a 4-row buffer.
  const int nb = K + 4;
  Eigen::MatrixXd s1 = position_matrix(nb);
  Eigen::MatrixXd s2 = s1 * s1;
  Eigen::MatrixXd s3 = s2 * s1;
  Eigen::MatrixXd s4 = s2 * s2;

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(K, K);
  // p^2 in the oscillator basis: diagonal (2k+1)/2, off-diagonal(+/-2)
  // -sqrt((k+1)(k+2))/2.
  for (int k = 0; k < K; ++k) m(k, k) += h.c_kin / (alpha * alpha) * (k + 0.5);
  for (int k = 0; k + 2 < K; ++k) {
    double v = -0.5 * std::sqrt(double(k + 1) * double(k + 2));
    m(k, k + 2) += h.c_kin / (alpha * alpha) * v;
    m(k + 2, k) += h.c_kin / (alpha * alpha) * v;
  }
  double a1 = h.v[1] * alpha;
  double a2 = h.v[2] * alpha * alpha;
  double a3 = h.v[3] * alpha * alpha * alpha;
  double a4 = h.v[4] * alpha * alpha * alpha * alpha;
  m += h.v[0] * Eigen::MatrixXd::Identity(K, K);
  if (a1 != 0.0) m += a1 * s1.topLeftCorner(K, K);
  if (a2 != 0.0) m += a2 * s2.topLeftCorner(K, K);
  if (a3 != 0.0) m += a3 * s3.topLeftCorner(K, K);
  if (a4 != 0.0) m += a4 * s4.topLeftCorner(K, K);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermite basis: eigensolver failed to converge");
  return solver.eigenvalues();
}

Eigen::VectorXd eigenvalues_grid(const Schrodinger1D& h, double L, int N) {
  if (N < 16) throw std::invalid_argument("grid: N too small");
  if (!(L > 0.0)) throw std::invalid_argument("grid: half-width must be positive");
  const double step = 2.0 * L / (N + 1);
  Eigen::VectorXd diag(N), sub(N - 1);
  for (int i = 0; i < N; ++i) {
    double x = -L + (i + 1) * step;
    diag[i] = 2.0 * h.c_kin / (step * step) + h.potential(x);
  }
  sub.setConstant(-h.c_kin / (step * step));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("grid: tridiagonal eigensolver failed to converge");
  return solver.eigenvalues();
}

Eigen::VectorXd eigenvalues_grid_richardson(const Schrodinger1D& h, double L, int N) {
  Eigen::VectorXd coarse = eigenvalues_grid(h, L, N);
  // 2N+1 interior points halves the spacing exactly.
  Eigen::VectorXd fine = eigenvalues_grid(h, L, 2 * N + 1);
  const int keep = N / 2;
  Eigen::VectorXd out(keep);
  for (int i = 0; i < keep; ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return out;
}

double suggest_hermite_scale(const Schrodinger1D& h) {
  double best = std::numeric_limits<double>::infinity();
  if (h.v[4] > 0.0) best = std::min(best, std::pow(h.c_kin / h.v[4], 1.0 / 6.0));
  if (h.v[2] > 0.0) best = std::min(best, std::pow(h.c_kin / h.v[2], 0.25));
  if (h.v[2] < 0.0 && h.v[4] > 0.0)
    best = std::min(best, std::pow(h.c_kin / (2.0 * std::abs(h.v[2])), 0.25));
  if (!std::isfinite(best)) return 1.0;
  return best;
}

TailSum spectral_sum_exp(const Eigen::VectorXd& evals, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("spectral sum: t must be positive");
  TailSum out;
  const int n = static_cast<int>(evals.size());
  for (int k = 0; k < n; ++k) out.value += std::exp(-t * evals[k]);
  if (n >= 3) {
    double gap = evals[n - 1] - evals[n - 2];
    if (gap > 0.0) {
      double x = std::exp(-t * gap);
      out.tail = std::exp(-t * (evals[n - 1] + gap)) / (1.0 - x);
    } else {
      out.tail = std::exp(-t * evals[n - 1]);
    }
  }
  return out;
}

TailSum spectral_sum_power(const Eigen::VectorXd& evals, double p, double floor) {
  TailSum out;
  const int n = static_cast<int>(evals.size());
  for (int k = 0; k < n; ++k) {
    if (evals[k] > floor) out.value += std::pow(evals[k], -p);
  }
  // Integral tail from the local power-law growth of the levels.
  if (n >= 8 && evals[n - 1] > 0.0) {
    int k2 = n - 1;
    int k1 = n - 1 - n / 4;
    if (evals[k1] > 0.0 && evals[k2] > evals[k1]) {
      double q = std::log(evals[k2] / evals[k1]) /
                 std::log(double(k2 + 1) / double(k1 + 1));
      if (p * q > 1.0)
        out.tail = std::pow(evals[k2], -p) * double(k2 + 1) / (p * q - 1.0);
    }
  }
  return out;
}

}  // namespace nilspec::oscillator
