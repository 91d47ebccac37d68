#include "nilspec/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nilspec::spectral {

using Complex = std::complex<double>;
using SparseC = Eigen::SparseMatrix<Complex>;

Spectrum Spectrum::create(std::vector<double> raw, Source source, double trust_cutoff,
                          double merge_tol) {
  if (raw.empty()) throw std::invalid_argument("spectrum: no eigenvalues");
  std::sort(raw.begin(), raw.end());
  const double mx = std::max(std::abs(raw.front()), std::abs(raw.back()));
  const double neg_tol = 1e-9 * std::max(mx, 1.0);
  if (raw.front() < -neg_tol)
    throw std::invalid_argument("spectrum: eigenvalue " + std::to_string(raw.front()) +
                                " below -1e-9 * max");

  Spectrum s;
  s.source_ = source;
  s.trust_cutoff_ = trust_cutoff;
  const double gap_tol = merge_tol * std::max(mx, 1.0);
  for (double v : raw) {
    if (!s.values_.empty() && v - s.values_.back() <= gap_tol) {
      ++s.mults_.back();
    } else {
      s.values_.push_back(v);
      s.mults_.push_back(1);
    }
  }
  const double zero_threshold = 1e-9 * std::max(mx, 1.0);
  s.kernel_dim_ = 0;
  for (std::size_t i = 0; i < s.values_.size() && s.values_[i] < zero_threshold; ++i)
    s.kernel_dim_ += s.mults_[i];
  return s;
}

long Spectrum::total_count() const {
  long c = 0;
  for (int m : mults_) c += m;
  return c;
}

long Spectrum::trusted_count() const {
  long c = 0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] <= trust_cutoff_) c += mults_[i];
  return c;
}

double Spectrum::smallest_nonzero() const {
  const double zero_threshold = 1e-9 * std::max(max_value(), 1.0);
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] >= zero_threshold) return values_[i];
  return std::numeric_limits<double>::infinity();
}

double Spectrum::max_value() const { return values_.empty() ? 0.0 : values_.back(); }

namespace {

std::vector<double> dense_eigenvalues(const SparseC& mat) {
  Eigen::MatrixXcd dense(mat);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense eigensolver failed to converge");
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace

LanczosResult lanczos_smallest(const SparseC& mat, int k, int max_iter, double tol,
                               unsigned seed) {
  const int n = static_cast<int>(mat.rows());
  if (k <= 0) throw std::invalid_argument("lanczos: k must be positive");
  k = std::min(k, n);
  if (max_iter <= 0) max_iter = std::min(n, std::max(4 * k + 40, 160));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Converged eigenpairs accumulated across deflated restarts. A single
  // Krylov space holds one vector per eigenspace, so multiplicities only
  // appear after restarting orthogonally to what has been found.
  std::vector<Eigen::VectorXcd> locked_vecs;
  std::vector<double> locked_vals;
  bool converged_flag = true;

  const int max_restarts = 24;
  for (int restart = 0; restart < max_restarts; ++restart) {
    if (static_cast<int>(locked_vals.size()) >= n) break;

    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = Complex(gauss(rng), gauss(rng));
    // Deflate: remove converged directions from the start vector.
    for (const auto& u : locked_vecs) v -= u.dot(v) * u;
    double vn = v.norm();
    if (vn < 1e-12) break;
    v /= vn;

    std::vector<Eigen::VectorXcd> basis{v};
    std::vector<double> alpha, beta;
    int m = std::min(max_iter, n - static_cast<int>(locked_vals.size()));

    double beta_end = 0.0;
    Eigen::VectorXcd w;
    for (int j = 0; j < m; ++j) {
      w = mat * basis[j];
      double a = std::real(basis[j].dot(w));
      alpha.push_back(a);
      w -= a * basis[j];
      if (j > 0) w -= beta[j - 1] * basis[j - 1];
      // Full reorthogonalization against the basis and the locked space.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : basis) w -= u.dot(w) * u;
        for (const auto& u : locked_vecs) w -= u.dot(w) * u;
      }
      double b = w.norm();
      beta_end = b;
      if (b < 1e-13) break;
      if (j + 1 < m) {
        beta.push_back(b);
        basis.push_back(w / b);
      }
    }

    const int steps = static_cast<int>(alpha.size());
    if (steps == 0) break;
    Eigen::VectorXd diag(steps), sub(std::max(steps - 1, 0));
    for (int i = 0; i < steps; ++i) diag[i] = alpha[i];
    for (int i = 0; i + 1 < steps; ++i) sub[i] = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub);
    if (tri.info() != Eigen::Success)
      throw std::runtime_error("lanczos: tridiagonal solve failed");

    const double scale = std::max(1.0, tri.eigenvalues().cwiseAbs().maxCoeff());
    int new_locked = 0;
    for (int i = 0; i < steps; ++i) {
      // Residual bound |beta_m * s_{m,i}| from the terminal recursion beta.
      double resid = std::abs(beta_end * tri.eigenvectors()(steps - 1, i));
      if (resid <= tol * scale) {
        Eigen::VectorXcd ritz = Eigen::VectorXcd::Zero(n);
        for (int j = 0; j < static_cast<int>(basis.size()) && j < steps; ++j)
          ritz += Complex(tri.eigenvectors()(j, i), 0.0) * basis[j];
        double rn = ritz.norm();
        if (rn < 1e-12) continue;
        ritz /= rn;
        locked_vecs.push_back(ritz);
        locked_vals.push_back(tri.eigenvalues()[i]);
        ++new_locked;
      }
    }

    std::sort(locked_vals.begin(), locked_vals.end());
    if (static_cast<int>(locked_vals.size()) >= k) {
      // Stop once the new restart contributes nothing below the current
      // k-th value (no more hidden copies in range).
      if (new_locked == 0) break;
      double kth = locked_vals[k - 1];
      bool all_above = true;
      for (int i = static_cast<int>(locked_vals.size()) - new_locked;
           i < static_cast<int>(locked_vals.size()); ++i)
        if (locked_vals[i] <= kth + tol * std::max(1.0, std::abs(kth))) all_above = false;
      if (all_above && restart > 0) break;
    }
    if (new_locked == 0 && static_cast<int>(locked_vals.size()) < k) {
      converged_flag = false;
      break;
    }
  }

  LanczosResult out;
  out.converged = converged_flag && static_cast<int>(locked_vals.size()) >= k;
  std::sort(locked_vals.begin(), locked_vals.end());
  if (static_cast<int>(locked_vals.size()) > k) locked_vals.resize(k);
  out.values = std::move(locked_vals);
  return out;
}

Spectrum eigenvalues(const nilmanifold::DiscretizedOperator& op, int k, EigenMethod method) {
  const long n = op.matrix.rows();
  double mat_scale = 0.0;
  for (int c = 0; c < op.matrix.outerSize(); ++c)
    for (SparseC::InnerIterator it(op.matrix, c); it; ++it)
      mat_scale = std::max(mat_scale, std::abs(it.value()));
  if (op.hermiticity_defect() > 1e-10 * std::max(1.0, mat_scale))
    throw std::invalid_argument("eigenvalues: operator is not Hermitian");

  bool use_dense = (method == EigenMethod::Dense) ||
                   (method == EigenMethod::Auto && (n <= 4096 || k < 0));
  const double cutoff = 0.1 / (op.grid.spacing * op.grid.spacing);

  std::vector<double> vals;
  bool partial = false;
  if (use_dense) {
    vals = dense_eigenvalues(op.matrix);
    if (k >= 0 && static_cast<long>(vals.size()) > k) vals.resize(k);
  } else {
    int want = k < 0 ? static_cast<int>(n) : k;
    LanczosResult lr = lanczos_smallest(op.matrix, want);
    vals = std::move(lr.values);
    partial = !lr.converged;
  }
  // Clamp tiny negative round-off so kernel eigenvalues register as zero.
  for (double& v : vals)
    if (v < 0.0 && v > -1e-9 * std::max(1.0, std::abs(vals.back()))) v = std::max(v, 0.0);

  Spectrum s = Spectrum::create(std::move(vals), Source::Discretized, cutoff);
  if (partial) s.mark_partial();
  return s;
}

Spectrum merge_union(const std::vector<Spectrum>& parts, Source source) {
  if (parts.empty()) throw std::invalid_argument("merge_union: no spectra");
  std::vector<double> all;
  double cutoff = std::numeric_limits<double>::infinity();
  bool partial = false;
  for (const auto& p : parts) {
    cutoff = std::min(cutoff, p.trust_cutoff());
    partial = partial || p.partial();
    for (std::size_t i = 0; i < p.eigenvalues().size(); ++i)
      for (int c = 0; c < p.multiplicities()[i]; ++c) all.push_back(p.eigenvalues()[i]);
  }
  Spectrum s = Spectrum::create(std::move(all), source, cutoff);
  if (partial) s.mark_partial();
  return s;
}

long counting_function(const Spectrum& spec, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("counting_function: lambda must be >= 0");
  long c = 0;
  for (std::size_t i = 0; i < spec.eigenvalues().size(); ++i) {
    if (spec.eigenvalues()[i] <= lambda)
      c += spec.multiplicities()[i];
    else
      break;
  }
  return c;
}

WeylFit weyl_fit(const Spectrum& spec, int n, int r, double window_lo, double window_hi,
                 std::optional<double> a0_ref) {
  if (window_hi <= 0.0) {
    double hi = std::min(spec.trust_cutoff(), spec.max_value());
    window_hi = hi;
  }
  if (window_lo <= 0.0) window_lo = window_hi / 30.0;
  if (window_hi > spec.trust_cutoff())
    throw std::invalid_argument("weyl_fit: window extends beyond trust cutoff");
  if (window_hi / window_lo < std::sqrt(10.0))
    throw std::invalid_argument("weyl_fit: window narrower than half a decade");

  // Count eigenvalues inside the window.
  long in_window = 0;
  for (std::size_t i = 0; i < spec.eigenvalues().size(); ++i) {
    double v = spec.eigenvalues()[i];
    if (v >= window_lo && v <= window_hi) in_window += spec.multiplicities()[i];
  }
  if (in_window < 30)
    throw std::invalid_argument("weyl_fit: fewer than 30 eigenvalues in window");

  // Staircase midpoint samples: N evaluated at geometric means of
  // consecutive distinct jump points.
  std::vector<double> xs, ys;
  const auto& vals = spec.eigenvalues();
  long cum = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    cum += spec.multiplicities()[i];
    if (i + 1 >= vals.size()) break;
    double a = vals[i], b = vals[i + 1];
    if (a <= 0.0) continue;
    double x = std::sqrt(a * b);
    if (x < window_lo || x > window_hi) continue;
    if (cum <= 0) continue;
    xs.push_back(std::log(x));
    ys.push_back(std::log(static_cast<double>(cum)));
  }
  if (xs.size() < 8) throw std::invalid_argument("weyl_fit: too few distinct jump points");

  // Thin to at most 400 log-spaced samples.
  if (xs.size() > 400) {
    std::vector<double> tx, ty;
    double step = static_cast<double>(xs.size()) / 400.0;
    for (double pos = 0.0; pos < static_cast<double>(xs.size()); pos += step) {
      std::size_t i = static_cast<std::size_t>(pos);
      tx.push_back(xs[i]);
      ty.push_back(ys[i]);
    }
    xs.swap(tx);
    ys.swap(ty);
  }

  const std::size_t s = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < s; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = s * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) throw std::runtime_error("weyl_fit: degenerate sample set");
  double slope = (s * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / s;

  double rss = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    double e = ys[i] - (slope * xs[i] + intercept);
    rss += e * e;
  }

  WeylFit fit;
  fit.exponent_est = slope;
  fit.constant_est = std::exp(intercept);
  fit.theory_exponent = static_cast<double>(n) / r;
  fit.implied_a0 = fit.constant_est * std::tgamma(1.0 + static_cast<double>(n) / r);
  if (a0_ref)
    fit.theory_constant = *a0_ref / std::tgamma(1.0 + static_cast<double>(n) / r);
  fit.residual_rms = std::sqrt(rss / s);
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  fit.count_in_window = in_window;
  return fit;
}

Spectrum analytic_torus_spectrum(int d, long min_count) {
  if (d < 1 || d > 3) throw std::invalid_argument("analytic torus: d must be in {1,2,3}");
  if (min_count < 1) throw std::invalid_argument("analytic torus: count must be positive");
  // Ball volume estimate for the enumeration radius, with headroom.
  double unit_ball = (d == 1) ? 2.0 : (d == 2 ? M_PI : 4.0 * M_PI / 3.0);
  long radius = static_cast<long>(std::ceil(std::pow(min_count / unit_ball, 1.0 / d))) + 2;
  const double r2 = static_cast<double>(radius) * radius;

  std::vector<double> values;
  std::vector<long> k(d, 0);
  std::function<void(int, long)> enumerate = [&](int axis, long norm2) {
    if (axis == d) {
      if (norm2 <= r2) values.push_back(4.0 * M_PI * M_PI * norm2);
      return;
    }
    for (long j = -radius; j <= radius; ++j) enumerate(axis + 1, norm2 + j * j);
  };
  enumerate(0, 0);
  std::sort(values.begin(), values.end());
  if (static_cast<long>(values.size()) < min_count)
    throw std::logic_error("analytic torus: enumeration radius too small");
  // Keep the smallest min_count (plus ties); the spectrum is complete up
  // to the kept maximum.
  double cutoff = values[min_count - 1];
  std::size_t keep = min_count;
  while (keep < values.size() && values[keep] <= cutoff) ++keep;
  values.resize(keep);
  return Spectrum::create(std::move(values), Source::Analytic, cutoff);
}

void write_csv(std::ostream& os, const Spectrum& spec) {
  os << "eigenvalue,multiplicity\n";
  os.precision(17);
  for (std::size_t i = 0; i < spec.eigenvalues().size(); ++i)
    os << spec.eigenvalues()[i] << "," << spec.multiplicities()[i] << "\n";
}

Spectrum read_csv(std::istream& is, Source source, double trust_cutoff) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("spectrum csv: empty stream");
  std::vector<double> raw;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string ev, mult;
    if (!std::getline(ls, ev, ',') || !std::getline(ls, mult, ','))
      throw std::invalid_argument("spectrum csv: bad row: " + line);
    double v = std::stod(ev);
    int m = std::stoi(mult);
    for (int i = 0; i < m; ++i) raw.push_back(v);
  }
  return Spectrum::create(std::move(raw), source, trust_cutoff);
}

}  // namespace nilspec::spectral
