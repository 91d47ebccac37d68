#pragma once

#include <Eigen/Sparse>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nilspec/nilmanifold.hpp"

namespace nilspec::spectral {

enum class Source { Analytic, Discretized, Synthetic };

// Sorted nonnegative eigenvalues with multiplicities. Entries above
// trust_cutoff are kept but excluded from fits downstream.
class Spectrum {
 public:
  // Clusters raw values at relative gap merge_tol, counts the kernel below
  // zero_threshold (default 1e-9 * max), and validates nonnegativity.
  static Spectrum create(std::vector<double> raw_values, Source source,
                         double trust_cutoff = std::numeric_limits<double>::infinity(),
                         double merge_tol = 1e-8);

  const std::vector<double>& eigenvalues() const { return values_; }
  const std::vector<int>& multiplicities() const { return mults_; }
  int kernel_dim() const { return kernel_dim_; }
  Source source() const { return source_; }
  double trust_cutoff() const { return trust_cutoff_; }
  bool partial() const { return partial_; }
  void mark_partial() { partial_ = true; }
  void set_trust_cutoff(double c) { trust_cutoff_ = c; }

  long total_count() const;
  long trusted_count() const;
  double smallest_nonzero() const;  // +inf if kernel only
  double max_value() const;

 private:
  std::vector<double> values_;  // distinct, sorted
  std::vector<int> mults_;
  int kernel_dim_ = 0;
  Source source_ = Source::Synthetic;
  double trust_cutoff_ = std::numeric_limits<double>::infinity();
  bool partial_ = false;
};

enum class EigenMethod { Auto, Dense, Lanczos };

// k smallest eigenvalues (k < 0 means all). Dense solver for dimension
// <= 4096, Lanczos with full reorthogonalization and deflated restarts
// (to recover multiplicities) beyond that.
Spectrum eigenvalues(const nilmanifold::DiscretizedOperator& op, int k = -1,
                     EigenMethod method = EigenMethod::Auto);

// Raw Lanczos driver, exposed for cross-checks. Returns the k smallest
// eigenvalues with multiplicity; sets converged=false if the iteration
// budget ran out first.
struct LanczosResult {
  std::vector<double> values;
  bool converged = true;
};
LanczosResult lanczos_smallest(const Eigen::SparseMatrix<std::complex<double>>& mat, int k,
                               int max_iter = 0, double tol = 1e-10, unsigned seed = 7);

// Sorted multiset union of fiber spectra; trust cutoff is the min of the
// inputs' cutoffs.
Spectrum merge_union(const std::vector<Spectrum>& parts, Source source);

// Number of eigenvalues <= lambda counted with multiplicity.
long counting_function(const Spectrum& spec, double lambda);

struct WeylFit {
  double exponent_est = 0.0;
  double constant_est = 0.0;
  double theory_exponent = 0.0;            // n/r
  double implied_a0 = 0.0;                 // constant_est * Gamma(1 + n/r)
  std::optional<double> theory_constant;   // a0_ref / Gamma(1 + n/r)
  double residual_rms = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  long count_in_window = 0;
};

// Least-squares fit of log N(lambda) = alpha log(lambda) + beta over
// log-spaced samples at geometric means of consecutive jump points
// (staircase midpoint correction). Window defaults to
// [trust_cutoff/30, trust_cutoff].
WeylFit weyl_fit(const Spectrum& spec, int n, int r, double window_lo = 0.0,
                 double window_hi = 0.0, std::optional<double> a0_ref = std::nullopt);

// Analytic torus spectrum {4 pi^2 |k|^2 : k in Z^d} with at least
// min_count eigenvalues; complete up to its trust cutoff by construction.
Spectrum analytic_torus_spectrum(int d, long min_count);

void write_csv(std::ostream& os, const Spectrum& spec);
Spectrum read_csv(std::istream& is, Source source,
                  double trust_cutoff = std::numeric_limits<double>::infinity());

}  // namespace nilspec::spectral
