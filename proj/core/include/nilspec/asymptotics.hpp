#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "nilspec/spectral.hpp"

namespace nilspec::asymptotics {

// Sampled heat trace tr exp(-tA) = sum_j m_j exp(-t lambda_j) on a
// positive, increasing time grid. Kernel eigenvalues contribute 1 each.
struct HeatTraceSamples {
  std::vector<double> times;
  std::vector<double> values;
  int kernel_dim = 0;
  double smallest_nonzero = 0.0;  // lambda_1, used for large-t tails
};

// trusted_only restricts the sum to eigenvalues below the trust cutoff
// (the lattice-corrupted upper spectrum stays out of the fits).
HeatTraceSamples heat_trace(const spectral::Spectrum& spec, const std::vector<double>& times,
                            bool trusted_only = true);

std::vector<double> log_spaced(double lo, double hi, int count);

// Fitting window per the trusted-spectrum rules: t_min is where the
// cutoff's own Boltzmann weight drops below 1e-3 of the trace, t_max is
// `decades` above it (kernel saturation is checked and reported).
std::pair<double, double> choose_fit_window(const spectral::Spectrum& spec,
                                            double decades = 1.5);

struct AsymptoticFit {
  int n = 0, r = 0, J = 0;
  Eigen::VectorXd coefficients;  // a_0 .. a_J
  Eigen::VectorXd exponents;     // (j - n)/r, strictly increasing
  Eigen::VectorXd std_errors;
  double t_min = 0.0, t_max = 0.0;
  double residual_rms = 0.0;  // relative
  double condition_number = 0.0;
  std::vector<int> parity_alarms;  // odd j with |a_j| > 0.05 |a_0|
};

// Linear least squares in the basis { t^{(j-n)/r} : j = 0..J } with
// relative weighting and column scaling. Refuses windows narrower than
// 1.5 decades and condition numbers above 1e8.
AsymptoticFit fit_heat_coefficients(const HeatTraceSamples& samples, int n, int r, int J,
                                    double t_min = 0.0, double t_max = 0.0);

enum class ZetaMethod { SpectralSum, MellinSplit };

struct ZetaValue {
  std::complex<double> z;
  std::complex<double> value;
  ZetaMethod method = ZetaMethod::SpectralSum;
  double truncation_error = 0.0;
};

// Direct sum over nonzero eigenvalues; valid for Re z > n/r, with an
// integral-comparison tail estimate attached (infinite when the sum
// cannot converge).
ZetaValue zeta_spectral(const spectral::Spectrum& spec, std::complex<double> z);

// Meromorphic continuation through the split Mellin integral: the pole
// terms a_j/(z - (n-j)/r) and -ker/z are exact in the fitted
// coefficients; both remaining integrals run on the interpolated trace.
// z within 1e-3 of a pole of the continuation is rejected (use
// zeta_residue); the special values at z in -N_0 are evaluated by their
// closed form.
ZetaValue zeta_mellin(const HeatTraceSamples& samples, int kernel_dim, int n, int r,
                      std::complex<double> z, const AsymptoticFit& fit);

// Residue of zeta at z = (n-j)/r: a_j' / Gamma((n-j)/r) with
// a_n' = a_n - kernel_dim; zero when (n-j)/r is a non-positive integer.
double zeta_residue(const AsymptoticFit& fit, int kernel_dim, int j);

struct NcrResult {
  double tau = 0.0;        // r * residue of zeta at z = n/r (fitted a_0)
  double predicted = 0.0;  // r * a0_ref / Gamma(n/r)
  int n = 0, r = 0;
};

// tau(D^{-n/r}) from the fitted leading heat coefficient; the prediction
// uses a supplied reference a_0 when available (analytic oracles), else
// the fitted one.
NcrResult ncr_value(const AsymptoticFit& fit, int kernel_dim,
                    std::optional<double> a0_reference = std::nullopt);

struct IndexReport {
  std::vector<double> times;
  std::vector<double> supertrace;  // s(t) = tr e^{-t D*D} - tr e^{-t DD*}
  int dim_ker_d = 0;
  int dim_ker_d_star = 0;
  long index = 0;
  double max_drift = 0.0;  // max_t |s(t) - index|, relative
  bool threshold_ok = true;  // no singular values straddling the kernel threshold
};

IndexReport mckean_singer(const Eigen::MatrixXcd& d, const std::vector<double>& times);

}  // namespace nilspec::asymptotics
