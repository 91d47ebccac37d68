#include "nilspec/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nilspec/interpolate.hpp"
#include "nilspec/quadrature.hpp"
#include "nilspec/special_functions.hpp"

namespace nilspec::asymptotics {

using Complex = std::complex<double>;

HeatTraceSamples heat_trace(const spectral::Spectrum& spec, const std::vector<double>& times,
                            bool trusted_only) {
  HeatTraceSamples out;
  out.times = times;
  out.kernel_dim = spec.kernel_dim();
  out.smallest_nonzero = spec.smallest_nonzero();
  out.values.reserve(times.size());
  const double cutoff = trusted_only ? spec.trust_cutoff()
                                     : std::numeric_limits<double>::infinity();
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_trace: times must be positive");
    double s = 0.0;
    for (std::size_t i = 0; i < spec.eigenvalues().size(); ++i) {
      double v = spec.eigenvalues()[i];
      if (v > cutoff) break;
      s += spec.multiplicities()[i] * std::exp(-t * v);
    }
    out.values.push_back(s);
  }
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw std::invalid_argument("log_spaced: need 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < count; ++i)
    out[i] = std::exp(la + (lb - la) * i / (count - 1));
  return out;
}

std::pair<double, double> choose_fit_window(const spectral::Spectrum& spec, double decades) {
  const double cutoff = std::min(spec.trust_cutoff(), spec.max_value());
  if (!(cutoff > 0.0)) throw std::invalid_argument("choose_fit_window: empty trusted spectrum");
  double t = 0.5 / cutoff;
  for (int iter = 0; iter < 400; ++iter) {
    double tr = 0.0;
    for (std::size_t i = 0; i < spec.eigenvalues().size(); ++i) {
      double v = spec.eigenvalues()[i];
      if (v > spec.trust_cutoff()) break;
      tr += spec.multiplicities()[i] * std::exp(-t * v);
    }
    if (std::exp(-t * cutoff) < 1e-3 * tr) break;
    t *= 1.15;
  }
  return {t, t * std::pow(10.0, decades)};
}

AsymptoticFit fit_heat_coefficients(const HeatTraceSamples& samples, int n, int r, int J,
                                    double t_min, double t_max) {
  if (r <= 0 || n <= 0) throw std::invalid_argument("fit: n and r must be positive");
  if (J < 0) throw std::invalid_argument("fit: J must be >= 0");
  if (samples.times.size() != samples.values.size() || samples.times.size() < 4)
    throw std::invalid_argument("fit: bad sample arrays");
  if (t_min <= 0.0) t_min = samples.times.front();
  if (t_max <= 0.0) t_max = samples.times.back();
  if (t_max / t_min < std::pow(10.0, 1.5) * (1.0 - 1e-12))
    throw std::invalid_argument("fit: window narrower than 1.5 decades of t");

  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < samples.times.size(); ++i) {
    double t = samples.times[i];
    if (t < t_min || t > t_max) continue;
    if (!(samples.values[i] > 0.0))
      throw std::invalid_argument("fit: nonpositive trace value in window");
    ts.push_back(t);
    ys.push_back(samples.values[i]);
  }
  const int S = static_cast<int>(ts.size());
  if (S < J + 3) throw std::invalid_argument("fit: too few samples in window");

  Eigen::MatrixXd m(S, J + 1);
  Eigen::VectorXd rhs(S);
  for (int i = 0; i < S; ++i) {
    const double w = 1.0 / ys[i];  // relative weighting
    for (int j = 0; j <= J; ++j)
      m(i, j) = std::pow(ts[i], (static_cast<double>(j) - n) / r) * w;
    rhs[i] = 1.0;  // y_i * w = 1
  }
  // Column scaling before the SVD solve.
  Eigen::VectorXd col_scale(J + 1);
  for (int j = 0; j <= J; ++j) {
    col_scale[j] = m.col(j).norm();
    if (col_scale[j] == 0.0) col_scale[j] = 1.0;
    m.col(j) /= col_scale[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond = svd.singularValues()(0) / svd.singularValues()(J);
  if (!(cond < 1e8))
    throw std::runtime_error("fit: basis condition number " + std::to_string(cond) +
                             " exceeds 1e8; refusing silently regularized fit");
  Eigen::VectorXd x = svd.solve(rhs);
  Eigen::VectorXd resid = m * x - rhs;

  AsymptoticFit fit;
  fit.n = n;
  fit.r = r;
  fit.J = J;
  fit.coefficients = x.cwiseQuotient(col_scale);
  fit.exponents.resize(J + 1);
  for (int j = 0; j <= J; ++j) fit.exponents[j] = (static_cast<double>(j) - n) / r;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.residual_rms = std::sqrt(resid.squaredNorm() / S);
  fit.condition_number = cond;

  // Standard errors from the scaled normal equations.
  const double dof = std::max(1, S - (J + 1));
  const double sigma2 = resid.squaredNorm() / dof;
  Eigen::VectorXd inv_diag(J + 1);
  for (int j = 0; j <= J; ++j) {
    double s = 0.0;
    for (int l = 0; l <= J; ++l) {
      double sv = svd.singularValues()(l);
      double v = svd.matrixV()(j, l);
      s += v * v / (sv * sv);
    }
    inv_diag[j] = s;
  }
  fit.std_errors.resize(J + 1);
  for (int j = 0; j <= J; ++j)
    fit.std_errors[j] = std::sqrt(sigma2 * inv_diag[j]) / col_scale[j];

  const double a0 = std::abs(fit.coefficients[0]);
  for (int j = 1; j <= J; j += 2)
    if (std::abs(fit.coefficients[j]) > 0.05 * a0) fit.parity_alarms.push_back(j);
  return fit;
}

ZetaValue zeta_spectral(const spectral::Spectrum& spec, Complex z) {
  ZetaValue out;
  out.z = z;
  out.method = ZetaMethod::SpectralSum;
  Complex sum = 0.0;
  const double zero_threshold = 1e-9 * std::max(spec.max_value(), 1.0);
  double lam_max = 0.0;
  long count_nonzero = 0;
  for (std::size_t i = 0; i < spec.eigenvalues().size(); ++i) {
    double v = spec.eigenvalues()[i];
    if (v < zero_threshold) continue;  // complex powers vanish on the kernel
    sum += static_cast<double>(spec.multiplicities()[i]) *
           std::exp(-z * std::log(v));
    lam_max = v;
    count_nonzero += spec.multiplicities()[i];
  }
  out.value = sum;

  // Integral-comparison tail: model N(lambda) ~ c lambda^p from the top
  // of the available spectrum.
  out.truncation_error = std::numeric_limits<double>::infinity();
  if (count_nonzero > 16 && lam_max > 0.0) {
    double lam_half = lam_max / 2.0;
    long n_top = spectral::counting_function(spec, lam_max);
    long n_half = spectral::counting_function(spec, lam_half);
    if (n_half > 0 && n_top > n_half) {
      double p = std::log(static_cast<double>(n_top) / n_half) / std::log(2.0);
      if (z.real() > p)
        out.truncation_error =
            p * n_top * std::pow(lam_max, -z.real()) / (z.real() - p);
    }
  }
  return out;
}

namespace {

bool is_nonpositive_integer(double x, double tol = 1e-9) {
  return x <= tol && std::abs(x - std::round(x)) < tol;
}

}  // namespace

double zeta_residue(const AsymptoticFit& fit, int kernel_dim, int j) {
  if (j < 0 || j > fit.J) throw std::invalid_argument("zeta_residue: j outside fitted range");
  const double pole = (static_cast<double>(fit.n) - j) / fit.r;
  if (is_nonpositive_integer(pole)) return 0.0;  // 1/Gamma kills the pole
  double aj = fit.coefficients[j];
  if (j == fit.n) aj -= kernel_dim;
  return aj / std::tgamma(pole);
}

ZetaValue zeta_mellin(const HeatTraceSamples& samples, int kernel_dim, int n, int r,
                      Complex z, const AsymptoticFit& fit) {
  if (samples.times.size() < 8)
    throw std::invalid_argument("zeta_mellin: too few trace samples");
  const double t_lo = samples.times.front();
  const double t_hi = samples.times.back();
  if (t_hi < 1.0)
    throw std::invalid_argument("zeta_mellin: samples must extend beyond t = 1");
  if (t_lo >= 1.0)
    throw std::invalid_argument("zeta_mellin: samples must start below t = 1");

  // Pole book-keeping: poles of the bracket sit at (n-j)/r and 0.
  double nearest = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= fit.J; ++j)
    nearest = std::min(nearest, std::abs(z - Complex((static_cast<double>(n) - j) / r, 0.0)));
  if (kernel_dim > 0) nearest = std::min(nearest, std::abs(z));

  // Special values at z in -N_0, where 1/Gamma cancels analytically:
  // zeta(-l) = (-1)^l l! (a_{n+rl} - [l=0] ker).
  if (z.imag() == 0.0 && z.real() <= 1e-12 &&
      std::abs(z.real() - std::round(z.real())) < 1e-9) {
    int l = static_cast<int>(std::lround(-z.real()));
    double a = 0.0;
    int j = n + r * l;
    if (j <= fit.J) a = fit.coefficients[j];
    if (l == 0) a -= kernel_dim;
    double sign = (l % 2 == 0) ? 1.0 : -1.0;
    ZetaValue out;
    out.z = z;
    out.method = ZetaMethod::MellinSplit;
    out.value = sign * std::tgamma(l + 1.0) * a;
    out.truncation_error = (j <= fit.J) ? std::abs(fit.std_errors[j]) : 0.0;
    return out;
  }

  if (nearest < 1e-3)
    throw std::runtime_error(
        "zeta_mellin: z within 1e-3 of a pole of the continuation; "
        "use zeta_residue for the residue");

  // Interpolate log(tr - ker) and log(tr) against log t.
  std::vector<double> taus, log_excess, log_tr;
  taus.reserve(samples.times.size());
  for (std::size_t i = 0; i < samples.times.size(); ++i) {
    taus.push_back(std::log(samples.times[i]));
    double excess = samples.values[i] - kernel_dim;
    log_excess.push_back(std::log(std::max(excess, 1e-300)));
    log_tr.push_back(std::log(std::max(samples.values[i], 1e-300)));
  }
  interpolate::Pchip excess_interp(taus, log_excess);
  interpolate::Pchip trace_interp(taus, log_tr);

  double trunc = 0.0;

  // I1 = int_1^inf t^{z-1} (tr - ker) dt, on the samples up to t_hi plus
  // an exponential tail bound from lambda_1.
  auto integrand_large = [&](double tau) -> Complex {
    return std::exp(z * tau + excess_interp(tau));
  };
  auto i1 = quadrature::integrate_complex(integrand_large, 0.0, std::log(t_hi), 1e-10, 1e-14, 4000);
  trunc += i1.error_estimate;
  {
    const double lam1 = samples.smallest_nonzero;
    const double c_end = std::exp(excess_interp(std::log(t_hi)));
    if (lam1 > 0.0 && std::isfinite(lam1)) {
      double denom = lam1 - std::max(0.0, z.real() - 1.0) / t_hi;
      if (denom <= 0.0) denom = 0.5 * lam1;
      trunc += c_end * std::pow(t_hi, z.real() - 1.0) / denom;
    } else {
      trunc += c_end * std::pow(t_hi, z.real());
    }
  }

  // I0 = int_{t_lo}^{1} t^{z-1} (tr - sum_j a_j t^{(j-n)/r}) dt.
  auto integrand_small = [&](double tau) -> Complex {
    double tr = std::exp(trace_interp(tau));
    double model = 0.0;
    for (int j = 0; j <= fit.J; ++j)
      model += fit.coefficients[j] * std::exp(fit.exponents[j] * tau);
    return std::exp(z * tau) * (tr - model);
  };
  auto i0 = quadrature::integrate_complex(integrand_small, std::log(t_lo), 0.0, 1e-10, 1e-14, 4000);
  trunc += i0.error_estimate;
  {
    // Below t_lo the integrand is modeled by the next expansion order,
    // |tr - model| ~ C t^q with q = (J+1-n)/r, giving a closed-form bound.
    const double q = (static_cast<double>(fit.J) + 1.0 - n) / r;
    const double tail_exp = z.real() + q;
    const double i_at_lo = std::abs(integrand_small(std::log(t_lo)));
    if (tail_exp > 0.0)
      trunc += i_at_lo / tail_exp;
    else
      trunc = std::numeric_limits<double>::infinity();
  }

  Complex bracket = i1.value + i0.value;
  if (kernel_dim > 0) bracket -= static_cast<double>(kernel_dim) / z;
  for (int j = 0; j <= fit.J; ++j)
    bracket += fit.coefficients[j] / (z - Complex((static_cast<double>(n) - j) / r, 0.0));

  Complex inv_gamma = special::reciprocal_gamma(z);
  ZetaValue out;
  out.z = z;
  out.method = ZetaMethod::MellinSplit;
  out.value = bracket * inv_gamma;
  out.truncation_error = trunc * std::abs(inv_gamma);
  return out;
}

NcrResult ncr_value(const AsymptoticFit& fit, int kernel_dim,
                    std::optional<double> a0_reference) {
  NcrResult out;
  out.n = fit.n;
  out.r = fit.r;
  out.tau = fit.r * zeta_residue(fit, kernel_dim, 0);
  const double a0 = a0_reference.value_or(fit.coefficients[0]);
  out.predicted = fit.r * a0 / std::tgamma(static_cast<double>(fit.n) / fit.r);
  return out;
}

IndexReport mckean_singer(const Eigen::MatrixXcd& d, const std::vector<double>& times) {
  if (d.size() == 0) throw std::invalid_argument("mckean_singer: empty matrix");
  const int rows = static_cast<int>(d.rows());
  const int cols = static_cast<int>(d.cols());

  Eigen::MatrixXcd dd = d.adjoint() * d;   // on the domain, cols x cols
  Eigen::MatrixXcd dds = d * d.adjoint();  // on the target, rows x rows
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_dom(dd, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_tar(dds, Eigen::EigenvaluesOnly);
  if (es_dom.info() != Eigen::Success || es_tar.info() != Eigen::Success)
    throw std::runtime_error("mckean_singer: eigensolver failed");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(d);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double threshold = 1e-10 * std::max(smax, 1e-300);
  int rank = 0;
  bool straddle = false;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
    if (sv(i) > 0.1 * threshold && sv(i) < 10.0 * threshold) straddle = true;
  }

  IndexReport rep;
  rep.times = times;
  rep.dim_ker_d = cols - rank;
  rep.dim_ker_d_star = rows - rank;
  rep.index = rep.dim_ker_d - rep.dim_ker_d_star;
  rep.threshold_ok = !straddle;
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("mckean_singer: times must be positive");
    double s = 0.0;
    for (int i = 0; i < cols; ++i) s += std::exp(-t * std::max(es_dom.eigenvalues()(i), 0.0));
    for (int i = 0; i < rows; ++i) s -= std::exp(-t * std::max(es_tar.eigenvalues()(i), 0.0));
    rep.supertrace.push_back(s);
    rep.max_drift = std::max(
        rep.max_drift, std::abs(s - rep.index) / std::max(1.0, std::abs(double(rep.index))));
  }
  return rep;
}

}  // namespace nilspec::asymptotics
