#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "nilspec/asymptotics.hpp"

using namespace nilspec;
using namespace nilspec::asymptotics;
using spectral::Source;
using spectral::Spectrum;

namespace {

// Synthetic spectrum whose heat trace is exactly a0 * t^{-p}: not realizable
// by finitely many eigenvalues, so tests that need it synthesize samples
// directly instead.
HeatTraceSamples pure_power_samples(double a0, double p, double t_lo, double t_hi,
                                    int count) {
  HeatTraceSamples s;
  s.times = log_spaced(t_lo, t_hi, count);
  for (double t : s.times) s.values.push_back(a0 * std::pow(t, -p));
  s.kernel_dim = 0;
  s.smallest_nonzero = 1.0;
  return s;
}

Spectrum squared(const Spectrum& spec) {
  std::vector<double> vals;
  for (std::size_t i = 0; i < spec.eigenvalues().size(); ++i)
    for (int c = 0; c < spec.multiplicities()[i]; ++c) {
      double v = spec.eigenvalues()[i];
      vals.push_back(v * v);
    }
  return Spectrum::create(std::move(vals), spec.source(),
                          spec.trust_cutoff() * spec.trust_cutoff());
}

}  // namespace

TEST_CASE("heat trace basics") {
  auto one = Spectrum::create({1.0}, Source::Synthetic);
  auto s = heat_trace(one, {1.0});
  CHECK(s.values[0] == doctest::Approx(std::exp(-1.0)));

  auto kernel_only = Spectrum::create({0.0, 0.0}, Source::Synthetic);
  auto k = heat_trace(kernel_only, {0.1, 1.0, 10.0});
  for (double v : k.values) CHECK(v == doctest::Approx(2.0));
  CHECK(k.kernel_dim == 2);

  CHECK_THROWS(heat_trace(one, {0.0}));
}

TEST_CASE("torus d=1 heat trace against the poisson summation oracle") {
  auto spec = spectral::analytic_torus_spectrum(1, 600);
  for (double t : {1e-4, 1e-3}) {
    auto s = heat_trace(spec, {t});
    // Poisson summation: theta(t) sqrt(4 pi t) = 1 + 2 exp(-1/(4t)) + ...
    CHECK(s.values[0] * std::sqrt(4.0 * M_PI * t) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("heat trace values are positive, decreasing and log-convex") {
  auto spec = spectral::analytic_torus_spectrum(2, 2000);
  auto times = log_spaced(1e-4, 1.0, 40);
  auto s = heat_trace(spec, times);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    CHECK(s.values[i] > 0.0);
    if (i > 0) CHECK(s.values[i] < s.values[i - 1]);
  }
  for (std::size_t i = 1; i + 1 < s.values.size(); ++i) {
    double t1 = s.times[i - 1], t2 = s.times[i], t3 = s.times[i + 1];
    double theta = (t3 - t2) / (t3 - t1);
    double chord = theta * std::log(s.values[i - 1]) + (1 - theta) * std::log(s.values[i + 1]);
    CHECK(std::log(s.values[i]) <= chord + 1e-12);
  }
}

TEST_CASE("fit recovers a pure leading term to 1e-6") {
  auto samples = pure_power_samples(1.0, 2.0, 1e-2, 1e-2 * std::pow(10.0, 1.6), 60);
  auto fit = fit_heat_coefficients(samples, 4, 2, 4);
  CHECK(fit.coefficients[0] == doctest::Approx(1.0).epsilon(1e-6));
  for (int j = 1; j <= 4; ++j) CHECK(std::abs(fit.coefficients[j]) <= 1e-6);
  CHECK(fit.parity_alarms.empty());
}

TEST_CASE("torus d=2 heat coefficients against the theta-function oracle") {
  auto spec = spectral::analytic_torus_spectrum(2, 30000);
  auto window = choose_fit_window(spec);
  auto times = log_spaced(window.first, window.second, 80);
  auto samples = heat_trace(spec, times);
  auto fit = fit_heat_coefficients(samples, 2, 2, 4);
  // Poisson summation: trace = (4 pi t)^{-1} (1 + exponentially small).
  CHECK(fit.coefficients[0] == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(0.02));
  CHECK(std::abs(fit.coefficients[1]) <= 0.05 * fit.coefficients[0]);
  CHECK(std::abs(fit.coefficients[3]) <= 0.05 * fit.coefficients[0]);
  CHECK(fit.parity_alarms.empty());
  CHECK(fit.condition_number < 1e8);
}

TEST_CASE("fit refuses narrow windows and ill-conditioned bases") {
  auto samples = pure_power_samples(1.0, 2.0, 1e-2, 5e-2, 30);
  CHECK_THROWS_WITH_AS(fit_heat_coefficients(samples, 4, 2, 2),
                       doctest::Contains("1.5 decades"), std::invalid_argument);
  auto wide = pure_power_samples(1.0, 2.0, 1e-2, 1e-2 * std::pow(10.0, 1.6), 120);
  CHECK_THROWS_WITH_AS(fit_heat_coefficients(wide, 4, 2, 14),
                       doctest::Contains("condition"), std::runtime_error);
}

TEST_CASE("fit idempotence under window shrinkage") {
  auto spec = spectral::analytic_torus_spectrum(2, 30000);
  auto window = choose_fit_window(spec);
  auto times = log_spaced(window.first, window.second, 80);
  auto samples = heat_trace(spec, times);
  auto fit = fit_heat_coefficients(samples, 2, 2, 4);
  auto shrunk = fit_heat_coefficients(samples, 2, 2, 4, samples.times[1],
                                      samples.times[samples.times.size() - 2]);
  for (int j = 0; j <= 4; ++j) {
    double move = std::abs(fit.coefficients[j] - shrunk.coefficients[j]);
    CHECK(move <= fit.std_errors[j] + shrunk.std_errors[j]);
  }
}

TEST_CASE("zeta spectral sums") {
  auto two = Spectrum::create({1.0, 1.0}, Source::Synthetic);
  CHECK(zeta_spectral(two, {3.0, 0.0}).value.real() == doctest::Approx(2.0));

  auto with_kernel = Spectrum::create({0.0, 4.0}, Source::Synthetic);
  CHECK(zeta_spectral(with_kernel, {1.0, 0.0}).value.real() == doctest::Approx(0.25));

  // Basel sum with the integral-comparison tail estimate.
  std::vector<double> nat;
  for (int j = 1; j <= 200000; ++j) nat.push_back(static_cast<double>(j));
  auto spec = Spectrum::create(std::move(nat), Source::Synthetic);
  auto z = zeta_spectral(spec, {2.0, 0.0});
  double target = M_PI * M_PI / 6.0;
  CHECK(std::abs(z.value.real() - target) <= 1.5 * z.truncation_error);
  CHECK(z.truncation_error < 1e-4);
}

TEST_CASE("mellin continuation on the analytic torus") {
  auto spec = spectral::analytic_torus_spectrum(2, 30000);
  auto window = choose_fit_window(spec);
  double lam1 = spec.smallest_nonzero();
  auto times = log_spaced(window.first, std::max(2.0, 45.0 / lam1), 240);
  auto samples = heat_trace(spec, times);
  auto fit = fit_heat_coefficients(samples, 2, 2, 4, window.first, window.second);

  // Agreement with the spectral sum on the overlap half-plane.
  for (std::complex<double> z : {std::complex<double>{2.0, 0.0},
                                 std::complex<double>{2.5, 0.0},
                                 std::complex<double>{2.0, 0.7}}) {
    auto direct = zeta_spectral(spec, z);
    auto mellin = zeta_mellin(samples, spec.kernel_dim(), 2, 2, z, fit);
    double budget = direct.truncation_error + mellin.truncation_error +
                    1e-4 * std::abs(direct.value);
    CHECK(std::abs(direct.value - mellin.value) <= budget);
  }

  // Residue at z = n/r from the fitted leading coefficient.
  double res = zeta_residue(fit, spec.kernel_dim(), 0);
  CHECK(res == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(0.02));

  // Pole proximity is rejected.
  CHECK_THROWS_WITH_AS(zeta_mellin(samples, spec.kernel_dim(), 2, 2, {1.0, 0.0}, fit),
                       doctest::Contains("pole"), std::runtime_error);
}

TEST_CASE("zeta special value at z = 0 for a pure leading trace") {
  auto samples = pure_power_samples(1.0, 2.0, 1e-2, 4.0, 160);
  samples.kernel_dim = 0;
  auto fit = fit_heat_coefficients(samples, 4, 2, 4, 1e-2, 1e-2 * std::pow(10.0, 1.6));
  auto z0 = zeta_mellin(samples, 0, 4, 2, {0.0, 0.0}, fit);
  CHECK(std::abs(z0.value) <= 1e-6);
}

TEST_CASE("noncommutative residue value on the torus") {
  auto spec = spectral::analytic_torus_spectrum(2, 30000);
  auto window = choose_fit_window(spec);
  auto times = log_spaced(window.first, window.second, 80);
  auto samples = heat_trace(spec, times);
  auto fit = fit_heat_coefficients(samples, 2, 2, 4);
  auto ncr = ncr_value(fit, spec.kernel_dim(), 1.0 / (4.0 * M_PI));
  CHECK(ncr.tau == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(0.02));
  CHECK(ncr.predicted == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));

  // tau is invariant under D -> D^2 (n fixed, r doubled).
  auto spec2 = squared(spec);
  auto window2 = choose_fit_window(spec2);
  auto times2 = log_spaced(window2.first, window2.second, 80);
  auto samples2 = heat_trace(spec2, times2);
  auto fit2 = fit_heat_coefficients(samples2, 2, 4, 4);
  auto ncr2 = ncr_value(fit2, spec2.kernel_dim());
  CHECK(ncr2.tau == doctest::Approx(ncr.tau).epsilon(0.02));
}

TEST_CASE("ncr vanishes when the leading coefficient does") {
  // Trace c * t^{-1} with n = 4, r = 2: the t^{-2} coefficient is zero.
  auto samples = pure_power_samples(0.7, 1.0, 1e-2, 1e-2 * std::pow(10.0, 1.6), 60);
  auto fit = fit_heat_coefficients(samples, 4, 2, 4);
  auto ncr = ncr_value(fit, 0);
  CHECK(std::abs(ncr.tau) <= 1e-8);
}

TEST_CASE("mckean-singer on a 1x2 row") {
  Eigen::MatrixXcd d(1, 2);
  d << 1.0, 0.0;
  auto rep = mckean_singer(d, {0.1, 1.0, 10.0});
  CHECK(rep.index == 1);
  CHECK(rep.dim_ker_d == 1);
  CHECK(rep.dim_ker_d_star == 0);
  for (double s : rep.supertrace) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.max_drift <= 1e-10);
}

TEST_CASE("mckean-singer on square invertible and random rectangular") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_matrix = [&](int rows, int cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    return m;
  };

  auto sq = random_matrix(20, 20);
  auto rep_sq = mckean_singer(sq, {0.1, 1.0, 10.0});
  CHECK(rep_sq.index == 0);
  for (double s : rep_sq.supertrace) CHECK(std::abs(s) <= 1e-9);

  auto rect = random_matrix(30, 20);
  auto rep = mckean_singer(rect, {0.1, 1.0, 10.0});
  // SVD oracle: full rank, so ker D = 0 and ker D* has dimension 10.
  CHECK(rep.dim_ker_d == 0);
  CHECK(rep.dim_ker_d_star == 10);
  CHECK(rep.index == -10);
  for (double s : rep.supertrace) CHECK(s == doctest::Approx(-10.0).epsilon(1e-10));
  CHECK(rep.threshold_ok);
}
