#include "nilspec/special_functions.hpp"

#include <cmath>
#include <limits>

namespace nilspec::special {

namespace {

constexpr double lanczos_g = 7.0;
constexpr double lanczos_c[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

std::complex<double> log_gamma_core(std::complex<double> z) {
  // Valid for Re(z) >= 0.5.
  z -= 1.0;
  std::complex<double> x = lanczos_c[0];
  for (int i = 1; i < 9; ++i) x += lanczos_c[i] / (z + static_cast<double>(i));
  std::complex<double> t = z + lanczos_g + 0.5;
  return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    return std::log(M_PI) - std::log(std::sin(M_PI * z)) - log_gamma_core(1.0 - z);
  }
  return log_gamma_core(z);
}

std::complex<double> gamma(std::complex<double> z) {
  if (z.imag() == 0.0 && z.real() == std::floor(z.real()) && z.real() <= 0.0) {
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  return std::exp(log_gamma(z));
}

std::complex<double> reciprocal_gamma(std::complex<double> z) {
  if (z.imag() == 0.0 && z.real() == std::floor(z.real()) && z.real() <= 0.0) {
    return {0.0, 0.0};
  }
  return std::exp(-log_gamma(z));
}

}  // namespace nilspec::special
