#pragma once

#include <complex>

namespace nilspec::special {

// Principal-branch log-gamma for complex argument (Lanczos approximation,
// g = 7, 9 coefficients; reflection formula for Re(z) < 0.5).
std::complex<double> log_gamma(std::complex<double> z);

std::complex<double> gamma(std::complex<double> z);

// 1/Gamma(z); entire, vanishes at the non-positive integers.
std::complex<double> reciprocal_gamma(std::complex<double> z);

}  // namespace nilspec::special
