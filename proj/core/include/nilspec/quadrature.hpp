#pragma once

#include <complex>
#include <functional>

namespace nilspec::quadrature {

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

struct ComplexResult {
  std::complex<double> value{0.0, 0.0};
  double error_estimate = 0.0;
  int evaluations = 0;
};

// Adaptive Gauss-Kronrod 7/15 on [a, b]. Subdivides the worst panel until
// the summed error estimate meets rel_tol * |value| + abs_tol or the panel
// budget runs out.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 0.0, int max_panels = 2000);

ComplexResult integrate_complex(const std::function<std::complex<double>(double)>& f, double a,
                        double b, double rel_tol = 1e-10, double abs_tol = 0.0,
                        int max_panels = 2000);

}  // namespace nilspec::quadrature
