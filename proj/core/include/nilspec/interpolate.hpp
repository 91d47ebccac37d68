#pragma once

#include <vector>

namespace nilspec::interpolate {

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
// Preserves monotonicity of the data, which matters when interpolating
// log heat traces that must stay decreasing.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;  // nodes, values, endpoint slopes
};

}  // namespace nilspec::interpolate
