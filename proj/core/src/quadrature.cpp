#include "nilspec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace nilspec::quadrature {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr double kron_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kron_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double gauss_w[4] = {0.129484966168870, 0.279705391489277,
                               0.381830050505119, 0.417959183673469};

template <typename T>
struct Panel {
  double a, b;
  T value;
  double err;
};

template <typename T>
Panel<T> gk15(const std::function<T(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fc = f(c);
  T kron = kron_w[7] * fc;
  T gauss = gauss_w[3] * fc;
  for (int i = 0; i < 7; ++i) {
    T f1 = f(c - h * kron_x[i]);
    T f2 = f(c + h * kron_x[i]);
    kron += kron_w[i] * (f1 + f2);
    if (i % 2 == 1) gauss += gauss_w[i / 2] * (f1 + f2);
  }
  kron *= h;
  gauss *= h;
  return Panel<T>{a, b, kron, std::abs(kron - gauss)};
}

template <typename T, typename R>
R integrate_impl(const std::function<T(double)>& f, double a, double b, double rel_tol,
                 double abs_tol, int max_panels) {
  if (a == b) return R{};
  if (a > b) throw std::invalid_argument("quadrature: interval endpoints out of order");
  auto cmp = [](const Panel<T>& p, const Panel<T>& q) { return p.err < q.err; };
  std::priority_queue<Panel<T>, std::vector<Panel<T>>, decltype(cmp)> heap(cmp);
  Panel<T> first = gk15(f, a, b);
  T total = first.value;
  double err = first.err;
  heap.push(first);
  int evals = 15;
  int panels = 1;
  const double min_width = 1e-14 * (b - a);
  while (err > rel_tol * std::abs(total) + abs_tol && panels < max_panels &&
         heap.top().b - heap.top().a > min_width) {
    Panel<T> worst = heap.top();
    heap.pop();
    total -= worst.value;
    err -= worst.err;
    double mid = 0.5 * (worst.a + worst.b);
    Panel<T> left = gk15(f, worst.a, mid);
    Panel<T> right = gk15(f, mid, worst.b);
    total += left.value + right.value;
    err += left.err + right.err;
    heap.push(left);
    heap.push(right);
    evals += 30;
    ++panels;
  }
  // Re-sum once to shed accumulation drift from the incremental updates.
  T exact_total{};
  double exact_err = 0.0;
  while (!heap.empty()) {
    exact_total += heap.top().value;
    exact_err += heap.top().err;
    heap.pop();
  }
  return R{exact_total, exact_err, evals};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double abs_tol, int max_panels) {
  return integrate_impl<double, Result>(f, a, b, rel_tol, abs_tol, max_panels);
}

ComplexResult integrate_complex(const std::function<std::complex<double>(double)>& f, double a,
                        double b, double rel_tol, double abs_tol, int max_panels) {
  return integrate_impl<std::complex<double>, ComplexResult>(f, a, b, rel_tol, abs_tol,
                                                             max_panels);
}

}  // namespace nilspec::quadrature
