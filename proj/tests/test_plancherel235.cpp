#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nilspec/plancherel235.hpp"

using namespace nilspec::plancherel;

TEST_CASE("fiber hamiltonian coefficients") {
  QuarticHamiltonian h{0.0, 2.0, 3.0};
  CHECK(h.m() == doctest::Approx(4.0));
  auto s = h.schrodinger();
  CHECK(s.c_kin == doctest::Approx(0.25));
  CHECK(s.v[0] == doctest::Approx(9.0 / 16.0));
  CHECK(s.v[2] == doctest::Approx(6.0));
  CHECK(s.v[4] == doctest::Approx(16.0));
  CHECK_THROWS(QuarticHamiltonian{0.0, 0.0, 1.0}.schrodinger());
}

TEST_CASE("trace depends on (lambda, mu) only through m") {
  OscillatorDiscretization disc;
  auto a = quartic_trace(QuarticHamiltonian{3.0, 4.0, -2.0}, 1.0, disc);
  auto b = quartic_trace(QuarticHamiltonian{0.0, 5.0, -2.0}, 1.0, disc);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-8));
}

TEST_CASE("quartic trace is positive, decreasing and log-convex in t") {
  OscillatorDiscretization disc;
  QuarticHamiltonian h{0.0, 1.3, -1.0};
  std::vector<double> ts{0.4, 0.6, 0.9, 1.35, 2.0};
  std::vector<double> vals;
  for (double t : ts) vals.push_back(quartic_trace(h, t, disc).value);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    CHECK(vals[i] > 0.0);
    if (i > 0) CHECK(vals[i] < vals[i - 1]);
  }
  for (std::size_t i = 1; i + 1 < vals.size(); ++i) {
    double theta = (ts[i + 1] - ts[i]) / (ts[i + 1] - ts[i - 1]);
    double chord = theta * std::log(vals[i - 1]) + (1 - theta) * std::log(vals[i + 1]);
    CHECK(std::log(vals[i]) <= chord + 1e-10);
  }
}

TEST_CASE("scaling reduction: theta = m^{-2/3} phi with derived exponents") {
  // trace(H^{0,mu,nu}, t) = trace(m^{1/3} K(nu m^{-2/3}), t)
  //                       = trace(K(b), t m^{1/3}) with b = nu m^{-2/3}.
  OscillatorDiscretization disc;
  for (double mu : {0.7, 1.9}) {
    for (double nu : {-3.0, 0.8}) {
      const double m = mu * mu;
      const double b = nu * std::pow(m, -2.0 / 3.0);
      const double t = 0.8;
      auto direct = quartic_trace(QuarticHamiltonian{0.0, mu, nu}, t, disc);
      auto reduced =
          quartic_trace(QuarticHamiltonian{0.0, 1.0, b}, t * std::pow(m, 1.0 / 3.0), disc);
      CHECK(direct.value == doctest::Approx(reduced.value).epsilon(5e-3));
    }
  }
}

TEST_CASE("quartic trace convergence check can be enforced") {
  OscillatorDiscretization strict;
  strict.tolerance = 1e-30;  // unattainable, must throw
  CHECK_THROWS(quartic_trace(QuarticHamiltonian{0.0, 1.0, 0.0}, 1.0, strict));
}

TEST_CASE("group heat kernel at the origin: scaling and refinement") {
  OscillatorDiscretization disc;
  disc.hermite_size = 170;
  PlancherelQuadrature quad;
  quad.mu_min = 0.2;
  quad.mu_max = 40.0;
  quad.b_max = 40.0;
  quad.rel_tol = 1e-3;

  auto k1 = group_heat_origin(1.0, quad, disc);
  CHECK(k1.value > 0.0);
  auto k2 = group_heat_origin(2.0, quad, disc);
  CHECK(k2.value < k1.value);
  // Homogeneity t^{-5} (n = 10, r = 2); truncation scales along.
  CHECK(k2.value * 32.0 / k1.value == doctest::Approx(1.0).epsilon(0.01));

  // Refinement agreement to 3 significant digits on the reduced form.
  auto lo = alpha0_reduced(quad, disc, DiscMethod::HermiteBasis);
  PlancherelQuadrature fine = quad;
  fine.refinement = 1;
  auto hi = alpha0_reduced(fine, disc, DiscMethod::HermiteBasis);
  CHECK(lo.value == doctest::Approx(hi.value).epsilon(5e-3));
  // Widening the domain moves the estimate by less than the reported
  // truncation bound (monotone positive integrand).
  CHECK(hi.value - lo.value <= lo.total_error() + hi.total_error());
}

TEST_CASE("reduced form agrees across hermite and grid backends") {
  OscillatorDiscretization disc;
  disc.hermite_size = 170;
  PlancherelQuadrature quad;
  quad.b_max = 40.0;
  quad.rel_tol = 1e-3;
  auto he = alpha0_reduced(quad, disc, DiscMethod::HermiteBasis);
  auto gr = alpha0_reduced(quad, disc, DiscMethod::Grid);
  CHECK(std::abs(he.value - gr.value) <=
        0.005 * he.value + he.total_error() + gr.total_error());
}

TEST_CASE("heisenberg group oracle: homogeneity and closed-form fibers") {
  OscillatorDiscretization disc;
  Quadrature1D quad;
  quad.rel_tol = 1e-9;

  auto k1 = heisenberg_group_oracle(1.0, quad, disc);
  auto k2 = heisenberg_group_oracle(2.0, quad, disc);
  auto kh = heisenberg_group_oracle(0.5, quad, disc);
  CHECK(k1.value > 0.0);
  CHECK(k2.value < k1.value);
  CHECK(k2.value * 4.0 / k1.value == doctest::Approx(1.0).epsilon(0.005));
  CHECK(kh.value / (4.0 * k1.value) == doctest::Approx(1.0).epsilon(0.005));

  // Fiber traces match the closed-form geometric series integral.
  for (double t : {0.5, 1.0, 2.0}) {
    double pipeline = heisenberg_group_oracle(t, quad, disc).value;
    double closed = heisenberg_closed_form_integral(t, quad);
    CHECK(pipeline == doctest::Approx(closed).epsilon(1e-6));
    // Exact value of the untruncated integral.
    CHECK(pipeline ==
          doctest::Approx(M_PI * M_PI / (4.0 * t * t)).epsilon(3e-3));
  }
}
