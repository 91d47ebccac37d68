#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nilspec/spectral.hpp"

using namespace nilspec;
using namespace nilspec::spectral;

TEST_CASE("spectrum construction, kernel and counting") {
  auto s = Spectrum::create({0.0, 5.0}, Source::Synthetic);
  CHECK(s.kernel_dim() == 1);
  CHECK(s.total_count() == 2);
  CHECK(counting_function(s, 0.0) == 1);
  CHECK(counting_function(s, 5.0) == 2);

  auto t = Spectrum::create({0.0, 32.0, 32.0, 64.0}, Source::Synthetic);
  CHECK(counting_function(t, 32.0) == 3);
  CHECK(counting_function(t, 0.0) == t.kernel_dim());
  CHECK_THROWS(counting_function(t, -1.0));

  // Synthetic lambda_j = j^2: N(lambda) = floor(sqrt(lambda)).
  std::vector<double> sq;
  for (int j = 1; j <= 200; ++j) sq.push_back(static_cast<double>(j) * j);
  auto q = Spectrum::create(sq, Source::Synthetic);
  for (double lam : {1.0, 2.0, 17.0, 170.0, 40000.0})
    CHECK(counting_function(q, lam) == static_cast<long>(std::floor(std::sqrt(lam))));

  CHECK_THROWS(Spectrum::create({-1.0, 5.0}, Source::Synthetic));
}

TEST_CASE("counting function is nondecreasing and exhausts the trusted part") {
  auto spec = analytic_torus_spectrum(2, 500);
  long prev = 0;
  for (double lam = 0.0; lam <= spec.trust_cutoff(); lam += spec.trust_cutoff() / 97.0) {
    long now = counting_function(spec, lam);
    CHECK(now >= prev);
    prev = now;
  }
  CHECK(counting_function(spec, spec.trust_cutoff()) == spec.trusted_count());
}

TEST_CASE("dense eigenvalues of a diagonal operator") {
  nilmanifold::DiscretizedOperator op;
  op.grid = nilmanifold::QuotientGrid::torus(1, 4);
  Eigen::SparseMatrix<std::complex<double>> m(2, 2);
  m.insert(0, 0) = 0.0;
  m.insert(1, 1) = 5.0;
  op.matrix = m;
  auto s = eigenvalues(op);
  CHECK(s.kernel_dim() == 1);
  CHECK(s.eigenvalues().back() == doctest::Approx(5.0));
}

TEST_CASE("torus d=1 N=4 spectrum through the solver") {
  auto s = eigenvalues(nilmanifold::torus_laplacian(1, 4));
  REQUIRE(s.total_count() == 4);
  CHECK(s.kernel_dim() == 1);
  CHECK(counting_function(s, 33.0) == 3);
  CHECK(s.eigenvalues().back() == doctest::Approx(64.0));
}

TEST_CASE("lanczos agrees with the dense solver on heisenberg fibers") {
  for (int m : {0, 1, -1}) {
    auto fiber = nilmanifold::heisenberg_fiber(16, m);
    auto dense = eigenvalues(fiber, -1, EigenMethod::Dense);
    auto lr = lanczos_smallest(fiber.matrix, 50);
    REQUIRE(lr.converged);
    REQUIRE(static_cast<int>(lr.values.size()) == 50);
    // Expand the dense spectrum with multiplicity for index-wise compare.
    std::vector<double> flat;
    for (std::size_t i = 0; i < dense.eigenvalues().size(); ++i)
      for (int c = 0; c < dense.multiplicities()[i]; ++c)
        flat.push_back(dense.eigenvalues()[i]);
    double scale = std::abs(flat.back());
    for (int i = 0; i < 50; ++i) CHECK(std::abs(lr.values[i] - flat[i]) <= 1e-8 * scale);
  }
}

TEST_CASE("weyl fit on an exact power law") {
  // lambda_j = sqrt(j): N(lambda) = floor(lambda^2).
  std::vector<double> vals;
  for (int j = 1; j <= 40000; ++j) vals.push_back(std::sqrt(static_cast<double>(j)));
  auto spec = Spectrum::create(vals, Source::Synthetic);
  auto fit = weyl_fit(spec, 2, 1);
  CHECK(fit.exponent_est == doctest::Approx(2.0).epsilon(0.01));
  CHECK(fit.constant_est == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("weyl fit on the analytic torus against the circle-count oracle") {
  auto spec = analytic_torus_spectrum(2, 10000);
  auto fit = weyl_fit(spec, 2, 2, 0.0, 0.0, 1.0 / (4.0 * M_PI));
  CHECK(fit.exponent_est == doctest::Approx(1.0).epsilon(0.05));
  CHECK(fit.constant_est == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(0.03));
  CHECK(fit.theory_exponent == doctest::Approx(1.0));
  REQUIRE(fit.theory_constant.has_value());
  CHECK(*fit.theory_constant == doctest::Approx(1.0 / (4.0 * M_PI)));
}

TEST_CASE("weyl fit window guards") {
  auto spec = analytic_torus_spectrum(2, 2000);
  CHECK_THROWS_WITH_AS(weyl_fit(spec, 2, 2, spec.trust_cutoff() / 2.0, spec.trust_cutoff()),
                       doctest::Contains("half a decade"), std::invalid_argument);
  std::vector<double> few{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  auto small = Spectrum::create(few, Source::Synthetic);
  CHECK_THROWS_WITH_AS(weyl_fit(small, 1, 1), doctest::Contains("30"),
                       std::invalid_argument);
}

TEST_CASE("union of fiber spectra is the sorted multiset union") {
  auto a = Spectrum::create({0.0, 1.0, 3.0}, Source::Synthetic, 10.0);
  auto b = Spectrum::create({1.0, 2.0}, Source::Synthetic, 8.0);
  auto u = merge_union({a, b}, Source::Synthetic);
  CHECK(u.total_count() == 5);
  CHECK(counting_function(u, 1.0) == 3);
  CHECK(u.trust_cutoff() == doctest::Approx(8.0));
}

TEST_CASE("csv round trip") {
  auto spec = Spectrum::create({0.0, 2.0, 2.0, 7.5}, Source::Synthetic);
  std::stringstream ss;
  write_csv(ss, spec);
  auto back = read_csv(ss, Source::Synthetic);
  CHECK(back.total_count() == spec.total_count());
  CHECK(back.kernel_dim() == spec.kernel_dim());
  CHECK(back.eigenvalues().back() == doctest::Approx(7.5));
}

TEST_CASE("analytic torus spectrum is complete below its cutoff") {
  auto spec = analytic_torus_spectrum(2, 1000);
  CHECK(spec.trusted_count() >= 1000);
  // The count below the cutoff matches the direct circle count.
  long direct = 0;
  double r2 = spec.trust_cutoff() / (4.0 * M_PI * M_PI);
  long R = static_cast<long>(std::sqrt(r2)) + 1;
  for (long j = -R; j <= R; ++j)
    for (long k = -R; k <= R; ++k)
      if (static_cast<double>(j * j + k * k) <= r2 + 1e-12) ++direct;
  CHECK(counting_function(spec, spec.trust_cutoff()) == direct);
}
