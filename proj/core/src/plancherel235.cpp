#include "nilspec/plancherel235.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nilspec/parallel.hpp"
#include "nilspec/quadrature.hpp"

namespace nilspec::plancherel {

oscillator::Schrodinger1D QuarticHamiltonian::schrodinger() const {
  const double mm = m();
  if (!(mm > 0.0))
    throw std::invalid_argument("quartic hamiltonian: (lambda, mu) must not vanish");
  oscillator::Schrodinger1D s;
  s.c_kin = 1.0 / mm;
  s.v[0] = nu * nu / (4.0 * mm);
  s.v[2] = mm * nu / 2.0;
  s.v[4] = mm * mm * mm / 4.0;
  return s;
}

double PlancherelQuadrature::eff_tol() const { return rel_tol / std::pow(8.0, refinement); }
double PlancherelQuadrature::eff_mu_min() const {
  return mu_min / std::pow(1.5, refinement);
}
double PlancherelQuadrature::eff_mu_max() const {
  return mu_max * std::pow(1.5, refinement);
}
double PlancherelQuadrature::eff_b_max() const { return b_max * std::pow(1.5, refinement); }

namespace {

// Raises the Hermite basis size until the basis covers the classical
// region: the wells of a double-well potential or the turning point of
// the requested energy cap.
int hermite_size_for(const oscillator::Schrodinger1D& s, double alpha, int base,
                     double energy_cap) {
  double reach_needed = 0.0;
  if (s.v[2] < 0.0 && s.v[4] > 0.0) {
    double well = std::sqrt(-s.v[2] / (2.0 * s.v[4]));
    reach_needed = 1.15 * well + 5.0 * alpha;
  }
  if (energy_cap > 0.0 && s.v[4] > 0.0) {
    // Outer turning point of V(x) = v4 x^4 + v2 x^2 + v0 at energy_cap.
    double disc = s.v[2] * s.v[2] + 4.0 * s.v[4] * std::max(energy_cap - s.v[0], 0.0);
    double x2 = (-s.v[2] + std::sqrt(disc)) / (2.0 * s.v[4]);
    reach_needed = std::max(reach_needed, 1.1 * std::sqrt(std::max(x2, 0.0)));
  }
  int k_cov = base;
  if (reach_needed > 0.0) {
    double q = reach_needed / alpha;
    k_cov = static_cast<int>(std::ceil(0.5 * q * q)) + 8;
  }
  return std::min(std::max(base, k_cov), 2400);
}

Eigen::VectorXd solve_levels(const oscillator::Schrodinger1D& s,
                             const OscillatorDiscretization& disc, double energy_cap,
                             int size_scale_num = 1, int size_scale_den = 1) {
  if (disc.method == DiscMethod::HermiteBasis) {
    double alpha = oscillator::suggest_hermite_scale(s);
    int k = hermite_size_for(s, alpha, disc.hermite_size, energy_cap);
    k = static_cast<int>(static_cast<long>(k) * size_scale_num / size_scale_den);
    return oscillator::eigenvalues_hermite(s, k, alpha);
  }
  // Grid: choose the half-width from the turning region V(L) >= energy_cap.
  double cap = energy_cap > 0.0 ? energy_cap : 50.0;
  double L = disc.grid_halfwidth;
  if (L <= 0.0) {
    double disc_v = s.v[2] * s.v[2] + 4.0 * s.v[4] * std::max(cap - s.v[0], 0.0);
    double x2 = s.v[4] > 0.0 ? (-s.v[2] + std::sqrt(disc_v)) / (2.0 * s.v[4])
                             : cap / std::max(s.v[2], 1e-30);
    L = 1.15 * std::sqrt(std::max(x2, 1.0));
  }
  // Resolution: ~12 points per local wavelength at the cap energy.
  double kmax = std::sqrt(std::max(cap, 1.0) / s.c_kin);
  int n = static_cast<int>(std::ceil(2.0 * L * kmax * 1.91));
  n = std::min(std::max(n, disc.grid_points), 9000);
  n = static_cast<int>(static_cast<long>(n) * size_scale_num / size_scale_den);
  return oscillator::eigenvalues_grid_richardson(s, L, n);
}

// Energy above the ground state that matters for tr exp(-tH) at accuracy
// ~1e-14, or for the zeta_5 power sum when t == 0.
double energy_cap_for(const oscillator::Schrodinger1D& s, double t) {
  double e0_guess = s.v[0];
  if (s.v[2] < 0.0 && s.v[4] > 0.0) {
    // Double well: V at the bottom is v0 - v2^2/(4 v4).
    e0_guess = s.v[0] - s.v[2] * s.v[2] / (4.0 * s.v[4]);
  }
  if (t > 0.0) return e0_guess + 42.0 / t;
  return std::max(20.0 * std::max(e0_guess, 1.0), 30.0);
}

// ---- ground state envelope for K(b) = -d^2 + (phi^2+b)^2/4 -------------

struct GroundEnvelope {
  double c_neg = 0.0;     // e0(b) >= c_neg sqrt(|b|/2) for b <= -4
  double mid_floor = 0.0; // e0(b) >= mid_floor on (-4, 0]
  double e0_min = 0.0;

  double lower_bound(double b) const {
    if (b > 0.0) return 0.66 + 0.25 * b * b;  // operator bound e0(K(0)) + b^2/4
    if (b > -4.0) return mid_floor;
    return c_neg * std::sqrt(-b / 2.0);
  }
};

const GroundEnvelope& ground_envelope() {
  static GroundEnvelope env = [] {
    GroundEnvelope e;
    OscillatorDiscretization disc;
    disc.hermite_size = 200;
    double worst_ratio = std::numeric_limits<double>::infinity();
    double mid = std::numeric_limits<double>::infinity();
    double e0min = std::numeric_limits<double>::infinity();
    for (double b : {-400.0, -250.0, -150.0, -90.0, -50.0, -30.0, -18.0, -10.0,
                     -6.0, -4.0, -3.0, -2.0, -1.0, -0.5, 0.0}) {
      QuarticHamiltonian h{0.0, 1.0, b};
      Eigen::VectorXd ev = solve_levels(h.schrodinger(), disc, energy_cap_for(h.schrodinger(), 1.0));
      double e0 = ev[0];
      e0min = std::min(e0min, e0);
      if (b <= -4.0) worst_ratio = std::min(worst_ratio, e0 / std::sqrt(-b / 2.0));
      if (b > -4.0) mid = std::min(mid, e0);
    }
    e.c_neg = 0.9 * worst_ratio;
    e.mid_floor = 0.9 * mid;
    e.e0_min = e0min;
    return e;
  }();
  return env;
}

// ---- integration helpers ------------------------------------------------

// Splits [a, b] into `pieces` subintervals, integrates each adaptively in
// parallel, and sums in fixed order.
quadrature::Result integrate_split(const std::function<double(double)>& f, double a,
                                   double b, int pieces, double rel_tol, double abs_tol) {
  std::vector<std::pair<double, double>> segs;
  for (int i = 0; i < pieces; ++i) {
    double x0 = a + (b - a) * i / pieces;
    double x1 = a + (b - a) * (i + 1) / pieces;
    segs.emplace_back(x0, x1);
  }
  auto results = parallel::map_indexed<quadrature::Result>(
      segs.size(), [&](std::size_t i) {
        return quadrature::integrate(f, segs[i].first, segs[i].second, rel_tol,
                                     abs_tol / pieces, 600);
      });
  quadrature::Result total;
  for (const auto& r : results) {
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.evaluations += r.evaluations;
  }
  return total;
}

}  // namespace

TraceResult quartic_trace(const QuarticHamiltonian& h, double t,
                          const OscillatorDiscretization& disc) {
  if (!(t > 0.0)) throw std::invalid_argument("quartic_trace: t must be positive");
  oscillator::Schrodinger1D s = h.schrodinger();
  const double cap = energy_cap_for(s, t);

  Eigen::VectorXd lo = solve_levels(s, disc, cap);
  Eigen::VectorXd hi = solve_levels(s, disc, cap, 2, 1);
  auto sum_lo = oscillator::spectral_sum_exp(lo, t);
  auto sum_hi = oscillator::spectral_sum_exp(hi, t);

  TraceResult out;
  out.value = sum_lo.value;
  out.convergence_error = std::abs(sum_hi.value - sum_lo.value) + sum_hi.tail;
  if (disc.tolerance > 0.0 && out.convergence_error > disc.tolerance * std::abs(out.value))
    throw std::runtime_error(
        "quartic_trace: refinement levels disagree beyond requested tolerance (" +
        std::to_string(out.convergence_error) + " rel to " + std::to_string(out.value) + ")");
  return out;
}

namespace {

struct InnerResult {
  double value = 0.0;   // m^{2/3} int db trace
  double b_tail = 0.0;  // estimated truncation beyond |b| <= b_max
};

}  // namespace

ValueWithError group_heat_origin(double t, const PlancherelQuadrature& quad,
                                 const OscillatorDiscretization& disc) {
  if (!(t > 0.0)) throw std::invalid_argument("group_heat_origin: t must be positive");
  const double tol = quad.eff_tol();
  const double scale = std::pow(t, -1.5);  // domain scales to keep truncation t-covariant
  const double mu_lo = quad.eff_mu_min() * scale;
  const double mu_hi = quad.eff_mu_max() * scale;
  const double b_max = quad.eff_b_max();
  const auto& env = ground_envelope();

  // Inner integral over nu at fixed mu, parametrized by b = nu m^{-2/3}.
  auto inner = [&](double mu, bool with_tail) -> InnerResult {
    const double m = mu * mu;
    const double m23 = std::pow(m, 2.0 / 3.0);
    const double s_eff = t * std::pow(m, 1.0 / 3.0);
    auto f = [&](double b) -> double {
      if (s_eff * env.lower_bound(b) > 40.0) return 0.0;  // below 4e-18 of a level
      QuarticHamiltonian h{0.0, mu, b * m23};
      Eigen::VectorXd ev =
          solve_levels(h.schrodinger(), disc, energy_cap_for(h.schrodinger(), t));
      return oscillator::spectral_sum_exp(ev, t).value;
    };
    auto res = quadrature::integrate(f, -b_max, b_max, tol, 0.0, 400);
    InnerResult out;
    out.value = m23 * res.value;
    if (with_tail) {
      // Exponential tail in sqrt(|b|) beyond the truncated b-domain.
      double f_edge = f(-b_max);
      double sc = s_eff * env.c_neg;
      out.b_tail = f_edge * 2.0 * (std::sqrt(b_max) / sc + 1.0 / (sc * sc)) * m23;
    }
    return out;
  };

  // Outer integral over mu. Fixed geometric segments run in parallel.
  std::vector<double> cuts;
  const int pieces = 14;
  for (int i = 0; i <= pieces; ++i)
    cuts.push_back(mu_lo * std::pow(mu_hi / mu_lo, static_cast<double>(i) / pieces));
  auto seg_results = parallel::map_indexed<quadrature::Result>(
      pieces, [&](std::size_t i) {
        auto f = [&](double mu) { return mu * inner(mu, false).value; };
        return quadrature::integrate(f, cuts[i], cuts[i + 1], tol, 0.0, 200);
      });
  quadrature::Result outer;
  for (const auto& r : seg_results) {
    outer.value += r.value;
    outer.error_estimate += r.error_estimate;
  }

  ValueWithError out;
  out.value = 2.0 * M_PI * outer.value;
  out.quadrature_error = 2.0 * M_PI * outer.error_estimate;

  // Truncation estimates from probe nodes: the relative b-tail taken at
  // its worst over the domain, the missing mu dmu mass below mu_lo, and
  // the exp(-t m^{1/3} e0) suppressed region above mu_hi.
  double trunc = 0.0;
  InnerResult probe_lo = inner(mu_lo, true);
  InnerResult probe_mid = inner(std::min(mu_hi, 15.0 * scale), true);
  double tail_ratio = 0.0;
  for (const auto& p : {probe_lo, probe_mid})
    if (p.value > 0.0) tail_ratio = std::max(tail_ratio, p.b_tail / p.value);
  trunc += tail_ratio * out.value;
  trunc += 2.0 * M_PI * 0.5 * mu_lo * mu_lo * probe_lo.value;
  {
    InnerResult probe_hi = inner(mu_hi, false);
    const double u_hi = std::pow(mu_hi, 2.0 / 3.0);
    const double c = t * env.e0_min;
    // int_{mu_hi}^inf mu inner dmu with inner ~ inner_hi (u/u_hi) e^{-c(u-u_hi)},
    // u = mu^{2/3}, mu dmu = (3/2) u^2 du.
    double poly = u_hi * u_hi * u_hi / c + 3.0 * u_hi * u_hi / (c * c) +
                  6.0 * u_hi / (c * c * c) + 6.0 / (c * c * c * c);
    trunc += 2.0 * M_PI * probe_hi.value * 1.5 * poly / u_hi * 1.3;
  }
  out.truncation_error = trunc;
  return out;
}

ValueWithError alpha0_reduced(const PlancherelQuadrature& quad,
                              const OscillatorDiscretization& disc, DiscMethod backend) {
  const double tol = quad.eff_tol();
  const double b_neg = quad.eff_b_max();
  const double b_pos = std::min(quad.eff_b_max(), 30.0);
  OscillatorDiscretization d = disc;
  d.method = backend;
  const auto& env = ground_envelope();

  auto zeta5 = [&](double b) -> double {
    if (env.lower_bound(b) > 60.0) return 0.0;  // contributes < 60^-5 ~ 1e-9
    QuarticHamiltonian h{0.0, 1.0, b};
    oscillator::Schrodinger1D s = h.schrodinger();
    Eigen::VectorXd ev = solve_levels(s, d, energy_cap_for(s, 0.0));
    auto ps = oscillator::spectral_sum_power(ev, 5.0);
    return ps.value + ps.tail;
  };

  auto res = integrate_split(zeta5, -b_neg, b_pos, 24, tol, 0.0);

  // Positive-side tail: e_k(b) >= e_k(b_pos) + (b^2 - b_pos^2)/4 gives
  // zeta5(b) <= zeta5(b_pos) (b_pos/b)^{10}; integral = zeta5(b_pos) b_pos / 9.
  double tail_pos = zeta5(b_pos) * b_pos / 9.0;
  // Negative-side tail from the measured power-law decay (expected -5/2
  // from the harmonic splitting of the two wells).
  double z_edge = zeta5(-b_neg);
  double z_half = zeta5(-b_neg / 2.0);
  double p_hat = (z_edge > 0.0 && z_half > 0.0)
                     ? std::log(z_edge / z_half) / std::log(2.0)
                     : -2.5;
  if (p_hat > -1.8) p_hat = -1.8;  // conservative envelope
  double tail_neg = 1.5 * z_edge * b_neg / (-p_hat - 1.0);

  ValueWithError out;
  const double front = 3.0 * M_PI / 5.0;
  out.value = front * res.value;
  out.quadrature_error = front * res.error_estimate;
  out.truncation_error = front * (tail_pos + tail_neg);
  return out;
}

Alpha0Result alpha0_estimate(const PlancherelQuadrature& quad,
                             const OscillatorDiscretization& disc) {
  Alpha0Result out;

  PlancherelQuadrature coarse = quad;
  coarse.refinement = quad.refinement;
  PlancherelQuadrature fine = quad;
  fine.refinement = quad.refinement + 1;

  out.reduced_coarse = alpha0_reduced(coarse, disc, DiscMethod::HermiteBasis);
  out.reduced_hermite = alpha0_reduced(fine, disc, DiscMethod::HermiteBasis);
  out.reduced_grid = alpha0_reduced(coarse, disc, DiscMethod::Grid);

  auto k1 = group_heat_origin(1.0, quad, disc);
  out.direct_quadrature = ValueWithError{k1.value / 120.0, k1.quadrature_error / 120.0,
                                         k1.truncation_error / 120.0};
  auto k2 = group_heat_origin(2.0, quad, disc);
  out.homogeneity_ratio = k2.value * 32.0 / k1.value;

  out.alpha0 = out.reduced_hermite.value;
  const double osc_term = std::abs(out.reduced_hermite.value - out.reduced_grid.value);
  out.error_bar = out.reduced_hermite.total_error() +
                  std::abs(out.reduced_hermite.value - out.reduced_coarse.value) +
                  0.5 * osc_term;

  out.reduced_vs_direct =
      std::abs(out.alpha0 - out.direct_quadrature.value) / out.alpha0;
  out.hermite_vs_grid =
      std::abs(out.reduced_hermite.value - out.reduced_grid.value) / out.alpha0;

  std::ostringstream diag;
  const double direct_bar =
      (out.reduced_hermite.total_error() + out.direct_quadrature.total_error()) /
      out.alpha0;
  if (out.reduced_vs_direct > std::max(5e-3, 2.0 * direct_bar)) {
    out.withheld = true;
    diag << "reduced vs direct disagree: " << out.reduced_vs_direct << "; ";
  }
  const double grid_bar = (out.reduced_hermite.total_error() +
                           out.reduced_grid.total_error() + osc_term) /
                          out.alpha0;
  if (out.hermite_vs_grid > std::max(5e-3, 2.0 * grid_bar)) {
    out.withheld = true;
    diag << "hermite vs grid disagree: " << out.hermite_vs_grid << "; ";
  }
  if (std::abs(out.homogeneity_ratio - 1.0) > 0.01) {
    out.withheld = true;
    diag << "homogeneity ratio off: " << out.homogeneity_ratio << "; ";
  }
  out.diagnostics = diag.str();

  out.settings = nlohmann::json{
      {"mu_min", quad.eff_mu_min()},       {"mu_max", quad.eff_mu_max()},
      {"b_max", quad.eff_b_max()},         {"rel_tol", quad.eff_tol()},
      {"refinement", quad.refinement},     {"hermite_size", disc.hermite_size},
      {"grid_points", disc.grid_points},
      {"convention",
       "Plancherel measure dlambda dmu dnu in the Dixmier parametrization; "
       "time fixed at t = 1; alpha0 = k_1(o)/Gamma(6)"}};
  return out;
}

ValueWithError heisenberg_group_oracle(double t, const Quadrature1D& quad,
                                       const OscillatorDiscretization& disc) {
  if (!(t > 0.0)) throw std::invalid_argument("heisenberg oracle: t must be positive");
  const double a_max = quad.a_max > 0.0 ? quad.a_max : 60.0 / t;
  const double a_min = quad.a_min;

  OscillatorDiscretization d = disc;
  auto fiber_trace = [&](double a) -> double {
    oscillator::Schrodinger1D s;
    s.c_kin = 1.0;
    s.v[2] = a * a;
    Eigen::VectorXd ev =
        oscillator::eigenvalues_hermite(s, std::max(d.hermite_size, 128), 1.0 / std::sqrt(a));
    auto sum = oscillator::spectral_sum_exp(ev, t);
    // The harmonic tower has exactly equal spacings, so the geometric tail
    // completes the trace.
    return sum.value + sum.tail;
  };

  auto f = [&](double a) { return a * fiber_trace(a); };
  auto res = integrate_split(f, a_min, a_max, 12, quad.rel_tol, 0.0);

  ValueWithError out;
  out.value = 2.0 * res.value;  // both signs of a
  out.quadrature_error = 2.0 * res.error_estimate;
  // Below a_min the integrand is bounded by the leading Laurent term
  // a * 1/(2 a t); above a_max the tower decays like exp(-a t).
  out.truncation_error = a_min / (2.0 * t) +
                         2.0 * a_max * std::exp(-a_max * t) / (t * (1.0 - std::exp(-2.0 * a_max * t)));
  return out;
}

double heisenberg_closed_form_integral(double t, const Quadrature1D& quad) {
  const double a_max = quad.a_max > 0.0 ? quad.a_max : 60.0 / t;
  auto f = [&](double a) { return a / (2.0 * std::sinh(a * t)); };
  auto res = quadrature::integrate(f, quad.a_min, a_max, 1e-12, 0.0, 4000);
  return 2.0 * res.value;
}

}  // namespace nilspec::plancherel
