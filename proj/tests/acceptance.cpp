// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cstdio>
#include <random>

#include "wdirac/wdirac.hpp"

using namespace wdirac;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("criterion %2d [%s] %s\n", id, pass ? "PASS" : "FAIL",
              what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// --------------------------------------------------------------------------
// 1. Free half-line Weyl function: M(z) = i to 1e-8 for 20 random z.
// --------------------------------------------------------------------------
void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  auto expr = free_expression(Interval::open(0.0, kInf));
  auto frame = fundamental_system(
      expr, BoundaryCondition::angle(EndpointSide::kLeft, 0.0));
  WeylSettings ws;
  ws.trunc_max_levels = 16;
  WeylFunction m(expr, frame,
                 BoundaryCondition::limit_point(EndpointSide::kRight), ws);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    Complex z(re(rng), im(rng));
    if (z.imag() == 0.0) z += Complex(0.0, 1e-3);
    worst = std::max(worst, std::abs(m(z) - Complex(0.0, 1.0)));
  }
  double dt = seconds_since(t0);
  bool pass = worst < 1e-8 && dt < 5.0;
  report(1, pass,
         "free half-line M = i: worst |M - i| = " + fmt(worst) +
             " (tol 1e-8), runtime " + fmt(dt) + " s (< 5 s)");
}

// --------------------------------------------------------------------------
// 2. Finite-interval spectra: integers / half-integers, interlacing.
// --------------------------------------------------------------------------
void criterion_2() {
  auto expr = free_expression(Interval::open(0.0, kPi));
  auto left = BoundaryCondition::angle(EndpointSide::kLeft, 0.0);
  EigenSettings es;
  es.prop.rtol = 1e-12;
  es.prop.atol = 1e-14;
  // Window edges kept off the spectra (eigenvalues at integers and
  // half-integers).
  auto s_int = eigenvalues(
      expr, left, BoundaryCondition::angle(EndpointSide::kRight, 0.0), -10.25,
      10.25, es);
  auto s_half = eigenvalues(
      expr, left, BoundaryCondition::angle(EndpointSide::kRight, kPi / 2),
      -10.25, 10.25, es);
  bool pass = s_int.values.size() == 21 && s_half.values.size() == 20;
  double worst = 0.0;
  if (pass) {
    for (std::size_t i = 0; i < 21; ++i)
      worst = std::max(worst, std::abs(s_int.values[i] - (double(i) - 10.0)));
    for (std::size_t i = 0; i < 20; ++i)
      worst = std::max(worst,
                       std::abs(s_half.values[i] - (double(i) - 9.5)));
    pass = worst < 1e-9 && interlaced(s_int.values, s_half.values);
  }
  report(2, pass,
         "free (0,pi) spectra: " + std::to_string(s_int.values.size()) +
             " integer and " + std::to_string(s_half.values.size()) +
             " half-integer eigenvalues, worst error " + fmt(worst) +
             " (tol 1e-9), interlaced");
}

// --------------------------------------------------------------------------
// 3. Spectral measure atoms: masses 1/pi (1e-6); norming identity (1e-5).
// --------------------------------------------------------------------------
void criterion_3() {
  auto expr = free_expression(Interval::open(0.0, kPi));
  auto frame = fundamental_system(
      expr, BoundaryCondition::angle(EndpointSide::kLeft, 0.0));
  WeylFunction m(expr, frame,
                 BoundaryCondition::angle(EndpointSide::kRight, 0.0));
  MeasureSettings ms;
  ms.grid_points = 11;
  auto meas = spectral_measure(m, -10.5, 10.5, ms);
  double worst_mass = kInf, worst_id = kInf;
  bool pass = meas.atoms.size() == 21;
  if (pass) {
    worst_mass = 0.0;
    worst_id = 0.0;
    for (const auto& a : meas.atoms) {
      worst_mass = std::max(worst_mass, std::abs(a.mass - 1.0 / kPi));
      worst_id = std::max(worst_id, std::abs(a.mass / a.mass_norming - 1.0));
    }
    pass = worst_mass < 1e-6 && worst_id < 1e-5;
  }
  report(3, pass,
         "measure atoms: " + std::to_string(meas.atoms.size()) +
             " masses, worst |mass - 1/pi| = " + fmt(worst_mass) +
             " (tol 1e-6), worst |rho*||Phi||^2 - 1| = " + fmt(worst_id) +
             " (tol 1e-5)");
}

// --------------------------------------------------------------------------
// 4. Structure identity across three families, 25 random (zeta, z, c).
// --------------------------------------------------------------------------
void criterion_4() {
  std::vector<std::pair<std::string, DiracExpression>> families;
  families.push_back({"free", free_expression(Interval::open(0.0, kPi))});
  DiracExpression cq;
  cq.interval = Interval::open(0.0, kPi);
  cq.Q = MatrixField::constant(Mat2{{{0.35, -0.2}, {-0.2, 0.1}}});
  cq.R = MatrixField::identity();
  families.push_back({"constant-Q", cq});
  RadialSpec rs{1.0, ScalarField::constant(0), ScalarField::constant(0), kInf};
  families.push_back({"radial-k1", make_radial(rs)});

  double worst = 0.0;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-3.0, 3.0), cs(0.2, 2.4);
  bool pass = true;
  for (auto& [name, expr] : families) {
    EntireSolutionHandle phi;
    if (name == "radial-k1") {
      phi = singular_phi(rs);
    } else {
      phi = fundamental_system(
                expr, BoundaryCondition::angle(EndpointSide::kLeft, 0.0))
                .phi;
    }
    double c = cs(rng);
    auto e = DeBrangesFunction::make(phi, expr, c);
    for (int i = 0; i < 25; ++i) {
      Complex zeta(u(rng), u(rng)), z(u(rng), u(rng));
      auto k = kernel_integral(phi, expr, zeta, z, c);
      double r = rep_identity_residual(e, k, zeta, z) /
                 std::max(1.0, std::abs(k.value));
      worst = std::max(worst, r);
    }
  }
  pass = worst < 1e-8;
  report(4, pass,
         "structure identity over 3 families x 25 samples: worst relative "
         "residual " +
             fmt(worst) + " (tol 1e-8)");
}

// --------------------------------------------------------------------------
// 5. Kernel nesting: K(i,i,c) strictly increasing on 50 c's; vanishing.
// --------------------------------------------------------------------------
void criterion_5() {
  RadialSpec rs{1.0, ScalarField::constant(0), ScalarField::constant(0), kInf};
  auto expr = make_radial(rs);
  auto phi = singular_phi(rs);
  std::vector<double> cg;
  for (int i = 0; i < 50; ++i)
    cg.push_back(1e-3 * std::pow(1.5e3, i / 49.0));
  auto nest = nesting_check(phi, expr, Complex(0.0, 1.0), cg);
  bool pass = nest.strictly_increasing && nest.smallest_value < 1e-6 &&
              nest.smallest_value > 0;
  report(5, pass,
         "radial kernel nesting on 50 c's: strictly increasing = " +
             std::string(nest.strictly_increasing ? "yes" : "no") +
             ", K at smallest c = " + fmt(nest.smallest_value) +
             " (tol 1e-6)");
}

// --------------------------------------------------------------------------
// 6. Gauge invariance of the four normalizations on random problems.
// --------------------------------------------------------------------------
void criterion_6() {
  HarnessProbes probes;
  probes.window_lo = -20.0;
  probes.window_hi = 20.0;
  probes.z_grid = {Complex(0.5, 1.0),  Complex(-1.2, 0.8), Complex(2.0, 2.0),
                   Complex(0.0, 1.5),  Complex(-0.7, 2.5), Complex(1.4, 0.3),
                   Complex(-2.2, 1.1), Complex(0.9, 3.0),  Complex(3.0, 0.6),
                   Complex(-3.0, 2.0)};

  auto rp = random_smooth_problem(101);
  auto left = BoundaryCondition::angle(EndpointSide::kLeft, rp.alpha);
  auto right = BoundaryCondition::angle(EndpointSide::kRight, rp.beta);
  RandomProblemOptions ro;
  ro.identity_weight = true;
  auto rpi = random_smooth_problem(102, ro);
  auto left_i = BoundaryCondition::angle(EndpointSide::kLeft, rpi.alpha);
  auto right_i = BoundaryCondition::angle(EndpointSide::kRight, rpi.beta);

  struct Case {
    std::string name;
    DiracExpression expr;
    LiouvilleTransform t;
    BoundaryCondition left, right;
  };
  std::vector<Case> cases;
  cases.push_back({"normalize-weight", rp.expr,
                   normalize_weight(rp.expr).transform, left, right});
  cases.push_back({"normalize-det", rp.expr,
                   normalize_det(rp.expr).transform, left, right});
  cases.push_back({"kill-potential", rp.expr,
                   kill_potential(rp.expr).transform, left, right});
  cases.push_back({"normalize-trace", rpi.expr,
                   normalize_trace(rpi.expr).transform, left_i, right_i});

  bool pass = true;
  std::string detail;
  for (auto& c : cases) {
    auto h = invariance_harness(c.expr, c.t, c.left, c.right, probes);
    bool ok = h.eig_counts_match && h.eig_set_distance < 1e-6 &&
              h.max_m_deviation < 1e-6;
    pass = pass && ok;
    detail += c.name + ": eig " + fmt(h.eig_set_distance) + " M " +
              fmt(h.max_m_deviation) + "; ";
  }
  report(6, pass, "gauge invariance (tol 1e-6 each): " + detail);
}

// --------------------------------------------------------------------------
// 7. Radial asymptotics at x = 1e-4 for kappa in {0.3, 1, 2}, |z| <= 2.
// --------------------------------------------------------------------------
void criterion_7() {
  double worst2 = 0.0, worst1 = 0.0;
  for (double kappa : {0.3, 1.0, 2.0}) {
    auto phi = singular_phi({kappa, ScalarField::constant(0),
                             ScalarField::constant(0), kInf});
    for (Complex z : {Complex(2.0, 0.0), Complex(-2.0, 0.0), Complex(0.0, 2.0),
                      Complex(1.4, 1.4), Complex(0.0, 0.0)}) {
      double x = 1e-4;
      CVec2 f = phi(z, x);
      worst2 = std::max(worst2,
                        std::abs(f[1] * std::pow(x, -kappa) - 1.0));
      worst1 = std::max(worst1, std::abs(f[0] * std::pow(x, kappa)));
    }
  }
  bool pass = worst2 < 1e-6 && worst1 < 1e-6;
  report(7, pass,
         "radial asymptotics at x = 1e-4: worst |x^-k Phi2 - 1| = " +
             fmt(worst2) + ", worst |x^k Phi1| = " + fmt(worst1) +
             " (tol 1e-6 each)");
}

// --------------------------------------------------------------------------
// 8. Parseval: truncated series at N = 2000 reaches pi/2 within 1e-3.
// --------------------------------------------------------------------------
void criterion_8() {
  auto expr = free_expression(Interval::open(0.0, kPi));
  FrameSettings fs;
  fs.prop.rtol = 1e-8;
  fs.prop.atol = 1e-10;
  auto frame = fundamental_system(
      expr, BoundaryCondition::angle(EndpointSide::kLeft, 0.0), fs);
  CompactVectorField f{0.0, kPi / 2, [](double) { return CVec2{0.0, 1.0}; }};
  const int n_max = 2000;
  std::vector<Complex> zs;
  zs.reserve(2 * n_max + 1);
  for (int n = -n_max; n <= n_max; ++n) zs.push_back(Complex(double(n), 0.0));
  auto hats = transform_hat(f, frame.phi, expr, zs, {1e-8, 1e-12});
  double sum = 0.0;
  for (const auto& h : hats) sum += std::norm(h) / kPi;
  double err = std::abs(sum - kPi / 2);
  bool pass = err < 1e-3;
  report(8, pass,
         "parseval at N = 2000: sum = " + fmt(sum) + ", |sum - pi/2| = " +
             fmt(err) + " (tol 1e-3)");
}

// --------------------------------------------------------------------------
// 9. Two-spectra consistency across a gauge-equivalent pair.
// --------------------------------------------------------------------------
void criterion_9() {
  RandomProblemOptions ro;
  ro.identity_weight = true;
  auto rp = random_smooth_problem(303, ro);
  auto rot = gauge_rotate(rp.expr, ScalarField::constant(0.6), 0.0,
                          {true, 512, true, 4097});
  TwoSpectraProblem pa{rp.expr,
                       BoundaryCondition::angle(EndpointSide::kLeft, 0.4),
                       BoundaryCondition::angle(EndpointSide::kLeft, 1.1),
                       BoundaryCondition::angle(EndpointSide::kRight, 0.7)};
  TwoSpectraProblem pb{
      rot.expr, detail::map_condition(pa.left_s, rot.transform, rp.expr),
      detail::map_condition(pa.left_t, rot.transform, rp.expr),
      detail::map_condition(pa.right, rot.transform, rp.expr)};
  auto rep = two_spectra_report(pa, pb, -20.0, 20.0);
  bool pass = rep.counts_match_s && rep.counts_match_t &&
              rep.dist_s < 1e-6 && rep.dist_t < 1e-6 &&
              rep.shifted_zero_dist < 1e-6;
  report(9, pass,
         "two-spectra on a gauge-equivalent pair: dist(S) = " +
             fmt(rep.dist_s) + ", dist(T) = " + fmt(rep.dist_t) +
             ", shifted-M zeros vs sigma(T) = " + fmt(rep.shifted_zero_dist) +
             " (tol 1e-6 each)");
}

// --------------------------------------------------------------------------
// 10. Property suites, 1000 randomized cases each, fixed seed.
// --------------------------------------------------------------------------
void criterion_10() {
  auto t0 = std::chrono::steady_clock::now();
  auto results = run_property_suites(424242, 1000);
  double dt = seconds_since(t0);
  bool pass = dt < 600.0;
  std::string detail;
  for (const auto& r : results) {
    pass = pass && r.pass;
    detail += r.name + " " + fmt(r.worst) + "/" + fmt(r.tol) + "; ";
  }
  report(10, pass,
         "property suites (1000 cases each): " + detail + "runtime " +
             fmt(dt) + " s (< 600 s)");
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("acceptance: %d of 10 criteria passed (%.1f s total)\n",
              10 - failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
