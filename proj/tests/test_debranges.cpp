#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "wdirac/debranges.hpp"
#include "wdirac/generators.hpp"

using namespace wdirac;

namespace {

struct FreeSetup {
  DiracExpression expr = free_expression(Interval::open(0.0, kPi));
  FundamentalSystem sys = fundamental_system(
      expr, BoundaryCondition::angle(EndpointSide::kLeft, 0.0));
};

}  // namespace

TEST_CASE("E function sign resolution and closed form", "[debranges]") {
  FreeSetup s;
  double c = 1.1;
  auto e = DeBrangesFunction::make(s.sys.phi, s.expr, c);
  CHECK(e.sign() == ESign::kConjugate);
  for (Complex z : {Complex(0.7, 1.3), Complex(-1.0, 0.2), Complex(2.0, 0.0)}) {
    Complex expect = Complex(0, 1) * std::exp(Complex(0, -1) * z * c);
    CHECK(std::abs(e(z) - expect) < 1e-9);
  }
  // On the real axis |E|^2 = Phi_1^2 + Phi_2^2 > 0: no real zeros.
  for (double l : {-3.0, -0.4, 0.0, 1.7}) CHECK(std::abs(e(l)) > 0.5);
  // Radial at z = 0: E(0,c) = +- i c^kappa.
  RadialSpec rs{1.0, ScalarField::constant(0), ScalarField::constant(0), kInf};
  auto phi = singular_phi(rs);
  auto er = DeBrangesFunction::make(phi, make_radial(rs), c);
  CHECK(std::abs(std::abs(er(0.0)) - c) < 1e-12);
  CHECK(std::abs(std::real(er(0.0))) < 1e-12);
}

TEST_CASE("Hermite-Biehler inequality on random upper half-plane samples",
          "[debranges]") {
  FreeSetup s;
  auto e = DeBrangesFunction::make(s.sys.phi, s.expr, 0.9);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.05, 3.0);
  for (int i = 0; i < 50; ++i) {
    Complex z(re(rng), im(rng));
    REQUIRE(std::abs(e(z)) > std::abs(e(std::conj(z))));
  }
}

TEST_CASE("kernel closed forms", "[debranges]") {
  FreeSetup s;
  double c = 1.3, y = 0.8;
  auto k = kernel_integral(s.sys.phi, s.expr, Complex(0, y), Complex(0, y), c);
  CHECK(std::abs(k.value - std::sinh(2 * y * c) / (2 * y)) < 1e-10);
  auto k0 = kernel_integral(s.sys.phi, s.expr, 0.0, 0.0, c);
  CHECK(std::abs(k0.value - c) < 1e-11);

  RadialSpec rs{0.6, ScalarField::constant(0), ScalarField::constant(0), kInf};
  auto phi = singular_phi(rs);
  auto kr = kernel_integral(phi, make_radial(rs), 0.0, 0.0, c);
  CHECK(std::abs(kr.value - std::pow(c, 2.2) / 2.2) < 1e-10);

  // Conjugate symmetry K(zeta, z) = conj(K(z, zeta)).
  Complex zeta(1.2, 0.5), z(-0.4, 0.9);
  auto kab = kernel_integral(s.sys.phi, s.expr, zeta, z, c);
  auto kba = kernel_integral(s.sys.phi, s.expr, z, zeta, c);
  CHECK(std::abs(kab.value - std::conj(kba.value)) < 1e-10);
}

TEST_CASE("structure identity holds across problem families", "[debranges]") {
  FreeSetup s;
  double c = 1.7;
  auto e = DeBrangesFunction::make(s.sys.phi, s.expr, c);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 25; ++i) {
    Complex zeta(u(rng), u(rng)), z(u(rng), u(rng));
    auto k = kernel_integral(s.sys.phi, s.expr, zeta, z, c);
    double r = rep_identity_residual(e, k, zeta, z);
    REQUIRE(r / std::max(1.0, std::abs(k.value)) < 1e-8);
  }
  // zeta = conj(z): both sides real.
  Complex z(0.9, 0.8);
  auto kr = kernel_integral(s.sys.phi, s.expr, std::conj(z), z, c);
  CHECK(std::abs(std::imag(kr.value)) < 1e-10);
  // Coincidence limit via the derivative formula.
  auto kc = kernel_integral(s.sys.phi, s.expr, z, std::conj(z), c);
  CHECK(rep_identity_residual(e, kc, z, std::conj(z)) < 1e-8);
}

TEST_CASE("kernel Gram matrices are positive semidefinite", "[debranges]") {
  auto rp = random_smooth_problem(17);
  FrameSettings fs;
  auto sys = fundamental_system(
      rp.expr, BoundaryCondition::angle(EndpointSide::kLeft, rp.alpha), fs);
  double c = 0.8;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 4; ++trial) {
    Complex zs[3] = {Complex(u(rng), u(rng)), Complex(u(rng), u(rng)),
                     Complex(u(rng), u(rng))};
    Complex g[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        g[i][j] =
            kernel_integral(sys.phi, rp.expr, zs[i], zs[j], c).value;
    // Hermitian PSD iff all principal minors are >= 0.
    for (int i = 0; i < 3; ++i) REQUIRE(std::real(g[i][i]) > -1e-9);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        double m2 = std::real(g[i][i] * g[j][j] - g[i][j] * g[j][i]);
        REQUIRE(m2 > -1e-9);
      }
    Complex det3 = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                   g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                   g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    REQUIRE(std::real(det3) > -1e-9);
  }
}

TEST_CASE("kernel nesting and vanishing toward the left endpoint",
          "[debranges]") {
  FreeSetup s;
  std::vector<double> cg;
  for (int i = 0; i < 14; ++i) cg.push_back(0.02 * std::pow(140.0, i / 13.0));
  auto nest = nesting_check(s.sys.phi, s.expr, Complex(0, 1), cg);
  CHECK(nest.strictly_increasing);
  CHECK(nest.max_increment_mismatch < 1e-9);
  CHECK(nest.smallest_value ==
        Catch::Approx(std::sinh(2 * 0.02) / 2).epsilon(1e-8));

  RadialSpec rs{1.0, ScalarField::constant(0), ScalarField::constant(0), kInf};
  auto phi = singular_phi(rs);
  auto nr = nesting_check(phi, make_radial(rs), 0.0, {0.1, 0.4, 0.9, 1.5});
  CHECK(nr.strictly_increasing);
  CHECK(nr.diagonal[2] == Catch::Approx(0.9 * 0.9 * 0.9 / 3).epsilon(1e-10));
}

TEST_CASE("spectral transform closed forms", "[debranges]") {
  FreeSetup s;
  double c = 1.0;
  CompactVectorField f{0.0, c, [](double) { return CVec2{0.0, 1.0}; }};
  auto hats = transform_hat(f, s.sys.phi, s.expr,
                            {Complex(2.0, 0.0), Complex(0.5, 1.5), Complex(0.0)});
  CHECK(std::abs(hats[0] - std::sin(2.0 * c) / 2.0) < 1e-11);
  Complex z1(0.5, 1.5);
  CHECK(std::abs(hats[1] - std::sin(z1 * c) / z1) < 1e-11);
  CHECK(std::abs(hats[2] - c) < 1e-11);  // int cos(0 x) = c

  // f = Phi(l0,.) 1_(0,c]: fhat(z) = K(l0, z, c).
  double l0 = 2.0;
  SolutionPath p = s.sys.phi.path(l0, 0.0, c);
  CompactVectorField fphi{0.0, c, [p](double x) { return p(x); }};
  Complex z(0.9, 0.4);
  auto hat = transform_hat(fphi, s.sys.phi, s.expr, {z});
  auto k = kernel_integral(s.sys.phi, s.expr, l0, z, c);
  CHECK(std::abs(hat[0] - k.value) < 1e-10);

  // Eigenfunction orthogonality: fhat vanishes at other eigenvalues.
  SolutionPath p1 = s.sys.phi.path(1.0, 0.0, kPi);
  CompactVectorField feig{0.0, kPi, [p1](double x) { return p1(x); }};
  auto oh = transform_hat(feig, s.sys.phi, s.expr, {Complex(2.0, 0.0)});
  CHECK(std::abs(oh[0]) < 1e-10);
}

TEST_CASE("parseval residuals", "[debranges]") {
  FreeSetup s;
  // f = (0,1) on (0, pi/2]; measure = sum over integers of (1/pi) delta_n.
  CompactVectorField f{0.0, kPi / 2, [](double) { return CVec2{0.0, 1.0}; }};
  SpectralMeasure meas;
  meas.lo = -300;
  meas.hi = 300;
  for (int n = -300; n <= 300; ++n) {
    SpectralMeasure::Atom a;
    a.lambda = n;
    a.mass = 1.0 / kPi;
    meas.atoms.push_back(a);
  }
  auto rep = parseval_residual(f, s.sys.phi, s.expr, meas);
  CHECK(rep.norm_squared == Catch::Approx(kPi / 2).epsilon(1e-12));
  // Truncation tail of sum 1/n^2 over odd |n| > 300.
  CHECK(rep.residual < 3e-3);
  CHECK(rep.residual > 1e-5);

  CompactVectorField zero{0.0, 1.0, [](double) { return CVec2{0.0, 0.0}; }};
  CHECK(parseval_residual(zero, s.sys.phi, s.expr, meas).residual == 0.0);
}

TEST_CASE("structure identity on random smooth coefficients", "[debranges]") {
  auto rp = random_smooth_problem(29);
  auto sys = fundamental_system(
      rp.expr, BoundaryCondition::angle(EndpointSide::kLeft, rp.alpha));
  double c = 0.75;
  auto e = DeBrangesFunction::make(sys.phi, rp.expr, c);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  for (int i = 0; i < 10; ++i) {
    Complex zeta(u(rng), u(rng)), z(u(rng), u(rng));
    auto k = kernel_integral(sys.phi, rp.expr, zeta, z, c);
    REQUIRE(rep_identity_residual(e, k, zeta, z) /
                std::max(1.0, std::abs(k.value)) <
            1e-8);
  }
}

TEST_CASE("reproducing property against the discretized measure",
          "[debranges]") {
  // fhat(zeta) = sum_n rho_n conj(K(zeta, l_n, c)) fhat(l_n) up to the
  // window tail, for f supported in (0, c].
  FreeSetup s;
  double c = 1.0;
  CompactVectorField f{0.0, c, [](double) { return CVec2{0.0, 1.0}; }};
  Complex zeta(0.7, 0.3);
  Complex direct = transform_hat(f, s.sys.phi, s.expr, {zeta})[0];
  Complex paired = 0.0;
  const int n_max = 200;  // window tail decays like 1/N
  std::vector<Complex> zs;
  for (int n = -n_max; n <= n_max; ++n) zs.push_back(Complex(double(n), 0.0));
  auto hats = transform_hat(f, s.sys.phi, s.expr, zs);
  std::vector<Complex> kernels(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) {
    kernels[i] = kernel_integral(s.sys.phi, s.expr, zeta, zs[i], c).value;
  });
  for (std::size_t i = 0; i < zs.size(); ++i)
    paired += (1.0 / kPi) * std::conj(kernels[i]) * hats[i];
  CHECK(std::abs(paired - direct) < 3e-3 * std::max(1.0, std::abs(direct)));
}

TEST_CASE("cartwright diagnostics", "[debranges]") {
  FreeSetup s;
  double c = 1.1;
  auto e = DeBrangesFunction::make(s.sys.phi, s.expr, c);
  auto rep = cartwright_diagnostics(e, {25, 50, 100, 200}, 40.0);
  CHECK(rep.type_estimate == Catch::Approx(c).epsilon(1e-6));
  CHECK(rep.log_integral < 1e-8);  // |E| = 1 on the real axis
  CHECK(std::isfinite(rep.tail_estimate));

  // c -> 0: exponential type goes to zero.
  auto e0 = DeBrangesFunction::make(s.sys.phi, s.expr, 1e-3);
  auto rep0 = cartwright_diagnostics(e0, {50, 100}, 10.0);
  CHECK(rep0.type_estimate < 2e-3);

  // Radial kappa = 1: type is still c (Bessel-type growth).
  RadialSpec rs{1.0, ScalarField::constant(0), ScalarField::constant(0), kInf};
  auto phi = singular_phi(rs);
  auto er = DeBrangesFunction::make(phi, make_radial(rs), c);
  auto repr = cartwright_diagnostics(er, {50, 100, 200}, 20.0);
  CHECK(repr.type_estimate == Catch::Approx(c).epsilon(1e-2));
}
