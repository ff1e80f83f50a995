#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "wdirac/generators.hpp"
#include "wdirac/ode.hpp"

using namespace wdirac;

TEST_CASE("free system reproduces (sin zx, cos zx)", "[ode]") {
  auto expr = free_expression(Interval::open(0.0, kInf));
  for (Complex z : {Complex(1.0, 0.0), Complex(0.3, 1.2), Complex(-2.0, 0.5)}) {
    for (double x : {0.4, 1.9, 5.0}) {
      auto out = propagate(expr, z, {0.0, CVec2{0.0, 1.0}}, x);
      double scale = std::max(1.0, norm2(out.f));
      CHECK(std::abs(out.f[0] - std::sin(z * x)) < 1e-9 * scale);
      CHECK(std::abs(out.f[1] - std::cos(z * x)) < 1e-9 * scale);
    }
  }
}

TEST_CASE("z = 0 with zero potential keeps solutions constant", "[ode]") {
  auto rp = random_smooth_problem(11);
  DiracExpression expr = rp.expr;
  expr.Q = MatrixField::constant(Mat2::zero());
  auto out = propagate(expr, 0.0, {0.2, CVec2{0.7, -0.4}}, 0.9);
  CHECK(std::abs(out.f[0] - 0.7) < 1e-12);
  CHECK(std::abs(out.f[1] + 0.4) < 1e-12);
}

TEST_CASE("radial kappa=1 at z=0 propagates (0, x)", "[ode]") {
  auto rad = make_radial({1.0, ScalarField::constant(0),
                          ScalarField::constant(0), kInf});
  auto out = propagate(rad, 0.0, {0.5, CVec2{0.0, 0.5}}, 2.0);
  CHECK(std::abs(out.f[0]) < 1e-12);
  CHECK(std::abs(out.f[1] - 2.0) < 1e-10);
}

TEST_CASE("transfer matrix: closed form, identity, flow, determinant",
          "[ode]") {
  auto expr = free_expression(Interval::open(0.0, kInf));
  Complex z(0.8, 0.6);
  double x = 1.3;
  CMat2 t = transfer_matrix(expr, z, 0.0, x);
  CHECK(std::abs(t(0, 0) - std::cos(z * x)) < 1e-9);
  CHECK(std::abs(t(0, 1) - std::sin(z * x)) < 1e-9);
  CHECK(std::abs(t(1, 0) + std::sin(z * x)) < 1e-9);
  CHECK(std::abs(t(1, 1) - std::cos(z * x)) < 1e-9);

  CMat2 id = transfer_matrix(expr, z, 0.7, 0.7);
  CHECK(std::abs(id(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(id(0, 1)) < 1e-14);

  // Flow property and unit determinant on random instances.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    auto rp = random_smooth_problem(1000 + i);
    Complex zz(u(rng), u(rng));
    CMat2 t01 = transfer_matrix(rp.expr, zz, 0.1, 0.5);
    CMat2 t12 = transfer_matrix(rp.expr, zz, 0.5, 0.9);
    CMat2 t02 = transfer_matrix(rp.expr, zz, 0.1, 0.9);
    CMat2 comp = t12 * t01;
    REQUIRE(std::abs(t02.det() - 1.0) < 1e-9);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        REQUIRE(std::abs(comp(r, c) - t02(r, c)) < 1e-8);
  }
}

TEST_CASE("forward-backward propagation returns the start", "[ode]") {
  auto rp = random_smooth_problem(21);
  Complex z(1.1, -0.8);
  SolutionState start{0.15, CVec2{0.3, -1.1}};
  auto fwd = propagate(rp.expr, z, start, 0.85);
  auto back = propagate(rp.expr, z, fwd, 0.15);
  CHECK(norm2(back.f - start.f) < 1e-9);
}

TEST_CASE("wronskian basics", "[ode]") {
  CHECK(wronskian(CVec2{1.0, 0.0}, CVec2{0.0, 1.0}) == Complex(1.0));
  CVec2 f{Complex(0.3, 1.0), Complex(-2.0, 0.1)};
  CHECK(wronskian(f, f) == Complex(0.0));
  // (sin, cos) against (cos, -sin): -(sin^2 + cos^2) = -1 for all x.
  Complex z(0.7, 0.2);
  for (double x : {0.3, 1.1, 2.9}) {
    CVec2 a{std::sin(z * x), std::cos(z * x)};
    CVec2 b{std::cos(z * x), -std::sin(z * x)};
    CHECK(std::abs(wronskian(a, b) + 1.0) < 1e-15);
  }
}

TEST_CASE("wronskian of same-z solutions is x-independent", "[ode]") {
  auto rp = random_smooth_problem(31);
  Complex z(0.4, 1.7);
  PropagationSettings prop;
  SolutionTrajectory ta, tb;
  propagate(rp.expr, z, {0.5, CVec2{1.0, 0.2}}, 0.05, prop, &ta);
  propagate(rp.expr, z, {0.5, CVec2{-0.3, 0.9}}, 0.05, prop, &tb);
  Complex w0 = wronskian(ta.eval(0.05), tb.eval(0.05));
  for (double x : {0.1, 0.25, 0.4}) {
    CHECK(std::abs(wronskian(ta.eval(x), tb.eval(x)) - w0) < 1e-10);
  }
}

TEST_CASE("Lagrange identity residuals", "[ode]") {
  // Real parameter, equal real solutions: both sides vanish.
  auto rp = random_smooth_problem(41);
  PropagationSettings prop;
  double lambda = 0.9;
  SolutionTrajectory tf;
  propagate(rp.expr, lambda, {0.5, CVec2{0.6, 0.4}}, 0.1, prop, &tf);
  SolutionTrajectory tf_up;
  propagate(rp.expr, lambda, {0.5, CVec2{0.6, 0.4}}, 0.9, prop, &tf_up);
  auto f = [&](double x) { return x <= 0.5 ? tf.eval(x) : tf_up.eval(x); };
  CHECK(lagrange_residual(rp.expr, lambda, lambda, f, f, 0.1, 0.9) < 1e-10);

  // Free expression, zeta = z = i, f = Phi(-i,.), g = Phi(i,.):
  // W_b - W_a = -2i int (sinh^2 + cosh^2).
  auto fr = free_expression(Interval::open(0.0, kInf));
  Complex i(0.0, 1.0);
  auto phi = [&](Complex z, double x) {
    return CVec2{std::sin(z * x), std::cos(z * x)};
  };
  double alpha = 0.2, beta = 1.4;
  auto fi = [&](double x) { return phi(-i, x); };
  auto gi = [&](double x) { return phi(i, x); };
  CHECK(lagrange_residual(fr, i, i, fi, gi, alpha, beta) < 1e-9);
  // The closed forms of the two sides individually.
  Complex lhs = wronskian(fi(beta), gi(beta)) - wronskian(fi(alpha), gi(alpha));
  Complex closed = Complex(0, -1) * (std::sinh(2 * beta) - std::sinh(2 * alpha));
  CHECK(std::abs(lhs - closed) < 1e-12);

  // Random smooth coefficients, zeta = 2 + i, z = 1 - i.
  Complex zeta(2.0, 1.0), z(1.0, -1.0);
  SolutionTrajectory a_lo, a_hi, b_lo, b_hi;
  propagate(rp.expr, std::conj(zeta), {0.5, CVec2{0.8, -0.1}}, 0.05, prop, &a_lo);
  propagate(rp.expr, std::conj(zeta), {0.5, CVec2{0.8, -0.1}}, 0.95, prop, &a_hi);
  propagate(rp.expr, z, {0.5, CVec2{0.2, 1.0}}, 0.05, prop, &b_lo);
  propagate(rp.expr, z, {0.5, CVec2{0.2, 1.0}}, 0.95, prop, &b_hi);
  auto fa = [&](double x) { return x <= 0.5 ? a_lo.eval(x) : a_hi.eval(x); };
  auto gb = [&](double x) { return x <= 0.5 ? b_lo.eval(x) : b_hi.eval(x); };
  CHECK(lagrange_residual(rp.expr, zeta, z, fa, gb, 0.05, 0.95) < 1e-8);
}

TEST_CASE("propagation across a non-integrable singularity fails loudly",
          "[ode]") {
  DiracExpression expr;
  expr.interval = Interval::open(0.0, 1.0);
  expr.Q = MatrixField::expression(
      {"0", "1/(x-0.5)^2", "1/(x-0.5)^2", "0"});
  expr.R = MatrixField::identity();
  try {
    propagate(expr, Complex(0, 1), {0.1, CVec2{0.0, 1.0}}, 0.9);
    FAIL("expected PropagationError");
  } catch (const PropagationError& e) {
    CHECK(std::abs(e.where() - 0.5) < 0.05);
  }
}
