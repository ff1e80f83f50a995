#include <catch2/catch_amalgamated.hpp>

#include "wdirac/measure.hpp"

using namespace wdirac;

namespace {

WeylFunction interval_weyl(double right_angle = 0.0) {
  auto expr = free_expression(Interval::open(0.0, kPi));
  auto frame = fundamental_system(
      expr, BoundaryCondition::angle(EndpointSide::kLeft, 0.0));
  return WeylFunction(
      expr, frame, BoundaryCondition::angle(EndpointSide::kRight, right_angle));
}

}  // namespace

TEST_CASE("atoms of the free interval measure weigh 1/pi", "[measure]") {
  WeylFunction m = interval_weyl();
  MeasureSettings ms;
  ms.grid_points = 15;
  auto meas = spectral_measure(m, -3.5, 3.5, ms);
  REQUIRE(meas.atoms.size() == 7);
  for (const auto& a : meas.atoms) {
    CHECK(std::abs(a.lambda - std::round(a.lambda)) < 1e-9);
    CHECK(std::abs(a.mass - 1.0 / kPi) < 1e-6);
    // Norming-constant identity rho_n * ||Phi||^2 = 1.
    CHECK(std::abs(a.mass / a.mass_norming - 1.0) < 1e-5);
    CHECK(!a.flagged);
  }
  CHECK(meas.m_c == 0.0);
}

TEST_CASE("window without spectrum carries no measure", "[measure]") {
  WeylFunction m = interval_weyl();
  MeasureSettings ms;
  ms.grid_points = 9;
  auto meas = spectral_measure(m, 0.25, 0.75, ms);
  CHECK(meas.atoms.empty());
  CHECK(std::abs(meas.mass_in(0.25, 0.75)) < 1e-8);
}

TEST_CASE("Stieltjes window mass matches the atom sum", "[measure]") {
  WeylFunction m = interval_weyl();
  MeasureSettings ms;
  ms.grid_points = 9;
  auto meas = spectral_measure(m, -2.5, 2.5, ms);
  double direct = stieltjes_window_mass(m, -2.5, 2.5);
  double atoms = meas.atom_mass_in(-2.5, 2.5);
  CHECK(std::abs(direct - atoms) < 1e-4);
  CHECK(atoms == Catch::Approx(5.0 / kPi).margin(1e-5));
}

TEST_CASE("free half-line measure is purely absolutely continuous",
          "[measure]") {
  auto expr = free_expression(Interval::open(0.0, kInf));
  auto frame = fundamental_system(
      expr, BoundaryCondition::angle(EndpointSide::kLeft, 0.0));
  WeylFunction m(expr, frame,
                 BoundaryCondition::limit_point(EndpointSide::kRight));
  MeasureSettings ms;
  ms.eps_schedule = {3e-2, 1e-2};
  ms.grid_points = 7;
  auto meas = spectral_measure(m, -1.0, 1.0, ms);
  CHECK(meas.atoms.empty());
  for (double d : meas.density) CHECK(std::abs(d - 1.0 / kPi) < 1e-6);
}

TEST_CASE("herglotz diagnostics", "[measure]") {
  WeylFunction m = interval_weyl();
  auto rep = herglotz_check(
      m, {Complex(0, 1), Complex(1.3, 0.5), Complex(-2, 2), Complex(0.4, 0.1)});
  CHECK(rep.ok);
  // At z = i: Im(-cot(i pi)) = coth(pi).
  CHECK(std::imag(m(Complex(0, 1))) ==
        Catch::Approx(1.0 / std::tanh(kPi)).epsilon(1e-9));
  // Conjugate samples negate the imaginary part.
  Complex z(0.9, 1.4);
  CHECK(std::imag(m(std::conj(z))) ==
        Catch::Approx(-std::imag(m(z))).epsilon(1e-12));
  CHECK_THROWS_AS(herglotz_check(m, {Complex(0, -1)}), ConfigError);

  auto [mc, mc_raw] = herglotz_linear_term(m);
  CHECK(mc == 0.0);
  CHECK(std::abs(mc_raw) < 1e-8);
}

TEST_CASE("two-spectra report on the free interval", "[measure]") {
  auto expr = free_expression(Interval::open(0.0, kPi));
  double alpha_t = kPi / 4;
  TwoSpectraProblem pa{expr,
                       BoundaryCondition::angle(EndpointSide::kLeft, 0.0),
                       BoundaryCondition::angle(EndpointSide::kLeft, alpha_t),
                       BoundaryCondition::angle(EndpointSide::kRight, 0.0)};
  auto rep = two_spectra_report(pa, pa, -3.5, 3.5);
  CHECK(rep.dist_s == 0.0);
  CHECK(rep.dist_t == 0.0);
  CHECK(rep.counts_match_s);
  CHECK(rep.counts_match_t);
  CHECK(rep.interlaced_a);
  // sigma(S) = Z; sigma(T) = Z + 1/4; h = M on sigma(T) = -cot(pi/4) = -1.
  for (double v : rep.sigma_t_a.values)
    CHECK(std::abs(v - (std::round(v - 0.25) + 0.25)) < 1e-9);
  CHECK(rep.h == Catch::Approx(-1.0).epsilon(1e-8));
  CHECK(rep.h_constancy < 1e-8);
  CHECK(rep.shifted_zero_dist < 1e-8);
}

TEST_CASE("interlacing detector", "[measure]") {
  CHECK(interlaced({0.0, 1.0, 2.0}, {0.5, 1.5, 2.5}));
  CHECK(!interlaced({0.0, 1.0, 1.2}, {0.5, 2.5}));
  auto [d, ok] = spectrum_set_distance({0.0, 1.0}, {0.0, 1.0 + 1e-9});
  CHECK(ok);
  CHECK(d == Catch::Approx(1e-9));
  CHECK(!spectrum_set_distance({0.0}, {0.0, 1.0}).second);
}

TEST_CASE("norming-only measures for frames without Theta", "[measure]") {
  RadialSpec spec{1.0, ScalarField::constant(0), ScalarField::constant(0), 1.0};
  auto expr = make_radial(spec);
  auto phi = singular_phi(spec);
  MeasureSettings ms;
  auto meas = spectral_measure_discrete(
      expr, phi, BoundaryCondition::angle(EndpointSide::kRight, 0.0), 0.0,
      60.0, ms);
  REQUIRE(!meas.atoms.empty());
  for (const auto& a : meas.atoms) CHECK(a.mass > 0.0);
  // Eigenfunction orthogonality sanity: distinct eigenvalues.
  for (std::size_t i = 1; i < meas.atoms.size(); ++i)
    CHECK(meas.atoms[i].lambda > meas.atoms[i - 1].lambda + 0.5);
}
