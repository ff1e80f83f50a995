// Eigenvalues and spectral masses of the free operator on (0, pi) with
// f1 = 0 at both ends: integers with uniform mass 1/pi.

#include <cstdio>

#include "wdirac/wdirac.hpp"

int main() {
  using namespace wdirac;
  auto expr = free_expression(Interval::open(0.0, kPi));
  auto left = BoundaryCondition::angle(EndpointSide::kLeft, 0.0);
  auto right = BoundaryCondition::angle(EndpointSide::kRight, 0.0);
  auto frame = fundamental_system(expr, left);
  WeylFunction m(expr, frame, right);
  MeasureSettings ms;
  ms.grid_points = 11;
  auto meas = spectral_measure(m, -4.5, 4.5, ms);
  std::printf("%12s %14s %14s\n", "lambda", "mass", "1/||Phi||^2");
  for (const auto& a : meas.atoms)
    std::printf("%12.8f %14.10f %14.10f\n", a.lambda, a.mass, a.mass_norming);
  std::printf("(1/pi = %.10f)\n", 1.0 / kPi);
  return 0;
}
