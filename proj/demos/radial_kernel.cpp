// Reproducing-kernel growth K(i,i,c) for the radial operator with
// kappa = 1, compared against c^3/3 at z = 0.

#include <cstdio>

#include "wdirac/wdirac.hpp"

int main() {
  using namespace wdirac;
  RadialSpec spec{1.0, ScalarField::constant(0.0), ScalarField::constant(0.0),
                  kInf};
  auto expr = make_radial(spec);
  auto phi = singular_phi(spec);
  std::printf("%10s %16s %16s\n", "c", "K(i,i,c)", "K(0,0,c)*3/c^3");
  for (double c : {0.01, 0.05, 0.2, 0.5, 1.0, 2.0}) {
    auto ki = kernel_integral(phi, expr, {0.0, 1.0}, {0.0, 1.0}, c);
    auto k0 = kernel_integral(phi, expr, 0.0, 0.0, c);
    std::printf("%10.3f %16.10g %16.12f\n", c, std::real(ki.value),
                std::real(k0.value) * 3.0 / (c * c * c));
  }
  return 0;
}
