#pragma once

// Seeded generators of smooth random problems for property suites and the
// gauge verification harness. Coefficients are low-order trigonometric
// polynomials; weights are built as G^T G + margin * I so positivity and
// absolute continuity hold by construction.

#include <random>

#include "wdirac/dirac.hpp"

namespace wdirac {

struct RandomProblem {
  DiracExpression expr;
  double alpha = 0.0;  // left boundary angle
  double beta = 0.0;   // right boundary angle
};

namespace detail {

struct TrigPoly {
  double a0, a1, w1, p1, a2, w2, p2;
  double operator()(double x) const {
    return a0 + a1 * std::sin(w1 * x + p1) + a2 * std::cos(w2 * x + p2);
  }
  double derivative(double x) const {
    return a1 * w1 * std::cos(w1 * x + p1) - a2 * w2 * std::sin(w2 * x + p2);
  }
};

inline TrigPoly random_trig(std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> coef(-amp, amp);
  std::uniform_real_distribution<double> freq(0.5, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  return {coef(rng), coef(rng), freq(rng), phase(rng),
          coef(rng), freq(rng), phase(rng)};
}

}  // namespace detail

struct RandomProblemOptions {
  Interval interval = Interval::open(0.0, 1.0);
  bool identity_weight = false;
  double potential_amplitude = 0.8;
  double weight_amplitude = 0.35;
  double weight_margin = 0.3;
};

inline RandomProblem random_smooth_problem(std::uint64_t seed,
                                           const RandomProblemOptions& opts = {}) {
  std::mt19937_64 rng(seed);
  auto q11 = detail::random_trig(rng, opts.potential_amplitude);
  auto q12 = detail::random_trig(rng, opts.potential_amplitude);
  auto q22 = detail::random_trig(rng, opts.potential_amplitude);
  auto g11 = detail::random_trig(rng, opts.weight_amplitude);
  auto g12 = detail::random_trig(rng, opts.weight_amplitude);
  auto g21 = detail::random_trig(rng, opts.weight_amplitude);
  auto g22 = detail::random_trig(rng, opts.weight_amplitude);
  double margin = opts.weight_margin;

  RandomProblem out;
  out.expr.interval = opts.interval;
  out.expr.label = "random#" + std::to_string(seed);
  out.expr.Q = MatrixField::named(
      "random-Q#" + std::to_string(seed),
      [q11, q12, q22](double x) {
        double off = q12(x);
        return Mat2{{{q11(x), off}, {off, q22(x)}}};
      },
      [q11, q12, q22](double x) {
        double off = q12.derivative(x);
        return Mat2{{{q11.derivative(x), off}, {off, q22.derivative(x)}}};
      });
  if (opts.identity_weight) {
    out.expr.R = MatrixField::identity();
  } else {
    out.expr.R = MatrixField::named(
        "random-R#" + std::to_string(seed),
        [g11, g12, g21, g22, margin](double x) {
          Mat2 g{{{1.0 + g11(x), g12(x)}, {g21(x), 1.0 + g22(x)}}};
          return g.transpose() * g + margin * Mat2::identity();
        },
        [g11, g12, g21, g22](double x) {
          Mat2 g{{{1.0 + g11(x), g12(x)}, {g21(x), 1.0 + g22(x)}}};
          Mat2 gp{{{g11.derivative(x), g12.derivative(x)},
                   {g21.derivative(x), g22.derivative(x)}}};
          return gp.transpose() * g + g.transpose() * gp;
        });
  }
  std::uniform_real_distribution<double> ang(0.0, kPi);
  out.alpha = ang(rng);
  out.beta = ang(rng);
  return out;
}

// Seeded sample of complex spectral parameters in an annulus-free box.
inline std::vector<Complex> random_z_samples(std::uint64_t seed, std::size_t n,
                                             double re_max = 3.0,
                                             double im_min = 0.0,
                                             double im_max = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-re_max, re_max);
  std::uniform_real_distribution<double> im(im_min, im_max);
  std::vector<Complex> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({re(rng), im(rng)});
  return out;
}

}  // namespace wdirac
