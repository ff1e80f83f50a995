#pragma once

// Propagation of solutions of (tau - z)u = 0, i.e. of the first-order
// system f' = -J (z R(x) - Q(x)) f, together with transfer matrices and
// the Lagrange identity residual. Complex z is integrated as the
// equivalent four-real-dimensional system.

#include "wdirac/dirac.hpp"
#include "wdirac/quadrature.hpp"
#include "wdirac/rk.hpp"

namespace wdirac {

struct PropagationSettings {
  double rtol = 1e-11;
  double atol = 1e-13;
  double max_step = kInf;
  // Geometric ratio for schedules approaching a singular endpoint.
  double singular_ratio = 0.5;
  long max_steps = 50'000'000;

  StepControl control() const { return {rtol, atol, max_step, max_steps}; }
};

struct SolutionState {
  double x = 0.0;
  CVec2 f;
};

// Right-hand side  f' = -J (z R - Q) f  evaluated entrywise:
// with M = zR - Q,  f1' = M21 f1 + M22 f2,  f2' = -M11 f1 - M12 f2.
inline CVec2 dirac_rhs(const DiracExpression& expr, Complex z, double x,
                       const CVec2& f) {
  Mat2 q = expr.Q(x);
  Mat2 r = expr.R(x);
  Complex m00 = z * r(0, 0) - q(0, 0);
  Complex m01 = z * r(0, 1) - q(0, 1);
  Complex m10 = z * r(1, 0) - q(1, 0);
  Complex m11 = z * r(1, 1) - q(1, 1);
  return {m10 * f[0] + m11 * f[1], -(m00 * f[0] + m01 * f[1])};
}

using SolutionTrajectory = Trajectory<CVec2>;

inline SolutionState propagate(const DiracExpression& expr, Complex z,
                               const SolutionState& from, double to_x,
                               const PropagationSettings& st = {},
                               SolutionTrajectory* traj = nullptr) {
  auto rhs = [&expr, z](double x, const CVec2& f) {
    return dirac_rhs(expr, z, x, f);
  };
  CVec2 f = rk_integrate(rhs, from.x, from.f, to_x, st.control(), traj);
  return {to_x, f};
}

// As propagate, but renormalizes the state on huge growth; returns the
// solution together with the accumulated log scale factor.
inline std::pair<SolutionState, double> propagate_scaled(
    const DiracExpression& expr, Complex z, const SolutionState& from,
    double to_x, const PropagationSettings& st = {}) {
  auto rhs = [&expr, z](double x, const CVec2& f) {
    return dirac_rhs(expr, z, x, f);
  };
  double log_scale = 0.0;
  CVec2 f = rk_integrate(rhs, from.x, from.f, to_x, st.control(),
                         static_cast<SolutionTrajectory*>(nullptr), &log_scale);
  return {SolutionState{to_x, f}, log_scale};
}

// Linear map taking f(x0) to f(x1); determinant 1 because the system
// matrix is trace-free (tr(J S) = 0 for symmetric S).
inline CMat2 transfer_matrix(const DiracExpression& expr, Complex z, double x0,
                             double x1, const PropagationSettings& st = {}) {
  CMat2 t;
  CVec2 c0 = propagate(expr, z, {x0, CVec2{1.0, 0.0}}, x1, st).f;
  CVec2 c1 = propagate(expr, z, {x0, CVec2{0.0, 1.0}}, x1, st).f;
  t(0, 0) = c0[0];
  t(1, 0) = c0[1];
  t(0, 1) = c1[0];
  t(1, 1) = c1[1];
  return t;
}

// Lagrange identity residual
//   | W_beta(f,g) - W_alpha(f,g) - (conj(zeta) - z) int_alpha^beta f^T R g |
// for f a solution at conj(zeta) and g a solution at z, with the plain
// bilinear pairing throughout. Small values certify integrator consistency.
template <class FFn, class GFn>
double lagrange_residual(const DiracExpression& expr, Complex zeta, Complex z,
                         FFn&& f, GFn&& g, double alpha, double beta,
                         const QuadSettings& qs = {}) {
  CVec2 fa = f(alpha), ga = g(alpha);
  CVec2 fb = f(beta), gb = g(beta);
  Complex lhs = wronskian(fb, gb) - wronskian(fa, ga);
  auto integrand = [&](double x) -> Complex {
    CVec2 fv = f(x), gv = g(x);
    Mat2 r = expr.R(x);
    return fv[0] * (r(0, 0) * gv[0] + r(0, 1) * gv[1]) +
           fv[1] * (r(1, 0) * gv[0] + r(1, 1) * gv[1]);
  };
  Complex rhs = (std::conj(zeta) - z) * integrate(integrand, alpha, beta, qs);
  return std::abs(lhs - rhs);
}

}  // namespace wdirac
