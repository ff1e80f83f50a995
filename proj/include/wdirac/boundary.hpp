#pragma once

// Endpoint classification (regular / limit circle / limit point) and
// separated boundary conditions. Verdicts come from truncated R-norms of
// two independent test solutions along a geometric approach schedule;
// borderline behavior is reported as inconclusive, never guessed.

#include "wdirac/ode.hpp"

namespace wdirac {

enum class EndpointSide { kLeft, kRight };

inline double endpoint_of(const Interval& iv, EndpointSide side) {
  return side == EndpointSide::kLeft ? iv.a : iv.b;
}

struct BoundaryCondition {
  enum class Kind { kAngle, kFrame, kReference, kLimitPoint };

  EndpointSide side = EndpointSide::kLeft;
  Kind kind = Kind::kAngle;
  // kAngle: condition f1 cos(alpha) + f2 sin(alpha) -> 0 at the endpoint.
  double alpha = 0.0;
  // kFrame: explicit z-independent endpoint data for the (Theta, Phi) pair.
  Vec2 phi_data{}, theta_data{};
  // kReference: real reference solution u (condition W(f,u) -> 0) and a
  // complementary real solution v with W(v, u) = 1 (used for Theta).
  VectorField2 u_ref, v_ref;

  static BoundaryCondition angle(EndpointSide side, double alpha) {
    if (!(alpha >= 0.0 && alpha < kPi))
      throw ConfigError("boundary angle must lie in [0, pi)");
    BoundaryCondition bc;
    bc.side = side;
    bc.kind = Kind::kAngle;
    bc.alpha = alpha;
    return bc;
  }

  static BoundaryCondition frame(EndpointSide side, Vec2 phi_data,
                                 Vec2 theta_data) {
    if (std::abs(wronskian(theta_data, phi_data) - 1.0) > 1e-9)
      throw ConfigError("frame boundary data must satisfy W(theta,phi) = 1");
    BoundaryCondition bc;
    bc.side = side;
    bc.kind = Kind::kFrame;
    bc.phi_data = phi_data;
    bc.theta_data = theta_data;
    return bc;
  }

  static BoundaryCondition reference(EndpointSide side, VectorField2 u,
                                     VectorField2 v = {}) {
    BoundaryCondition bc;
    bc.side = side;
    bc.kind = Kind::kReference;
    bc.u_ref = std::move(u);
    bc.v_ref = std::move(v);
    return bc;
  }

  static BoundaryCondition limit_point(EndpointSide side) {
    BoundaryCondition bc;
    bc.side = side;
    bc.kind = Kind::kLimitPoint;
    return bc;
  }

  // Endpoint data vectors for the regular construction.
  Vec2 condition_data() const {
    if (kind == Kind::kAngle)
      return {{-std::sin(alpha), std::cos(alpha)}};
    if (kind == Kind::kFrame) return phi_data;
    throw ConfigError("boundary condition carries no constant data");
  }
  Vec2 complement_data() const {
    if (kind == Kind::kAngle) return {{std::cos(alpha), std::sin(alpha)}};
    if (kind == Kind::kFrame) return theta_data;
    throw ConfigError("boundary condition carries no constant data");
  }
};

// ---------------------------------------------------------------------------
// Endpoint classification
// ---------------------------------------------------------------------------

struct EndpointClassification {
  enum class Verdict { kRegular, kLimitCircle, kLimitPoint, kInconclusive };
  Verdict verdict = Verdict::kInconclusive;
  // Truncation points and accumulated truncated R-norms per test solution.
  std::vector<double> truncations;
  std::array<std::vector<double>, 2> truncated_norms;
  std::string note;

  bool needs_condition() const {
    return verdict == Verdict::kRegular || verdict == Verdict::kLimitCircle;
  }
};

struct ClassifySettings {
  PropagationSettings prop;
  double ratio = 0.5;
  int max_levels = 40;
  double rtol = 1e-8;
};

namespace detail {

enum class NormTrend { kConvergent, kDivergent, kUnclear };

inline NormTrend increment_trend(const std::vector<double>& inc, double total,
                                 double rtol) {
  if (inc.size() < 4) return NormTrend::kUnclear;
  std::size_t n = inc.size();
  double i0 = inc[n - 3], i1 = inc[n - 2], i2 = inc[n - 1];
  if (i2 <= std::max(rtol * total, 1e-300)) return NormTrend::kConvergent;
  if (i0 <= 0 || i1 <= 0 || i2 <= 0) return NormTrend::kUnclear;
  double r1 = i1 / i0, r2 = i2 / i1;
  if (r1 < 0.95 && r2 < 0.95 && std::abs(r1 - r2) < 0.05 * std::max(r1, r2))
    return NormTrend::kConvergent;
  if (r1 > 1.05 && r2 > 1.05) return NormTrend::kDivergent;
  if (total > 1e150) return NormTrend::kDivergent;
  return NormTrend::kUnclear;
}

}  // namespace detail

inline EndpointClassification classify_endpoint(
    const DiracExpression& expr, EndpointSide side,
    Complex z_test = Complex(0.0, 1.0), const ClassifySettings& cs = {}) {
  EndpointClassification out;
  const Interval& iv = expr.interval;
  double e = endpoint_of(iv, side);
  double x0 = iv.midpoint();

  // Regular endpoint: finite with coefficients integrable up to it.
  if (std::isfinite(e)) {
    auto qn = integrate_to_endpoint(
        [&](double x) { return expr.Q(x).frobenius(); }, e, x0, cs.ratio,
        cs.max_levels, cs.rtol);
    auto rn = integrate_to_endpoint(
        [&](double x) { return expr.R(x).frobenius(); }, e, x0, cs.ratio,
        cs.max_levels, cs.rtol);
    if (qn.converged && rn.converged) {
      out.verdict = EndpointClassification::Verdict::kRegular;
      out.note = "coefficient norms integrable up to the endpoint";
      return out;
    }
  }

  // Truncation schedule toward the endpoint.
  std::vector<double> schedule;
  {
    double cur = x0;
    for (int k = 0; k < cs.max_levels; ++k) {
      double nxt = std::isfinite(e)
                       ? e + (cur - e) * cs.ratio
                       : x0 + std::copysign(std::max(1.0, std::abs(x0)), e) *
                                 std::pow(2.0, k);
      schedule.push_back(nxt);
      cur = nxt;
    }
  }
  out.truncations = schedule;

  std::array<detail::NormTrend, 2> trends{detail::NormTrend::kUnclear,
                                          detail::NormTrend::kUnclear};
  for (int s = 0; s < 2; ++s) {
    CVec2 data = (s == 0) ? CVec2{1.0, 0.0} : CVec2{0.0, 1.0};
    SolutionState cur{x0, data};
    std::vector<double> incs;
    double total = 0.0;
    for (double xk : schedule) {
      SolutionTrajectory traj;
      SolutionState nxt;
      try {
        nxt = propagate(expr, z_test, cur, xk, cs.prop, &traj);
      } catch (const PropagationError&) {
        trends[s] = detail::NormTrend::kDivergent;
        break;
      }
      auto seg = [&](double x) {
        CVec2 f = traj.eval(x);
        Mat2 r = expr.R(x);
        CVec2 cf = conj(f);
        return std::real(cf[0] * (r(0, 0) * f[0] + r(0, 1) * f[1]) +
                         cf[1] * (r(1, 0) * f[0] + r(1, 1) * f[1]));
      };
      QuadSettings qs;
      qs.rtol = 1e-8;
      double inc = std::abs(
          integrate(seg, std::min(cur.x, xk), std::max(cur.x, xk), qs));
      total += inc;
      incs.push_back(inc);
      out.truncated_norms[s].push_back(total);
      cur = nxt;
      if (norm2(cur.f) > 1e90) {
        trends[s] = detail::NormTrend::kDivergent;
        break;
      }
      auto t = detail::increment_trend(incs, total, cs.rtol);
      if (t != detail::NormTrend::kUnclear) {
        trends[s] = t;
        break;
      }
    }
  }

  using V = EndpointClassification::Verdict;
  if (trends[0] == detail::NormTrend::kDivergent ||
      trends[1] == detail::NormTrend::kDivergent) {
    out.verdict = V::kLimitPoint;
    out.note = "a test solution has divergent truncated R-norm";
  } else if (trends[0] == detail::NormTrend::kConvergent &&
             trends[1] == detail::NormTrend::kConvergent) {
    out.verdict = V::kLimitCircle;
    out.note = "both test solutions have convergent truncated R-norms";
  } else {
    out.verdict = V::kInconclusive;
    out.note =
        "truncated-norm extrapolation did not stabilize within the schedule";
  }
  return out;
}

}  // namespace wdirac
