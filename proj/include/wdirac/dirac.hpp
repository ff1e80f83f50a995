#pragma once

// Weighted Dirac differential expressions: an open interval (a,b), a
// symmetric potential matrix Q and a positive definite weight matrix R,
// both locally integrable. x is treated as dimensionless throughout.

#include "wdirac/common.hpp"
#include "wdirac/fields.hpp"
#include "wdirac/quadrature.hpp"

namespace wdirac {

struct Interval {
  double a = 0.0;
  double b = 1.0;

  static Interval open(double a, double b) {
    if (!(a < b)) throw ConfigError("interval requires a < b");
    if (std::isnan(a) || std::isnan(b)) throw ConfigError("interval NaN endpoint");
    return Interval{a, b};
  }
  bool left_finite() const { return std::isfinite(a); }
  bool right_finite() const { return std::isfinite(b); }
  bool contains(double x) const { return a < x && x < b; }
  double width() const { return b - a; }
  // A finite reference length for step/scale heuristics.
  double scale() const {
    if (left_finite() && right_finite()) return b - a;
    return 1.0;
  }
  // A concrete interior point (quadrature anchors, matching points).
  double midpoint() const {
    if (left_finite() && right_finite()) return 0.5 * (a + b);
    if (left_finite()) return a + 1.0;
    if (right_finite()) return b - 1.0;
    return 0.0;
  }
};

struct DiracExpression {
  Interval interval;
  MatrixField Q;  // potential, symmetric
  MatrixField R;  // weight, positive definite
  std::string label;
};

inline DiracExpression free_expression(Interval iv) {
  return {iv, MatrixField::constant(Mat2::zero()), MatrixField::identity(),
          "free"};
}

// ---------------------------------------------------------------------------
// Radial family: Q = [[q_sc, k/x + q_am], [k/x + q_am, -q_sc]], R = I on (0,b)
// ---------------------------------------------------------------------------

struct RadialSpec {
  double kappa = 0.0;
  ScalarField q_sc = ScalarField::constant(0.0);
  ScalarField q_am = ScalarField::constant(0.0);
  double b = kInf;
};

inline DiracExpression make_radial(const RadialSpec& spec) {
  if (spec.kappa < 0.0)
    throw ValidationError(
        "make_radial: kappa < 0 rejected; conjugate by the gamma = J "
        "transform to flip the sign pattern");
  if (!(spec.b > 0.0)) throw ConfigError("make_radial: b must be positive");
  if (spec.kappa == 0.5) {
    // Borderline case needs the extra log-integrability of the potentials.
    double c = std::isfinite(spec.b) ? std::min(1.0, 0.5 * spec.b) : 1.0;
    auto qs = spec.q_sc, qa = spec.q_am;
    auto logweight = [qs, qa](double x) {
      return (std::abs(qs(x)) + std::abs(qa(x))) * std::abs(std::log(x));
    };
    auto chk = integrate_to_endpoint(logweight, 0.0, c, 0.5, 60, 1e-6);
    if (!chk.converged)
      throw ValidationError(
          "make_radial: kappa = 1/2 requires integrable (|q_sc|+|q_am|)|log x| "
          "near 0; nested quadrature did not converge after " +
          std::to_string(chk.levels) + " levels");
  }
  double kappa = spec.kappa;
  ScalarField qs = spec.q_sc, qa = spec.q_am;
  auto q = MatrixField::named(
      "radial(kappa=" + std::to_string(kappa) + ")",
      [kappa, qs, qa](double x) {
        if (x <= 0.0)
          throw EvalDomainError("radial potential defined for x > 0", x);
        double w = kappa / x + qa(x);
        double d = qs(x);
        return Mat2{{{d, w}, {w, -d}}};
      });
  return {Interval::open(0.0, spec.b), q, MatrixField::identity(),
          "radial"};
}

// ---------------------------------------------------------------------------
// Hypothesis validation by finite sampling plus quadrature on compacts
// ---------------------------------------------------------------------------

struct SamplePlan {
  std::vector<std::pair<double, double>> compacts;
  int points_per_compact = 1024;
  double symmetry_tol = 1e-12;

  // Default plan: one compact well inside the interval.
  static SamplePlan standard(const Interval& iv) {
    SamplePlan p;
    double lo = iv.left_finite() ? iv.a + 1e-3 * iv.scale() : iv.midpoint() - 4.0;
    double hi = iv.right_finite() ? iv.b - 1e-3 * iv.scale() : iv.midpoint() + 4.0;
    p.compacts.push_back({lo, hi});
    return p;
  }
};

struct ValidationReport {
  bool ok = true;
  double max_symmetry_residual = 0.0;
  double min_weight_eigenvalue = kInf;
  double offending_x = kNaN;
  struct CompactCheck {
    double lo, hi;
    double q_norm_integral;
    double r_norm_integral;
  };
  std::vector<CompactCheck> compacts;
  std::vector<std::string> notes;
};

inline ValidationReport validate_hypotheses(const DiracExpression& expr,
                                            const SamplePlan& plan) {
  if (plan.compacts.empty())
    throw ConfigError("validate_hypotheses: sample plan needs a compact");
  ValidationReport rep;
  for (auto [lo, hi] : plan.compacts) {
    if (!(expr.interval.a <= lo && hi <= expr.interval.b) || !(lo < hi))
      throw ConfigError("validate_hypotheses: compact not inside interval");
    int n = std::max(2, plan.points_per_compact);
    for (int i = 0; i < n; ++i) {
      double x = lo + (hi - lo) * (i + 0.5) / n;
      Mat2 q = expr.Q(x);
      Mat2 r = expr.R(x);
      double sym = std::abs(q(0, 1) - q(1, 0));
      if (sym > rep.max_symmetry_residual) {
        rep.max_symmetry_residual = sym;
        if (sym > plan.symmetry_tol) rep.offending_x = x;
      }
      double mineig = sym_eigenvalues(r)[1];
      if (mineig < rep.min_weight_eigenvalue) {
        rep.min_weight_eigenvalue = mineig;
        if (mineig <= 0.0) rep.offending_x = x;
      }
    }
    QuadSettings qs;
    qs.rtol = 1e-8;
    double qn = integrate([&](double x) { return expr.Q(x).frobenius(); }, lo,
                          hi, qs);
    double rn = integrate([&](double x) { return expr.R(x).frobenius(); }, lo,
                          hi, qs);
    rep.compacts.push_back({lo, hi, qn, rn});
    if (!std::isfinite(qn) || !std::isfinite(rn)) {
      rep.ok = false;
      rep.notes.push_back("coefficient norm not integrable on compact");
    }
  }
  if (rep.max_symmetry_residual > plan.symmetry_tol) {
    rep.ok = false;
    rep.notes.push_back("potential not symmetric at sampled point x=" +
                        std::to_string(rep.offending_x));
  }
  if (rep.min_weight_eigenvalue <= 0.0) {
    rep.ok = false;
    rep.notes.push_back("weight not positive definite at sampled point x=" +
                        std::to_string(rep.offending_x));
  }
  return rep;
}

}  // namespace wdirac
