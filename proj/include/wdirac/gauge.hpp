#pragma once

// Liouville transformations f(x) = Gamma(x) ftilde(eta(x)) with eta an
// increasing locally absolutely continuous bijection and det Gamma == 1.
// pushforward() solves the coefficient relations for the tilde side:
//   Rt(eta(x)) = Gamma^T R Gamma / eta',
//   Qt(eta(x)) = (Gamma^T Q Gamma + Gamma^T J Gamma') / eta'.
// The four normalizations (constant weight, trace-free potential, zero
// potential, unit weight determinant) and the rotation gauge are special
// cases; invariance_harness turns spectral invariance into a measurement.

#include "wdirac/debranges.hpp"

namespace wdirac {

// ---------------------------------------------------------------------------
// Reparametrization eta with derivative and inverse
// ---------------------------------------------------------------------------

class Reparam {
  struct Raw {};
  explicit Reparam(Raw) {}

 public:
  Reparam() {
    fwd_ = [](double x) { return x; };
    der_ = [](double) { return 1.0; };
    inv_ = [](double y) { return y; };
    describe_ = "id";
  }

  static Reparam shift(double eta0) {
    Reparam r{Raw{}};
    r.fwd_ = [eta0](double x) { return x + eta0; };
    r.der_ = [](double) { return 1.0; };
    r.inv_ = [eta0](double y) { return y - eta0; };
    r.describe_ = eta0 == 0.0 ? "id" : ("x+" + std::to_string(eta0));
    return r;
  }

  // Closed-form eta on a given domain; derivative from the field, inverse
  // by bracketed root finding.
  static Reparam expression(ScalarField eta, Interval domain) {
    Reparam r{Raw{}};
    auto f = std::make_shared<ScalarField>(std::move(eta));
    r.fwd_ = [f](double x) { return (*f)(x); };
    r.der_ = [f, domain](double x) { return f->derivative(x, domain.scale()); };
    r.inv_ = [f, domain](double y) {
      double guard = 1e-12 * domain.scale();
      double lo = domain.left_finite() ? domain.a + guard : domain.midpoint();
      double hi = domain.right_finite() ? domain.b - guard : domain.midpoint();
      // Expand brackets for unbounded domains.
      for (int k = 0; k < 80 && (*f)(lo) > y; ++k)
        lo = domain.left_finite() ? domain.a + (lo - domain.a) * 0.5 : lo - std::pow(2.0, k);
      for (int k = 0; k < 80 && (*f)(hi) < y; ++k)
        hi = domain.right_finite() ? domain.b - (domain.b - hi) * 0.5 : hi + std::pow(2.0, k);
      double flo = (*f)(lo) - y, fhi = (*f)(hi) - y;
      if (flo > 0 || fhi < 0) {
        if (std::abs(flo) < std::abs(fhi)) return lo;
        return hi;
      }
      return brent_root([&](double x) { return (*f)(x) - y; }, lo, hi, flo,
                        fhi, 1e-15);
    };
    r.describe_ = f->describe();
    return r;
  }

  // eta(x) = anchor + int_anchor^x g with g > 0 (so eta == id when g == 1).
  static Reparam cumulative(ScalarField g, double anchor, Interval domain) {
    Reparam r{Raw{}};
    auto cum = std::make_shared<CumulativeIntegral>(
        g, anchor, anchor, std::max(1e-3, 0.05 * domain.scale()),
        QuadSettings{1e-12, 1e-15});
    double guard = 1e-12 * domain.scale();
    double lo = domain.left_finite() ? domain.a + guard : -kInf;
    double hi = domain.right_finite() ? domain.b - guard : kInf;
    r.fwd_ = [cum](double x) { return (*cum)(x); };
    r.der_ = [cum](double x) { return cum->integrand(x); };
    r.inv_ = [cum, lo, hi, anchor](double y) {
      double blo = std::isfinite(lo) ? lo : anchor, bhi = std::isfinite(hi) ? hi : anchor;
      for (int k = 0; !std::isfinite(lo) && (*cum)(blo) > y && k < 80; ++k)
        blo -= std::pow(2.0, k);
      for (int k = 0; !std::isfinite(hi) && (*cum)(bhi) < y && k < 80; ++k)
        bhi += std::pow(2.0, k);
      return cum->inverse(y, blo, bhi);
    };
    r.describe_ = "cumulative(" + g.describe() + ")";
    return r;
  }

  // Inverse map as a Reparam in its own right.
  Reparam inverted(Interval codomain) const {
    Reparam r{Raw{}};
    Reparam base = *this;
    r.fwd_ = [base](double y) { return base.inverse(y); };
    r.der_ = [base](double y) {
      double x = base.inverse(y);
      return 1.0 / base.derivative(x);
    };
    r.inv_ = [base](double x) { return base(x); };
    r.describe_ = "inverse(" + describe_ + ")";
    (void)codomain;
    return r;
  }

  double operator()(double x) const { return fwd_(x); }
  double derivative(double x) const { return der_(x); }
  double inverse(double y) const { return inv_(y); }
  const std::string& describe() const { return describe_; }

 private:
  std::function<double(double)> fwd_, der_, inv_;
  std::string describe_;
};

// ---------------------------------------------------------------------------
// The transform object
// ---------------------------------------------------------------------------

struct LiouvilleTransform {
  Reparam eta;
  MatrixField gamma;
  Interval domain;    // (a, b)
  Interval codomain;  // (eta(a), eta(b))
  std::string describe;

  static LiouvilleTransform identity(Interval domain) {
    return {Reparam::shift(0.0), MatrixField::identity(), domain, domain,
            "identity"};
  }
};

namespace detail {

// Image interval under eta, by endpoint limits (improper where needed).
inline Interval map_interval(const Reparam& eta, const Interval& iv) {
  auto limit_at = [&](double endpoint, bool left) {
    if (!std::isfinite(endpoint)) {
      // Monotone: probe outward until stable or clearly unbounded.
      double x = iv.midpoint(), prev = eta(x);
      for (int k = 0; k < 60; ++k) {
        x = left ? x - std::pow(2.0, k) : x + std::pow(2.0, k);
        double v = eta(x);
        if (std::abs(v - prev) < 1e-12 * std::max(1.0, std::abs(v))) return v;
        prev = v;
        if (std::abs(v) > 1e100) break;
      }
      return left ? -kInf : kInf;
    }
    double w = iv.scale();
    double prev = kNaN;
    for (int k = 8; k <= 48; ++k) {
      double x = endpoint + (left ? 1.0 : -1.0) * w * std::pow(0.5, k);
      double v;
      try {
        v = eta(x);
      } catch (const Error&) {
        break;
      }
      if (std::isfinite(prev) &&
          std::abs(v - prev) < 1e-11 * std::max(1.0, std::abs(v)))
        return v;
      prev = v;
      if (std::abs(v) > 1e100) return left ? -kInf : kInf;
    }
    return prev;  // best available limit
  };
  double ta = limit_at(iv.a, true);
  double tb = limit_at(iv.b, false);
  if (!(ta < tb))
    throw ValidationError("eta does not map the interval increasingly");
  return Interval{ta, tb};
}

inline void check_transform(const LiouvilleTransform& t, int samples = 257) {
  const Interval& iv = t.domain;
  double lo = iv.left_finite() ? iv.a + 1e-3 * iv.scale() : iv.midpoint() - 4;
  double hi = iv.right_finite() ? iv.b - 1e-3 * iv.scale() : iv.midpoint() + 4;
  for (int i = 0; i < samples; ++i) {
    double x = lo + (hi - lo) * (i + 0.5) / samples;
    double d = t.eta.derivative(x);
    if (!(d > 0))
      throw ValidationError("eta' <= 0 at sampled point", x);
    double det = t.gamma(x).det();
    if (std::abs(det - 1.0) > 1e-10)
      throw ValidationError("det Gamma != 1 at sampled point (det=" +
                                std::to_string(det) + ")",
                            x);
  }
}

}  // namespace detail

struct PushforwardOptions {
  bool validate = true;
  int validate_points = 512;
  // Sample the transformed coefficients onto a cubic grid (fast downstream
  // evaluation); exact computed fields otherwise.
  bool gridded = false;
  int grid_nodes = 4097;
};

inline DiracExpression pushforward(const DiracExpression& expr,
                                   const LiouvilleTransform& t,
                                   const PushforwardOptions& opts = {}) {
  detail::check_transform(t);
  Interval tilde = t.codomain;
  Reparam eta = t.eta;
  MatrixField gamma = t.gamma;
  MatrixField q = expr.Q, r = expr.R;
  Interval dom = expr.interval;
  double scale = dom.scale();

  auto q_tilde = [eta, gamma, q, dom, scale](double y) {
    double x = eta.inverse(y);
    double w = eta.derivative(x);
    Mat2 g = gamma(x);
    Mat2 gp = gamma.derivative(x, scale, dom.a, dom.b);
    Mat2 qt = (1.0 / w) * (g.transpose() * q(x) * g + g.transpose() * kJ * gp);
    // Symmetric analytically (det Gamma == 1); strip derivative noise.
    return 0.5 * (qt + qt.transpose());
  };
  auto r_tilde = [eta, gamma, r](double y) {
    double x = eta.inverse(y);
    double w = eta.derivative(x);
    Mat2 g = gamma(x);
    return (1.0 / w) * (g.transpose() * r(x) * g);
  };

  DiracExpression out;
  out.interval = tilde;
  out.label = expr.label + "~" + t.describe;
  bool gridded = opts.gridded && tilde.left_finite() && tilde.right_finite();
  if (!gridded) {
    out.Q = MatrixField::named("pushforward-Q(" + t.describe + ")", q_tilde);
    out.R = MatrixField::named("pushforward-R(" + t.describe + ")", r_tilde);
  } else {
    int n = opts.grid_nodes;
    // Endpoint nodes take the guarded-interior limits of the exact fields,
    // so solution paths anchored at the endpoints stay covered.
    double lo = tilde.left_finite() ? tilde.a : tilde.midpoint() - 8;
    double hi = tilde.right_finite() ? tilde.b : tilde.midpoint() + 8;
    std::vector<double> nodes(n);
    std::array<std::vector<double>, 4> qv, rv;
    for (auto& v : qv) v.resize(n);
    for (auto& v : rv) v.resize(n);
    for (int i = 0; i < n; ++i)
      nodes[i] = lo + (hi - lo) * double(i) / (n - 1);
    double guard = 1e-11 * std::max(1.0, tilde.scale());
    parallel_for(n, [&](std::size_t i) {
      double y = std::min(std::max(nodes[i], lo + guard), hi - guard);
      Mat2 qm = q_tilde(y);
      Mat2 rm = r_tilde(y);
      for (int k = 0; k < 4; ++k) {
        qv[k][i] = qm(k / 2, k % 2);
        rv[k][i] = rm(k / 2, k % 2);
      }
    });
    out.Q = MatrixField::grid(nodes, std::move(qv), GridInterp::kCubic);
    out.R = MatrixField::grid(std::move(nodes), std::move(rv),
                              GridInterp::kCubic);
  }
  if (opts.validate) {
    SamplePlan plan = SamplePlan::standard(out.interval);
    plan.points_per_compact = opts.validate_points;
    auto rep = validate_hypotheses(out, plan);
    if (!rep.ok)
      throw ValidationError("pushforward produced an invalid expression: " +
                            (rep.notes.empty() ? "?" : rep.notes.front()));
  }
  return out;
}

// Inverse direction: recover the expression on the original interval from
// the tilde side, Q = Gamma^{-T} [eta' Qt(eta) - Gamma^T J Gamma'] Gamma^{-1}.
inline DiracExpression pullback(const DiracExpression& tilde_expr,
                                const LiouvilleTransform& t,
                                const PushforwardOptions& opts = {}) {
  Reparam eta = t.eta;
  MatrixField gamma = t.gamma;
  MatrixField qt = tilde_expr.Q, rt = tilde_expr.R;
  Interval dom = t.domain;
  double scale = dom.scale();
  auto q_orig = [eta, gamma, qt, dom, scale](double x) {
    double w = eta.derivative(x);
    Mat2 g = gamma(x);
    Mat2 gi = inverse(g);
    Mat2 gp = gamma.derivative(x, scale, dom.a, dom.b);
    Mat2 qo =
        gi.transpose() * (w * qt(eta(x)) - g.transpose() * kJ * gp) * gi;
    return 0.5 * (qo + qo.transpose());
  };
  auto r_orig = [eta, gamma, rt](double x) {
    double w = eta.derivative(x);
    Mat2 g = gamma(x);
    Mat2 gi = inverse(g);
    return gi.transpose() * (w * rt(eta(x))) * gi;
  };
  DiracExpression out;
  out.interval = dom;
  out.label = tilde_expr.label + "~pullback";
  out.Q = MatrixField::named("pullback-Q", q_orig);
  out.R = MatrixField::named("pullback-R", r_orig);
  if (opts.validate) {
    SamplePlan plan = SamplePlan::standard(out.interval);
    plan.points_per_compact = opts.validate_points;
    auto rep = validate_hypotheses(out, plan);
    if (!rep.ok)
      throw ValidationError("pullback produced an invalid expression");
  }
  return out;
}

// Composition: apply t1 first, then t2 on the tilde side.
inline LiouvilleTransform compose(const LiouvilleTransform& t1,
                                  const LiouvilleTransform& t2) {
  Reparam e1 = t1.eta, e2 = t2.eta;
  MatrixField g1 = t1.gamma, g2 = t2.gamma;
  Interval dom = t1.domain;
  double scale = dom.scale();
  Reparam eta;
  {
    Reparam r;
    ScalarField f = ScalarField::named(
        "compose", [e1, e2](double x) { return e2(e1(x)); },
        [e1, e2](double x) { return e2.derivative(e1(x)) * e1.derivative(x); });
    eta = Reparam::expression(f, dom);
  }
  auto gfun = [g1, g2, e1](double x) { return g1(x) * g2(e1(x)); };
  MatrixField gamma = MatrixField::named(
      "compose-gamma", gfun, [g1, g2, e1, dom, scale](double x) {
        Mat2 d1 = g1.derivative(x, scale, dom.a, dom.b);
        Mat2 d2 = g2.derivative(e1(x), scale);
        return d1 * g2(e1(x)) + e1.derivative(x) * (g1(x) * d2);
      });
  return {eta, gamma, dom, t2.codomain,
          t1.describe + ";" + t2.describe};
}

inline LiouvilleTransform inverse(const LiouvilleTransform& t) {
  Reparam eta_inv = t.eta.inverted(t.domain);
  Reparam eta = t.eta;
  MatrixField g = t.gamma;
  Interval dom = t.domain;
  double scale = dom.scale();
  MatrixField gamma_inv = MatrixField::named(
      "inverse-gamma",
      [g, eta](double y) { return inverse(g(eta.inverse(y))); },
      [g, eta, dom, scale](double y) {
        double x = eta.inverse(y);
        Mat2 gi = inverse(g(x));
        Mat2 gp = g.derivative(x, scale, dom.a, dom.b);
        // d/dy Gamma(x(y))^{-1} = -G^{-1} G' G^{-1} / eta'(x)
        return (-1.0 / eta.derivative(x)) * (gi * gp * gi);
      });
  return {eta_inv, gamma_inv, t.codomain, t.domain, "inverse(" + t.describe + ")"};
}

// ---------------------------------------------------------------------------
// The four normalizations and the rotation gauge
// ---------------------------------------------------------------------------

struct NormalizationResult {
  DiracExpression expr;
  LiouvilleTransform transform;
};

namespace detail {

// Gamma = sqrt(eta' R^{-1}) (spd square root), with the exact derivative
// from the Sylvester relation Gamma Gamma' + Gamma' Gamma = S' whenever
// the weight carries one.
inline MatrixField weight_sqrt_field(MatrixField r, ScalarField etap) {
  auto eval = [r, etap](double x) {
    return spd_sqrt(etap(x) * inverse(r(x)));
  };
  if (!r.has_exact_derivative() || !etap.has_exact_derivative())
    return MatrixField::named("weight-sqrt", eval);
  auto deriv = [r, etap](double x) {
    Mat2 rm = r(x);
    Mat2 ri = inverse(rm);
    double ep = etap(x);
    Mat2 s = ep * ri;
    Mat2 sp = etap.derivative(x) * ri - ep * (ri * r.derivative(x) * ri);
    Mat2 g = spd_sqrt(s);
    return solve_sylvester(g, sp);
  };
  return MatrixField::named("weight-sqrt", eval, deriv);
}

// sqrt(det R) with the exact derivative tr(adj R R') / (2 sqrt(det R)).
inline ScalarField sqrt_det_field(MatrixField r) {
  auto eval = [r](double x) {
    double d = r(x).det();
    if (!(d > 0)) throw EvalDomainError("det R not positive", x);
    return std::sqrt(d);
  };
  if (!r.has_exact_derivative())
    return ScalarField::named("sqrt(detR)", eval);
  auto deriv = [r](double x) {
    Mat2 rm = r(x);
    Mat2 rp = r.derivative(x);
    double d = rm.det();
    if (!(d > 0)) throw EvalDomainError("det R not positive", x);
    Mat2 adj{{{rm(1, 1), -rm(0, 1)}, {-rm(1, 0), rm(0, 0)}}};
    double ddet = (adj * rp).trace();
    return ddet / (2.0 * std::sqrt(d));
  };
  return ScalarField::named("sqrt(detR)", eval, deriv);
}

}  // namespace detail

// Constant weight: eta' = sqrt(det R), Gamma = sqrt(eta' R^{ -1}) (spd),
// pushforward has R = I.
inline NormalizationResult normalize_weight(const DiracExpression& expr,
                                            const PushforwardOptions& opts = {}) {
  ScalarField etap = detail::sqrt_det_field(expr.R);
  double anchor = expr.interval.midpoint();
  Reparam eta = Reparam::cumulative(etap, anchor, expr.interval);
  MatrixField gamma = detail::weight_sqrt_field(expr.R, etap);
  LiouvilleTransform t{eta, gamma, expr.interval,
                       detail::map_interval(eta, expr.interval),
                       "normalize-weight"};
  return {pushforward(expr, t, opts), t};
}

// Trace-free potential (requires R = I): phi' = tr Q / 2, Gamma = e^{phi J}.
inline NormalizationResult normalize_trace(const DiracExpression& expr,
                                           const PushforwardOptions& opts = {}) {
  {
    SamplePlan plan = SamplePlan::standard(expr.interval);
    plan.points_per_compact = 64;
    for (auto [lo, hi] : plan.compacts)
      for (int i = 0; i < plan.points_per_compact; ++i) {
        double x = lo + (hi - lo) * (i + 0.5) / plan.points_per_compact;
        if ((expr.R(x) - Mat2::identity()).frobenius() > 1e-9)
          throw ConfigError("normalize_trace requires R = I");
      }
  }
  MatrixField q = expr.Q;
  ScalarField half_trace = ScalarField::named(
      "trQ/2", [q](double x) { return 0.5 * q(x).trace(); });
  auto phi_cum = std::make_shared<CumulativeIntegral>(
      half_trace, expr.interval.midpoint(), 0.0,
      std::max(1e-3, 0.05 * expr.interval.scale()), QuadSettings{1e-12, 1e-15});
  MatrixField gamma = MatrixField::named(
      "rotation(phi)",
      [phi_cum](double x) {
        double p = (*phi_cum)(x);
        double c = std::cos(p), s = std::sin(p);
        return Mat2{{{c, -s}, {s, c}}};
      },
      [phi_cum, half_trace](double x) {
        double p = (*phi_cum)(x);
        double c = std::cos(p), s = std::sin(p);
        // Gamma' = phi' J Gamma
        return half_trace(x) * (kJ * Mat2{{{c, -s}, {s, c}}});
      });
  LiouvilleTransform t{Reparam::shift(0.0), gamma, expr.interval,
                       expr.interval, "normalize-trace"};
  return {pushforward(expr, t, opts), t};
}

// Zero potential: Gamma solves J Gamma' + Q Gamma = 0 with Gamma(x0) = I;
// det Gamma is constant (= 1) because tr(JQ) = 0 for symmetric Q.
inline NormalizationResult kill_potential(const DiracExpression& expr,
                                          const PushforwardOptions& opts = {}) {
  MatrixField q = expr.Q;
  double x0 = expr.interval.midpoint();
  PropagationSettings prop;
  prop.rtol = 1e-12;
  prop.atol = 1e-14;
  // Lazily extended two-sided trajectory of the matrix ODE.
  struct OdeGamma {
    DiracExpression expr;
    double x0;
    PropagationSettings prop;
    mutable std::mutex mu;
    mutable Trajectory<Mat2> up, down;
    mutable double hi_done, lo_done;

    OdeGamma(DiracExpression e, double anchor, PropagationSettings p)
        : expr(std::move(e)), x0(anchor), prop(p), hi_done(anchor),
          lo_done(anchor) {}

    Mat2 rhs(double x, const Mat2& g) const { return kJ * expr.Q(x) * g; }

    Mat2 eval(double x) const {
      std::lock_guard<std::mutex> lock(mu);
      if (x == x0) return Mat2::identity();
      auto rhsf = [this](double xx, const Mat2& g) { return rhs(xx, g); };
      double guard = 1e-12 * expr.interval.scale();
      if (x > x0) {
        if (x > hi_done) {
          double target =
              std::max(x, hi_done + 0.1 * expr.interval.scale());
          if (expr.interval.right_finite())
            target = std::min(target, expr.interval.b - guard);
          target = std::max(target, x);
          Mat2 start = up.empty() ? Mat2::identity() : up.eval(hi_done);
          rk_integrate(rhsf, hi_done, start, target, prop.control(), &up);
          hi_done = target;
        }
        return up.eval(x);
      }
      if (x < lo_done) {
        double target = std::min(x, lo_done - 0.1 * expr.interval.scale());
        if (expr.interval.left_finite())
          target = std::max(target, expr.interval.a + guard);
        target = std::min(target, x);
        Mat2 start = down.empty() ? Mat2::identity() : down.eval(lo_done);
        rk_integrate(rhsf, lo_done, start, target, prop.control(), &down);
        lo_done = target;
      }
      return down.eval(x);
    }
  };
  auto og = std::make_shared<OdeGamma>(expr, x0, prop);
  MatrixField gamma = MatrixField::named(
      "potential-orbit",
      [og](double x) { return og->eval(x); },
      [og](double x) { return og->rhs(x, og->eval(x)); });
  LiouvilleTransform t{Reparam::shift(0.0), gamma, expr.interval,
                       expr.interval, "kill-potential"};
  return {pushforward(expr, t, opts), t};
}

// Unit weight determinant: Gamma = I, eta' = sqrt(det R).
inline NormalizationResult normalize_det(const DiracExpression& expr,
                                         const PushforwardOptions& opts = {}) {
  ScalarField etap = detail::sqrt_det_field(expr.R);
  Reparam eta =
      Reparam::cumulative(etap, expr.interval.midpoint(), expr.interval);
  LiouvilleTransform t{eta, MatrixField::identity(), expr.interval,
                       detail::map_interval(eta, expr.interval),
                       "normalize-det"};
  return {pushforward(expr, t, opts), t};
}

// Rotation gauge on R = I expressions:
// Qt(eta0 + x) = e^{-phi J} Q e^{phi J} - phi' I.
inline NormalizationResult gauge_rotate(const DiracExpression& expr,
                                        const ScalarField& phi, double eta0,
                                        const PushforwardOptions& opts = {}) {
  ScalarField ph = phi;
  double scale = expr.interval.scale();
  MatrixField gamma = MatrixField::named(
      "rotation(" + phi.describe() + ")",
      [ph](double x) {
        double p = ph(x);
        double c = std::cos(p), s = std::sin(p);
        return Mat2{{{c, -s}, {s, c}}};
      },
      [ph, scale](double x) {
        double p = ph(x);
        double c = std::cos(p), s = std::sin(p);
        return ph.derivative(x, scale) * (kJ * Mat2{{{c, -s}, {s, c}}});
      });
  Interval dom = expr.interval;
  Interval cod = Interval{dom.a + eta0, dom.b + eta0};
  LiouvilleTransform t{Reparam::shift(eta0), gamma, dom, cod,
                       "rotation-gauge"};
  return {pushforward(expr, t, opts), t};
}

// ---------------------------------------------------------------------------
// Invariance harness: the executable forward content of the uniqueness
// theorems (spectra, M, and kernels agree across a Liouville transform).
// ---------------------------------------------------------------------------

namespace detail {

// Phitilde(z, y) = Gamma(eta^{-1}(y))^{-1} Phi(z, eta^{-1}(y)): the image
// of a solution family under the transform, evaluated on the tilde side.
struct PushedSolution final : SolutionImpl {
  EntireSolutionHandle base;
  Reparam eta;
  MatrixField gamma;

  CVec2 eval(Complex z, double y) const override {
    double x = eta.inverse(y);
    return ::wdirac::inverse(gamma(x)) * base(z, x);
  }
  SolutionPath path(Complex z, double lo, double hi) const override {
    double xl = eta.inverse(lo), xh = eta.inverse(hi);
    SolutionPath p = base.path(z, xl, xh);
    Reparam e = eta;
    MatrixField g = gamma;
    SolutionPath out;
    out.lo = lo;
    out.hi = hi;
    out.eval = [p, e, g](double y) {
      double x = e.inverse(y);
      return ::wdirac::inverse(g(x)) * p(x);
    };
    return out;
  }
  double anchor_point() const override { return eta(base.anchor()); }
};

}  // namespace detail

inline EntireSolutionHandle pushed_solution(const EntireSolutionHandle& phi,
                                            const LiouvilleTransform& t) {
  auto impl = std::make_shared<detail::PushedSolution>();
  impl->base = phi;
  impl->eta = t.eta;
  impl->gamma = t.gamma;
  return EntireSolutionHandle(impl, "pushed(" + phi.describe() + ")");
}

// Kernel invariance |K(zeta,zeta,c) - Ktilde(zeta,zeta,eta(c))| along a
// c-grid, with the tilde solution obtained by pushing phi through the
// transform. Works for frames and for singular (limit-point) solutions.
inline double kernel_invariance_deviation(const DiracExpression& expr,
                                          const EntireSolutionHandle& phi,
                                          const LiouvilleTransform& t,
                                          const std::vector<double>& c_grid,
                                          Complex zeta = Complex(0.0, 1.0),
                                          const KernelSettings& ks = {},
                                          const PushforwardOptions& opts = {
                                              true, 256, false, 0}) {
  DiracExpression texpr = pushforward(expr, t, opts);
  EntireSolutionHandle tphi = pushed_solution(phi, t);
  double worst = 0.0;
  for (double c : c_grid) {
    Complex k = kernel_integral(phi, expr, zeta, zeta, c, ks).value;
    Complex tk =
        kernel_integral(tphi, texpr, zeta, zeta, t.eta(c), ks).value;
    worst = std::max(worst, std::abs(k - tk) / std::max(1.0, std::abs(k)));
  }
  return worst;
}

struct HarnessProbes {
  std::vector<Complex> z_grid{Complex(0.6, 1.1), Complex(-1.3, 0.7),
                              Complex(2.1, 2.3), Complex(0.0, 1.0),
                              Complex(-0.4, 3.0)};
  double window_lo = -12.0, window_hi = 12.0;
  std::vector<double> c_grid;
  Complex kernel_zeta = Complex(0.0, 1.0);
};

struct InvarianceReport {
  double eig_set_distance = kNaN;
  bool eig_counts_match = false;
  std::size_t eig_count = 0;
  double max_m_deviation = kNaN;
  double max_kernel_deviation = kNaN;
  double frame_correspondence = kNaN;
  std::vector<double> m_deviations;
  std::vector<double> kernel_deviations;
};

namespace detail {

inline Vec2 map_data_through(const LiouvilleTransform& t, double x, Vec2 v) {
  Mat2 gi = ::wdirac::inverse(t.gamma(x));
  return gi * v;
}

// Map a boundary condition to the tilde side: data vectors are pushed by
// Gamma^{-1} at the endpoint, reference solutions as fields.
inline BoundaryCondition map_condition(const BoundaryCondition& bc,
                                       const LiouvilleTransform& t,
                                       const DiracExpression& expr) {
  using Kind = BoundaryCondition::Kind;
  if (bc.kind == Kind::kLimitPoint) return bc;
  const Interval& iv = expr.interval;
  double e = endpoint_of(iv, bc.side);
  if (bc.kind == Kind::kAngle || bc.kind == Kind::kFrame) {
    double xe = e;
    if (!detail::endpoint_data_evaluable(expr, xe) ||
        !std::isfinite(e))
      xe = std::isfinite(e)
               ? e + (bc.side == EndpointSide::kLeft ? 1.0 : -1.0) * 1e-9 *
                         iv.scale()
               : iv.midpoint();
    Vec2 phi_d, theta_d;
    if (bc.kind == Kind::kAngle) {
      phi_d = bc.condition_data();
      theta_d = bc.complement_data();
    } else {
      phi_d = bc.phi_data;
      theta_d = bc.theta_data;
    }
    Vec2 tphi = map_data_through(t, xe, phi_d);
    Vec2 ttheta = map_data_through(t, xe, theta_d);
    return BoundaryCondition::frame(bc.side, tphi, ttheta);
  }
  // Reference fields.
  Reparam eta = t.eta;
  MatrixField g = t.gamma;
  VectorField2 u = bc.u_ref, v = bc.v_ref;
  auto push = [eta, g](const VectorField2& f, std::string name) {
    return VectorField2(std::move(name), [eta, g, f](double y) {
      double x = eta.inverse(y);
      return ::wdirac::inverse(g(x)) * f(x);
    });
  };
  VectorField2 tu = push(u, "pushed-u");
  VectorField2 tv = v.empty() ? VectorField2{} : push(v, "pushed-v");
  return BoundaryCondition::reference(bc.side, std::move(tu), std::move(tv));
}

}  // namespace detail

inline InvarianceReport invariance_harness(
    const DiracExpression& expr, const LiouvilleTransform& t,
    const BoundaryCondition& left, const BoundaryCondition& right,
    HarnessProbes probes = {}, const EigenSettings& es = {},
    const WeylSettings& ws = {}, const KernelSettings& ks = {},
    const PushforwardOptions& opts = {true, 512, true, 4097}) {
  InvarianceReport rep;
  DiracExpression texpr = pushforward(expr, t, opts);
  BoundaryCondition tleft = detail::map_condition(left, t, expr);
  BoundaryCondition tright = detail::map_condition(right, t, expr);

  FrameSettings fs = es.frame;
  fs.prop = es.prop;
  FundamentalSystem frame = fundamental_system(expr, left, fs);
  FundamentalSystem tframe = fundamental_system(texpr, tleft, fs);

  // Frame correspondence Phi(z,x) = Gamma(x) Phitilde(z, eta(x)).
  {
    double dev = 0.0;
    double a = expr.interval.left_finite()
                   ? expr.interval.a + 0.2 * expr.interval.scale()
                   : expr.interval.midpoint() - 1.0;
    double b = expr.interval.right_finite()
                   ? expr.interval.b - 0.2 * expr.interval.scale()
                   : expr.interval.midpoint() + 1.0;
    for (Complex z : {Complex(0.9, 0.5), Complex(-1.0, 1.0)})
      for (double x : {a, 0.5 * (a + b), b}) {
        CVec2 lhs = frame.phi(z, x);
        CVec2 rhs = t.gamma(x) * tframe.phi(z, t.eta(x));
        dev = std::max(dev, norm2(lhs - rhs) / std::max(1.0, norm2(lhs)));
      }
    rep.frame_correspondence = dev;
    if (!(dev < 1e-3))
      throw ConfigError(
          "invariance_harness: pushed frame does not correspond (deviation " +
          std::to_string(dev) + "); boundary mapping is inconsistent");
  }

  // Spectra.
  if (right.kind != BoundaryCondition::Kind::kLimitPoint) {
    Spectrum s = eigenvalues(expr, frame.phi, right, probes.window_lo,
                             probes.window_hi, es);
    Spectrum ts = eigenvalues(texpr, tframe.phi, tright, probes.window_lo,
                              probes.window_hi, es);
    auto [d, match] = spectrum_set_distance(s.values, ts.values);
    rep.eig_set_distance = d;
    rep.eig_counts_match = match;
    rep.eig_count = s.values.size();
  }

  // Weyl functions.
  {
    WeylFunction m(expr, frame, right, ws);
    WeylFunction tm(texpr, tframe, tright, ws);
    double worst = 0.0;
    rep.m_deviations.reserve(probes.z_grid.size());
    for (Complex z : probes.z_grid) {
      double d = std::abs(m(z) - tm(z));
      rep.m_deviations.push_back(d);
      worst = std::max(worst, d);
    }
    rep.max_m_deviation = worst;
  }

  // Kernels K(zeta,zeta,c) vs Ktilde(zeta,zeta,eta(c)).
  {
    std::vector<double> cg = probes.c_grid;
    if (cg.empty()) {
      const Interval& iv = expr.interval;
      double lo = iv.left_finite() ? iv.a + 0.15 * iv.scale() : iv.midpoint() - 1;
      double hi = iv.right_finite() ? iv.b - 0.15 * iv.scale() : iv.midpoint() + 1;
      for (int i = 0; i < 5; ++i) cg.push_back(lo + (hi - lo) * i / 4.0);
    }
    double worst = 0.0;
    rep.kernel_deviations.resize(cg.size());
    for (std::size_t i = 0; i < cg.size(); ++i) {
      double c = cg[i];
      Complex k =
          kernel_integral(frame.phi, expr, probes.kernel_zeta,
                          probes.kernel_zeta, c, ks)
              .value;
      Complex tk = kernel_integral(tframe.phi, texpr, probes.kernel_zeta,
                                   probes.kernel_zeta, t.eta(c), ks)
                       .value;
      double d = std::abs(k - tk) / std::max(1.0, std::abs(k));
      rep.kernel_deviations[i] = d;
      worst = std::max(worst, d);
    }
    rep.max_kernel_deviation = worst;
  }
  return rep;
}

}  // namespace wdirac
