#pragma once

// Real entire solution families Phi(z,x) pinned by endpoint data.
//
// Three constructions:
//  * fixed z-independent data at a regular endpoint,
//  * frozen reference data at a shrinking anchor (limit-circle endpoints),
//    refined until evaluations are Cauchy across anchor levels,
//  * the radial family with prescribed asymptotics Phi_2 ~ x^kappa at the
//    singular origin, built by Picard iteration of the Volterra equations
//    for the x^{\pm kappa}-rescaled components on a seed interval.

#include <memory>

#include "wdirac/boundary.hpp"

namespace wdirac {

// Dense evaluator of one solution over a fixed x-range.
struct SolutionPath {
  double lo = 0.0, hi = 0.0;
  std::function<CVec2(double)> eval;
  CVec2 operator()(double x) const { return eval(x); }
};

namespace detail {

struct SolutionImpl {
  virtual ~SolutionImpl() = default;
  virtual CVec2 eval(Complex z, double x) const = 0;
  virtual std::pair<CVec2, double> eval_scaled(Complex z, double x) const {
    return {eval(z, x), 0.0};
  }
  virtual SolutionPath path(Complex z, double lo, double hi) const = 0;
  virtual double anchor_point() const = 0;
};

// Builds a dense path around an anchor by integrating both directions.
inline SolutionPath two_sided_path(const DiracExpression& expr, Complex z,
                                   double x0, CVec2 data, double lo, double hi,
                                   const PropagationSettings& prop) {
  auto up = std::make_shared<SolutionTrajectory>();
  auto down = std::make_shared<SolutionTrajectory>();
  if (hi > x0) propagate(expr, z, {x0, data}, hi, prop, up.get());
  if (lo < x0) propagate(expr, z, {x0, data}, lo, prop, down.get());
  SolutionPath p;
  p.lo = std::min(lo, x0);
  p.hi = std::max(hi, x0);
  p.eval = [x0, data, up, down](double x) -> CVec2 {
    if (x == x0) return data;
    if (x > x0) {
      if (!up->covers(x)) throw Error("solution path queried beyond range");
      return up->eval(x);
    }
    if (!down->covers(x)) throw Error("solution path queried beyond range");
    return down->eval(x);
  };
  return p;
}

struct FixedDataSolution final : SolutionImpl {
  DiracExpression expr;
  double x0;
  Vec2 data;
  PropagationSettings prop;

  CVec2 eval(Complex z, double x) const override {
    return propagate(expr, z, {x0, CVec2(data)}, x, prop).f;
  }
  std::pair<CVec2, double> eval_scaled(Complex z, double x) const override {
    auto [st, ls] = propagate_scaled(expr, z, {x0, CVec2(data)}, x, prop);
    return {st.f, ls};
  }
  SolutionPath path(Complex z, double lo, double hi) const override {
    return two_sided_path(expr, z, x0, CVec2(data), lo, hi, prop);
  }
  double anchor_point() const override { return x0; }
};

// Frozen reference data at an anchor near a limit-circle endpoint.  The
// anchor level is fixed at construction by a Cauchy test across levels.
struct AnchoredSolution final : SolutionImpl {
  DiracExpression expr;
  double x_anchor;
  Vec2 data;
  PropagationSettings prop;
  // Diagnostics from the refinement run.
  int levels_used = 0;
  double final_delta = 0.0;

  CVec2 eval(Complex z, double x) const override {
    return propagate(expr, z, {x_anchor, CVec2(data)}, x, prop).f;
  }
  std::pair<CVec2, double> eval_scaled(Complex z, double x) const override {
    auto [st, ls] = propagate_scaled(expr, z, {x_anchor, CVec2(data)}, x, prop);
    return {st.f, ls};
  }
  SolutionPath path(Complex z, double lo, double hi) const override {
    return two_sided_path(expr, z, x_anchor, CVec2(data), lo, hi, prop);
  }
  double anchor_point() const override { return x_anchor; }
};

}  // namespace detail

class EntireSolutionHandle;

class EntireSolutionHandle {
 public:
  EntireSolutionHandle() = default;
  explicit EntireSolutionHandle(std::shared_ptr<const detail::SolutionImpl> impl,
                                std::string describe = {})
      : impl_(std::move(impl)), describe_(std::move(describe)) {}

  bool valid() const { return static_cast<bool>(impl_); }

  CVec2 operator()(Complex z, double x) const {
    check();
    return impl_->eval(z, x);
  }
  // Value together with an accumulated log scale (for huge |Im z| regimes).
  std::pair<CVec2, double> eval_scaled(Complex z, double x) const {
    check();
    return impl_->eval_scaled(z, x);
  }
  SolutionPath path(Complex z, double lo, double hi) const {
    check();
    return impl_->path(z, lo, hi);
  }
  double anchor() const {
    check();
    return impl_->anchor_point();
  }
  const std::string& describe() const { return describe_; }

 private:
  void check() const {
    if (!impl_) throw ConfigError("empty solution handle");
  }
  std::shared_ptr<const detail::SolutionImpl> impl_;
  std::string describe_;
};

namespace detail {

// Linear combination theta + h * phi (frame shifts keep W(., phi) = 1).
struct ShiftedFrameSolution final : SolutionImpl {
  EntireSolutionHandle theta, phi;
  double h = 0.0;

  CVec2 eval(Complex z, double x) const override {
    return theta(z, x) + Complex(h) * phi(z, x);
  }
  SolutionPath path(Complex z, double lo, double hi) const override {
    SolutionPath pt = theta.path(z, lo, hi);
    SolutionPath pp = phi.path(z, lo, hi);
    SolutionPath out;
    out.lo = pt.lo;
    out.hi = pt.hi;
    double hh = h;
    out.eval = [pt, pp, hh](double x) {
      return pt(x) + Complex(hh) * pp(x);
    };
    return out;
  }
  double anchor_point() const override { return theta.anchor(); }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Fundamental systems (Theta, Phi) with W(Theta, Phi) = 1
// ---------------------------------------------------------------------------

struct FrameSettings {
  PropagationSettings prop;
  // Shrinking-anchor refinement for limit-circle endpoints.
  double anchor_ratio = 0.5;
  int anchor_max_levels = 46;
  double anchor_tol = 1e-10;
  // Probe for the Cauchy test across anchor levels.
  Complex probe_z = Complex(0.6, 0.8);
};

struct FundamentalSystem {
  EntireSolutionHandle theta;
  EntireSolutionHandle phi;
};

namespace detail {

inline bool endpoint_data_evaluable(const DiracExpression& expr, double x) {
  try {
    (void)expr.Q(x);
    (void)expr.R(x);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// Anchor schedule approaching the endpoint from the interior.
inline std::vector<double> anchor_schedule(const Interval& iv,
                                           EndpointSide side, double ratio,
                                           int levels) {
  double e = endpoint_of(iv, side);
  double x0 = iv.midpoint();
  std::vector<double> xs;
  double cur = x0;
  for (int k = 0; k < levels; ++k) {
    cur = std::isfinite(e)
              ? e + (cur - e) * ratio
              : x0 + std::copysign(std::pow(2.0, k), e);
    xs.push_back(cur);
  }
  return xs;
}

// Freeze reference data at a shrinking anchor; returns the stabilized level.
inline std::shared_ptr<AnchoredSolution> build_anchored(
    const DiracExpression& expr, const VectorField2& ref,
    const FrameSettings& fs, const std::vector<double>& schedule) {
  double c_probe = expr.interval.midpoint();
  CVec2 prev;
  bool have_prev = false;
  double delta = kInf;
  std::size_t used = 0;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    double xa = schedule[k];
    Vec2 data = ref(xa);
    double n = std::hypot(data[0], data[1]);
    if (!(n > 0) || !std::isfinite(n))
      throw ConfigError("reference solution vanished at anchor");
    CVec2 val =
        propagate(expr, fs.probe_z, {xa, CVec2(data)}, c_probe, fs.prop).f;
    if (have_prev) {
      delta = norm2(val - prev) / std::max(1.0, norm2(val));
      if (delta < fs.anchor_tol) {
        used = k;
        break;
      }
    }
    prev = val;
    have_prev = true;
    used = k;
  }
  if (delta >= std::sqrt(fs.anchor_tol))
    throw ConvergenceError(
        "anchored frame did not stabilize across the delta schedule (last "
        "delta " +
        std::to_string(delta) + ")");
  auto impl = std::make_shared<AnchoredSolution>();
  impl->expr = expr;
  impl->x_anchor = schedule[used];
  impl->data = ref(schedule[used]);
  impl->prop = fs.prop;
  impl->levels_used = static_cast<int>(used + 1);
  impl->final_delta = delta;
  return impl;
}

}  // namespace detail

// Construct the real entire fundamental system pinned by the left (or
// right) condition. Regular endpoints get exact z-independent data at the
// endpoint; limit-circle endpoints get the delta-refined anchored frames.
inline FundamentalSystem fundamental_system(const DiracExpression& expr,
                                            const BoundaryCondition& bc,
                                            const FrameSettings& fs = {}) {
  using Kind = BoundaryCondition::Kind;
  if (bc.kind == Kind::kLimitPoint)
    throw ConfigError(
        "fundamental_system: limit-point endpoint has no boundary frame; use "
        "the singular radial construction instead");
  const double e = endpoint_of(expr.interval, bc.side);

  if (bc.kind == Kind::kAngle || bc.kind == Kind::kFrame) {
    Vec2 phi_data = bc.condition_data();
    Vec2 theta_data = bc.complement_data();
    if (std::isfinite(e) && detail::endpoint_data_evaluable(expr, e)) {
      auto mk = [&](Vec2 d) {
        auto impl = std::make_shared<detail::FixedDataSolution>();
        impl->expr = expr;
        impl->x0 = e;
        impl->data = d;
        impl->prop = fs.prop;
        return impl;
      };
      return {EntireSolutionHandle(mk(theta_data), "theta@endpoint"),
              EntireSolutionHandle(mk(phi_data), "phi@endpoint")};
    }
    // Coefficients not evaluable at the endpoint itself: anchor the same
    // constant data on a shrinking schedule.
    auto schedule = detail::anchor_schedule(expr.interval, bc.side,
                                            fs.anchor_ratio,
                                            fs.anchor_max_levels);
    auto phi = detail::build_anchored(
        expr, VectorField2::constant(phi_data), fs, schedule);
    auto theta_impl = std::make_shared<detail::AnchoredSolution>();
    theta_impl->expr = expr;
    theta_impl->x_anchor = phi->x_anchor;
    theta_impl->data = theta_data;
    theta_impl->prop = fs.prop;
    return {EntireSolutionHandle(theta_impl, "theta@anchored"),
            EntireSolutionHandle(phi, "phi@anchored")};
  }

  // Reference-solution condition (limit-circle singular endpoint).
  if (bc.u_ref.empty())
    throw ConfigError("reference boundary condition missing u");
  if (bc.v_ref.empty())
    throw ConfigError(
        "reference boundary condition needs the complementary solution v "
        "with W(v,u) = 1 to span a frame");
  auto schedule = detail::anchor_schedule(expr.interval, bc.side,
                                          fs.anchor_ratio, fs.anchor_max_levels);
  // Normalization sanity: W(v,u) = 1 along the schedule head.
  for (int k : {0, 2}) {
    double xa = schedule[static_cast<std::size_t>(k)];
    double w = wronskian(bc.v_ref(xa), bc.u_ref(xa));
    if (std::abs(w - 1.0) > 1e-6)
      throw ConfigError("reference pair must satisfy W(v,u) = 1 (got " +
                        std::to_string(w) + ")");
  }
  auto phi = detail::build_anchored(expr, bc.u_ref, fs, schedule);
  // Pair Theta to the same anchor so W(Theta, Phi) = W(v, u) = 1 there.
  auto theta = std::make_shared<detail::AnchoredSolution>();
  theta->expr = expr;
  theta->x_anchor = phi->x_anchor;
  theta->data = bc.v_ref(phi->x_anchor);
  theta->prop = fs.prop;
  theta->levels_used = phi->levels_used;
  return {EntireSolutionHandle(theta, "theta@reference"),
          EntireSolutionHandle(phi, "phi@reference")};
}

// Single reference solution pinned at the right endpoint (for Weyl
// solutions and eigenvalue conditions).
inline EntireSolutionHandle boundary_solution(const DiracExpression& expr,
                                              const BoundaryCondition& bc,
                                              const FrameSettings& fs = {}) {
  using Kind = BoundaryCondition::Kind;
  if (bc.kind == Kind::kLimitPoint)
    throw ConfigError("limit-point endpoint carries no boundary solution");
  double e = endpoint_of(expr.interval, bc.side);
  if (bc.kind == Kind::kAngle || bc.kind == Kind::kFrame) {
    Vec2 u = bc.kind == Kind::kAngle
                 ? Vec2{{std::sin(bc.alpha), -std::cos(bc.alpha)}}
                 : bc.phi_data;
    if (std::isfinite(e) && detail::endpoint_data_evaluable(expr, e)) {
      auto impl = std::make_shared<detail::FixedDataSolution>();
      impl->expr = expr;
      impl->x0 = e;
      impl->data = u;
      impl->prop = fs.prop;
      return EntireSolutionHandle(impl, "u@endpoint");
    }
    auto schedule = detail::anchor_schedule(expr.interval, bc.side,
                                            fs.anchor_ratio,
                                            fs.anchor_max_levels);
    return EntireSolutionHandle(
        detail::build_anchored(expr, VectorField2::constant(u), fs, schedule),
        "u@anchored");
  }
  if (bc.u_ref.empty())
    throw ConfigError("reference boundary condition missing u");
  auto schedule = detail::anchor_schedule(expr.interval, bc.side,
                                          fs.anchor_ratio, fs.anchor_max_levels);
  return EntireSolutionHandle(
      detail::build_anchored(expr, bc.u_ref, fs, schedule), "u@reference");
}

// ---------------------------------------------------------------------------
// Radial family: Phi_1 = o(x^kappa), Phi_2 = x^kappa (1 + o(1)) at x -> 0
// ---------------------------------------------------------------------------

struct VolterraSettings {
  PropagationSettings prop;
  int nodes = 600;       // even; grid is uniform in s with t = ell * s^3
  double iter_tol = 1e-13;
  int max_iterations = 120;
  int max_shrink = 8;
  double seed_cap = 0.25;
};

namespace detail {

struct RadialSeed {
  double ell = 0.0;
  double kappa = 0.0;
  std::vector<Complex> A, B;  // rescaled components on the s-grid

  // Phi(z,x) for 0 < x <= ell via cubic interpolation on the s-grid.
  CVec2 eval(double x) const {
    if (!(x > 0.0))
      throw EvalDomainError("radial solution defined for x > 0", x);
    int n = static_cast<int>(A.size()) - 1;
    double s = std::cbrt(x / ell);
    double u = s * n;
    int j0 = std::clamp(static_cast<int>(u) - 1, 0, n - 3);
    Complex av = 0.0, bv = 0.0;
    for (int m = 0; m < 4; ++m) {
      double w = 1.0;
      for (int l = 0; l < 4; ++l)
        if (l != m) w *= (u - (j0 + l)) / double(m - l);
      av += w * A[j0 + m];
      bv += w * B[j0 + m];
    }
    return {std::pow(x, -kappa) * av, std::pow(x, kappa) * bv};
  }
};

// Cumulative composite Simpson on a uniform grid (O(h^4)); odd in-cell
// values use the quadratic through the surrounding three nodes.
inline void cumulative_simpson(const std::vector<Complex>& f, double h,
                               std::vector<Complex>& out) {
  std::size_t n = f.size();
  out.assign(n, 0.0);
  for (std::size_t j = 0; j + 2 < n; j += 2) {
    out[j + 1] = out[j] + h / 12.0 * (5.0 * f[j] + 8.0 * f[j + 1] - f[j + 2]);
    out[j + 2] = out[j] + h / 3.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
  }
  if (n % 2 == 0 && n >= 3)  // even node count: one trailing cell remains
    out[n - 1] = out[n - 2] + h / 12.0 * (-f[n - 3] + 8.0 * f[n - 2] +
                                          5.0 * f[n - 1]);
}

inline RadialSeed build_radial_seed(const RadialSpec& spec, Complex z,
                                    const VolterraSettings& vs) {
  double ell0 = std::min({vs.seed_cap, 0.25 / (1.0 + std::abs(z)),
                          std::isfinite(spec.b) ? 0.5 * spec.b : kInf});
  int n = vs.nodes + (vs.nodes % 2);  // even number of cells
  for (int shrink = 0; shrink <= vs.max_shrink; ++shrink) {
    double ell = ell0 * std::pow(0.5, shrink);
    double h = 1.0 / n;
    std::vector<double> t(n + 1), jac(n + 1), tk(n + 1), tmk(n + 1);
    std::vector<double> qsv(n + 1), qav(n + 1);
    for (int j = 0; j <= n; ++j) {
      double s = j * h;
      t[j] = ell * s * s * s;
      jac[j] = 3.0 * ell * s * s;
      if (j > 0) {
        tk[j] = std::pow(t[j], 2.0 * spec.kappa);
        tmk[j] = 1.0 / tk[j];
        qsv[j] = spec.q_sc(t[j]);
        qav[j] = spec.q_am(t[j]);
      }
    }
    std::vector<Complex> A(n + 1, 0.0), B(n + 1, 1.0);
    std::vector<Complex> ia(n + 1), ib(n + 1), An, Bn;
    double prev_delta = kInf;
    int grew = 0;
    bool done = false;
    for (int it = 0; it < vs.max_iterations && !done; ++it) {
      ia[0] = 0.0;
      ib[0] = 0.0;
      for (int j = 1; j <= n; ++j) {
        ia[j] = (-qav[j] * A[j] + (z + qsv[j]) * tk[j] * B[j]) * jac[j];
        ib[j] = (-(z - qsv[j]) * tmk[j] * A[j] + qav[j] * B[j]) * jac[j];
      }
      cumulative_simpson(ia, h, An);
      cumulative_simpson(ib, h, Bn);
      for (int j = 0; j <= n; ++j) Bn[j] += 1.0;
      double delta = 0.0, scale = 1.0;
      for (int j = 0; j <= n; ++j) {
        delta = std::max({delta, std::abs(An[j] - A[j]), std::abs(Bn[j] - B[j])});
        scale = std::max({scale, std::abs(Bn[j]), std::abs(An[j])});
      }
      A.swap(An);
      B.swap(Bn);
      if (delta < vs.iter_tol * scale) done = true;
      grew = (delta > prev_delta) ? grew + 1 : 0;
      if (grew >= 4) break;  // no contraction on this seed length
      prev_delta = delta;
    }
    if (done) {
      RadialSeed seed;
      seed.ell = ell;
      seed.kappa = spec.kappa;
      seed.A = std::move(A);
      seed.B = std::move(B);
      return seed;
    }
  }
  throw ConvergenceError(
      "radial seed iteration failed to contract after shrinking the seed "
      "interval " +
      std::to_string(vs.max_shrink) + " times");
}

struct VolterraRadialSolution final : SolutionImpl {
  RadialSpec spec;
  DiracExpression expr;
  VolterraSettings vs;

  CVec2 eval(Complex z, double x) const override {
    RadialSeed seed = build_radial_seed(spec, z, vs);
    if (x <= seed.ell) return seed.eval(x);
    return propagate(expr, z, {seed.ell, seed.eval(seed.ell)}, x, vs.prop).f;
  }
  std::pair<CVec2, double> eval_scaled(Complex z, double x) const override {
    RadialSeed seed = build_radial_seed(spec, z, vs);
    if (x <= seed.ell) return {seed.eval(x), 0.0};
    auto [st, ls] =
        propagate_scaled(expr, z, {seed.ell, seed.eval(seed.ell)}, x, vs.prop);
    return {st.f, ls};
  }
  SolutionPath path(Complex z, double lo, double hi) const override {
    auto seed = std::make_shared<RadialSeed>(build_radial_seed(spec, z, vs));
    auto traj = std::make_shared<SolutionTrajectory>();
    if (hi > seed->ell)
      propagate(expr, z, {seed->ell, seed->eval(seed->ell)}, hi, vs.prop,
                traj.get());
    SolutionPath p;
    p.lo = std::max(lo, 0.0);
    p.hi = hi;
    double ell = seed->ell;
    p.eval = [seed, traj, ell](double x) -> CVec2 {
      if (x <= ell) return seed->eval(x);
      return traj->eval(x);
    };
    return p;
  }
  double anchor_point() const override { return 0.0; }
};

}  // namespace detail

// The real entire solution of the radial family with
// Phi_1(z,x) = o(x^kappa) and Phi_2(z,x) = x^kappa (1 + o(1)) as x -> 0.
inline EntireSolutionHandle singular_phi(const RadialSpec& spec,
                                         const VolterraSettings& vs = {}) {
  auto impl = std::make_shared<detail::VolterraRadialSolution>();
  impl->spec = spec;
  impl->expr = make_radial(spec);
  impl->vs = vs;
  return EntireSolutionHandle(impl, "phi@radial");
}

// Reference pair for the limit-circle radial boundary condition (4 kappa^2
// < 1): u = Phi(0,.) and a complementary v with W(v,u) = 1, both real.
inline BoundaryCondition radial_left_condition(const RadialSpec& spec,
                                               const VolterraSettings& vs = {}) {
  auto phi0 = singular_phi(spec, vs);
  DiracExpression expr = make_radial(spec);
  PropagationSettings prop = vs.prop;
  VectorField2 u("radial-phi0", [phi0](double x) {
    CVec2 f = phi0(0.0, x);
    return Vec2{{std::real(f[0]), std::real(f[1])}};
  });
  // Complementary z = 0 solution, normalized so W(v,u) = 1 at an interior
  // point (the Wronskian of two z = 0 solutions is constant).
  double x0 = expr.interval.midpoint();
  CVec2 u0 = phi0(0.0, x0);
  double nrm = std::norm(u0[0]) + std::norm(u0[1]);
  Vec2 v0{{std::real(u0[1]) / nrm, -std::real(u0[0]) / nrm}};
  VectorField2 v("radial-complement", [expr, x0, v0, prop](double x) {
    CVec2 f = propagate(expr, 0.0, {x0, CVec2(v0)}, x, prop).f;
    return Vec2{{std::real(f[0]), std::real(f[1])}};
  });
  return BoundaryCondition::reference(EndpointSide::kLeft, std::move(u),
                                      std::move(v));
}

}  // namespace wdirac
