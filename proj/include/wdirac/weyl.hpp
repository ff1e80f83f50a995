#pragma once

// Singular Weyl-Titchmarsh-Kodaira functions and eigenvalue location.
//
// M(z) = -W(Theta, psi_b) / W(Phi, psi_b) where psi_b carries the right
// boundary data: propagated from the endpoint (regular), from a refined
// anchor (limit circle), or from a doubling truncation point with an
// arbitrary self-adjoint condition until M stabilizes (limit point).

#include <optional>

#include "wdirac/solutions.hpp"

namespace wdirac {

struct WeylSettings {
  PropagationSettings prop;
  FrameSettings frame;
  // Limit-point truncation schedule.
  double trunc_seed = 10.0;
  double trunc_factor = 2.0;
  int trunc_max_levels = 14;
  double trunc_conv_tol = 1e-9;
  // Matching point; NaN selects an interval-dependent default.
  double match_point = kNaN;
  // Relative |W(Phi, psi)| floor below which z counts as an eigenvalue.
  double eigen_guard = 1e-9;
};

namespace detail {

inline double default_match_point(const Interval& iv) {
  if (iv.left_finite() && iv.right_finite())
    return iv.a + 0.5 * (iv.b - iv.a);
  return iv.midpoint();
}

}  // namespace detail

class WeylFunction {
 public:
  WeylFunction(DiracExpression expr, FundamentalSystem frame,
               BoundaryCondition right, WeylSettings st = {})
      : expr_(std::move(expr)),
        frame_(std::move(frame)),
        right_(std::move(right)),
        st_(st) {
    if (right_.side != EndpointSide::kRight)
      throw ConfigError("WeylFunction: right boundary condition required");
    if (right_.kind != BoundaryCondition::Kind::kLimitPoint)
      psi_handle_ = boundary_solution(expr_, right_, st_.frame);
    match_ = std::isfinite(st_.match_point)
                 ? st_.match_point
                 : detail::default_match_point(expr_.interval);
  }

  const DiracExpression& expr() const { return expr_; }
  const FundamentalSystem& frame() const { return frame_; }
  const BoundaryCondition& right() const { return right_; }
  double match_point() const { return match_; }
  bool limit_point_right() const {
    return right_.kind == BoundaryCondition::Kind::kLimitPoint;
  }

  // M(z) for Im z != 0 (real z admitted in spectral gaps when the right
  // endpoint carries explicit boundary data).
  Complex operator()(Complex z) const { return m_at(z, match_); }

  Complex m_at(Complex z, double x_match) const {
    if (limit_point_right()) {
      if (z.imag() == 0.0)
        throw ConfigError("M(z) with limit-point right endpoint needs Im z != 0");
      return m_truncated(z, x_match);
    }
    // Renormalized evaluations keep the Wronskian ratio finite for large
    // |Im z|; the psi scale cancels, the frame scales recombine as a factor.
    auto [th, ls_th] = frame_.theta.eval_scaled(z, x_match);
    auto [ph, ls_ph] = frame_.phi.eval_scaled(z, x_match);
    auto [ps, ls_ps] = psi_handle_.eval_scaled(z, x_match);
    (void)ls_ps;
    return m_from(th, ph, ps) * std::exp(ls_th - ls_ph);
  }

  // The Weyl solution frame at the matching point (psi normalized by its
  // boundary data; for a limit-point endpoint, at the converged truncation).
  SolutionState weyl_solution(Complex z) const {
    if (!limit_point_right())
      return {match_, psi_handle_(z, match_)};
    auto [m, psi] = truncation_run(z, match_);
    (void)m;
    return {match_, psi};
  }

  std::vector<double> last_truncations() const { return truncations_; }

 private:
  Complex m_from(CVec2 th, CVec2 ph, CVec2 ps) const {
    Complex num = wronskian(th, ps);
    Complex den = wronskian(ph, ps);
    double scale = norm2(ph) * norm2(ps);
    if (std::abs(den) <= st_.eigen_guard * std::max(scale, 1e-300))
      throw Error(
          "weyl_m: W(Phi, psi) vanishes; z is numerically at an eigenvalue");
    return -num / den;
  }

  Complex m_truncated(Complex z, double x_match) const {
    auto [m, psi] = truncation_run(z, x_match);
    (void)psi;
    return m;
  }

  std::pair<Complex, CVec2> truncation_run(Complex z, double x_match) const {
    const Interval& iv = expr_.interval;
    auto [th, ls_th] = frame_.theta.eval_scaled(z, x_match);
    auto [ph, ls_ph] = frame_.phi.eval_scaled(z, x_match);
    double frame_factor = std::exp(ls_th - ls_ph);
    std::vector<double> history;
    Complex m_prev;
    bool have_prev = false;
    CVec2 psi_last;
    double xb = st_.trunc_seed;
    if (iv.right_finite())
      xb = iv.b - (iv.b - x_match) * 0.5;
    for (int k = 0; k < st_.trunc_max_levels; ++k) {
      if (!(xb > x_match)) throw ConfigError("truncation point inside match");
      // Arbitrary self-adjoint condition f1(x_b) = 0; renormalized backward
      // propagation keeps the Wronskian ratio finite.
      auto [st, ls] = propagate_scaled(expr_, z, {xb, CVec2{0.0, -1.0}},
                                       x_match, st_.prop);
      (void)ls;
      psi_last = st.f;
      Complex m = m_from(th, ph, psi_last) * frame_factor;
      if (have_prev) {
        double delta = std::abs(m - m_prev);
        history.push_back(delta);
        if (delta <= st_.trunc_conv_tol * std::max(1.0, std::abs(m)))
          return {m, psi_last};
      }
      m_prev = m;
      have_prev = true;
      truncations_.push_back(xb);
      xb = iv.right_finite() ? iv.b - (iv.b - xb) * 0.5
                             : xb * st_.trunc_factor;
    }
    throw ConvergenceError(
        "weyl_m: truncated M did not stabilize toward the right endpoint",
        history);
  }

  DiracExpression expr_;
  FundamentalSystem frame_;
  BoundaryCondition right_;
  WeylSettings st_;
  EntireSolutionHandle psi_handle_;
  double match_ = 0.0;
  mutable std::vector<double> truncations_;
};

// ---------------------------------------------------------------------------
// Eigenvalue location by sign-change scan of W(Phi(l,.), u_b(l,.))
// ---------------------------------------------------------------------------

struct EigenSettings {
  PropagationSettings prop;
  FrameSettings frame;
  double scan_per_unit = 64.0;
  double root_tol = 1e-12;
  // |chi| dip (relative to the scan median) that triggers double-root
  // suspicion when no sign change brackets it.
  double suspect_rel = 1e-4;
  bool parallel = true;
};

struct Spectrum {
  std::vector<double> values;
  std::vector<double> residuals;
  std::vector<std::pair<double, double>> flagged;
  double lo = 0.0, hi = 0.0;
};

namespace detail {

// chi(lambda): Wronskian of Phi against the right boundary solution,
// evaluated at the right handle's anchor (one propagation per lambda).
class EigenCondition {
 public:
  EigenCondition(const DiracExpression& expr, EntireSolutionHandle phi,
                 EntireSolutionHandle ub, const PropagationSettings& prop)
      : expr_(expr), phi_(std::move(phi)), ub_(std::move(ub)), prop_(prop) {
    x_eval_ = ub_.anchor();
    if (!expr_.interval.contains(x_eval_) && x_eval_ != expr_.interval.b &&
        x_eval_ != expr_.interval.a)
      throw ConfigError("eigen condition: evaluation point outside interval");
  }

  double operator()(double lambda) const {
    CVec2 ph = phi_(lambda, x_eval_);
    CVec2 ub = ub_(lambda, x_eval_);
    Complex w = wronskian(ph, ub);
    return std::real(w);
  }

 private:
  DiracExpression expr_;
  EntireSolutionHandle phi_;
  EntireSolutionHandle ub_;
  PropagationSettings prop_;
  double x_eval_;
};

}  // namespace detail

inline Spectrum eigenvalues(const DiracExpression& expr,
                            const EntireSolutionHandle& phi,
                            const BoundaryCondition& right, double lo,
                            double hi, const EigenSettings& es = {}) {
  if (!(lo < hi)) throw ConfigError("eigenvalues: empty window");
  if (right.kind == BoundaryCondition::Kind::kLimitPoint)
    throw ConfigError(
        "eigenvalues: limit-point right endpoint needs a truncation override "
        "(supply an explicit boundary condition at a truncation point)");
  EntireSolutionHandle ub = boundary_solution(expr, right, es.frame);
  detail::EigenCondition chi(expr, phi, ub, es.prop);

  Spectrum spec;
  spec.lo = lo;
  spec.hi = hi;
  std::size_t n =
      static_cast<std::size_t>(std::ceil(es.scan_per_unit * (hi - lo))) + 1;
  n = std::max<std::size_t>(n, 8);
  std::vector<double> grid(n), val(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = lo + (hi - lo) * double(i) / double(n - 1);
  auto eval_chunk = [&](std::size_t i) { val[i] = chi(grid[i]); };
  if (es.parallel)
    parallel_for(n, eval_chunk, 16);
  else
    for (std::size_t i = 0; i < n; ++i) eval_chunk(i);

  // Scan median sets the scale for double-root suspicion.
  std::vector<double> mags;
  mags.reserve(n);
  for (double v : val) mags.push_back(std::abs(v));
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  double scale = std::max(mags[mags.size() / 2], 1e-300);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    double fa = val[i], fb = val[i + 1];
    if (fa == 0.0) {
      spec.values.push_back(grid[i]);
      spec.residuals.push_back(0.0);
      continue;
    }
    if ((fa > 0) != (fb > 0)) {
      double root = brent_root(chi, grid[i], grid[i + 1], fa, fb, es.root_tol);
      spec.values.push_back(root);
      spec.residuals.push_back(std::abs(chi(root)));
      continue;
    }
    // Interior dip without a sign change: refine, then flag if unresolved.
    bool left_min = i == 0 || std::abs(val[i - 1]) >= std::abs(fa);
    bool dip = left_min && std::abs(fb) >= std::abs(fa) &&
               std::abs(fa) < es.suspect_rel * scale;
    if (dip) {
      double a = grid[i == 0 ? 0 : i - 1], b = grid[i + 1];
      int m = 32;
      double pv = chi(a);
      bool found = false;
      for (int j = 1; j <= m; ++j) {
        double x = a + (b - a) * double(j) / m;
        double v = chi(x);
        if ((pv > 0) != (v > 0)) {
          double root = brent_root(chi, a + (b - a) * double(j - 1) / m, x, pv,
                                   v, es.root_tol);
          spec.values.push_back(root);
          spec.residuals.push_back(std::abs(chi(root)));
          found = true;
          break;
        }
        pv = v;
      }
      if (!found) spec.flagged.push_back({a, b});
    }
  }

  // Deduplicate and sort (a root can be found from two adjacent cells).
  std::vector<std::size_t> order(spec.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spec.values[a] < spec.values[b];
  });
  Spectrum out;
  out.lo = lo;
  out.hi = hi;
  out.flagged = spec.flagged;
  double min_sep = 0.25 / es.scan_per_unit;
  for (std::size_t idx : order) {
    if (!out.values.empty() &&
        std::abs(spec.values[idx] - out.values.back()) < min_sep)
      continue;
    out.values.push_back(spec.values[idx]);
    out.residuals.push_back(spec.residuals[idx]);
  }
  return out;
}

// Convenience: frame + spectrum from boundary conditions on both ends.
inline Spectrum eigenvalues(const DiracExpression& expr,
                            const BoundaryCondition& left,
                            const BoundaryCondition& right, double lo,
                            double hi, const EigenSettings& es = {}) {
  FrameSettings fs = es.frame;
  fs.prop = es.prop;
  auto sys = fundamental_system(expr, left, fs);
  return eigenvalues(expr, sys.phi, right, lo, hi, es);
}

}  // namespace wdirac
