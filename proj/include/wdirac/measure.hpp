#pragma once

// Spectral measures by Stieltjes inversion of the Weyl function.
//
// The a.c. density is (1/pi) Im M(l + i*eps) extrapolated to eps -> 0 over
// a schedule (the +i*eps half-plane keeps the measure nonnegative for a
// Herglotz M; grid nodes are placed off detected atoms). Point masses use
// rho_n = lim eps * Im M(l_n + i*eps), cross-checked against the norming
// constants 1 / ||Phi(l_n,.)||_R^2.

#include "wdirac/weyl.hpp"

namespace wdirac {

struct MeasureSettings {
  EigenSettings eigen;
  QuadSettings quad;
  std::vector<double> eps_schedule{1e-2, 1e-3, 1e-4};
  int grid_points = 201;
  double atom_mismatch_tol = 0.01;  // 1% cross-check flag
  double density_floor = -1e-6;     // extrapolation noise clamped above this
};

struct SpectralMeasure {
  struct Atom {
    double lambda = 0.0;
    double mass = 0.0;          // reported mass
    double mass_stieltjes = kNaN;
    double mass_norming = kNaN;
    double mismatch = kNaN;
    bool flagged = false;
  };
  std::vector<Atom> atoms;
  std::vector<double> grid;
  std::vector<double> density;
  double lo = 0.0, hi = 0.0;
  std::vector<double> eps_schedule;
  double m_c = 0.0;
  double m_c_raw = 0.0;
  std::vector<std::string> notes;

  double atom_mass_in(double a, double b) const {
    double s = 0.0;
    for (const auto& at : atoms)
      if (a < at.lambda && at.lambda <= b) s += at.mass;
    return s;
  }
  // Trapezoid integral of the sampled density plus atoms over (a, b].
  double mass_in(double a, double b) const {
    double s = atom_mass_in(a, b);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      double x0 = std::max(a, grid[i]), x1 = std::min(b, grid[i + 1]);
      if (x1 > x0)
        s += 0.5 * (density[i] + density[i + 1]) * (x1 - x0);
    }
    return s;
  }
};

namespace detail {

// Neville extrapolation of tabulated (x_i, y_i) to x = 0.
inline double neville_to_zero(const std::vector<double>& xs,
                              std::vector<double> ys) {
  std::size_t n = xs.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      ys[i] = (0.0 - xs[i + m]) * (ys[i] - ys[i + 1]) / (xs[i] - xs[i + m]) +
              ys[i + 1];
  return ys[0];
}

// Atom mass from eps * Im M(l + i*eps), Richardson in eps^2.
inline double atom_mass_limit(const WeylFunction& m, double lambda,
                              const std::vector<double>& eps_schedule) {
  std::vector<double> e2, v;
  for (double e : eps_schedule) {
    e2.push_back(e * e);
    v.push_back(e * std::imag(m(Complex(lambda, e))));
  }
  return neville_to_zero(e2, v);
}

}  // namespace detail

// R-weighted norm of Phi(lambda,.) over the whole interval; improper ends
// handled by geometric cells along a single propagation sweep per side.
// Returns NaN when a tail does not converge.
inline double solution_norm_squared(const DiracExpression& expr,
                                    const EntireSolutionHandle& phi,
                                    double lambda,
                                    const QuadSettings& qs = {},
                                    const PropagationSettings& prop = {}) {
  const Interval& iv = expr.interval;
  double x0 = iv.midpoint();
  double span = iv.scale();
  double core_lo = iv.left_finite() ? iv.a + 1e-4 * span : x0 - 8.0;
  double core_hi = iv.right_finite() ? iv.b - 1e-4 * span : x0 + 8.0;
  SolutionPath path = phi.path(lambda, core_lo, core_hi);
  auto weight = [&expr](const CVec2& f, double x) {
    Mat2 r = expr.R(x);
    CVec2 cf = conj(f);
    return std::real(cf[0] * (r(0, 0) * f[0] + r(0, 1) * f[1]) +
                     cf[1] * (r(1, 0) * f[0] + r(1, 1) * f[1]));
  };
  double core =
      integrate([&](double x) { return weight(path(x), x); }, core_lo, core_hi,
                qs);

  // March geometric cells toward the endpoint, continuing one propagation
  // sweep; accept when the increments extrapolate to a negligible tail.
  auto edge = [&](double endpoint, double inner) -> double {
    SolutionState cur{inner, path(inner)};
    double total = 0.0;
    std::vector<double> inc;
    for (int k = 0; k < 40; ++k) {
      double nxt = std::isfinite(endpoint)
                       ? endpoint + (cur.x - endpoint) * 0.5
                       : x0 + std::copysign(std::max(1.0, std::abs(x0)) *
                                                std::pow(2.0, k),
                                            endpoint);
      SolutionTrajectory traj;
      SolutionState after;
      try {
        after = propagate(expr, lambda, cur, nxt, prop, &traj);
      } catch (const PropagationError&) {
        return kNaN;
      }
      double cell = std::abs(integrate(
          [&](double x) { return weight(traj.eval(x), x); },
          std::min(cur.x, nxt), std::max(cur.x, nxt), qs));
      total += cell;
      inc.push_back(cell);
      cur = after;
      if (cell <= qs.rtol * std::max(total + core, 1e-300)) return total;
      if (inc.size() >= 3) {
        double r1 = inc[inc.size() - 2] / inc[inc.size() - 3];
        double r2 = inc.back() / inc[inc.size() - 2];
        if (r1 < 0.9 && r2 < 0.9 &&
            std::abs(r1 - r2) < 0.05 * std::max(r1, r2)) {
          double tail = inc.back() * r2 / (1.0 - r2);
          if (tail <= 10 * qs.rtol * std::max(total + core, 1e-300))
            return total + tail;
        }
      }
      if (total > 1e200) return kNaN;  // not square integrable
    }
    return kNaN;
  };
  double left = 0.0, right = 0.0;
  if (!iv.left_finite() || core_lo > iv.a)
    left = edge(iv.left_finite() ? iv.a : -kInf, core_lo);
  if (!iv.right_finite() || core_hi < iv.b)
    right = edge(iv.right_finite() ? iv.b : kInf, core_hi);
  return core + left + right;
}

// Linear Herglotz term estimated as lim M(iy)/(iy) over the schedule
// (extrapolated in 1/y); reported raw and zeroed below 1e-8.
inline std::pair<double, double> herglotz_linear_term(
    const WeylFunction& m, const std::vector<double>& y_schedule = {1e2, 1e3,
                                                                    1e4}) {
  std::vector<double> ts, vs;
  for (double y : y_schedule) {
    ts.push_back(1.0 / y);
    vs.push_back(std::real(m(Complex(0.0, y)) / Complex(0.0, y)));
  }
  double est = detail::neville_to_zero(ts, vs);
  double reported = std::abs(est) < 1e-8 ? 0.0 : est;
  return {reported, est};
}

inline SpectralMeasure spectral_measure(const WeylFunction& weyl, double lo,
                                        double hi,
                                        const MeasureSettings& ms = {}) {
  if (!(lo < hi)) throw ConfigError("spectral_measure: empty window");
  if (ms.eps_schedule.size() < 2)
    throw ConfigError("spectral_measure: eps schedule needs >= 2 entries");
  SpectralMeasure out;
  out.lo = lo;
  out.hi = hi;
  out.eps_schedule = ms.eps_schedule;

  // Atoms: eigenvalue search when the right endpoint carries data,
  // 1/eps scaling detection on the grid otherwise.
  std::vector<double> atom_locations;
  if (!weyl.limit_point_right()) {
    Spectrum spec = eigenvalues(weyl.expr(), weyl.frame().phi, weyl.right(),
                                lo, hi, ms.eigen);
    atom_locations = spec.values;
    for (auto& f : spec.flagged)
      out.notes.push_back("unresolved root candidate in [" +
                          std::to_string(f.first) + "," +
                          std::to_string(f.second) + "]");
  } else {
    // Coarse pole sweep: density scaling like 1/eps flags an atom.
    double e_hi = ms.eps_schedule.front(), e_lo = ms.eps_schedule.back();
    int n = ms.grid_points;
    for (int i = 0; i < n; ++i) {
      double l = lo + (hi - lo) * (i + 0.5) / n;
      double d_hi = std::imag(weyl(Complex(l, e_hi)));
      double d_lo = std::imag(weyl(Complex(l, e_lo)));
      if (d_lo > 10.0 && d_lo * e_lo > 0.5 * d_hi * e_hi) {
        // Refine the pole location by maximizing eps*Im M.
        double a = l - (hi - lo) / n, b = l + (hi - lo) / n;
        for (int it = 0; it < 40; ++it) {
          double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
          double v1 = std::imag(weyl(Complex(m1, e_lo)));
          double v2 = std::imag(weyl(Complex(m2, e_lo)));
          if (v1 < v2)
            a = m1;
          else
            b = m2;
        }
        double root = 0.5 * (a + b);
        if (atom_locations.empty() ||
            std::abs(root - atom_locations.back()) > (hi - lo) * 1e-6)
          atom_locations.push_back(root);
      }
    }
  }

  for (double l : atom_locations) {
    SpectralMeasure::Atom atom;
    atom.lambda = l;
    atom.mass_stieltjes = detail::atom_mass_limit(weyl, l, ms.eps_schedule);
    double n2 = solution_norm_squared(weyl.expr(), weyl.frame().phi, l,
                                      ms.quad);
    if (std::isfinite(n2) && n2 > 0) atom.mass_norming = 1.0 / n2;
    atom.mass = atom.mass_stieltjes;
    if (std::isfinite(atom.mass_norming)) {
      atom.mismatch = std::abs(atom.mass_stieltjes - atom.mass_norming) /
                      atom.mass_norming;
      atom.flagged = atom.mismatch > ms.atom_mismatch_tol;
      if (atom.flagged)
        out.notes.push_back("atom at " + std::to_string(l) +
                            ": Stieltjes/norming mismatch " +
                            std::to_string(atom.mismatch));
    }
    if (!(atom.mass > 0)) {
      atom.flagged = true;
      out.notes.push_back("atom at " + std::to_string(l) +
                          ": nonpositive extrapolated mass");
    }
    out.atoms.push_back(atom);
  }

  // Sampled a.c. density, grid nodes pushed off atoms.
  int n = ms.grid_points;
  double h = (hi - lo) / std::max(1, n - 1);
  for (int i = 0; i < n; ++i) {
    double l = lo + h * i;
    for (const auto& a : out.atoms)
      if (std::abs(l - a.lambda) < 0.05 * h)
        l = a.lambda + (l >= a.lambda ? 0.05 : -0.05) * h + (l - a.lambda) * 2;
    std::vector<double> dv;
    for (double e : ms.eps_schedule)
      dv.push_back(std::imag(weyl(Complex(l, e))) / kPi);
    double d = detail::neville_to_zero(ms.eps_schedule, dv);
    if (d < 0) {
      if (d < ms.density_floor)
        out.notes.push_back("negative density " + std::to_string(d) +
                            " at lambda=" + std::to_string(l));
      d = std::max(d, 0.0);
    }
    out.grid.push_back(l);
    out.density.push_back(d);
  }

  auto [mc, mc_raw] = herglotz_linear_term(weyl);
  out.m_c = mc;
  out.m_c_raw = mc_raw;
  return out;
}

// Discrete measure via norming constants only (frames without Theta, e.g.
// the limit-point radial construction).
inline SpectralMeasure spectral_measure_discrete(
    const DiracExpression& expr, const EntireSolutionHandle& phi,
    const BoundaryCondition& right, double lo, double hi,
    const MeasureSettings& ms = {}) {
  SpectralMeasure out;
  out.lo = lo;
  out.hi = hi;
  out.notes.push_back("norming-constant masses (no Theta frame)");
  Spectrum spec = eigenvalues(expr, phi, right, lo, hi, ms.eigen);
  for (double l : spec.values) {
    SpectralMeasure::Atom atom;
    atom.lambda = l;
    double n2 = solution_norm_squared(expr, phi, l, ms.quad);
    if (!(std::isfinite(n2) && n2 > 0))
      throw QuadratureError("norming constant quadrature failed at lambda=" +
                            std::to_string(l));
    atom.mass_norming = 1.0 / n2;
    atom.mass = atom.mass_norming;
    out.atoms.push_back(atom);
  }
  return out;
}

// rho((lo,hi]) by direct quadrature of (1/pi) Im M(l + i*eps) over the
// window, extrapolated over the eps schedule.
inline double stieltjes_window_mass(const WeylFunction& weyl, double lo,
                                    double hi,
                                    const std::vector<double>& eps_schedule =
                                        {1e-2, 1e-3, 1e-4},
                                    QuadSettings qs = {1e-7, 1e-12}) {
  std::vector<double> masses;
  for (double e : eps_schedule) {
    auto f = [&](double l) {
      return std::imag(weyl(Complex(l, e))) / kPi;
    };
    masses.push_back(integrate(f, lo, hi, qs));
  }
  return detail::neville_to_zero(eps_schedule, masses);
}

// ---------------------------------------------------------------------------
// Herglotz diagnostics
// ---------------------------------------------------------------------------

struct HerglotzReport {
  bool ok = true;
  Complex worst_z;
  double worst_im = kInf;
  std::size_t samples = 0;
};

inline HerglotzReport herglotz_check(const WeylFunction& weyl,
                                     const std::vector<Complex>& sample_z,
                                     double tol = 1e-9) {
  HerglotzReport rep;
  for (Complex z : sample_z) {
    if (!(z.imag() > 0))
      throw ConfigError("herglotz_check samples must lie in the upper half-plane");
    double im = std::imag(weyl(z));
    ++rep.samples;
    if (im < rep.worst_im) {
      rep.worst_im = im;
      rep.worst_z = z;
    }
  }
  rep.ok = rep.worst_im >= -tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Two-spectra reports
// ---------------------------------------------------------------------------

// Sorted set distance; counts must match for a finite value.
inline std::pair<double, bool> spectrum_set_distance(
    const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return {kInf, false};
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return {d, true};
}

inline bool interlaced(const std::vector<double>& s,
                       const std::vector<double>& t) {
  std::vector<std::pair<double, int>> merged;
  for (double v : s) merged.push_back({v, 0});
  for (double v : t) merged.push_back({v, 1});
  std::sort(merged.begin(), merged.end());
  for (std::size_t i = 0; i + 1 < merged.size(); ++i)
    if (merged[i].second == merged[i + 1].second) return false;
  return true;
}

struct TwoSpectraProblem {
  DiracExpression expr;
  BoundaryCondition left_s;
  BoundaryCondition left_t;
  BoundaryCondition right;
};

struct TwoSpectraReport {
  Spectrum sigma_s_a, sigma_t_a, sigma_s_b, sigma_t_b;
  double dist_s = kInf, dist_t = kInf;
  bool counts_match_s = false, counts_match_t = false;
  bool interlaced_a = false, interlaced_b = false;
  double h = kNaN;
  double h_constancy = kNaN;
  double shifted_zero_dist = kNaN;
};

inline TwoSpectraReport two_spectra_report(const TwoSpectraProblem& pa,
                                           const TwoSpectraProblem& pb,
                                           double lo, double hi,
                                           const EigenSettings& es = {},
                                           const WeylSettings& ws = {}) {
  TwoSpectraReport rep;
  rep.sigma_s_a = eigenvalues(pa.expr, pa.left_s, pa.right, lo, hi, es);
  rep.sigma_t_a = eigenvalues(pa.expr, pa.left_t, pa.right, lo, hi, es);
  rep.sigma_s_b = eigenvalues(pb.expr, pb.left_s, pb.right, lo, hi, es);
  rep.sigma_t_b = eigenvalues(pb.expr, pb.left_t, pb.right, lo, hi, es);
  std::tie(rep.dist_s, rep.counts_match_s) =
      spectrum_set_distance(rep.sigma_s_a.values, rep.sigma_s_b.values);
  std::tie(rep.dist_t, rep.counts_match_t) =
      spectrum_set_distance(rep.sigma_t_a.values, rep.sigma_t_b.values);
  rep.interlaced_a = interlaced(rep.sigma_s_a.values, rep.sigma_t_a.values);
  rep.interlaced_b = interlaced(rep.sigma_s_b.values, rep.sigma_t_b.values);

  // h = M(lambda) on sigma(T); zeros of the h-shifted M reproduce sigma(T).
  if (!rep.sigma_t_a.values.empty()) {
    FrameSettings fs = es.frame;
    fs.prop = es.prop;
    auto frame = fundamental_system(pa.expr, pa.left_s, fs);
    WeylFunction m(pa.expr, frame, pa.right, ws);
    rep.h = std::real(m(Complex(rep.sigma_t_a.values.front(), 0.0)));
    double hc = 0.0;
    for (double l : rep.sigma_t_a.values)
      hc = std::max(hc, std::abs(std::real(m(Complex(l, 0.0))) - rep.h));
    rep.h_constancy = hc;

    // Shifted frame Theta + h Phi is again entire with W = 1.
    double h = rep.h;
    auto shifted = std::make_shared<detail::ShiftedFrameSolution>();
    shifted->theta = frame.theta;
    shifted->phi = frame.phi;
    shifted->h = h;
    EntireSolutionHandle theta_shifted(shifted, "theta+h*phi");
    Spectrum zeros = eigenvalues(pa.expr, theta_shifted, pa.right, lo, hi, es);
    auto [zd, zok] =
        spectrum_set_distance(zeros.values, rep.sigma_t_a.values);
    rep.shifted_zero_dist = zok ? zd : kInf;
  }
  return rep;
}

}  // namespace wdirac
