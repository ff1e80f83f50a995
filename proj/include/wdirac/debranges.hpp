#pragma once

// de Branges functions E(z,c) = Phi_1(z,c) -/+ i Phi_2(z,c), reproducing
// kernels K(zeta,z,c) = int_a^c <Phi(zeta,x), R(x) Phi(z,x)> dx, the
// structure identity relating the two, the spectral transform, Parseval
// residuals, and Cartwright-class growth diagnostics.
//
// Sign convention: under the plain bilinear Wronskian the two candidate
// signs make the structure-identity quotient equal +K or -K; the sign is
// resolved at construction by requiring the quotient at (i,i,c) to be
// positive (kernel positivity is the invariant content) and recorded.

#include "wdirac/measure.hpp"

namespace wdirac {

enum class ESign {
  kStandard,   // Phi_1 - i Phi_2
  kConjugate,  // Phi_1 + i Phi_2
};

inline Complex e_function(const EntireSolutionHandle& phi, double c, Complex z,
                          ESign sign) {
  CVec2 f = phi(z, c);
  Complex i(0.0, 1.0);
  return sign == ESign::kStandard ? f[0] - i * f[1] : f[0] + i * f[1];
}

// ---------------------------------------------------------------------------
// Kernel by quadrature with geometric endpoint refinement
// ---------------------------------------------------------------------------

struct KernelSettings {
  PropagationSettings prop;
  QuadSettings quad{1e-11, 1e-15};
  double endpoint_ratio = 0.5;
  int endpoint_max_levels = 60;
};

struct KernelValue {
  Complex zeta, z;
  double c = 0.0;
  Complex value;
  const char* method = "integral";
};

inline KernelValue kernel_integral(const EntireSolutionHandle& phi,
                                   const DiracExpression& expr, Complex zeta,
                                   Complex z, double c,
                                   const KernelSettings& ks = {}) {
  const double a = expr.interval.a;
  if (!(c > a) || !(c < expr.interval.b))
    throw ConfigError("kernel_integral: c must be interior");
  if (!std::isfinite(a))
    throw ConfigError("kernel_integral: left endpoint must be finite");
  SolutionPath pz = phi.path(z, a, c);
  SolutionPath pzc = phi.path(std::conj(zeta), a, c);
  auto integrand = [&](double x) -> Complex {
    // conj(Phi(zeta,x)) = Phi(conj zeta, x) for a real entire family.
    CVec2 fz = pz(x);
    CVec2 fc = pzc(x);
    Mat2 r = expr.R(x);
    return fc[0] * (r(0, 0) * fz[0] + r(0, 1) * fz[1]) +
           fc[1] * (r(1, 0) * fz[0] + r(1, 1) * fz[1]);
  };
  // Geometric cells toward the (possibly singular) left endpoint with a
  // per-cell adaptive Gauss rule; accepted when the running tail is
  // negligible against the accumulated value.
  Complex acc = 0.0;
  double edge = c;
  int small_cells = 0;
  for (int k = 0; k < ks.endpoint_max_levels; ++k) {
    double nxt = a + (edge - a) * ks.endpoint_ratio;
    Complex cell = integrate(integrand, nxt, edge, ks.quad);
    acc += cell;
    edge = nxt;
    if (std::abs(cell) <= ks.quad.rtol * std::max(std::abs(acc), 1e-300)) {
      if (++small_cells >= 2) break;
    } else {
      small_cells = 0;
    }
    if (k + 1 == ks.endpoint_max_levels)
      throw QuadratureError(
          "kernel_integral: endpoint refinement did not converge near a");
  }
  return {zeta, z, c, acc, "integral"};
}

// Structure-identity quotient [E(z)E(zeta)* - E(zeta*)E(z*)*] / (2i(zeta*-z)),
// with the coincidence limit taken by the derivative formula.
template <class EFn>
Complex structure_quotient(EFn&& e, Complex zeta, Complex z,
                           double coincidence_eps = 1e-6) {
  Complex zc = std::conj(zeta);
  if (std::abs(zc - z) >= coincidence_eps) {
    Complex num = e(z) * std::conj(e(zeta)) - e(zc) * std::conj(e(std::conj(z)));
    return num / (Complex(0.0, 2.0) * (zc - z));
  }
  // lim_{w -> z} N(w)/(2i(w-z)) = [E(z) conj(E'(z*)) - E'(z) conj(E(z*))]/(2i)
  double h = 1e-5;
  auto de = [&](Complex w) { return (e(w + h) - e(w - h)) / (2.0 * h); };
  Complex num = e(z) * std::conj(de(std::conj(z))) -
                de(z) * std::conj(e(std::conj(z)));
  return num / Complex(0.0, 2.0);
}

class DeBrangesFunction {
 public:
  static DeBrangesFunction make(const EntireSolutionHandle& phi,
                                const DiracExpression& expr, double c,
                                const KernelSettings& ks = {}) {
    DeBrangesFunction e;
    e.phi_ = phi;
    e.expr_ = expr;
    e.c_ = c;
    e.ks_ = ks;
    // Resolve the sign by kernel positivity at (i, i, c).
    Complex i(0.0, 1.0);
    auto cand = [&](ESign s) {
      return std::real(structure_quotient(
          [&](Complex z) { return e_function(phi, c, z, s); }, i, i));
    };
    e.sign_ = cand(ESign::kStandard) > 0 ? ESign::kStandard : ESign::kConjugate;
    return e;
  }

  Complex operator()(Complex z) const {
    return e_function(phi_, c_, z, sign_);
  }
  // log|E(z,c)| via renormalized propagation (safe for large |Im z|).
  double log_abs(Complex z) const {
    auto [f, ls] = phi_.eval_scaled(z, c_);
    Complex i(0.0, 1.0);
    Complex v = sign_ == ESign::kStandard ? f[0] - i * f[1] : f[0] + i * f[1];
    return ls + std::log(std::abs(v));
  }

  ESign sign() const { return sign_; }
  double c() const { return c_; }
  const EntireSolutionHandle& phi() const { return phi_; }
  const DiracExpression& expr() const { return expr_; }

  KernelValue kernel(Complex zeta, Complex z) const {
    return kernel_integral(phi_, expr_, zeta, z, c_, ks_);
  }

 private:
  EntireSolutionHandle phi_;
  DiracExpression expr_;
  double c_ = 0.0;
  ESign sign_ = ESign::kConjugate;
  KernelSettings ks_;
};

// |structure quotient - K| (absolute; callers divide as needed).
inline double rep_identity_residual(const DeBrangesFunction& e,
                                    const KernelValue& k, Complex zeta,
                                    Complex z) {
  Complex q = structure_quotient([&](Complex w) { return e(w); }, zeta, z);
  return std::abs(q - k.value);
}

// ---------------------------------------------------------------------------
// Kernel nesting along a c-grid
// ---------------------------------------------------------------------------

struct NestingReport {
  std::vector<double> c_grid;
  std::vector<double> diagonal;  // K(zeta, zeta, c)
  bool strictly_increasing = true;
  double max_monotonicity_violation = 0.0;
  // |K(c_{j+1}) - K(c_j) - int_{c_j}^{c_{j+1}}| consistency of increments.
  double max_increment_mismatch = 0.0;
  double smallest_value = kNaN;
};

inline NestingReport nesting_check(const EntireSolutionHandle& phi,
                                   const DiracExpression& expr, Complex zeta,
                                   std::vector<double> c_grid,
                                   const KernelSettings& ks = {}) {
  if (c_grid.size() < 2 || !std::is_sorted(c_grid.begin(), c_grid.end()))
    throw ConfigError("nesting_check: increasing c grid required");
  NestingReport rep;
  rep.c_grid = c_grid;
  rep.diagonal.resize(c_grid.size());
  parallel_for(c_grid.size(), [&](std::size_t j) {
    rep.diagonal[j] =
        std::real(kernel_integral(phi, expr, zeta, zeta, c_grid[j], ks).value);
  });
  rep.smallest_value = rep.diagonal.front();
  SolutionPath pz = phi.path(zeta, c_grid.front(), c_grid.back());
  SolutionPath pzc = phi.path(std::conj(zeta), c_grid.front(), c_grid.back());
  for (std::size_t j = 0; j + 1 < rep.diagonal.size(); ++j) {
    double inc = rep.diagonal[j + 1] - rep.diagonal[j];
    if (inc <= 0) {
      rep.strictly_increasing = false;
      rep.max_monotonicity_violation =
          std::max(rep.max_monotonicity_violation, -inc);
    }
    auto w = [&](double x) {
      CVec2 fz = pz(x);
      CVec2 fc = pzc(x);
      Mat2 r = expr.R(x);
      return std::real(fc[0] * (r(0, 0) * fz[0] + r(0, 1) * fz[1]) +
                       fc[1] * (r(1, 0) * fz[0] + r(1, 1) * fz[1]));
    };
    double direct = integrate(w, c_grid[j], c_grid[j + 1], ks.quad);
    rep.max_increment_mismatch =
        std::max(rep.max_increment_mismatch,
                 std::abs(inc - direct) / std::max(1.0, std::abs(direct)));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Spectral transform and Parseval residual
// ---------------------------------------------------------------------------

struct CompactVectorField {
  double lo = 0.0, hi = 0.0;
  std::function<CVec2(double)> f;
};

inline std::vector<Complex> transform_hat(const CompactVectorField& f,
                                          const EntireSolutionHandle& phi,
                                          const DiracExpression& expr,
                                          const std::vector<Complex>& z_samples,
                                          const QuadSettings& qs = {1e-9, 1e-13},
                                          const char* /*unused*/ = nullptr) {
  if (!(expr.interval.a <= f.lo && f.hi <= expr.interval.b && f.lo < f.hi))
    throw ConfigError("transform_hat: support must be a compact of (a,b)");
  std::vector<Complex> out(z_samples.size());
  parallel_for(z_samples.size(), [&](std::size_t i) {
    Complex z = z_samples[i];
    SolutionPath p = phi.path(z, f.lo, f.hi);
    auto integrand = [&](double x) -> Complex {
      CVec2 fv = conj(f.f(x));
      CVec2 ph = p(x);
      Mat2 r = expr.R(x);
      return fv[0] * (r(0, 0) * ph[0] + r(0, 1) * ph[1]) +
             fv[1] * (r(1, 0) * ph[0] + r(1, 1) * ph[1]);
    };
    out[i] = integrate(integrand, f.lo, f.hi, qs);
  });
  return out;
}

struct ParsevalReport {
  double norm_squared = 0.0;      // int f* R f
  double measure_sum = 0.0;       // sum rho_n |fhat|^2 (+ density part)
  double residual = kNaN;         // relative defect
  double tail_fraction = kNaN;    // contribution of the outer 10% of atoms
  bool tail_warning = false;
};

inline ParsevalReport parseval_residual(const CompactVectorField& f,
                                        const EntireSolutionHandle& phi,
                                        const DiracExpression& expr,
                                        const SpectralMeasure& measure,
                                        const QuadSettings& qs = {1e-10, 1e-14},
                                        double tail_tol = 1e-3) {
  ParsevalReport rep;
  auto self = [&](double x) {
    CVec2 fv = f.f(x);
    CVec2 cf = conj(fv);
    Mat2 r = expr.R(x);
    return std::real(cf[0] * (r(0, 0) * fv[0] + r(0, 1) * fv[1]) +
                     cf[1] * (r(1, 0) * fv[0] + r(1, 1) * fv[1]));
  };
  rep.norm_squared = integrate(self, f.lo, f.hi, qs);
  if (rep.norm_squared == 0.0) {
    rep.measure_sum = 0.0;
    rep.residual = 0.0;
    rep.tail_fraction = 0.0;
    return rep;
  }

  std::vector<Complex> zs;
  zs.reserve(measure.atoms.size());
  for (const auto& a : measure.atoms) zs.push_back(Complex(a.lambda, 0.0));
  std::vector<Complex> hats = transform_hat(f, phi, expr, zs, qs);
  std::vector<double> contributions(hats.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < hats.size(); ++i) {
    contributions[i] = measure.atoms[i].mass * std::norm(hats[i]);
    sum += contributions[i];
  }
  // a.c. part by trapezoid on the sampled density (if any).
  bool has_density = false;
  for (double d : measure.density)
    if (d > 0) has_density = true;
  if (has_density && measure.grid.size() >= 2) {
    std::vector<Complex> gz;
    for (double l : measure.grid) gz.push_back(Complex(l, 0.0));
    std::vector<Complex> gh = transform_hat(f, phi, expr, gz, qs);
    for (std::size_t i = 0; i + 1 < measure.grid.size(); ++i)
      sum += 0.5 *
             (measure.density[i] * std::norm(gh[i]) +
              measure.density[i + 1] * std::norm(gh[i + 1])) *
             (measure.grid[i + 1] - measure.grid[i]);
  }
  rep.measure_sum = sum;
  rep.residual = std::abs(sum - rep.norm_squared) / rep.norm_squared;

  // Window-insufficiency heuristic: mass carried by the outer-|lambda|
  // tenth of the atoms still contributing.
  if (!contributions.empty()) {
    std::vector<std::size_t> order(contributions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(measure.atoms[a].lambda) <
             std::abs(measure.atoms[b].lambda);
    });
    double tail = 0.0;
    std::size_t cut = order.size() - std::max<std::size_t>(1, order.size() / 10);
    for (std::size_t i = cut; i < order.size(); ++i)
      tail += contributions[order[i]];
    rep.tail_fraction = tail / rep.norm_squared;
    rep.tail_warning = rep.tail_fraction > tail_tol;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cartwright diagnostics
// ---------------------------------------------------------------------------

struct CartwrightReport {
  std::vector<double> y_schedule;
  std::vector<double> log_growth;   // log|E(iy,c)| / y
  double type_estimate = kNaN;
  double log_integral = kNaN;       // int log+|E| / (1+l^2) over the window
  double window = kNaN;
  double tail_estimate = kNaN;
  double edge_value = kNaN;         // log+|E| near the window edge
};

inline CartwrightReport cartwright_diagnostics(const DeBrangesFunction& e,
                                               std::vector<double> y_schedule,
                                               double window,
                                               const QuadSettings& qs = {1e-7, 1e-12}) {
  if (y_schedule.empty() || window <= 0)
    throw ConfigError("cartwright_diagnostics: need a y schedule and window");
  CartwrightReport rep;
  rep.y_schedule = y_schedule;
  rep.window = window;
  rep.log_growth.resize(y_schedule.size());
  std::vector<double> logs(y_schedule.size());
  parallel_for(y_schedule.size(), [&](std::size_t i) {
    logs[i] = e.log_abs(Complex(0.0, y_schedule[i]));
    rep.log_growth[i] = logs[i] / y_schedule[i];
  });
  if (y_schedule.size() >= 3) {
    // Fit log|E(iy)| = tau*y + beta*log(y) + c0 (least squares) so the
    // algebraic prefactor does not bias the exponential type.
    double s[3][4] = {};
    for (std::size_t i = 0; i < y_schedule.size(); ++i) {
      double row[3] = {y_schedule[i], std::log(y_schedule[i]), 1.0};
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) s[r][c] += row[r] * row[c];
        s[r][3] += row[r] * logs[i];
      }
    }
    for (int col = 0; col < 3; ++col) {  // Gaussian elimination
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(s[r][col]) > std::abs(s[piv][col])) piv = r;
      std::swap(s[piv], s[col]);
      for (int r = 0; r < 3; ++r) {
        if (r == col || s[col][col] == 0) continue;
        double f = s[r][col] / s[col][col];
        for (int c = col; c < 4; ++c) s[r][c] -= f * s[col][c];
      }
    }
    rep.type_estimate = s[0][3] / s[0][0];
  } else {
    rep.type_estimate =
        *std::max_element(rep.log_growth.begin(), rep.log_growth.end());
  }

  auto logplus = [&](double l) {
    double v = e.log_abs(Complex(l, 0.0));
    return std::max(v, 0.0) / (1.0 + l * l);
  };
  rep.log_integral = integrate(logplus, -window, window, qs);
  rep.edge_value = std::max(
      {std::max(e.log_abs(Complex(window, 0.0)), 0.0),
       std::max(e.log_abs(Complex(-window, 0.0)), 0.0),
       std::max(e.log_abs(Complex(0.97 * window, 0.0)), 0.0)});
  rep.tail_estimate = 2.0 * rep.edge_value / window;
  return rep;
}

}  // namespace wdirac
