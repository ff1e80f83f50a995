#pragma once

// Adaptive Gauss-Kronrod quadrature (G7/K15), improper integration toward a
// singular or infinite endpoint by geometric subdivision, and memoized
// cumulative integrals with a monotone inverse.

#include <map>
#include <mutex>

#include "wdirac/common.hpp"
#include "wdirac/fields.hpp"

namespace wdirac {

struct QuadSettings {
  double rtol = 1e-10;
  double atol = 1e-14;
  int max_cells = 4000;
};

namespace detail {

// QUADPACK dqk15 nodes and weights on [-1,1].
inline constexpr double kGK15X[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGK15W[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kG7W[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
double qmag(const T& v) {
  return std::abs(v);
}

template <class F>
auto gk15(F&& f, double lo, double hi)
    -> std::pair<decltype(f(lo)), double> {
  using T = decltype(f(lo));
  double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  T fc = f(c);
  T kron = kGK15W[7] * fc;
  T gauss = kG7W[3] * fc;
  for (int j = 0; j < 7; ++j) {
    T fa = f(c - h * kGK15X[j]);
    T fb = f(c + h * kGK15X[j]);
    kron = kron + kGK15W[j] * (fa + fb);
    if (j % 2 == 1) gauss = gauss + kG7W[j / 2] * (fa + fb);
  }
  kron = h * kron;
  gauss = h * gauss;
  // |K15 - G7| overestimates the K15 error, which keeps refinement honest.
  double err = qmag(kron - gauss);
  return {kron, err};
}

}  // namespace detail

// Globally adaptive integral over a finite interval (worst-cell bisection
// with a cell budget and stall detection, so noisy integrands terminate).
// T is double or Complex.
template <class F>
auto integrate(F&& f, double lo, double hi, const QuadSettings& qs = {})
    -> decltype(f(lo)) {
  using T = decltype(f(lo));
  if (lo == hi) return T{};
  double sign = 1.0;
  if (lo > hi) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  struct Seg {
    double lo, hi, err;
    T val;
  };
  auto [v0, e0] = detail::gk15(f, lo, hi);
  std::vector<Seg> segs{{lo, hi, e0, v0}};
  T total = v0;
  double total_err = e0;
  double resabs = detail::qmag(v0);
  // Tolerance against the larger of |result| and a fraction of the
  // accumulated magnitude, so cancellation-heavy oscillatory integrals
  // terminate at an honest absolute accuracy.
  auto tol_of = [&](const T& t) {
    return std::max(qs.atol,
                    qs.rtol * std::max(detail::qmag(t), 0.01 * resabs));
  };
  while (total_err > tol_of(total) &&
         static_cast<int>(segs.size()) < qs.max_cells) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i)
      if (segs[i].err > segs[worst].err) worst = i;
    Seg s = segs[worst];
    double mid = 0.5 * (s.lo + s.hi);
    if (s.hi - s.lo < 64 * kEps * (std::abs(s.lo) + std::abs(s.hi) + 1.0))
      break;  // cannot refine further
    auto [va, ea] = detail::gk15(f, s.lo, mid);
    auto [vb, eb] = detail::gk15(f, mid, s.hi);
    total = total - s.val + va + vb;
    total_err += ea + eb - s.err;
    resabs += detail::qmag(va) + detail::qmag(vb) - detail::qmag(s.val);
    segs[worst] = {s.lo, mid, ea, va};
    segs.push_back({mid, s.hi, eb, vb});
  }
  T acc{};
  for (const auto& s : segs) acc = acc + s.val;
  if (total_err > 1e4 * tol_of(acc))
    throw QuadratureError(
        "adaptive quadrature stopped at error " + std::to_string(total_err) +
        " on [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
  return sign * acc;
}

struct ImproperResult {
  double value = 0.0;
  bool converged = false;
  int levels = 0;
  double tail_estimate = kInf;
};

// Integral of a nonnegative-ish integrand from `inner` toward `endpoint`
// (finite or infinite) by geometric cells, with convergence detection.
// Used for local-integrability checks and truncated-norm extrapolation.
template <class F>
ImproperResult integrate_to_endpoint(F&& f, double endpoint, double inner,
                                     double ratio = 0.5, int max_levels = 40,
                                     double rtol = 1e-10) {
  ImproperResult res;
  QuadSettings qs;
  qs.rtol = rtol;
  std::vector<double> increments;
  double total = 0.0;
  // Cell boundaries marching toward the endpoint: geometric shrink for a
  // finite endpoint, geometric growth toward an infinite one.
  double edge = inner;
  auto next_edge = [&](double cur) {
    if (std::isinf(endpoint))
      return (cur == inner) ? inner + std::copysign(std::max(1.0, std::abs(inner)),
                                                    endpoint)
                            : inner + (cur - inner) * 2.0;
    return endpoint + (cur - endpoint) * ratio;
  };
  double prev_extrapolated = kNaN;
  int stable = 0;
  for (int k = 0; k < max_levels; ++k) {
    double nxt = next_edge(edge);
    double cell = std::abs(
        integrate(f, std::min(edge, nxt), std::max(edge, nxt), qs));
    total += cell;
    increments.push_back(cell);
    res.levels = k + 1;
    edge = nxt;
    if (increments.size() >= 3) {
      double i0 = increments[increments.size() - 3];
      double i1 = increments[increments.size() - 2];
      double i2 = increments.back();
      if (i2 <= std::max(rtol * total, 1e-300)) {
        res.value = total;
        res.converged = true;
        res.tail_estimate = i2;
        return res;
      }
      if (i0 > 0 && i1 > 0 && i2 > 0) {
        double r1 = i1 / i0, r2 = i2 / i1;
        if (k > 6 && r1 >= 0.98 && r2 >= 0.98) break;  // not summable
        if (r2 < 0.97) {
          // Geometric tail extrapolation; accept once the extrapolated
          // value is Cauchy across two consecutive levels.
          double tail = i2 * r2 / (1.0 - r2);
          double extrapolated = total + tail;
          if (std::isfinite(prev_extrapolated) &&
              std::abs(extrapolated - prev_extrapolated) <=
                  rtol * std::max(std::abs(extrapolated), 1e-300)) {
            if (++stable >= 2) {
              res.value = extrapolated;
              res.converged = true;
              res.tail_estimate =
                  std::abs(extrapolated - prev_extrapolated) + rtol * tail;
              return res;
            }
          } else {
            stable = 0;
          }
          prev_extrapolated = extrapolated;
        } else {
          stable = 0;
          prev_extrapolated = kNaN;
        }
      }
    }
    if (total > 1e250) break;  // clearly divergent
  }
  res.value = total;
  res.converged = false;
  return res;
}

// Cumulative integral F(x) = base + int_anchor^x f, memoized at panel
// breakpoints, with a Newton/bisection inverse for monotone integrands.
// Thread-safe: the checkpoint memo is guarded by a mutex.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(ScalarField f, double anchor, double base,
                     double panel_width, QuadSettings qs = {})
      : f_(std::move(f)),
        anchor_(anchor),
        base_(base),
        panel_(panel_width),
        qs_(qs) {}

  double anchor() const { return anchor_; }
  double integrand(double x) const { return f_(x); }

  double operator()(double x) const {
    std::lock_guard<std::mutex> lock(mu_);
    return eval_locked(x);
  }

  // Inverse of a strictly monotone cumulative (integrand > 0), bracketed
  // within [lo, hi] of the x-domain.
  double inverse(double y, double lo, double hi) const {
    std::lock_guard<std::mutex> lock(mu_);
    double flo = eval_locked(lo), fhi = eval_locked(hi);
    if (y <= flo) return lo;
    if (y >= fhi) return hi;
    double x = lo + (hi - lo) * (y - flo) / (fhi - flo);
    for (int it = 0; it < 64; ++it) {
      double fx = eval_locked(x);
      if (fx > y)
        hi = x;
      else
        lo = x;
      double d = f_(x);
      double step = (d > 0) ? (y - fx) / d : 0.0;
      double xn = x + step;
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      if (std::abs(xn - x) <= 1e-15 * std::max(1.0, std::abs(x))) return xn;
      x = xn;
    }
    return x;
  }

 private:
  double eval_locked(double x) const {
    if (x == anchor_) return base_;
    // Walk from the nearest memoized checkpoint.
    double cx = anchor_, cv = base_;
    auto it = memo_.upper_bound(x);
    if (it != memo_.begin()) {
      auto lo = std::prev(it);
      cx = lo->first;
      cv = lo->second;
    }
    if (it != memo_.end() &&
        std::abs(it->first - x) < std::abs(x - cx)) {
      cx = it->first;
      cv = it->second;
    }
    if (std::abs(anchor_ - x) < std::abs(cx - x)) {
      cx = anchor_;
      cv = base_;
    }
    // Lay down panels between checkpoint and target; panel width grows
    // with the remaining distance so far-away queries stay logarithmic.
    double dir = (x >= cx) ? 1.0 : -1.0;
    while (std::abs(x - cx) > panel_) {
      double step = std::max(panel_, 0.5 * std::abs(x - cx));
      double nx = cx + dir * step;
      cv += integrate(
          [this](double t) { return f_(t); }, cx, nx, qs_);
      cx = nx;
      memo_[cx] = cv;
    }
    return cv + integrate([this](double t) { return f_(t); }, cx, x, qs_);
  }

  ScalarField f_;
  double anchor_ = 0.0;
  double base_ = 0.0;
  double panel_ = 0.125;
  QuadSettings qs_;
  mutable std::mutex mu_;
  mutable std::map<double, double> memo_;
};

}  // namespace wdirac
