#pragma once

// Embedded Dormand-Prince 5(4) with the standard order-4 continuous
// extension. Generic over small fixed-size states (complex 2-vectors for
// Dirac solutions, real 2x2 matrices for transform frames).

#include "wdirac/common.hpp"

namespace wdirac {

// State adapters ------------------------------------------------------------

inline int state_size(const CVec2&) { return 2; }
inline void state_components(const CVec2& s, double* out) {
  out[0] = std::abs(s[0]);
  out[1] = std::abs(s[1]);
}
inline CVec2 state_axpy(double a, const CVec2& x, const CVec2& y) {
  return {a * x[0] + y[0], a * x[1] + y[1]};
}
inline CVec2 state_scale(double a, const CVec2& x) {
  return {a * x[0], a * x[1]};
}

inline int state_size(const Mat2&) { return 4; }
inline void state_components(const Mat2& s, double* out) {
  out[0] = std::abs(s(0, 0));
  out[1] = std::abs(s(0, 1));
  out[2] = std::abs(s(1, 0));
  out[3] = std::abs(s(1, 1));
}
inline Mat2 state_axpy(double a, const Mat2& x, const Mat2& y) {
  return a * x + y;
}
inline Mat2 state_scale(double a, const Mat2& x) { return a * x; }

// Dense trajectory ----------------------------------------------------------

template <class State>
struct DenseStep {
  double x0, h;
  State r1, r2, r3, r4, r5;
};

template <class State>
class Trajectory {
 public:
  void push(DenseStep<State> st) { steps_.push_back(std::move(st)); }
  bool empty() const { return steps_.empty(); }
  double front_x() const { return steps_.front().x0; }
  double back_x() const { return steps_.back().x0 + steps_.back().h; }

  bool covers(double x) const {
    if (steps_.empty()) return false;
    double lo = std::min(front_x(), back_x());
    double hi = std::max(front_x(), back_x());
    double pad = 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi));
    return lo - pad <= x && x <= hi + pad;
  }

  State eval(double x) const {
    if (steps_.empty()) throw Error("trajectory: empty");
    // Steps are stored in integration order; locate by binary search.
    bool fwd = steps_.front().h > 0;
    std::size_t lo = 0, hi = steps_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      const auto& s = steps_[mid];
      double end = s.x0 + s.h;
      if (fwd ? (x > end) : (x < end))
        lo = mid + 1;
      else
        hi = mid;
    }
    const auto& s = steps_[lo];
    double th = (x - s.x0) / s.h;
    th = std::min(1.0, std::max(0.0, th));
    double th1 = 1.0 - th;
    // y = r1 + th*(r2 + th1*(r3 + th*(r4 + th1*r5)))
    State inner = state_axpy(th1, s.r5, s.r4);
    inner = state_axpy(th, inner, s.r3);
    inner = state_axpy(th1, inner, s.r2);
    return state_axpy(th, inner, s.r1);
  }

  const std::vector<DenseStep<State>>& steps() const { return steps_; }

 private:
  std::vector<DenseStep<State>> steps_;
};

// Integrator ----------------------------------------------------------------

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = kInf;
  long max_steps = 50'000'000;
};

namespace dp5 {
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113,
                        a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                        c5 = 8.0 / 9;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                        e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights (Hairer's contd5).
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;
}  // namespace dp5

// Integrates y' = rhs(x, y) from x0 to x1 (either direction).
// With `traj` non-null, dense steps are recorded. With `log_scale` non-null
// the state is renormalized when it grows huge (linear systems only) and the
// accumulated log of the factor is returned; incompatible with `traj`.
template <class State, class RHS>
State rk_integrate(RHS&& rhs, double x0, State y, double x1,
                   const StepControl& ctl, Trajectory<State>* traj = nullptr,
                   double* log_scale = nullptr) {
  if (traj && log_scale)
    throw Error("rk_integrate: dense output with renormalization unsupported");
  if (x1 == x0) {
    if (traj)
      traj->push({x0, 1e-30, y, State{}, State{}, State{}, State{}});
    return y;
  }
  const double dir = (x1 > x0) ? 1.0 : -1.0;
  const int n = state_size(y);
  double comps0[8], comps1[8], compse[8];

  State k1 = rhs(x0, y);
  // Initial step size: crude curvature probe.
  double h;
  {
    state_components(y, comps0);
    state_components(k1, comps1);
    double dy = 0, df = 0;
    for (int i = 0; i < n; ++i) {
      double sc = ctl.atol + ctl.rtol * comps0[i];
      dy = std::max(dy, comps0[i] / sc);
      df = std::max(df, comps1[i] / sc);
    }
    h = (df > 1e-30) ? 0.01 * std::max(1e-6, dy) / df : 1e-6;
    h = std::min({h, std::abs(x1 - x0), ctl.max_step});
    h = std::max(h, 1e-10 * std::abs(x1 - x0));
    h *= dir;
  }

  double x = x0;
  long nsteps = 0;
  while (dir * (x1 - x) > 0) {
    if (++nsteps > ctl.max_steps)
      throw PropagationError("rk_integrate: step budget exhausted", x);
    if (std::abs(h) < 16 * kEps * std::max(std::abs(x), std::abs(x1)))
      throw PropagationError("rk_integrate: step size underflow", x);
    if (dir * (x + h - x1) > 0) h = x1 - x;

    using namespace dp5;
    State k2 = rhs(x + c2 * h, state_axpy(h * a21, k1, y));
    State t3 = state_axpy(h * a31, k1, state_axpy(h * a32, k2, y));
    State k3 = rhs(x + c3 * h, t3);
    State t4 = state_axpy(h * a41, k1,
                          state_axpy(h * a42, k2, state_axpy(h * a43, k3, y)));
    State k4 = rhs(x + c4 * h, t4);
    State t5 = state_axpy(
        h * a51, k1,
        state_axpy(h * a52, k2,
                   state_axpy(h * a53, k3, state_axpy(h * a54, k4, y))));
    State k5 = rhs(x + c5 * h, t5);
    State t6 = state_axpy(
        h * a61, k1,
        state_axpy(h * a62, k2,
                   state_axpy(h * a63, k3,
                              state_axpy(h * a64, k4,
                                         state_axpy(h * a65, k5, y)))));
    State k6 = rhs(x + h, t6);
    State y1 = state_axpy(
        h * a71, k1,
        state_axpy(h * a73, k3,
                   state_axpy(h * a74, k4,
                              state_axpy(h * a75, k5,
                                         state_axpy(h * a76, k6, y)))));
    State k7 = rhs(x + h, y1);

    State errv = state_axpy(
        h * e1, k1,
        state_axpy(h * e3, k3,
                   state_axpy(h * e4, k4,
                              state_axpy(h * e5, k5,
                                         state_axpy(h * e6, k6,
                                                    state_axpy(h * e7, k7,
                                                               State{}))))));
    state_components(y, comps0);
    state_components(y1, comps1);
    state_components(errv, compse);
    double err = 0;
    for (int i = 0; i < n; ++i) {
      double sc = ctl.atol + ctl.rtol * std::max(comps0[i], comps1[i]);
      double e = compse[i] / sc;
      err += e * e;
    }
    err = std::sqrt(err / n);

    if (err <= 1.0) {
      if (traj) {
        DenseStep<State> st;
        st.x0 = x;
        st.h = h;
        st.r1 = y;
        State ydiff = state_axpy(-1.0, y, y1);
        st.r2 = ydiff;
        State bspl = state_axpy(h, k1, state_axpy(-1.0, ydiff, State{}));
        st.r3 = bspl;
        st.r4 = state_axpy(
            -1.0, state_axpy(h, k7, State{}),
            state_axpy(-1.0, bspl, ydiff));
        st.r5 = state_axpy(
            h * d1, k1,
            state_axpy(h * d3, k3,
                       state_axpy(h * d4, k4,
                                  state_axpy(h * d5, k5,
                                             state_axpy(h * d6, k6,
                                                        state_axpy(h * d7, k7,
                                                                   State{}))))));
        traj->push(std::move(st));
      }
      x += h;
      y = y1;
      k1 = k7;  // FSAL
      if (log_scale) {
        state_components(y, comps0);
        double mx = 0;
        for (int i = 0; i < n; ++i) mx = std::max(mx, comps0[i]);
        if (mx > 1e100) {
          y = state_scale(1.0 / mx, y);
          k1 = state_scale(1.0 / mx, k1);
          *log_scale += std::log(mx);
        }
      }
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h *= std::min(5.0, std::max(0.2, fac));
      if (std::abs(h) > ctl.max_step) h = dir * ctl.max_step;
    } else {
      double fac = 0.9 * std::pow(err, -0.2);
      h *= std::max(0.1, fac);
    }
  }
  return y;
}

}  // namespace wdirac
