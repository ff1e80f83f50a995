#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wdirac {

using Complex = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline const double kPi = 3.14159265358979323846264338327950288;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration or usage (wrong preconditions, malformed input files).
class ConfigError : public Error {
  using Error::Error;
};

// Evaluation of a coefficient outside its domain (carries the offending x).
class EvalDomainError : public Error {
 public:
  EvalDomainError(const std::string& what, double x)
      : Error(what + " at x=" + std::to_string(x)), x_(x) {}
  double where() const { return x_; }

 private:
  double x_;
};

// Hypothesis validation failure (non-symmetric Q, non-positive R, ...).
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, double x = kNaN)
      : Error(what), x_(x) {}
  double where() const { return x_; }

 private:
  double x_;
};

// ODE propagation failure (step underflow near a bad singularity).
class PropagationError : public Error {
 public:
  PropagationError(const std::string& what, double x)
      : Error(what + " (blocked at x=" + std::to_string(x) + ")"), x_(x) {}
  double where() const { return x_; }

 private:
  double x_;
};

class QuadratureError : public Error {
  using Error::Error;
};

// Iterative scheme did not stabilize; carries the diagnostic history.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

// ---------------------------------------------------------------------------
// Small dense algebra: real/complex 2-vectors and 2x2 matrices
// ---------------------------------------------------------------------------

struct Vec2 {
  double v[2]{0.0, 0.0};
  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
};

struct CVec2 {
  Complex v[2]{0.0, 0.0};
  CVec2() = default;
  CVec2(Complex a, Complex b) : v{a, b} {}
  CVec2(const Vec2& r) : v{r[0], r[1]} {}
  Complex& operator[](int i) { return v[i]; }
  Complex operator[](int i) const { return v[i]; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {{a[0] + b[0], a[1] + b[1]}}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {{a[0] - b[0], a[1] - b[1]}}; }
inline Vec2 operator*(double s, Vec2 a) { return {{s * a[0], s * a[1]}}; }

inline CVec2 operator+(CVec2 a, CVec2 b) { return {a[0] + b[0], a[1] + b[1]}; }
inline CVec2 operator-(CVec2 a, CVec2 b) { return {a[0] - b[0], a[1] - b[1]}; }
inline CVec2 operator*(Complex s, CVec2 a) { return {s * a[0], s * a[1]}; }
inline CVec2 conj(CVec2 a) { return {std::conj(a[0]), std::conj(a[1])}; }
inline double norm2(CVec2 a) {
  return std::sqrt(std::norm(a[0]) + std::norm(a[1]));
}

struct Mat2 {
  // Row-major: m[row][col].
  double m[2][2]{{0.0, 0.0}, {0.0, 0.0}};
  double& operator()(int r, int c) { return m[r][c]; }
  double operator()(int r, int c) const { return m[r][c]; }

  static Mat2 identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }
  static Mat2 zero() { return {}; }

  double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  double trace() const { return m[0][0] + m[1][1]; }
  Mat2 transpose() const { return {{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }
  double frobenius() const {
    return std::sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] +
                     m[1][0] * m[1][0] + m[1][1] * m[1][1]);
  }
};

inline Mat2 operator+(Mat2 a, Mat2 b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}
inline Mat2 operator-(Mat2 a, Mat2 b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}
inline Mat2 operator*(double s, Mat2 a) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = s * a(i, j);
  return r;
}
inline Mat2 operator*(Mat2 a, Mat2 b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}
inline Vec2 operator*(Mat2 a, Vec2 x) {
  return {{a(0, 0) * x[0] + a(0, 1) * x[1], a(1, 0) * x[0] + a(1, 1) * x[1]}};
}
inline CVec2 operator*(Mat2 a, CVec2 x) {
  return {a(0, 0) * x[0] + a(0, 1) * x[1], a(1, 0) * x[0] + a(1, 1) * x[1]};
}

inline Mat2 inverse(Mat2 a) {
  double d = a.det();
  if (d == 0.0) throw Error("singular 2x2 matrix");
  return (1.0 / d) * Mat2{{{a(1, 1), -a(0, 1)}, {-a(1, 0), a(0, 0)}}};
}

// The symplectic matrix of the Dirac system; J^{-1} = -J.
inline const Mat2 kJ{{{0.0, -1.0}, {1.0, 0.0}}};

// Eigenvalues of a symmetric 2x2 matrix, descending order.
inline std::array<double, 2> sym_eigenvalues(Mat2 a) {
  double tr = a.trace();
  double disc = std::sqrt(std::max(
      0.0, 0.25 * (a(0, 0) - a(1, 1)) * (a(0, 0) - a(1, 1)) +
               a(0, 1) * a(1, 0)));
  return {0.5 * tr + disc, 0.5 * tr - disc};
}

// Symmetric positive-definite square root via eigendecomposition.
// Eigenvalue ordering ties broken by descending value.
inline Mat2 spd_sqrt(Mat2 a) {
  auto ev = sym_eigenvalues(a);
  if (ev[1] <= 0.0) throw Error("spd_sqrt: matrix not positive definite");
  double l1 = ev[0], l2 = ev[1];
  // Eigenvector for l1.
  double vx, vy;
  if (std::abs(a(0, 1)) > 1e-300) {
    vx = a(0, 1);
    vy = l1 - a(0, 0);
  } else {
    // Diagonal matrix: order by descending eigenvalue.
    if (a(0, 0) >= a(1, 1)) {
      vx = 1.0;
      vy = 0.0;
    } else {
      vx = 0.0;
      vy = 1.0;
    }
  }
  double n = std::hypot(vx, vy);
  vx /= n;
  vy /= n;
  double s1 = std::sqrt(l1), s2 = std::sqrt(l2);
  // sqrt(A) = s1 P + s2 (I-P) with P the l1 eigenprojector.
  Mat2 p{{{vx * vx, vx * vy}, {vx * vy, vy * vy}}};
  return s1 * p + s2 * (Mat2::identity() - p);
}

// Solve A X + X A = B for 2x2 matrices (tiny dense solve).
inline Mat2 solve_sylvester(Mat2 a, Mat2 b) {
  double m[4][5] = {};
  // Row for equation (i,j); unknowns ordered (00, 01, 10, 11).
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      int row = 2 * i + j;
      for (int k = 0; k < 2; ++k) {
        m[row][2 * k + j] += a(i, k);  // A_{ik} X_{kj}
        m[row][2 * i + k] += a(k, j);  // X_{ik} A_{kj}
      }
      m[row][4] = b(i, j);
    }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    for (int c = 0; c < 5; ++c) std::swap(m[piv][c], m[col][c]);
    if (m[col][col] == 0.0) throw Error("solve_sylvester: singular system");
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      double f = m[r][col] / m[col][col];
      for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
    }
  }
  Mat2 x;
  for (int k = 0; k < 4; ++k) x(k / 2, k % 2) = m[k][4] / m[k][k];
  return x;
}

struct CMat2 {
  Complex m[2][2]{{0.0, 0.0}, {0.0, 0.0}};
  Complex& operator()(int r, int c) { return m[r][c]; }
  Complex operator()(int r, int c) const { return m[r][c]; }
  static CMat2 identity() {
    CMat2 r;
    r(0, 0) = 1.0;
    r(1, 1) = 1.0;
    return r;
  }
  Complex det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

inline CVec2 operator*(const CMat2& a, CVec2 x) {
  return {a(0, 0) * x[0] + a(0, 1) * x[1], a(1, 0) * x[0] + a(1, 1) * x[1]};
}
inline CMat2 operator*(const CMat2& a, const CMat2& b) {
  CMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

// Plain bilinear Wronskian f1*g2 - f2*g1 (no conjugation).
inline Complex wronskian(CVec2 f, CVec2 g) {
  return f[0] * g[1] - f[1] * g[0];
}
inline double wronskian(Vec2 f, Vec2 g) { return f[0] * g[1] - f[1] * g[0]; }

// ---------------------------------------------------------------------------
// Root bracketing (Brent/Dekker style, cf. zeroin)
// ---------------------------------------------------------------------------

template <class F>
double brent_root(F f, double a, double b, double fa, double fb,
                  double tol = 1e-13) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw Error("brent_root: root not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    double xm = 0.5 * (c - b);
    double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) < tol1 || std::abs(fa) <= std::abs(fb)) {
      d = xm;
      e = d;
    } else {
      double s = fb / fa, p, q;
      if (a != c) {
        q = fa / fc;
        double r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      } else {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      }
      if (p > 0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < 3.0 * xm * q - std::abs(tol1 * q) &&
          p < std::abs(0.5 * e * q)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
  }
  return b;
}

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

inline bool nearly_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Chunked parallel map over [0, n); falls back to serial for small n.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         std::size_t min_grain = 4) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (n < min_grain || hw == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nthreads = std::min<std::size_t>(hw, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += nthreads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace wdirac
