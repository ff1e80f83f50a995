#pragma once

// Coefficient fields over an interval. Three interchangeable backends:
// closed-form expressions, sample grids with linear/cubic interpolation,
// and named callables. All fields are immutable after construction and
// safe to evaluate concurrently.

#include <algorithm>
#include <optional>
#include <utility>

#include "wdirac/common.hpp"
#include "wdirac/expr.hpp"

namespace wdirac {

enum class FieldRep { kExpression, kGrid, kNamed, kConstant };
enum class GridInterp { kLinear, kCubic };

namespace detail {

struct GridData {
  std::vector<double> x;
  GridInterp interp = GridInterp::kCubic;

  void check_cover(double q) const {
    if (q < x.front() || q > x.back())
      throw EvalDomainError("grid does not cover query point", q);
  }
  std::size_t cell(double q) const {
    auto it = std::upper_bound(x.begin(), x.end(), q);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    if (i > 0) --i;
    if (i >= x.size() - 1) i = x.size() - 2;
    return i;
  }

  double eval(const std::vector<double>& v, double q) const {
    check_cover(q);
    std::size_t i = cell(q);
    double h = x[i + 1] - x[i];
    double t = (q - x[i]) / h;
    if (interp == GridInterp::kLinear) return (1 - t) * v[i] + t * v[i + 1];
    // Cubic Hermite with central-difference slopes (one-sided at the ends).
    auto slope = [&](std::size_t k) {
      if (k == 0) return (v[1] - v[0]) / (x[1] - x[0]);
      if (k == x.size() - 1)
        return (v[k] - v[k - 1]) / (x[k] - x[k - 1]);
      return (v[k + 1] - v[k - 1]) / (x[k + 1] - x[k - 1]);
    };
    double m0 = slope(i) * h, m1 = slope(i + 1) * h;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v[i] + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * v[i + 1] + (t3 - t2) * m1;
  }

  double derivative(const std::vector<double>& v, double q) const {
    check_cover(q);
    std::size_t i = cell(q);
    double h = x[i + 1] - x[i];
    if (interp == GridInterp::kLinear) return (v[i + 1] - v[i]) / h;
    auto slope = [&](std::size_t k) {
      if (k == 0) return (v[1] - v[0]) / (x[1] - x[0]);
      if (k == x.size() - 1)
        return (v[k] - v[k - 1]) / (x[k] - x[k - 1]);
      return (v[k + 1] - v[k - 1]) / (x[k + 1] - x[k - 1]);
    };
    double t = (q - x[i]) / h;
    double m0 = slope(i) * h, m1 = slope(i + 1) * h;
    double t2 = t * t;
    return ((6 * t2 - 6 * t) * v[i] + (3 * t2 - 4 * t + 1) * m0 +
            (-6 * t2 + 6 * t) * v[i + 1] + (3 * t2 - 2 * t) * m1) /
           h;
  }
};

}  // namespace detail

class ScalarField {
  struct Raw {};
  explicit ScalarField(Raw) {}

 public:
  ScalarField() {
    describe_ = "0";
    eval_ = [](double) { return 0.0; };
    deriv_ = [](double) { return 0.0; };
  }

  static ScalarField constant(double c) {
    ScalarField f{Raw{}};
    f.rep_ = FieldRep::kConstant;
    f.describe_ = std::to_string(c);
    f.eval_ = [c](double) { return c; };
    f.deriv_ = [](double) { return 0.0; };
    return f;
  }

  static ScalarField expression(std::string_view text) {
    ScalarField f{Raw{}};
    f.rep_ = FieldRep::kExpression;
    f.describe_ = std::string(text);
    ExprPtr ast = parse_expression(text);
    ExprPtr dast = expr_derivative(ast);
    f.eval_ = [ast](double x) { return expr_eval(*ast, x); };
    f.deriv_ = [dast](double x) { return expr_eval(*dast, x); };
    return f;
  }

  static ScalarField grid(std::vector<double> xs, std::vector<double> vals,
                          GridInterp interp = GridInterp::kCubic) {
    if (xs.size() < 2 || xs.size() != vals.size())
      throw ConfigError("scalar grid needs >= 2 nodes and matching values");
    if (!std::is_sorted(xs.begin(), xs.end()))
      throw ConfigError("scalar grid nodes must be increasing");
    ScalarField f{Raw{}};
    f.rep_ = FieldRep::kGrid;
    f.describe_ = "grid[" + std::to_string(xs.size()) + "]";
    auto g = std::make_shared<detail::GridData>();
    g->x = std::move(xs);
    g->interp = interp;
    auto v = std::make_shared<std::vector<double>>(std::move(vals));
    f.eval_ = [g, v](double x) { return g->eval(*v, x); };
    f.deriv_ = [g, v](double x) { return g->derivative(*v, x); };
    return f;
  }

  static ScalarField named(std::string name, std::function<double(double)> fn,
                           std::function<double(double)> dfn = {}) {
    ScalarField f{Raw{}};
    f.rep_ = FieldRep::kNamed;
    f.describe_ = std::move(name);
    f.eval_ = std::move(fn);
    f.deriv_ = std::move(dfn);
    return f;
  }

  double operator()(double x) const { return eval_(x); }

  bool has_exact_derivative() const { return static_cast<bool>(deriv_); }

  // Exact when the backend provides one, centered difference otherwise.
  double derivative(double x, double scale = 1.0) const {
    if (deriv_) return deriv_(x);
    double h = std::max(1e-6 * scale, 1e-7 * std::abs(x));
    return (eval_(x + h) - eval_(x - h)) / (2 * h);
  }

  FieldRep rep() const { return rep_; }
  const std::string& describe() const { return describe_; }

 private:
  FieldRep rep_ = FieldRep::kConstant;
  std::string describe_;
  std::function<double(double)> eval_;
  std::function<double(double)> deriv_;
};

// Real 2-vector field (reference solutions for boundary conditions).
class VectorField2 {
 public:
  VectorField2() = default;
  VectorField2(std::string name, std::function<Vec2(double)> fn)
      : describe_(std::move(name)), eval_(std::move(fn)) {}
  static VectorField2 constant(Vec2 v) {
    return VectorField2("const", [v](double) { return v; });
  }
  Vec2 operator()(double x) const {
    if (!eval_) throw ConfigError("empty vector field");
    return eval_(x);
  }
  bool empty() const { return !eval_; }
  const std::string& describe() const { return describe_; }

 private:
  std::string describe_;
  std::function<Vec2(double)> eval_;
};

class MatrixField {
  struct Raw {};
  explicit MatrixField(Raw) {}

 public:
  MatrixField() {
    describe_ = "0";
    eval_ = [](double) { return Mat2::zero(); };
    deriv_ = [](double) { return Mat2::zero(); };
  }

  static MatrixField constant(Mat2 m) {
    MatrixField f{Raw{}};
    f.rep_ = FieldRep::kConstant;
    f.describe_ = "const";
    f.eval_ = [m](double) { return m; };
    f.deriv_ = [](double) { return Mat2::zero(); };
    return f;
  }

  static MatrixField identity() {
    MatrixField f = constant(Mat2::identity());
    f.describe_ = "I";
    return f;
  }

  // Entry expressions in row-major order.
  static MatrixField expression(const std::array<std::string, 4>& entries) {
    MatrixField f{Raw{}};
    f.rep_ = FieldRep::kExpression;
    f.describe_ = "[[" + entries[0] + "," + entries[1] + "],[" + entries[2] +
                  "," + entries[3] + "]]";
    std::array<ExprPtr, 4> ast, dast;
    for (int k = 0; k < 4; ++k) {
      ast[k] = parse_expression(entries[k]);
      dast[k] = expr_derivative(ast[k]);
    }
    f.eval_ = [ast](double x) {
      Mat2 m;
      for (int k = 0; k < 4; ++k) m(k / 2, k % 2) = expr_eval(*ast[k], x);
      return m;
    };
    f.deriv_ = [dast](double x) {
      Mat2 m;
      for (int k = 0; k < 4; ++k) m(k / 2, k % 2) = expr_eval(*dast[k], x);
      return m;
    };
    return f;
  }

  // values[k] holds samples of entry (k/2, k%2) on the shared node vector.
  static MatrixField grid(std::vector<double> xs,
                          std::array<std::vector<double>, 4> values,
                          GridInterp interp = GridInterp::kCubic) {
    if (xs.size() < 2) throw ConfigError("matrix grid needs >= 2 nodes");
    for (auto& v : values)
      if (v.size() != xs.size())
        throw ConfigError("matrix grid entry size mismatch");
    if (!std::is_sorted(xs.begin(), xs.end()))
      throw ConfigError("matrix grid nodes must be increasing");
    MatrixField f{Raw{}};
    f.rep_ = FieldRep::kGrid;
    f.describe_ = "grid[" + std::to_string(xs.size()) + "]";
    auto g = std::make_shared<detail::GridData>();
    g->x = std::move(xs);
    g->interp = interp;
    auto vals = std::make_shared<std::array<std::vector<double>, 4>>(std::move(values));
    f.eval_ = [g, vals](double x) {
      Mat2 m;
      for (int k = 0; k < 4; ++k) m(k / 2, k % 2) = g->eval((*vals)[k], x);
      return m;
    };
    f.deriv_ = [g, vals](double x) {
      Mat2 m;
      for (int k = 0; k < 4; ++k) m(k / 2, k % 2) = g->derivative((*vals)[k], x);
      return m;
    };
    return f;
  }

  static MatrixField named(std::string name, std::function<Mat2(double)> fn,
                           std::function<Mat2(double)> dfn = {}) {
    MatrixField f{Raw{}};
    f.rep_ = FieldRep::kNamed;
    f.describe_ = std::move(name);
    f.eval_ = std::move(fn);
    f.deriv_ = std::move(dfn);
    return f;
  }

  Mat2 operator()(double x) const { return eval_(x); }

  bool has_exact_derivative() const { return static_cast<bool>(deriv_); }

  // Exact derivative when available; centered differences at scale h
  // otherwise (numeric fallback stays inside (lo,hi) when given).
  Mat2 derivative(double x, double scale = 1.0, double lo = -kInf,
                  double hi = kInf) const {
    if (deriv_) return deriv_(x);
    double h = std::max(1e-6 * scale, 1e-7 * std::abs(x));
    h = std::min({h, (x - lo) / 2, (hi - x) / 2});
    if (h <= 0) throw EvalDomainError("derivative stencil outside interval", x);
    return (1.0 / (2 * h)) * (eval_(x + h) - eval_(x - h));
  }

  FieldRep rep() const { return rep_; }
  const std::string& describe() const { return describe_; }

 private:
  FieldRep rep_ = FieldRep::kConstant;
  std::string describe_;
  std::function<Mat2(double)> eval_;
  std::function<Mat2(double)> deriv_;
};

}  // namespace wdirac
