#pragma once

// Problem and transform files (JSON).
//
// Problem document:
//   {
//     "interval": {"a": 0, "b": "inf"},            // "inf"/"-inf" sentinels
//     "Q": [["0","0"],["0","0"]] | {"grid": {...}},
//     "R": ... ,
//     "radial": {"kappa": 1, "q_sc": "0", "q_am": "0"},   // alternative
//     "bc": {"left": {...}, "right": {...}},       // see below
//     "bc_t": {"left": {...}}                      // second left condition
//   }
// Conditions: {"angle": a} (number or expression), {"limit_point": true},
// {"radial": true} (the x^kappa-normalized radial condition), or
// {"u": ["e1","e2"], "v": ["e1","e2"]} reference solutions.
// Grid object: {"x": [...], "entries": [[..],[..],[..],[..]],
//               "interp": "linear"|"cubic"}.
//
// Transform document:
//   {"eta": "x" | "<expr>" | "cumulative:detR", "eta0": 0.0,
//    "gamma": "identity" | "weight-sqrt" | "rotation:<phi>" | [[..],[..]]}

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "wdirac/gauge.hpp"
#include "wdirac/solutions.hpp"

namespace wdirac {

using Json = nlohmann::ordered_json;

namespace detail {

inline double read_extended(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    // Allow constant expressions such as "pi/2".
    return expr_eval(*parse_expression(s), 0.0);
  }
  throw ConfigError(std::string("expected number or sentinel for ") + what);
}

inline MatrixField read_matrix_field(const Json& j, const char* what) {
  if (j.is_array()) {
    if (j.size() != 2 || j[0].size() != 2 || j[1].size() != 2)
      throw ConfigError(std::string(what) + ": expected a 2x2 array");
    std::array<std::string, 4> entries;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        const Json& e = j[r][c];
        entries[2 * r + c] =
            e.is_string() ? e.get<std::string>() : e.dump();
      }
    return MatrixField::expression(entries);
  }
  if (j.is_object() && j.contains("grid")) {
    const Json& g = j["grid"];
    std::vector<double> xs = g.at("x").get<std::vector<double>>();
    auto ent = g.at("entries");
    if (!ent.is_array() || ent.size() != 4)
      throw ConfigError(std::string(what) +
                        ": grid entries must hold 4 sample arrays");
    std::array<std::vector<double>, 4> values;
    for (int k = 0; k < 4; ++k)
      values[k] = ent[k].get<std::vector<double>>();
    GridInterp interp = GridInterp::kCubic;
    if (g.contains("interp") && g["interp"].get<std::string>() == "linear")
      interp = GridInterp::kLinear;
    return MatrixField::grid(std::move(xs), std::move(values), interp);
  }
  throw ConfigError(std::string(what) +
                    ": expected 2x2 expression array or grid object");
}

}  // namespace detail

struct Problem {
  DiracExpression expr;
  std::optional<RadialSpec> radial;
  BoundaryCondition left = BoundaryCondition::angle(EndpointSide::kLeft, 0.0);
  BoundaryCondition right = BoundaryCondition::angle(EndpointSide::kRight, 0.0);
  std::optional<BoundaryCondition> left_t;
  std::string source;
};

namespace detail {

inline BoundaryCondition read_condition(const Json& j, EndpointSide side,
                                        const Problem& p) {
  if (j.contains("limit_point") && j["limit_point"].get<bool>())
    return BoundaryCondition::limit_point(side);
  if (j.contains("radial") && j["radial"].get<bool>()) {
    if (!p.radial)
      throw ConfigError("bc {radial:true} needs a radial problem");
    if (side != EndpointSide::kLeft)
      throw ConfigError("the radial condition applies to the left endpoint");
    return radial_left_condition(*p.radial);
  }
  if (j.contains("angle"))
    return BoundaryCondition::angle(side, read_extended(j["angle"], "angle"));
  if (j.contains("u")) {
    auto mk = [&](const Json& arr, const char* what) {
      if (!arr.is_array() || arr.size() != 2)
        throw ConfigError(std::string(what) + ": expected [expr, expr]");
      ExprPtr e1 = parse_expression(arr[0].get<std::string>());
      ExprPtr e2 = parse_expression(arr[1].get<std::string>());
      return VectorField2(what, [e1, e2](double x) {
        return Vec2{{expr_eval(*e1, x), expr_eval(*e2, x)}};
      });
    };
    VectorField2 u = mk(j["u"], "u");
    VectorField2 v = j.contains("v") ? mk(j["v"], "v") : VectorField2{};
    return BoundaryCondition::reference(side, std::move(u), std::move(v));
  }
  throw ConfigError("unrecognized boundary condition object");
}

}  // namespace detail

inline Problem parse_problem(const Json& j, std::string source = "inline") {
  Problem p;
  p.source = std::move(source);
  if (j.contains("radial")) {
    const Json& r = j["radial"];
    RadialSpec spec;
    spec.kappa = r.at("kappa").get<double>();
    spec.q_sc = r.contains("q_sc")
                    ? ScalarField::expression(r["q_sc"].get<std::string>())
                    : ScalarField::constant(0.0);
    spec.q_am = r.contains("q_am")
                    ? ScalarField::expression(r["q_am"].get<std::string>())
                    : ScalarField::constant(0.0);
    spec.b = kInf;
    if (r.contains("b")) spec.b = detail::read_extended(r["b"], "radial.b");
    if (j.contains("interval"))
      spec.b = detail::read_extended(j["interval"].at("b"), "interval.b");
    p.radial = spec;
    p.expr = make_radial(spec);
  } else {
    if (!j.contains("interval") || !j.contains("Q") || !j.contains("R"))
      throw ConfigError("problem needs interval, Q, R (or a radial block)");
    double a = detail::read_extended(j["interval"].at("a"), "interval.a");
    double b = detail::read_extended(j["interval"].at("b"), "interval.b");
    p.expr.interval = Interval::open(a, b);
    p.expr.Q = detail::read_matrix_field(j["Q"], "Q");
    p.expr.R = detail::read_matrix_field(j["R"], "R");
    p.expr.label = p.source;
  }

  if (j.contains("bc")) {
    const Json& bc = j["bc"];
    if (bc.contains("left"))
      p.left = detail::read_condition(bc["left"], EndpointSide::kLeft, p);
    if (bc.contains("right"))
      p.right = detail::read_condition(bc["right"], EndpointSide::kRight, p);
  }
  if (j.contains("bc_t")) {
    if (!j["bc_t"].contains("left"))
      throw ConfigError("bc_t must carry a left condition");
    p.left_t =
        detail::read_condition(j["bc_t"]["left"], EndpointSide::kLeft, p);
  }
  return p;
}

inline Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("problem file " + path.string() + ": " + e.what());
  }
  return parse_problem(j, path.string());
}

// ---------------------------------------------------------------------------
// Transform specs
// ---------------------------------------------------------------------------

inline LiouvilleTransform parse_transform(const Json& j,
                                          const DiracExpression& expr) {
  Interval dom = expr.interval;
  Reparam eta = Reparam::shift(
      j.contains("eta0") ? j["eta0"].get<double>() : 0.0);
  if (j.contains("eta")) {
    const Json& e = j["eta"];
    std::string s = e.get<std::string>();
    if (s == "cumulative:detR") {
      eta = Reparam::cumulative(detail::sqrt_det_field(expr.R),
                                dom.midpoint(), dom);
    } else if (s == "x" || s == "id") {
      eta = Reparam::shift(0.0);
    } else {
      eta = Reparam::expression(ScalarField::expression(s), dom);
    }
  }

  MatrixField gamma = MatrixField::identity();
  if (j.contains("gamma")) {
    const Json& g = j["gamma"];
    if (g.is_string()) {
      std::string s = g.get<std::string>();
      if (s == "identity") {
        gamma = MatrixField::identity();
      } else if (s == "weight-sqrt") {
        Reparam e = eta;
        gamma = detail::weight_sqrt_field(
            expr.R, ScalarField::named(
                        "eta'", [e](double x) { return e.derivative(x); }));
      } else if (s.rfind("rotation:", 0) == 0) {
        ScalarField phi = ScalarField::expression(s.substr(9));
        double scale = dom.scale();
        gamma = MatrixField::named(
            "rotation(" + s.substr(9) + ")",
            [phi](double x) {
              double p = phi(x);
              double c = std::cos(p), sn = std::sin(p);
              return Mat2{{{c, -sn}, {sn, c}}};
            },
            [phi, scale](double x) {
              double p = phi(x);
              double c = std::cos(p), sn = std::sin(p);
              return phi.derivative(x, scale) *
                     (kJ * Mat2{{{c, -sn}, {sn, c}}});
            });
      } else {
        throw ConfigError("unknown named gamma '" + s + "'");
      }
    } else {
      gamma = detail::read_matrix_field(g, "gamma");
    }
  }
  LiouvilleTransform t{eta, gamma, dom, detail::map_interval(eta, dom),
                       "file-transform"};
  return t;
}

inline LiouvilleTransform load_transform(const std::filesystem::path& path,
                                         const DiracExpression& expr) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open transform file " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("transform file " + path.string() + ": " + e.what());
  }
  return parse_transform(j, expr);
}

// Snapshot of an expression's coefficients as a grid-backed problem
// document (used to persist transformed problems).
inline Json expression_to_grid_json(const DiracExpression& expr, int nodes) {
  const Interval& iv = expr.interval;
  if (!iv.left_finite() || !iv.right_finite())
    throw ConfigError("grid snapshot needs a finite interval");
  Json out;
  out["interval"] = {{"a", iv.a}, {"b", iv.b}};
  double guard = 1e-11 * iv.scale();
  std::vector<double> xs(nodes);
  std::array<std::vector<double>, 4> qv, rv;
  for (auto& v : qv) v.resize(nodes);
  for (auto& v : rv) v.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    xs[i] = iv.a + (iv.b - iv.a) * double(i) / (nodes - 1);
    double x = std::min(std::max(xs[i], iv.a + guard), iv.b - guard);
    Mat2 q = expr.Q(x), r = expr.R(x);
    for (int k = 0; k < 4; ++k) {
      qv[k][i] = q(k / 2, k % 2);
      rv[k][i] = r(k / 2, k % 2);
    }
  }
  auto grid_of = [&](const std::array<std::vector<double>, 4>& v) {
    Json g;
    g["grid"] = {{"x", xs}, {"entries", {v[0], v[1], v[2], v[3]}},
                 {"interp", "cubic"}};
    return g;
  };
  out["Q"] = grid_of(qv);
  out["R"] = grid_of(rv);
  return out;
}

}  // namespace wdirac
