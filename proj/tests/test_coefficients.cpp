#include <catch2/catch_amalgamated.hpp>

#include "wdirac/dirac.hpp"
#include "wdirac/problem_io.hpp"

using namespace wdirac;

TEST_CASE("radial family entries", "[coefficients]") {
  // kappa = 0, q = 0: the free expression.
  auto free0 = make_radial({0.0, ScalarField::constant(0),
                            ScalarField::constant(0), kInf});
  CHECK(free0.Q(1.3).frobenius() == 0.0);
  CHECK((free0.R(1.3) - Mat2::identity()).frobenius() == 0.0);

  // kappa = 1: Q(x) = [[0, 1/x], [1/x, 0]].
  auto k1 = make_radial({1.0, ScalarField::constant(0),
                         ScalarField::constant(0), kInf});
  Mat2 q = k1.Q(0.25);
  CHECK(q(0, 0) == 0.0);
  CHECK(q(0, 1) == 4.0);
  CHECK(q(1, 0) == 4.0);
  CHECK(q(1, 1) == 0.0);

  // Entries reproduce the closed-form pattern to machine precision.
  RadialSpec spec{0.7, ScalarField::expression("sin(x)"),
                  ScalarField::expression("x^2"), kInf};
  auto expr = make_radial(spec);
  for (double x : {0.1, 0.9, 2.4}) {
    Mat2 m = expr.Q(x);
    CHECK(m(0, 0) == std::sin(x));
    CHECK(m(1, 1) == -std::sin(x));
    CHECK(m(0, 1) == 0.7 / x + x * x);
    CHECK(m(0, 1) == m(1, 0));
  }
  CHECK_THROWS_AS(expr.Q(0.0), EvalDomainError);
}

TEST_CASE("radial rejections", "[coefficients]") {
  CHECK_THROWS_AS(make_radial({-0.5, ScalarField::constant(0),
                               ScalarField::constant(0), kInf}),
                  ValidationError);
  // kappa = 1/2 with q_sc = x^{-1/2}: log-weighted integral converges.
  CHECK_NOTHROW(make_radial({0.5, ScalarField::expression("1/sqrt(x)"),
                             ScalarField::constant(0), kInf}));
  // kappa = 1/2 with q_sc = 1/x: log-weighted integral diverges.
  CHECK_THROWS_AS(make_radial({0.5, ScalarField::expression("1/x"),
                               ScalarField::constant(0), kInf}),
                  ValidationError);
}

TEST_CASE("hypothesis validation", "[coefficients]") {
  auto fr = free_expression(Interval::open(0.0, 1.0));
  auto rep = validate_hypotheses(fr, SamplePlan::standard(fr.interval));
  CHECK(rep.ok);
  CHECK(rep.max_symmetry_residual == 0.0);
  CHECK(rep.min_weight_eigenvalue == 1.0);

  DiracExpression tilted = fr;
  tilted.R = MatrixField::constant(Mat2{{{1.0, 0.5}, {0.5, 1.0}}});
  auto rep2 = validate_hypotheses(tilted, SamplePlan::standard(fr.interval));
  CHECK(rep2.ok);
  CHECK(rep2.min_weight_eigenvalue == Catch::Approx(0.5).epsilon(1e-14));

  DiracExpression bad = fr;
  bad.Q = MatrixField::constant(Mat2{{{0.0, 1.0}, {0.5, 0.0}}});
  auto rep3 = validate_hypotheses(bad, SamplePlan::standard(fr.interval));
  CHECK(!rep3.ok);
  CHECK(std::isfinite(rep3.offending_x));

  DiracExpression indef = fr;
  indef.R = MatrixField::constant(Mat2{{{1.0, 0.0}, {0.0, -0.25}}});
  CHECK(!validate_hypotheses(indef, SamplePlan::standard(fr.interval)).ok);
}

TEST_CASE("grid fields interpolate and enforce coverage", "[coefficients]") {
  std::vector<double> xs;
  std::array<std::vector<double>, 4> vals;
  for (int i = 0; i <= 64; ++i) {
    double x = i / 64.0;
    xs.push_back(x);
    vals[0].push_back(std::sin(2 * x));
    vals[1].push_back(x * x);
    vals[2].push_back(x * x);
    vals[3].push_back(std::cos(x));
  }
  auto f = MatrixField::grid(xs, vals, GridInterp::kCubic);
  Mat2 m = f(0.437);
  CHECK(m(0, 0) == Catch::Approx(std::sin(2 * 0.437)).margin(2e-6));
  CHECK(m(0, 1) == Catch::Approx(0.437 * 0.437).margin(2e-7));
  CHECK_THROWS_AS(f(1.5), EvalDomainError);
  CHECK_THROWS_AS(f(-0.1), EvalDomainError);

  auto lin = MatrixField::grid(xs, vals, GridInterp::kLinear);
  CHECK(lin(0.437)(0, 0) == Catch::Approx(std::sin(2 * 0.437)).margin(2e-4));
}

TEST_CASE("interval construction", "[coefficients]") {
  CHECK_THROWS_AS(Interval::open(1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Interval::open(2.0, 1.0), ConfigError);
  auto iv = Interval::open(0.0, kInf);
  CHECK(iv.left_finite());
  CHECK(!iv.right_finite());
  CHECK(iv.midpoint() == 1.0);
}

TEST_CASE("problem files parse expressions, grids and radial blocks",
          "[coefficients]") {
  Json j = Json::parse(R"({
    "interval": {"a": 0, "b": "pi"},
    "Q": [["0","x"],["x","0"]],
    "R": [["1","0"],["0","1"]],
    "bc": {"left": {"angle": 0}, "right": {"angle": "pi/2"}}
  })");
  Problem p = parse_problem(j);
  CHECK(p.expr.interval.b == Catch::Approx(kPi));
  CHECK(p.expr.Q(0.5)(0, 1) == 0.5);
  CHECK(p.right.alpha == Catch::Approx(kPi / 2));

  Json jr = Json::parse(R"({
    "radial": {"kappa": 1, "q_sc": "0", "q_am": "0"},
    "bc": {"left": {"limit_point": true}, "right": {"limit_point": true}}
  })");
  Problem pr = parse_problem(jr);
  REQUIRE(pr.radial.has_value());
  CHECK(pr.radial->kappa == 1.0);
  CHECK(!pr.expr.interval.right_finite());
  CHECK(pr.left.kind == BoundaryCondition::Kind::kLimitPoint);

  Json jinf = Json::parse(R"({
    "interval": {"a": "-inf", "b": "inf"},
    "Q": [["0","0"],["0","0"]],
    "R": [["1","0"],["0","1"]]
  })");
  Problem pi = parse_problem(jinf);
  CHECK(!pi.expr.interval.left_finite());
  CHECK(!pi.expr.interval.right_finite());

  CHECK_THROWS_AS(parse_problem(Json::parse(R"({"interval": {"a":0,"b":1}})")),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_problem(Json::parse(
          R"({"interval":{"a":0,"b":1},"Q":[["0"]],"R":[["1","0"],["0","1"]]})")),
      ConfigError);
}

TEST_CASE("boundary condition invariants", "[coefficients]") {
  CHECK_THROWS_AS(BoundaryCondition::angle(EndpointSide::kLeft, -0.1),
                  ConfigError);
  CHECK_THROWS_AS(BoundaryCondition::angle(EndpointSide::kLeft, kPi),
                  ConfigError);
  // Frame data must satisfy W(theta, phi) = 1.
  CHECK_THROWS_AS(BoundaryCondition::frame(EndpointSide::kLeft,
                                           Vec2{{0.0, 1.0}}, Vec2{{2.0, 0.0}}),
                  ConfigError);
  CHECK_NOTHROW(BoundaryCondition::frame(EndpointSide::kLeft, Vec2{{0.0, 1.0}},
                                         Vec2{{1.0, 0.0}}));
}
