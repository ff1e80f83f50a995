#pragma once

// Randomized property suites over seeded smooth problems: Wronskian
// x-constancy, Lagrange identity residuals, det Gamma = 1 along
// zero-potential orbits, and the transfer-matrix flow property.

#include "wdirac/gauge.hpp"
#include "wdirac/generators.hpp"

namespace wdirac {

struct SuiteResult {
  std::string name;
  int cases = 0;
  double worst = 0.0;
  double tol = 0.0;
  bool pass = false;
};

inline SuiteResult run_wronskian_suite(std::uint64_t seed, int cases,
                                       double tol = 1e-9) {
  SuiteResult res{"wronskian-constancy", cases, 0.0, tol, false};
  std::vector<double> worst(cases, 0.0);
  parallel_for(cases, [&](std::size_t i) {
    auto rp = random_smooth_problem(seed + i);
    std::mt19937_64 rng(seed * 1315423911u + i);
    std::uniform_real_distribution<double> re(-2.0, 2.0), im(-2.0, 2.0);
    Complex z(re(rng), im(rng));
    PropagationSettings prop;
    prop.rtol = 1e-10;
    double x0 = 0.5, xa = 0.12, xb = 0.91;
    SolutionTrajectory ta, tb;
    propagate(rp.expr, z, {x0, CVec2{1.0, 0.0}}, xa, prop, &ta);
    propagate(rp.expr, z, {x0, CVec2{0.3, 1.0}}, xa, prop, &tb);
    Complex w_a = wronskian(ta.eval(xa), tb.eval(xa));
    Complex w_mid = wronskian(ta.eval(0.3), tb.eval(0.3));
    SolutionTrajectory ua, ub;
    propagate(rp.expr, z, {x0, CVec2{1.0, 0.0}}, xb, prop, &ua);
    propagate(rp.expr, z, {x0, CVec2{0.3, 1.0}}, xb, prop, &ub);
    Complex w_b = wronskian(ua.eval(xb), ub.eval(xb));
    double scale = std::max(1.0, std::abs(w_a));
    worst[i] = std::max(std::abs(w_a - w_b), std::abs(w_a - w_mid)) / scale;
  });
  for (double w : worst) res.worst = std::max(res.worst, w);
  res.pass = res.worst < tol;
  return res;
}

inline SuiteResult run_lagrange_suite(std::uint64_t seed, int cases,
                                      double tol = 1e-8) {
  SuiteResult res{"lagrange-residual", cases, 0.0, tol, false};
  std::vector<double> worst(cases, 0.0);
  parallel_for(cases, [&](std::size_t i) {
    auto rp = random_smooth_problem(seed + i);
    std::mt19937_64 rng(seed * 2654435761u + i);
    std::uniform_real_distribution<double> re(-2.0, 2.0), im(-2.0, 2.0);
    Complex zeta(re(rng), im(rng)), z(re(rng), im(rng));
    PropagationSettings prop;
    prop.rtol = 1e-11;
    double alpha = 0.1, beta = 0.9, x0 = 0.5;
    SolutionTrajectory tf, tg;
    propagate(rp.expr, std::conj(zeta), {x0, CVec2{0.8, -0.2}}, alpha, prop, &tf);
    SolutionTrajectory tf2;
    propagate(rp.expr, std::conj(zeta), {x0, CVec2{0.8, -0.2}}, beta, prop, &tf2);
    propagate(rp.expr, z, {x0, CVec2{0.1, 1.0}}, alpha, prop, &tg);
    SolutionTrajectory tg2;
    propagate(rp.expr, z, {x0, CVec2{0.1, 1.0}}, beta, prop, &tg2);
    auto f = [&](double x) { return x <= x0 ? tf.eval(x) : tf2.eval(x); };
    auto g = [&](double x) { return x <= x0 ? tg.eval(x) : tg2.eval(x); };
    worst[i] = lagrange_residual(rp.expr, zeta, z, f, g, alpha, beta,
                                 QuadSettings{1e-11, 1e-14});
  });
  for (double w : worst) res.worst = std::max(res.worst, w);
  res.pass = res.worst < tol;
  return res;
}

inline SuiteResult run_det_gamma_suite(std::uint64_t seed, int cases,
                                       double tol = 1e-10) {
  SuiteResult res{"det-gamma-orbit", cases, 0.0, tol, false};
  std::vector<double> worst(cases, 0.0);
  parallel_for(cases, [&](std::size_t i) {
    RandomProblemOptions opts;
    opts.identity_weight = true;
    auto rp = random_smooth_problem(seed + i, opts);
    PushforwardOptions po;
    po.validate = false;
    auto nk = kill_potential(rp.expr, po);
    double dev = 0.0;
    for (double x : {0.05, 0.31, 0.52, 0.77, 0.97}) {
      dev = std::max(dev, std::abs(nk.transform.gamma(x).det() - 1.0));
      dev = std::max(dev, nk.expr.Q(x).frobenius());
    }
    worst[i] = dev;
  });
  for (double w : worst) res.worst = std::max(res.worst, w);
  res.pass = res.worst < tol;
  return res;
}

inline SuiteResult run_flow_suite(std::uint64_t seed, int cases,
                                  double tol = 1e-9) {
  SuiteResult res{"transfer-flow", cases, 0.0, tol, false};
  std::vector<double> worst(cases, 0.0);
  parallel_for(cases, [&](std::size_t i) {
    auto rp = random_smooth_problem(seed + i);
    std::mt19937_64 rng(seed * 11400714819323198485ull + i);
    std::uniform_real_distribution<double> re(-2.0, 2.0), im(-2.0, 2.0);
    Complex z(re(rng), im(rng));
    PropagationSettings prop;
    prop.rtol = 1e-10;
    double x0 = 0.15, x1 = 0.55, x2 = 0.85;
    CMat2 t01 = transfer_matrix(rp.expr, z, x0, x1, prop);
    CMat2 t12 = transfer_matrix(rp.expr, z, x1, x2, prop);
    CMat2 t02 = transfer_matrix(rp.expr, z, x0, x2, prop);
    CMat2 comp = t12 * t01;
    double dev = std::abs(t02.det() - 1.0);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        dev = std::max(dev, std::abs(comp(r, c) - t02(r, c)));
    worst[i] = dev;
  });
  for (double w : worst) res.worst = std::max(res.worst, w);
  res.pass = res.worst < tol;
  return res;
}

inline std::vector<SuiteResult> run_property_suites(std::uint64_t seed,
                                                    int cases) {
  return {run_wronskian_suite(seed, cases), run_lagrange_suite(seed, cases),
          run_det_gamma_suite(seed, cases), run_flow_suite(seed, cases)};
}

}  // namespace wdirac
