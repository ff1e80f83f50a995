#pragma once

// Command-line driver. Subcommands: spectrum, weyl, measure, kernel-check,
// gauge, radial, two-spectra, verify. Outputs are written atomically under
// --out (report.json plus CSV tables); every report embeds the settings
// needed to rerun it. Exit codes: 0 success, 1 computational failure (with
// diagnostic JSON), 2 configuration error.

#include <CLI11.hpp>

#include "wdirac/problem_io.hpp"
#include "wdirac/report.hpp"
#include "wdirac/verify_suites.hpp"

namespace wdirac {
namespace cli {

inline Complex parse_z(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ConfigError("empty z literal");
  // Split at the last top-level +/- (not an exponent sign, not leading).
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto parse_part = [](std::string part, bool imag_required) {
    bool imag = false;
    if (!part.empty() && (part.back() == 'i' || part.back() == 'I')) {
      imag = true;
      part.pop_back();
      if (part.empty() || part == "+") part = "1";
      if (part == "-") part = "-1";
    }
    if (imag_required && !imag)
      throw ConfigError("z literal: imaginary part must end in 'i'");
    return std::pair<double, bool>{std::stod(part), imag};
  };
  try {
    if (split == std::string::npos) {
      auto [v, imag] = parse_part(s, false);
      return imag ? Complex(0.0, v) : Complex(v, 0.0);
    }
    auto [re, re_imag] = parse_part(s.substr(0, split), false);
    if (re_imag) throw ConfigError("z literal: real part carries 'i'");
    std::string rest = s.substr(split);
    auto [im, im_imag] = parse_part(rest, true);
    (void)im_imag;
    return Complex(re, im);
  } catch (const std::invalid_argument&) {
    throw ConfigError("malformed z literal '" + text + "' (use RE+IMi)");
  }
}

inline std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stod(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty schedule");
  return out;
}

// "lin:lo:hi:n" or "geo:lo:hi:n"
inline std::vector<double> parse_c_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t colon = text.find(':', pos);
    if (colon == std::string::npos) colon = text.size();
    parts.push_back(text.substr(pos, colon - pos));
    pos = colon + 1;
  }
  if (parts.size() != 4 || (parts[0] != "lin" && parts[0] != "geo"))
    throw ConfigError("c-grid spec must be lin:lo:hi:n or geo:lo:hi:n");
  double lo = std::stod(parts[1]), hi = std::stod(parts[2]);
  int n = std::stoi(parts[3]);
  if (!(lo < hi) || n < 2) throw ConfigError("bad c-grid spec");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double t = double(i) / (n - 1);
    out[i] = parts[0] == "lin" ? lo + (hi - lo) * t
                               : lo * std::pow(hi / lo, t);
  }
  return out;
}

struct CommonOptions {
  std::string problem_path;
  std::string out_dir = "out";
  double tol = 1e-10;
  std::uint64_t seed = 42;

  PropagationSettings prop() const {
    PropagationSettings p;
    p.rtol = tol;
    p.atol = tol * 1e-2;
    return p;
  }
  EigenSettings eigen() const {
    EigenSettings e;
    e.prop = prop();
    e.frame.prop = prop();
    return e;
  }
  WeylSettings weyl() const {
    WeylSettings w;
    w.prop = prop();
    w.frame.prop = prop();
    return w;
  }

  Json settings_json() const {
    Json s;
    s["problem"] = problem_path;
    s["tol"] = tol;
    s["seed"] = seed;
    s["eps_convention"] = "density from Im M(lambda + i*eps)";
    s["wronskian_convention"] = "plain bilinear f1*g2 - f2*g1";
    return s;
  }
};

inline Json base_report(const std::string& command, const CommonOptions& co) {
  Json j;
  j["command"] = command;
  j["generated_at"] = iso_timestamp();
  j["settings"] = co.settings_json();
  return j;
}

inline FundamentalSystem build_frame(const Problem& p, const CommonOptions& co) {
  FrameSettings fs;
  fs.prop = co.prop();
  return fundamental_system(p.expr, p.left, fs);
}

// Left solution handle: frame Phi when available, the singular radial
// construction for a limit-point radial origin.
inline EntireSolutionHandle left_phi(const Problem& p, const CommonOptions& co) {
  if (p.left.kind == BoundaryCondition::Kind::kLimitPoint) {
    if (!p.radial)
      throw ConfigError(
          "limit-point left endpoint: only the radial construction is "
          "available; supply a radial problem");
    VolterraSettings vs;
    vs.prop = co.prop();
    return singular_phi(*p.radial, vs);
  }
  return build_frame(p, co).phi;
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

inline int cmd_spectrum(const CommonOptions& co, double lo, double hi) {
  Problem p = load_problem(co.problem_path);
  EntireSolutionHandle phi = left_phi(p, co);
  Spectrum spec = eigenvalues(p.expr, phi, p.right, lo, hi, co.eigen());
  Json rep = base_report("spectrum", co);
  rep["settings"]["window"] = {lo, hi};
  rep["eigenvalues"] = spec.values;
  rep["residuals"] = spec.residuals;
  Json flagged = Json::array();
  for (auto& f : spec.flagged) flagged.push_back({f.first, f.second});
  rep["flagged_intervals"] = flagged;
  std::filesystem::path out(co.out_dir);
  std::vector<std::vector<double>> rows;
  for (double v : spec.values) rows.push_back({v});
  write_csv(out / "spectrum.csv", {"lambda"}, rows);
  write_json_report(out / "report.json", rep);
  return 0;
}

inline int cmd_weyl(const CommonOptions& co, const std::vector<Complex>& zs) {
  Problem p = load_problem(co.problem_path);
  WeylFunction m(p.expr, build_frame(p, co), p.right, co.weyl());
  Json rep = base_report("weyl", co);
  Json vals = Json::array();
  std::vector<std::vector<double>> rows;
  for (Complex z : zs) {
    Complex v = m(z);
    vals.push_back({{"z_re", z.real()},
                    {"z_im", z.imag()},
                    {"m_re", v.real()},
                    {"m_im", v.imag()}});
    rows.push_back({z.real(), z.imag(), v.real(), v.imag()});
  }
  rep["values"] = vals;
  std::filesystem::path out(co.out_dir);
  write_csv(out / "weyl.csv", {"z_re", "z_im", "m_re", "m_im"}, rows);
  write_json_report(out / "report.json", rep);
  return 0;
}

inline int cmd_measure(const CommonOptions& co, double lo, double hi,
                       const std::vector<double>& eps) {
  Problem p = load_problem(co.problem_path);
  MeasureSettings ms;
  ms.eigen = co.eigen();
  ms.eps_schedule = eps;
  SpectralMeasure meas;
  bool have_theta = p.left.kind != BoundaryCondition::Kind::kLimitPoint;
  if (have_theta) {
    WeylFunction m(p.expr, build_frame(p, co), p.right, co.weyl());
    meas = spectral_measure(m, lo, hi, ms);
  } else {
    meas = spectral_measure_discrete(p.expr, left_phi(p, co), p.right, lo, hi,
                                     ms);
  }
  Json rep = base_report("measure", co);
  rep["settings"]["window"] = {lo, hi};
  rep["settings"]["eps_schedule"] = eps;
  Json atoms = Json::array();
  std::vector<std::vector<double>> atom_rows, density_rows;
  for (auto& a : meas.atoms) {
    atoms.push_back({{"lambda", a.lambda},
                     {"mass", a.mass},
                     {"mass_stieltjes", a.mass_stieltjes},
                     {"mass_norming", a.mass_norming},
                     {"mismatch", a.mismatch},
                     {"flagged", a.flagged}});
    atom_rows.push_back({a.lambda, a.mass});
  }
  for (std::size_t i = 0; i < meas.grid.size(); ++i)
    density_rows.push_back({meas.grid[i], meas.density[i]});
  rep["atoms"] = atoms;
  rep["m_c"] = meas.m_c;
  rep["m_c_raw"] = meas.m_c_raw;
  rep["notes"] = meas.notes;
  std::filesystem::path out(co.out_dir);
  write_csv(out / "atoms.csv", {"lambda", "weight"}, atom_rows);
  write_csv(out / "density.csv", {"lambda", "density"}, density_rows);
  write_json_report(out / "report.json", rep);
  return 0;
}

inline int cmd_kernel_check(const CommonOptions& co,
                            std::vector<double> c_grid, int samples) {
  Problem p = load_problem(co.problem_path);
  EntireSolutionHandle phi = left_phi(p, co);
  if (c_grid.empty()) {
    const Interval& iv = p.expr.interval;
    double lo = iv.left_finite() ? iv.a + 0.02 * iv.scale() : iv.midpoint() - 1;
    double hi = iv.right_finite() ? iv.b - 0.1 * iv.scale() : iv.midpoint() + 1;
    for (int i = 0; i < 13; ++i)
      c_grid.push_back(lo * std::pow(hi / lo, double(i) / 12.0));
  }
  KernelSettings ks;
  ks.prop = co.prop();
  double c_ref = c_grid[c_grid.size() / 2];
  auto e = DeBrangesFunction::make(phi, p.expr, c_ref, ks);

  Json rep = base_report("kernel-check", co);
  rep["settings"]["c_ref"] = c_ref;
  rep["sign_convention"] =
      e.sign() == ESign::kConjugate ? "phi1 + i*phi2" : "phi1 - i*phi2";
  auto zs = random_z_samples(co.seed, samples, 2.5, -2.5, 2.5);
  auto zs2 = random_z_samples(co.seed + 1, samples, 2.5, -2.5, 2.5);
  double worst = 0.0;
  Json residuals = Json::array();
  for (int i = 0; i < samples; ++i) {
    Complex zeta = zs[i], z = zs2[i];
    auto k = kernel_integral(phi, p.expr, zeta, z, c_ref, ks);
    double r = rep_identity_residual(e, k, zeta, z) /
               std::max(1.0, std::abs(k.value));
    residuals.push_back(r);
    worst = std::max(worst, r);
  }
  rep["structure_identity_residuals"] = residuals;
  rep["max_relative_residual"] = worst;

  auto nest = nesting_check(phi, p.expr, Complex(0.0, 1.0), c_grid, ks);
  rep["nesting"] = {{"strictly_increasing", nest.strictly_increasing},
                    {"max_monotonicity_violation",
                     nest.max_monotonicity_violation},
                    {"max_increment_mismatch", nest.max_increment_mismatch},
                    {"smallest_value", nest.smallest_value}};
  std::filesystem::path out(co.out_dir);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < c_grid.size(); ++i)
    rows.push_back({c_grid[i], nest.diagonal[i]});
  write_csv(out / "kernel.csv", {"c", "K"}, rows);

  // log|E| sampled on a rectangle of the z-plane (plot data).
  {
    const int nre = 41, nim = 17;
    double re_max = 8.0, im_max = 4.0;
    std::vector<std::vector<double>> grid_rows(nre * nim);
    parallel_for(grid_rows.size(), [&](std::size_t idx) {
      int i = static_cast<int>(idx) / nim, j = static_cast<int>(idx) % nim;
      double re = -re_max + 2 * re_max * i / (nre - 1);
      double im = -im_max + 2 * im_max * j / (nim - 1);
      grid_rows[idx] = {re, im, e.log_abs(Complex(re, im))};
    });
    write_csv(out / "e_logabs.csv", {"z_re", "z_im", "log_abs_e"}, grid_rows);
  }
  write_json_report(out / "report.json", rep);
  return 0;
}

inline int cmd_gauge(const CommonOptions& co, const std::string& transform_path,
                     double lo, double hi, const std::vector<Complex>& zs) {
  Problem p = load_problem(co.problem_path);
  LiouvilleTransform t = load_transform(transform_path, p.expr);
  Json rep = base_report("gauge", co);
  rep["settings"]["transform"] = transform_path;
  rep["settings"]["window"] = {lo, hi};
  std::filesystem::path out(co.out_dir);

  bool frames_available =
      p.left.kind != BoundaryCondition::Kind::kLimitPoint;
  if (frames_available) {
    HarnessProbes probes;
    probes.window_lo = lo;
    probes.window_hi = hi;
    if (!zs.empty()) probes.z_grid = zs;
    auto h = invariance_harness(p.expr, t, p.left, p.right, probes,
                                co.eigen(), co.weyl());
    rep["harness"] = {{"eig_set_distance", h.eig_set_distance},
                      {"eig_counts_match", h.eig_counts_match},
                      {"eig_count", h.eig_count},
                      {"max_m_deviation", h.max_m_deviation},
                      {"max_kernel_deviation", h.max_kernel_deviation},
                      {"frame_correspondence", h.frame_correspondence},
                      {"m_deviations", h.m_deviations},
                      {"kernel_deviations", h.kernel_deviations}};
  } else {
    EntireSolutionHandle phi = left_phi(p, co);
    std::vector<double> cg{0.3, 0.7, 1.2};
    double dev = kernel_invariance_deviation(p.expr, phi, t, cg);
    rep["harness"] = {{"max_kernel_deviation", dev},
                      {"note", "limit-point left endpoint: kernel route"}};
  }
  if (p.expr.interval.left_finite() && p.expr.interval.right_finite()) {
    PushforwardOptions po;
    po.gridded = true;
    DiracExpression texpr = pushforward(p.expr, t, po);
    write_text_atomic(out / "transformed_problem.json",
                      dump_json(expression_to_grid_json(texpr, 513)));
  }
  write_json_report(out / "report.json", rep);
  return 0;
}

inline int cmd_radial(const CommonOptions& co,
                      const std::vector<Complex>& zs_in) {
  Problem p = load_problem(co.problem_path);
  if (!p.radial) throw ConfigError("radial: problem must carry a radial block");
  const RadialSpec& spec = *p.radial;
  VolterraSettings vs;
  vs.prop = co.prop();
  auto phi = singular_phi(spec, vs);
  auto cls = classify_endpoint(p.expr, EndpointSide::kLeft);
  Json rep = base_report("radial", co);
  rep["kappa"] = spec.kappa;
  const char* verdicts[] = {"regular", "limit-circle", "limit-point",
                            "inconclusive"};
  rep["left_endpoint"] = verdicts[static_cast<int>(cls.verdict)];

  std::vector<Complex> zs = zs_in;
  if (zs.empty()) zs = {Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(2.0, 0.0)};
  std::vector<std::vector<double>> rows;
  double worst2 = 0.0, worst1 = 0.0;
  for (Complex z : zs) {
    for (int k = 1; k <= 12; ++k) {
      double x = std::pow(10.0, -0.25 * k);
      CVec2 f = phi(z, x);
      double d2 = std::abs(f[1] * std::pow(x, -spec.kappa) - 1.0);
      double d1 = std::abs(f[0] * std::pow(x, spec.kappa));
      rows.push_back({z.real(), z.imag(), x, d2, d1});
      if (x < 2e-4) {
        worst2 = std::max(worst2, d2);
        worst1 = std::max(worst1, d1);
      }
    }
  }
  rep["asymptotics"] = {{"max_phi2_deviation_small_x", worst2},
                        {"max_phi1_weighted_small_x", worst1}};
  std::filesystem::path out(co.out_dir);
  write_csv(out / "radial_asymptotics.csv",
            {"z_re", "z_im", "x", "phi2_rescaled_minus_1", "phi1_weighted"},
            rows);
  write_json_report(out / "report.json", rep);
  return 0;
}

inline Json spectrum_json(const Spectrum& s) {
  return Json{{"values", s.values}, {"residuals", s.residuals}};
}

inline int cmd_two_spectra(const CommonOptions& co,
                           const std::string& problem_b, double lo, double hi) {
  Problem pa = load_problem(co.problem_path);
  Problem pb = load_problem(problem_b);
  if (!pa.left_t || !pb.left_t)
    throw ConfigError("two-spectra: both problems need a bc_t left condition");
  TwoSpectraProblem ta{pa.expr, pa.left, *pa.left_t, pa.right};
  TwoSpectraProblem tb{pb.expr, pb.left, *pb.left_t, pb.right};
  auto r = two_spectra_report(ta, tb, lo, hi, co.eigen(), co.weyl());
  Json rep = base_report("two-spectra", co);
  rep["settings"]["problem_b"] = problem_b;
  rep["settings"]["window"] = {lo, hi};
  rep["sigma_s_a"] = spectrum_json(r.sigma_s_a);
  rep["sigma_t_a"] = spectrum_json(r.sigma_t_a);
  rep["sigma_s_b"] = spectrum_json(r.sigma_s_b);
  rep["sigma_t_b"] = spectrum_json(r.sigma_t_b);
  rep["dist_s"] = r.dist_s;
  rep["dist_t"] = r.dist_t;
  rep["counts_match_s"] = r.counts_match_s;
  rep["counts_match_t"] = r.counts_match_t;
  rep["interlaced_a"] = r.interlaced_a;
  rep["interlaced_b"] = r.interlaced_b;
  rep["h"] = r.h;
  rep["h_constancy"] = r.h_constancy;
  rep["shifted_zero_distance"] = r.shifted_zero_dist;
  write_json_report(std::filesystem::path(co.out_dir) / "report.json", rep);
  return 0;
}

inline int cmd_verify(const CommonOptions& co, const std::string& suite,
                      int cases) {
  Json rep = base_report("verify", co);
  rep["settings"]["suite"] = suite;
  rep["settings"]["cases"] = cases;
  bool all_pass = true;
  Json suites = Json::array();

  auto add = [&](const SuiteResult& r) {
    suites.push_back({{"name", r.name},
                      {"cases", r.cases},
                      {"worst", r.worst},
                      {"tol", r.tol},
                      {"pass", r.pass}});
    all_pass = all_pass && r.pass;
  };

  if (suite == "wronskian" || suite == "all")
    add(run_wronskian_suite(co.seed, cases));
  if (suite == "lagrange" || suite == "all")
    add(run_lagrange_suite(co.seed, cases));
  if (suite == "detgamma" || suite == "all")
    add(run_det_gamma_suite(co.seed, cases));
  if (suite == "flow" || suite == "all") add(run_flow_suite(co.seed, cases));

  if (suite == "gauge" || suite == "all") {
    Problem p = load_problem(co.problem_path);
    bool frames_available =
        p.left.kind != BoundaryCondition::Kind::kLimitPoint;
    double gauge_tol = 1e-6;
    if (frames_available) {
      HarnessProbes probes;
      const Interval& iv = p.expr.interval;
      double span = iv.right_finite() && iv.left_finite() ? iv.width() : kPi;
      probes.window_lo = -std::min(12.0, 40.0 / span);
      probes.window_hi = std::min(12.0, 40.0 / span);
      std::vector<std::pair<std::string, LiouvilleTransform>> transforms;
      transforms.push_back(
          {"normalize-weight", normalize_weight(p.expr).transform});
      transforms.push_back({"normalize-det", normalize_det(p.expr).transform});
      transforms.push_back(
          {"kill-potential", kill_potential(p.expr).transform});
      bool r_is_identity = true;
      for (double x :
           {iv.midpoint(), iv.midpoint() - 0.2 * iv.scale(),
            iv.midpoint() + 0.2 * iv.scale()})
        if ((p.expr.R(x) - Mat2::identity()).frobenius() > 1e-9)
          r_is_identity = false;
      if (r_is_identity)
        transforms.push_back(
            {"normalize-trace", normalize_trace(p.expr).transform});
      for (auto& [name, t] : transforms) {
        auto h = invariance_harness(p.expr, t, p.left, p.right, probes,
                                    co.eigen(), co.weyl());
        SuiteResult r{"gauge:" + name, 1, 0.0, gauge_tol, false};
        r.worst = std::max({h.eig_set_distance, h.max_m_deviation,
                            h.max_kernel_deviation});
        r.pass = h.eig_counts_match && r.worst < gauge_tol;
        add(r);
      }
    } else {
      EntireSolutionHandle phi = left_phi(p, co);
      std::vector<std::pair<std::string, LiouvilleTransform>> transforms;
      const Interval iv = p.expr.interval;
      transforms.push_back(
          {"reflection-J",
           {Reparam::shift(0.0), MatrixField::constant(kJ), iv, iv, "J"}});
      MatrixField rot = MatrixField::named(
          "rotation(0.6)",
          [](double) {
            double c = std::cos(0.6), s = std::sin(0.6);
            return Mat2{{{c, -s}, {s, c}}};
          },
          [](double) { return Mat2::zero(); });
      transforms.push_back(
          {"constant-rotation", {Reparam::shift(0.0), rot, iv, iv, "rot"}});
      Reparam stretch = Reparam::expression(
          ScalarField::expression("x+0.2*sin(x)"), iv);
      transforms.push_back(
          {"reparametrization",
           {stretch, MatrixField::identity(), iv,
            detail::map_interval(stretch, iv), "stretch"}});
      for (auto& [name, t] : transforms) {
        PushforwardOptions po;
        po.validate = false;
        double dev = kernel_invariance_deviation(p.expr, phi, t,
                                                 {0.3, 0.7, 1.3},
                                                 Complex(0.0, 1.0), {}, po);
        SuiteResult r{"gauge:" + name + " (kernel route)", 1, dev, gauge_tol,
                      dev < gauge_tol};
        add(r);
      }
    }
  }

  rep["suites"] = suites;
  rep["all_pass"] = all_pass;
  write_json_report(std::filesystem::path(co.out_dir) / "report.json", rep);
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Argument wiring
// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args) {
  CLI::App app{"weighted Dirac operator toolbox"};
  app.require_subcommand(1);

  CommonOptions co;
  std::vector<double> window{-10.0, 10.0};
  std::vector<std::string> z_args;
  std::string eps_arg = "1e-2,1e-3,1e-4";
  std::string c_grid_arg;
  std::string transform_path, problem_b, suite = "all";
  int cases = 100;
  int kernel_samples = 25;

  auto add_common = [&](CLI::App* cmd, bool needs_problem = true) {
    auto* o = cmd->add_option("--problem", co.problem_path, "problem JSON file");
    if (needs_problem) o->required();
    cmd->add_option("--out", co.out_dir, "output directory");
    cmd->add_option("--tol", co.tol, "propagation tolerance");
    cmd->add_option("--seed", co.seed, "seed for randomized probes");
  };

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues in a window");
  add_common(spectrum);
  spectrum->add_option("--window", window, "window LO HI")->expected(2);

  auto* weyl = app.add_subcommand("weyl", "Weyl function values");
  add_common(weyl);
  weyl->add_option("--z", z_args, "spectral parameter RE+IMi (repeatable)")
      ->required();

  auto* measure = app.add_subcommand("measure", "spectral measure");
  add_common(measure);
  measure->add_option("--window", window, "window LO HI")->expected(2);
  measure->add_option("--eps", eps_arg, "eps schedule (comma separated)");

  auto* kernel = app.add_subcommand("kernel-check",
                                    "de Branges kernel diagnostics");
  add_common(kernel);
  kernel->add_option("--c-grid", c_grid_arg, "c grid spec lin|geo:lo:hi:n");
  kernel->add_option("--samples", kernel_samples, "random (zeta,z) samples");

  auto* gauge = app.add_subcommand("gauge", "apply and verify a transform");
  add_common(gauge);
  gauge->add_option("--transform", transform_path, "transform JSON file")
      ->required();
  gauge->add_option("--window", window, "window LO HI")->expected(2);
  gauge->add_option("--z", z_args, "probe z (repeatable)");

  auto* radial = app.add_subcommand("radial", "radial asymptotics diagnostics");
  add_common(radial);
  radial->add_option("--z", z_args, "probe z (repeatable)");

  auto* two = app.add_subcommand("two-spectra", "two-spectra comparison");
  add_common(two);
  two->add_option("--problem-b", problem_b, "second problem JSON")->required();
  two->add_option("--window", window, "window LO HI")->expected(2);

  auto* verify = app.add_subcommand("verify", "randomized verification suites");
  add_common(verify);
  verify->add_option("--suite", suite,
                     "gauge|wronskian|lagrange|detgamma|flow|all");
  verify->add_option("--cases", cases, "randomized case count");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    std::vector<Complex> zs;
    for (auto& s : z_args) zs.push_back(parse_z(s));
    if (*spectrum) return cmd_spectrum(co, window[0], window[1]);
    if (*weyl) return cmd_weyl(co, zs);
    if (*measure)
      return cmd_measure(co, window[0], window[1], parse_schedule(eps_arg));
    if (*kernel)
      return cmd_kernel_check(
          co, c_grid_arg.empty() ? std::vector<double>{} : parse_c_grid(c_grid_arg),
          kernel_samples);
    if (*gauge)
      return cmd_gauge(co, transform_path, window[0], window[1], zs);
    if (*radial) return cmd_radial(co, zs);
    if (*two) return cmd_two_spectra(co, problem_b, window[0], window[1]);
    if (*verify) return cmd_verify(co, suite, cases);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    Json diag;
    diag["error"] = e.what();
    diag["generated_at"] = iso_timestamp();
    try {
      write_json_report(std::filesystem::path(co.out_dir) / "error.json", diag);
    } catch (...) {
    }
    std::cerr << "computation failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cli
}  // namespace wdirac
