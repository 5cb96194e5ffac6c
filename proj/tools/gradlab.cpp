#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradlab/counterexample.hpp"
#include "gradlab/dynamics.hpp"
#include "gradlab/estimates.hpp"
#include "gradlab/fields.hpp"
#include "gradlab/planar.hpp"
#include "gradlab/potentials.hpp"
#include "gradlab/sampling.hpp"
#include "gradlab/solver.hpp"
#include "gradlab/suite.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gradlab;

namespace {

// Bad input that should exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<double> tol;
  std::optional<double> h;
  std::optional<double> dt;
  std::string out;
  bool json_out = false;
  std::uint64_t seed = 12345;
  bool list_checks = false;
  bool expect_violation = false;

  double tol_or(double v) const { return tol.value_or(v); }
  double h_or(double v) const { return h.value_or(v); }
  double dt_or(double v) const { return dt.value_or(v); }
};

struct Run {
  std::string command;
  json config = json::object();
  json reports = json::array();
  bool pass = true;

  void add(const json& report, bool ok) {
    reports.push_back(report);
    pass = pass && ok;
  }
  /// DefectReport: fails on a violation, or on anything else when one is expected.
  void add(const DefectReport& r, bool expect_violation = false) {
    add(r.to_json(), expect_violation ? r.verdict == Verdict::violated
                                      : r.verdict != Verdict::violated);
  }
  json to_json() const {
    return {{"command", command}, {"config", config}, {"reports", reports}, {"pass", pass}};
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

fs::path out_dir(const Options& o) {
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

int emit(const Run& run, const Options& o) {
  const json j = run.to_json();
  if (!o.out.empty()) write_text(out_dir(o) / "report.json", j.dump(2) + "\n");
  if (o.json_out) {
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& r : run.reports) {
      std::cout << r.value("id", run.command);
      if (r.contains("verdict")) std::cout << "  verdict=" << r["verdict"].get<std::string>();
      if (r.contains("worst_margin")) std::cout << "  worst_margin=" << r["worst_margin"].dump();
      if (r.contains("pass")) std::cout << "  pass=" << r["pass"].dump();
      std::cout << "\n";
    }
    std::cout << run.command << ": " << (run.pass ? "PASS" : "FAIL") << "\n";
  }
  return run.pass ? 0 : 1;
}

json parse_json_arg(const std::string& text, const char* what) {
  if (text.empty()) return json::object();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

ClosedFormField field_from(const std::string& name, const json& params) {
  try {
    return catalog_make(name, params);
  } catch (const FieldError& e) {
    throw UsageError(e.what());
  }
}

Potential potential_from(const std::string& id, const json& params) {
  try {
    return make_potential(id, params);
  } catch (const PotentialError& e) {
    throw UsageError(e.what());
  }
}

// The potential each catalog field solves for.
Potential default_potential(const ClosedFormField& f) {
  const std::string& n = f.name();
  if (n == "tanh_profile" || n == "tanh_planar") return make_potential("double_well");
  if (n == "gl_circle" || n == "gl_circle_planar") {
    return make_potential("ginzburg_landau", {{"m", 2}});
  }
  return make_potential("zero", {{"m", f.m()}});
}

PointSet field_points(const ClosedFormField& f) {
  PointSet ps;
  ps.dim = f.n();
  if (f.n() == 1) {
    for (int k = 0; k <= 2000; ++k) {
      const double x = -10.0 + 20.0 * k / 2000;
      ps.push(&x);
    }
  } else {
    for (int i = 0; i <= 60; ++i) {
      for (int k = 0; k <= 60; ++k) {
        const double x[2] = {-3.0 + 0.1 * i, -3.0 + 0.1 * k};
        ps.push(x);
      }
    }
  }
  return ps;
}

// ---- counterexample / orbit ------------------------------------------------------

int cmd_counterexample(const std::string& action, double sharpness, std::size_t samples,
                       const Options& o) {
  Run run{"counterexample " + action};
  const double dt = o.dt_or(1e-3);
  run.config = {{"sharpness", sharpness}, {"dt", dt}, {"samples", samples},
                {"tol", o.tol_or(1e-7)}, {"expect_violation", o.expect_violation}};
  const auto pc = counterexample::build(sharpness, dt);
  counterexample::VerifyOptions vo;
  vo.samples = samples;
  vo.tol = o.tol_or(1e-7);
  const auto rep = counterexample::verify_counterexample(pc, vo);
  if (action == "build") {
    json c = counterexample::construction_report(pc, rep);
    const bool valid = c.at("residual_max").get<double>() <= 1e-5;
    c["id"] = "counterexample.construction";
    c["pass"] = valid;
    run.add(c, valid);
    if (!o.out.empty()) pc.sample(samples).write_csv(out_dir(o) / "orbit.csv");
  } else {
    run.add(rep, o.expect_violation);
  }
  return emit(run, o);
}

int cmd_orbit(double R, const Options& o) {
  Run run{"orbit"};
  const double dt = o.dt_or(1e-3);
  const double tol = o.tol_or(1e-8);
  run.config = {{"R", R}, {"dt", dt}, {"tol", tol}};
  OrbitFamily f;
  try {
    f = orbit_family(R);
  } catch (const DynamicsError& e) {
    throw UsageError(e.what());
  }
  const Potential gl = make_potential("ginzburg_landau", {{"m", 2}});
  const auto steps = static_cast<std::size_t>(std::ceil(f.period / dt));
  const Trajectory tr = integrate(gl, f.start(), dt, steps, tol);
  double match = 0.0;
  for (double h : tr.H) match = std::max(match, std::abs(h - f.H));
  const bool ok = tr.max_drift() <= tol && match <= tol;
  run.add({{"id", "orbit"},
           {"R", R},
           {"omega", f.omega},
           {"period", f.period},
           {"lambda", f.lambda},
           {"mu", f.mu},
           {"H", f.H},
           {"H_measured", tr.H.front()},
           {"H_match", match},
           {"drift", tr.max_drift()},
           {"pass", ok}},
          ok);
  if (!o.out.empty()) tr.write_csv(out_dir(o) / "orbit.csv");
  return emit(run, o);
}

// ---- estimates ----------------------------------------------------------------------

int cmd_estimates(const std::string& theorem, const std::string& field_name,
                  const std::string& field_params, const std::string& pot_id,
                  const std::string& pot_params, double amplitude, const Options& o) {
  Run run{"estimates"};
  const double tol = o.tol_or(1e-7);
  run.config = {{"theorem", theorem}, {"field", field_name}, {"tol", tol}};

  if (field_name == "counterexample") {
    if (theorem != "modica") throw UsageError("field counterexample only supports --theorem modica");
    counterexample::VerifyOptions vo;
    vo.tol = tol;
    run.add(counterexample::verify_counterexample(counterexample::build(), vo),
            o.expect_violation);
    return emit(run, o);
  }

  if (theorem == "polygon") {
    const Potential p = potential_from(pot_id.empty() ? "polygon" : pot_id,
                                       parse_json_arg(pot_params, "--potential-params"));
    const auto samples = shell_samples(2, 1.0, 3.0, 4000, o.seed);
    run.config["seed"] = o.seed;
    run.add(estimates::polygon_confinement_check(p.zeros(), samples, tol), o.expect_violation);
    return emit(run, o);
  }

  if (field_name == "double_well_orbit") {
    const Potential dw = make_potential("double_well");
    const double dt = o.dt_or(1e-3);
    const Trajectory tr = integrate(dw, {{amplitude}, {0.0}}, dt,
                                    static_cast<std::size_t>(std::ceil(8.0 / dt)));
    const auto jets = estimates::trajectory_jets(tr, dw);
    run.config["amplitude"] = amplitude;
    if (theorem == "3.5") {
      run.add(estimates::theorem3_check(dw, jets, 0.0, 3.0, tol), o.expect_violation);
    } else if (theorem == "modica") {
      run.add(estimates::modica_check(jets, dw, tol), o.expect_violation);
    } else {
      throw UsageError("double_well_orbit supports --theorem modica or 3.5");
    }
    return emit(run, o);
  }

  const json fp = parse_json_arg(field_params, "--param");
  const ClosedFormField f = field_from(field_name, fp);
  run.config["field_params"] = fp;
  const Potential p = pot_id.empty()
                          ? default_potential(f)
                          : potential_from(pot_id, parse_json_arg(pot_params, "--potential-params"));
  run.config["potential"] = p.id();
  const auto jets = estimates::jets_at(f.source(), field_points(f));

  if (theorem == "modica") {
    run.add(estimates::modica_check(jets, p, tol), o.expect_violation);
  } else if (theorem == "3.1") {
    const int m = p.m();
    const auto cfg = estimates::make_theorem0_config(Eigen::VectorXd::Ones(m),
                                                     Eigen::MatrixXd::Identity(m, m), 1.0);
    run.add(estimates::theorem0_check(cfg, jets, tol), o.expect_violation);
  } else if (theorem == "3.2") {
    run.add(estimates::theorem1_check(p, jets, 1.0, 1.0, tol), o.expect_violation);
  } else if (theorem == "3.3") {
    run.add(estimates::gl_bound_check(jets, tol), o.expect_violation);
  } else if (theorem == "3.4") {
    if (field_name != "gl_circle") throw UsageError("--theorem 3.4 needs --field gl_circle");
    const OrbitFamily fam = orbit_family(fp.at("R").get<double>());
    const double dt = o.dt_or(1e-3);
    const Trajectory tr = sample_exact(fam, p, dt, static_cast<std::size_t>(std::ceil(fam.period / dt)));
    run.add(estimates::ode_bound_check(tr, p, tol), o.expect_violation);
  } else if (theorem == "3.5") {
    run.add(estimates::theorem3_check(p, jets, 0.0, 3.0, tol), o.expect_violation);
  } else {
    throw UsageError("unknown theorem " + theorem);
  }
  return emit(run, o);
}

// ---- planar ---------------------------------------------------------------------------

int cmd_planar(const std::string& action, const std::string& field_name,
               const std::string& field_params, double angle, double radius,
               const std::string& density, const Options& o) {
  Run run{"planar " + action};
  const Potential dw = make_potential("double_well");
  if (action == "tensor" || action == "ufield") {
    const double h = o.h_or(0.05);
    run.config = {{"h", h}, {"angle", angle}};
    const GridField coarse = suite::relaxed_front(h, angle);
    const GridField fine = suite::relaxed_front(h / 2, angle);
    if (action == "tensor") {
      const auto pr = planar::divergence_residual(coarse, fine, dw);
      const bool ok = pr.ratio() >= 3.5 && pr.ratio() <= 4.5;
      run.add({{"id", "div_T"}, {"coarse", pr.coarse}, {"fine", pr.fine}, {"ratio", pr.ratio()},
               {"pass", ok}},
              ok);
    } else {
      const double x0[2] = {0.0, 0.5};
      const auto Uc = planar::reconstruct_U(coarse, dw, x0);
      const auto Uf = planar::reconstruct_U(fine, dw, x0);
      const double ratio = Uc.path_defect / Uf.path_defect;
      const bool ok = ratio >= 3.5 && ratio <= 4.5;
      run.add({{"id", "U_reconstruction"},
               {"path_defect", {Uc.path_defect, Uf.path_defect}},
               {"ratio", ratio},
               {"laplacian_defect",
                {Uc.laplacian_defect(coarse, dw), Uf.laplacian_defect(fine, dw)}},
               {"compatibility",
                {planar::compatibility_residual(coarse, dw), planar::compatibility_residual(fine, dw)}},
               {"pass", ok}},
              ok);
      if (!o.out.empty()) write_gridfield(Uc.U, out_dir(o) / "U.txt", {{"h", h}, {"angle", angle}});
    }
    return emit(run, o);
  }

  const json fp = parse_json_arg(field_params, "--param");
  const ClosedFormField f = field_from(field_name, fp);
  if (f.n() != 2) throw UsageError("planar checks need a planar field");
  const Potential p = default_potential(f);
  run.config = {{"field", field_name}, {"field_params", fp}, {"potential", p.id()}};

  if (action == "convexity") {
    // scalar fields obeying the Modica bound must classify convex
    bool consistent = true;
    bool convex = true;
    bool modica_convex = true;
    double worst = std::numeric_limits<double>::infinity();
    const auto pts = field_points(f);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Jet2 jet = f.jet({pts.point(k), 2});
      const auto c = planar::convexity_status(jet, p);
      consistent = consistent && c.consistent();
      convex = convex && c.convex();
      if (f.m() == 1 && estimates::modica_defect(jet, p) <= 1e-7) {
        modica_convex = modica_convex && c.convex();
      }
      worst = std::min(worst, c.margin);
    }
    const bool ok = consistent && modica_convex;
    run.add({{"id", "convexity"}, {"convex", convex}, {"worst_margin", worst},
             {"sign_agreement", consistent}, {"pass", ok}},
            ok);
  } else if (action == "green") {
    const double tol = o.tol_or(1e-6);
    run.config["radius"] = radius;
    run.config["tol"] = tol;
    const auto g = planar::green_boundary_identity(f.source(), p, {0.0, 0.0}, radius);
    json j = g.to_json();
    j["id"] = "green";
    j["pass"] = g.defect <= tol;
    run.add(j, g.defect <= tol);
  } else if (action == "monotone") {
    std::vector<double> radii;
    for (int k = 1; k <= 8; ++k) radii.push_back(0.5 * k);
    planar::NamedDensity d = planar::potential_density(f.source(), p);
    if (density == "laplacian") {
      JetSource quadratic = [](std::span<const double> x) {
        Jet2 j(2, 1);
        j.x.assign(x.begin(), x.end());
        j.u[0] = x[0] * x[0] + x[1] * x[1];
        j.Du(0, 0) = 2 * x[0];
        j.Du(0, 1) = 2 * x[1];
        j.D2u(0, 0, 0) = 2.0;
        j.D2u(0, 1, 1) = 2.0;
        return j;
      };
      d = planar::laplacian_density(quadratic);
    } else if (density == "harmonic") {
      d = planar::harmonic_density(f.source());
    } else if (density != "W") {
      throw UsageError("--density must be W, laplacian or harmonic");
    }
    const auto prof = planar::monotonicity_profile(d, {0.0, 0.0}, radii);
    json j = prof.to_json();
    j["id"] = "monotonicity";
    j["pass"] = prof.monotone;
    run.add(j, prof.monotone);
    if (!o.out.empty()) prof.write_csv(out_dir(o) / "profile.csv");
  } else {
    throw UsageError("unknown planar action " + action);
  }
  return emit(run, o);
}

// ---- relax / suite ------------------------------------------------------------------------

int cmd_relax(const std::string& config_path, const Options& o) {
  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot read config " + config_path);
  json cfg_json;
  try {
    cfg_json = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  Run run{"relax"};
  run.config = cfg_json;
  solver::RelaxConfig cfg;
  try {
    cfg = solver::config_from_json(cfg_json);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (o.tol) cfg.tol = *o.tol;
  const json pj = cfg_json.value("potential", json{{"id", "double_well"}});
  const Potential p = potential_from(pj.value("id", "double_well"), pj.value("params", json::object()));
  GridField init = solver::boundary_start(cfg, p.m());
  if (cfg_json.value("init", "boundary") == "sampled" && cfg.boundary) {
    init = sample_grid(*cfg.boundary, cfg.origin, cfg.h, cfg.extents);
  }
  const auto res = solver::relax(p, cfg, std::move(init));
  json log = res.log();
  log["id"] = "relax";
  log["converged"] = res.converged;
  log["tau"] = res.tau;
  log["pass"] = res.converged;
  run.add(log, res.converged);
  if (!o.out.empty()) {
    const fs::path dir = out_dir(o);
    write_gridfield(res.field, dir / "field.txt", {{"potential", p.id()}});
    write_text(dir / "relax_log.json", res.log().dump(2) + "\n");
  }
  return emit(run, o);
}

int cmd_suite(const Options& o) {
  const auto s = suite::run();
  Run run{"suite"};
  for (const auto& c : s.checks) {
    run.add({{"id", c.id}, {"criterion", c.criterion}, {"title", c.title}, {"pass", c.pass},
             {"detail", c.detail}},
            c.pass);
  }
  return emit(run, o);
}

const std::vector<std::pair<std::string, std::string>> kChecks = {
    {"Modica bound on a catalog field", "estimates --theorem modica --field <name>"},
    {"Modica violation by the periodic connection",
     "estimates --theorem modica --field counterexample --expect-violation"},
    {"periodic connection construction", "counterexample build"},
    {"periodic connection Modica defect", "counterexample verify --expect-violation"},
    {"Hamiltonian of the circular orbits", "orbit --R <r>"},
    {"gradient bound for diagonal systems", "estimates --theorem 3.1 --field <name>"},
    {"gradient bound from the ball condition", "estimates --theorem 3.2 --field <name>"},
    {"Ginzburg-Landau pointwise bound", "estimates --theorem 3.3 --field <name>"},
    {"two-branch ODE bound", "estimates --theorem 3.4 --field gl_circle --param '{\"R\":r}'"},
    {"bound off the convexity region",
     "estimates --theorem 3.5 --field double_well_orbit --amplitude <a>"},
    {"polygon confinement", "estimates --theorem polygon"},
    {"divergence-free stress tensor", "planar tensor"},
    {"compatibility and reconstruction of U", "planar ufield"},
    {"convexity of U", "planar convexity --field <name>"},
    {"boundary identity", "planar green --field <name> --radius <r>"},
    {"monotonicity of the W, Laplacian and harmonic profiles",
     "planar monotone --field <name> --density W|laplacian|harmonic"},
    {"relaxation energy and residual", "relax --config <file>"},
};

int cmd_list(const Options& o) {
  if (o.json_out) {
    json j = json::array();
    for (const auto& [what, how] : kChecks) j.push_back({{"check", what}, {"command", how}});
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& [what, how] : kChecks) std::cout << how << "\n    " << what << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradlab: gradient estimates and planar identities for u'' = grad W(u)"};
  app.fallthrough();
  app.set_help_flag("--help", "print this help and exit");
  Options o;
  app.add_option("--tol", o.tol, "tolerance of the check");
  app.add_option("--h", o.h, "grid spacing");
  app.add_option("--dt", o.dt, "time step");
  app.add_option("--out", o.out, "directory for report.json and CSV files");
  app.add_flag("--json", o.json_out, "print the JSON report");
  app.add_option("--seed", o.seed, "seed of random sample sets");
  app.add_flag("--list-checks", o.list_checks, "list every check and its command");
  app.add_flag("--expect-violation", o.expect_violation, "pass when the inequality is violated");

  auto* ce = app.add_subcommand("counterexample", "periodic connection violating the Modica bound");
  std::string ce_action;
  double sharpness = 1.0;
  std::size_t samples = 20000;
  ce->add_option("action", ce_action, "build or verify")->required()->check(CLI::IsMember({"build", "verify"}));
  ce->add_option("--sharpness", sharpness, "shape parameter of the curve");
  ce->add_option("--samples", samples, "samples along one period");

  auto* orbit = app.add_subcommand("orbit", "circular orbit of the Ginzburg-Landau ODE");
  double R = 0.5;
  orbit->add_option("--R", R, "radius in (0, 1)")->required();

  auto* est = app.add_subcommand("estimates", "gradient estimates on a field");
  std::string theorem, field = "tanh_profile", fparams, pot, pparams;
  double amplitude = 0.2;
  est->add_option("--theorem", theorem)
      ->required()
      ->check(CLI::IsMember({"modica", "3.1", "3.2", "3.3", "3.4", "3.5", "polygon"}));
  est->add_option("--field", field, "catalog field, counterexample or double_well_orbit");
  est->add_option("--param", fparams, "field parameters as JSON");
  est->add_option("--potential", pot, "potential id (default: the one the field solves)");
  est->add_option("--potential-params", pparams, "potential parameters as JSON");
  est->add_option("--amplitude", amplitude, "amplitude of double_well_orbit");

  auto* pl = app.add_subcommand("planar", "stress tensor, U, Green identity, monotonicity");
  std::string pl_action, pl_field = "tanh_planar", pl_params, density = "W";
  double angle = 0.4, radius = 2.0;
  pl->add_option("action", pl_action)
      ->required()
      ->check(CLI::IsMember({"tensor", "ufield", "convexity", "green", "monotone"}));
  pl->add_option("--field", pl_field, "planar catalog field");
  pl->add_option("--param", pl_params, "field parameters as JSON");
  pl->add_option("--angle", angle, "tilt of the relaxed front");
  pl->add_option("--radius", radius, "ball radius for green");
  pl->add_option("--density", density, "W, laplacian or harmonic");

  auto* rx = app.add_subcommand("relax", "relaxation solver");
  std::string config;
  rx->add_option("--config", config, "JSON config")->required();

  auto* su = app.add_subcommand("suite", "full acceptance battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return 2;
  }

  try {
    if (o.list_checks) return cmd_list(o);
    if (*ce) return cmd_counterexample(ce_action, sharpness, samples, o);
    if (*orbit) return cmd_orbit(R, o);
    if (*est) return cmd_estimates(theorem, field, fparams, pot, pparams, amplitude, o);
    if (*pl) return cmd_planar(pl_action, pl_field, pl_params, angle, radius, density, o);
    if (*rx) return cmd_relax(config, o);
    if (*su) return cmd_suite(o);
    std::cerr << app.help();
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
