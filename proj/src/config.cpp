#include "kp5/config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

#include "kp5/cutoffs.hpp"
#include "kp5/errors.hpp"
#include "kp5/io.hpp"
#include "kp5/linear.hpp"
#include "kp5/norms.hpp"
#include "kp5/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kp5::cli {

using json = nlohmann::json;

namespace {

const std::map<std::string, Command> kCommands = {
    {"generate", Command::Generate}, {"linear", Command::Linear}, {"solve", Command::Solve},
    {"norms", Command::Norms},       {"verify", Command::Verify},
};

const std::vector<std::string> kTargets = {"resonance", "lemmas", "kato", "bilinear", "weighted-bilinear", "smoothing"};

void usage(const std::string& msg) { throw Error(ErrorKind::Usage, msg); }

json ratio_json(const verify::RatioReport& r) {
  return {{"statement", r.statement}, {"s", r.s},           {"a", r.a},         {"b", r.b},
          {"grid", r.grid},           {"samples", r.samples}, {"max", r.max},   {"median", r.median},
          {"min", r.min},             {"growth", r.growth}, {"notes", r.notes}};
}

json picard_json(const PicardDiagnostics& d) {
  return {{"norms", d.norms},
          {"differences", d.differences},
          {"factors", d.factors},
          {"contraction", d.contraction},
          {"fixed_point_residual", d.fixed_point_residual},
          {"iterations", d.iterations},
          {"converged", d.converged},
          {"warnings", d.warnings}};
}

json shell_json(const verify::ShellFit& f) {
  return {{"radius", f.radius}, {"energy", f.energy}, {"slope", f.slope}, {"index", f.index}};
}

json meta(const RunConfig& cfg) {
  return {{"config", json::parse(describe(cfg))}, {"seed", cfg.seed}, {"version", kVersion}};
}

json grid_json(const Grid2D& g) { return {{"nx", g.nx()}, {"ny", g.ny()}, {"Lx", g.lx()}, {"Ly", g.ly()}}; }

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string artifact_comment(const RunConfig& cfg, const Grid2D& g) {
  json m = meta(cfg);
  m["grid"] = grid_json(g);
  return m.dump();
}

int nearest_index(const TimeWindow& w, double t) {
  int best = 0;
  for (int n = 0; n < w.nt(); ++n)
    if (std::abs(w.t(n) - t) < std::abs(w.t(best) - t)) best = n;
  return best;
}

// Sobolev sample tapered to vanish toward y = +-Ly/2, so reflection data are clean.
std::vector<double> generated_initial(const RunConfig& cfg, const Grid2D& g) {
  SpectralField2D sample = make_sobolev_sample(cfg.params.s, cfg.seed, g, cfg.amplitude);
  // Keep |xi| inside what the beta grid of the time window resolves.
  const double xi_c = 0.6 * std::pow(std::numbers::pi / TimeWindow(cfg.nt, cfg.half_width).dt(), 0.2);
  for (int j = 0; j < g.nx(); ++j) {
    const double f = std::exp(-std::pow(g.xi(j) / xi_c, 8));
    for (int k = 0; k < g.ny(); ++k) sample.at(j, k) *= f;
  }
  std::vector<double> v = inverse_transform(sample);
  for (int m = 0; m < g.nx(); ++m)
    for (int n = 0; n < g.ny(); ++n) v[g.index(m, n)] *= cutoffs::mu(4.0 * g.y(n) / g.ly());
  return v;
}

struct Problem {
  InitialData g;
  BoundarySamples h;
};

Problem load_problem(const RunConfig& cfg) {
  const TimeWindow w(cfg.nt, cfg.half_width);
  if (!cfg.g_path.empty()) {
    const io::Snapshot snap = io::read_snapshot(cfg.g_path);
    InitialData g = InitialData::from_full(snap.grid, snap.values, cfg.params.s);
    if (!cfg.h_path.empty()) return {g, boundary_from_file(io::read_boundary(cfg.h_path), w)};
    return {g, compute_p(extend_initial(g), w)};
  }
  if (!cfg.h_path.empty()) usage("--h requires --g");
  const Grid2D grid(cfg.grid, cfg.grid, cfg.length, cfg.length);
  InitialData g = InitialData::from_full(grid, generated_initial(cfg, grid), cfg.params.s);
  return {g, compute_p(extend_initial(g), w)};
}

double trace_error(const SpectralHistory& u, const BoundarySamples& h, double t0, double t1) {
  const BoundarySamples tr = trace_y0(u);
  double num = 0.0, den = 0.0;
  for (int n = 0; n < h.window.nt(); ++n) {
    const double t = h.window.t(n);
    if (t <= t0 || t >= t1) continue;
    for (int m = 0; m < h.nx; ++m) {
      const double d = tr.at(n, m) - h.at(n, m);
      num += d * d;
      den += h.at(n, m) * h.at(n, m);
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

void write_snapshots(const RunConfig& cfg, const SpectralHistory& u, const std::string& prefix, json& files) {
  if (cfg.out_dir.empty()) return;
  for (double t : cfg.times) {
    const int n = nearest_index(u.window, t);
    std::ostringstream name;
    name << prefix << "_t" << u.window.t(n) << ".csv";
    const std::string path = path_in(cfg, name.str());
    if (cfg.format == OutputFormat::Csv)
      io::write_snapshot(path, u.grid, inverse_transform(u.field(n)), artifact_comment(cfg, u.grid));
    else
      io::write_spectral_dump(path, u.field(n));
    files.push_back(path);
  }
}

int emit(const RunConfig& cfg, json report, std::ostream& out, bool ok) {
  report["ok"] = ok;
  const json m = meta(cfg);
  for (auto it = m.begin(); it != m.end(); ++it) report[it.key()] = it.value();
  const std::string text = report.dump(2) + "\n";
  if (!cfg.out_dir.empty()) io::write_text_atomic(path_in(cfg, "report.json"), text);
  out << text;
  return ok ? 0 : 1;
}

int run_generate(const RunConfig& cfg, std::ostream& out) {
  const Grid2D grid(cfg.grid, cfg.grid, cfg.length, cfg.length);
  const std::vector<double> g = generated_initial(cfg, grid);
  const InitialData gd = InitialData::from_full(grid, g, cfg.params.s);
  const TimeWindow w(cfg.nt, cfg.half_width);
  const BoundarySamples p = compute_p(extend_initial(gd), w);
  io::BoundaryFile bf;
  bf.nx = grid.nx();
  bf.lx = grid.lx();
  bf.dt = w.dt();
  bf.t0 = 0.0;
  const int n0 = w.zero_index();
  bf.nt = static_cast<int>(std::ceil(1.0 / w.dt() - 1e-9)) + 1;
  for (int n = 0; n < bf.nt; ++n)
    for (int m = 0; m < bf.nx; ++m) bf.values.push_back(p.at(n0 + n, m));

  json report = {{"command", "generate"}, {"grid", grid_json(grid)},
                 {"sobolev_norm", sobolev_norm(forward_transform(grid, g), cfg.params.s)}};
  if (!cfg.out_dir.empty()) {
    io::write_snapshot(path_in(cfg, "g.csv"), grid, g, artifact_comment(cfg, grid));
    io::write_boundary(path_in(cfg, "h.csv"), bf, artifact_comment(cfg, grid));
    report["files"] = {path_in(cfg, "g.csv"), path_in(cfg, "h.csv")};
  }
  return emit(cfg, report, out, true);
}

int run_linear(const RunConfig& cfg, std::ostream& out) {
  const Problem pr = load_problem(cfg);
  LinearDiagnostics diag;
  SpectralHistory u = linear_solution(pr.g, pr.h, &diag, cfg.params.tail_tolerance);
  const SpectralField2D ge = extend_initial(pr.g);
  const double gnorm = sobolev_norm(ge, cfg.params.s);
  json report = {{"command", "linear"},
                 {"grid", grid_json(pr.g.grid)},
                 {"trace_error", trace_error(u, pr.h, 0.1, 0.9)},
                 {"pde_residual", pde_residual(u, {0.25, 0.1, 0.9, false})},
                 {"kato_ratio", gnorm > 0.0 ? verify::kato_slice_norm(ge, 0.0, cfg.params.s) / gnorm : 0.0},
                 {"compatibility", diag.compatibility},
                 {"w2_tail_ratio", diag.boundary.w2_tail_ratio},
                 {"warnings", diag.warnings}};
  json files = json::array();
  write_snapshots(cfg, u, "u", files);
  report["files"] = files;
  return emit(cfg, report, out, true);
}

int run_solve(const RunConfig& cfg, std::ostream& out) {
  const Problem pr = load_problem(cfg);
  const PicardResult res = picard_solve(pr.g, pr.h, cfg.params);
  SpectralHistory d = res.u;
  d -= res.linear;
  json report = {{"command", "solve"},
                 {"grid", grid_json(pr.g.grid)},
                 {"picard", picard_json(res.diagnostics)},
                 {"trace_error", trace_error(res.u, pr.h, 0.1, 0.9)},
                 {"pde_residual", pde_residual(res.u, {0.25, 0.1, 0.9, true})}};
  json files = json::array();
  write_snapshots(cfg, res.u, "u", files);
  write_snapshots(cfg, d, "nonlinear", files);
  report["files"] = files;
  return emit(cfg, report, out, res.diagnostics.converged);
}

int run_norms(const RunConfig& cfg, std::ostream& out) {
  if (cfg.snapshot_path.empty()) usage("norms requires --snapshot");
  const io::Snapshot snap = io::read_snapshot(cfg.snapshot_path);
  const SpectralField2D f = forward_transform(snap.grid, snap.values);
  double value = 0.0;
  if (cfg.norm == "sobolev")
    value = sobolev_norm(f, cfg.params.s);
  else if (cfg.norm == "l2")
    value = grid_l2(snap.grid, snap.values);
  else
    usage("unknown norm '" + cfg.norm + "' (sobolev, l2)");
  json report = {{"norm_name", cfg.norm}, {"s", cfg.params.s}, {"b", cfg.params.b}, {"value", value},
                 {"grid", grid_json(snap.grid)}};
  return emit(cfg, report, out, std::isfinite(value));
}

int run_verify(const RunConfig& cfg, std::ostream& out) {
  const double s = cfg.params.s;
  const std::string& t = cfg.target;
  json report = {{"command", "verify"}, {"target", t}};
  bool ok = false;
  if (t == "resonance") {
    const auto st = verify::check_resonance_identity(cfg.trials > 0 ? cfg.trials : 100000, cfg.seed);
    report["samples"] = st.samples;
    report["max_relative_error"] = st.max_relative_error;
    report["min_ratio_to_m"] = st.min_ratio_to_m;
    report["same_sign"] = st.same_sign;
    ok = st.max_relative_error < 1e-9 && st.min_ratio_to_m >= 0.2 && st.same_sign;
  } else if (t == "lemmas") {
    const auto calc = verify::calculus_lemma_sweep();
    const auto schur = verify::schur_random_kernels(cfg.trials > 0 ? cfg.trials : 20, cfg.seed);
    report["calculus"] = ratio_json(calc);
    report["schur"] = {{"kernels", schur.kernels}, {"failures", schur.failures}, {"worst_margin", schur.worst_margin}};
    ok = calc.max <= 10.0 && schur.failures == 0;
  } else if (t == "kato") {
    const auto r = verify::kato_ratio(s, cfg.trials > 0 ? cfg.trials : 50, cfg.seed);
    report["report"] = ratio_json(r);
    ok = std::isfinite(r.max) && r.growth < 4.0;
  } else if (t == "bilinear" || t == "weighted-bilinear") {
    const auto target = t == "bilinear" ? verify::BilinearTarget::Xsb : verify::BilinearTarget::Weighted;
    const auto r = verify::bilinear_growth(s, cfg.params.a, cfg.params.b, 16, 32, cfg.trials > 0 ? cfg.trials : 100,
                                           cfg.seed, target);
    report["report"] = ratio_json(r);
    ok = r.growth < 2.0;
  } else if (t == "smoothing") {
    const double a_grid[] = {0.1, 0.2, 0.25};
    const auto r = verify::smoothing_fit(cfg.seed, s, a_grid, cfg.params);
    report["applicable"] = r.applicable;
    report["gain"] = r.gain;
    report["control_gain"] = r.control_gain;
    report["a_target"] = r.a_target;
    report["nonlinear"] = shell_json(r.nonlinear);
    report["linear"] = shell_json(r.linear);
    report["data"] = shell_json(r.data);
    report["picard"] = picard_json(r.picard);
    json per = json::array();
    for (const auto& [a, pass] : r.per_a) per.push_back({{"a", a}, {"passed", pass}});
    report["per_a"] = per;
    ok = r.applicable && r.passed && std::abs(r.control_gain) < 0.05;
  } else {
    usage("unknown verify target '" + t + "'");
  }
  return emit(cfg, report, out, ok);
}

void apply_thread_cap() {
#ifdef _OPENMP
  if (const char* env = std::getenv("KP5_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

}  // namespace

const char* to_string(Command c) {
  for (const auto& [name, cmd] : kCommands)
    if (cmd == c) return name.c_str();
  return "unknown";
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Fifth-order KP-II half-plane solver"};
  app.set_help_flag("--help", "print usage");
  app.allow_config_extras(false);
  std::string command;
  std::string format = "json";
  app.add_option("command", command, "generate | linear | solve | norms | verify")->required();
  app.add_option("target", cfg.target, "verify target");
  app.set_config("--config", "", "flat key = value file; flags override its values");
  app.add_option("--s", cfg.params.s);
  app.add_option("--a", cfg.params.a);
  app.add_option("--b", cfg.params.b);
  app.add_option("--T", cfg.params.T);
  app.add_option("--tol", cfg.params.tol_fixed_point);
  app.add_option("--max-iter", cfg.params.max_iter);
  app.add_option("--dealias", cfg.params.dealias_fraction);
  app.add_option("--epsilon-plus", cfg.params.epsilon_plus);
  app.add_option("--grid", cfg.grid);
  app.add_option("--length", cfg.length);
  app.add_option("--nt", cfg.nt);
  app.add_option("--half-width", cfg.half_width);
  app.add_option("--amplitude", cfg.amplitude);
  app.add_option("--seed", cfg.seed);
  app.add_option("--trials", cfg.trials);
  app.add_option("--g", cfg.g_path)->check(CLI::ExistingFile);
  app.add_option("--h", cfg.h_path)->check(CLI::ExistingFile);
  app.add_option("--snapshot", cfg.snapshot_path)->check(CLI::ExistingFile);
  app.add_option("--out", cfg.out_dir)->check(CLI::ExistingDirectory);
  app.add_option("--norm", cfg.norm);
  app.add_option("--times", cfg.times)->delimiter(',');
  app.add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    usage(e.what());
  }
  if (const CLI::Option* c = app.get_config_ptr(); c != nullptr && c->count() > 0) cfg.config_file = c->as<std::string>();
  const auto it = kCommands.find(command);
  if (it == kCommands.end()) usage("unknown command '" + command + "'");
  cfg.command = it->second;
  cfg.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;

  const double s = cfg.params.s;
  const bool a_given = app.count("--a") > 0;
  const bool solver = cfg.command == Command::Solve || cfg.command == Command::Linear ||
                      cfg.command == Command::Generate;
  if (solver || a_given) {
    if (!(s > 0.0 && s < 2.5) || s == 0.5) {
      std::ostringstream msg;
      msg << "require 0<s<5/2, s!=1/2 (got s=" << s << ")";
      usage(msg.str());
    }
  }
  if (a_given) {
    const double amax = a_max(s);
    if (!(cfg.params.a > 0.0 && cfg.params.a < amax)) {
      std::ostringstream msg;
      msg << "require 0<a<min(1/3, 2s/3, 3/2-3s/5)=" << amax << " (got a=" << cfg.params.a << ", s=" << s << ")";
      usage(msg.str());
    }
  } else if (s > 0.0 && s < 2.5) {
    cfg.params.a = std::min(cfg.params.a, a_max(s) - 0.05);
  }
  if (solver) cfg.params.validate();
  if (cfg.command == Command::Verify) {
    if (std::find(kTargets.begin(), kTargets.end(), cfg.target) == kTargets.end())
      usage("verify target must be one of resonance, lemmas, kato, bilinear, weighted-bilinear, smoothing");
  } else if (!cfg.target.empty()) {
    usage("unexpected argument '" + cfg.target + "'");
  }
  if (cfg.grid < 8 || cfg.grid % 2) usage("require an even --grid >= 8");
  if (!(cfg.length > 0.0)) usage("require --length > 0");
  if (cfg.nt < 8 || cfg.nt % 2) usage("require an even --nt >= 8");
  if (!(cfg.half_width >= 2.0)) usage("require --half-width >= 2");
  return cfg;
}

std::string describe(const RunConfig& cfg) {
  const SolverParams& p = cfg.params;
  json j = {{"command", to_string(cfg.command)},
            {"target", cfg.target},
            {"s", p.s},
            {"a", p.a},
            {"b", p.b},
            {"T", p.T},
            {"tol", p.tol_fixed_point},
            {"max_iter", p.max_iter},
            {"dealias", p.dealias_fraction},
            {"epsilon_plus", p.epsilon_plus},
            {"grid", cfg.grid},
            {"length", cfg.length},
            {"nt", cfg.nt},
            {"half_width", cfg.half_width},
            {"amplitude", cfg.amplitude},
            {"seed", cfg.seed},
            {"trials", cfg.trials},
            {"g", cfg.g_path},
            {"h", cfg.h_path},
            {"snapshot", cfg.snapshot_path},
            {"out", cfg.out_dir},
            {"config", cfg.config_file},
            {"norm", cfg.norm},
            {"times", cfg.times},
            {"format", cfg.format == OutputFormat::Csv ? "csv" : "json"}};
  return j.dump();
}

int run(const RunConfig& cfg, std::ostream& out) {
  apply_thread_cap();
  switch (cfg.command) {
    case Command::Generate: return run_generate(cfg, out);
    case Command::Linear: return run_linear(cfg, out);
    case Command::Solve: return run_solve(cfg, out);
    case Command::Norms: return run_norms(cfg, out);
    case Command::Verify: return run_verify(cfg, out);
  }
  return 2;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto fail = [&](const std::string& kind, const std::string& what, int code) {
    err << json{{"error", kind}, {"message", what}, {"version", kVersion}}.dump() << "\n";
    return code;
  };
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const CLI::CallForHelp&) {
    out << "usage: kp5 {generate|linear|solve|norms|verify} [target] [--flags] [--config file]\n"
           "  verify targets: resonance lemmas kato bilinear weighted-bilinear smoothing\n"
           "  flags: --s --a --b --T --tol --max-iter --dealias --epsilon-plus --grid --length --nt\n"
           "         --half-width --amplitude --seed --trials --g --h --snapshot --out --norm --times --format\n";
    return 0;
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what(), 2);
  }
  try {
    return run(cfg, out);
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what(), e.kind() == ErrorKind::Usage ? 2 : 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}

}  // namespace kp5::cli
