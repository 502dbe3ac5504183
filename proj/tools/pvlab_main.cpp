// SPDX-License-Identifier: Apache-2.0
//
// pvlab: Poisson-Voronoi approximation laboratory.
//
//   simulate   run a replicated experiment from a config file
//   iterate    iterated-approximation experiment
//   zone       zone-complexity experiment
//   maxima     maximal-point experiment
//   fit        fit scaling exponents on a replicate CSV
//   constants  half-space estimates of the universal constants
//   report     bundle fits and plots of a finished run
//   selftest   small-scale oracle equivalence suite
#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "pvlab/config.hpp"
#include "pvlab/errors.hpp"
#include "pvlab/io.hpp"
#include "pvlab/oracles.hpp"
#include "pvlab/svg.hpp"
#include "pvlab/version.hpp"

namespace fs = std::filesystem;
using namespace pvlab;

namespace {

struct Overrides {
  std::string config_path;
  std::string seed_hex;
  int threads = -1;
  std::string out;
  std::string lambda_grid;
  int replicates = -1;
};

void add_common(CLI::App* cmd, Overrides& ov, bool need_config) {
  auto* c = cmd->add_option("--config", ov.config_path, "config file path");
  if (need_config) c->required();
  cmd->add_option("--seed", ov.seed_hex, "seed root (hex)");
  cmd->add_option("--threads", ov.threads,
                  "worker threads (0 = all cores; PVLAB_THREADS fallback)");
  cmd->add_option("--out", ov.out, "output directory");
  cmd->add_option("--lambda-grid", ov.lambda_grid,
                  "comma separated intensity grid");
  cmd->add_option("--replicates", ov.replicates, "replicates per intensity");
}

int env_threads() {
  const char* s = std::getenv("PVLAB_THREADS");
  if (!s) return 0;
  return std::atoi(s);
}

ParsedConfig load_config(const Overrides& ov, const std::string& force_mode) {
  ParsedConfig cfg = parse_config_text(read_file(ov.config_path));
  if (!force_mode.empty() && cfg.mode != force_mode)
    throw config_error("config mode is '" + cfg.mode + "', expected '" +
                       force_mode + "' for this subcommand");
  if (!ov.seed_hex.empty()) {
    std::uint64_t seed = std::stoull(ov.seed_hex, nullptr, 16);
    cfg.experiment.seed_raw = seed;
    cfg.experiment.seed_root = SeedPath::root(seed);
    cfg.entries["seed"] = hex64(seed);
  }
  if (ov.threads >= 0)
    cfg.experiment.threads = ov.threads;
  else if (env_threads() > 0)
    cfg.experiment.threads = env_threads();
  if (!ov.out.empty()) cfg.out_dir = ov.out;
  if (!ov.lambda_grid.empty()) {
    std::vector<double> grid;
    std::stringstream ss(ov.lambda_grid);
    std::string tok;
    while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
    cfg.experiment.lambda_grid = grid;
    std::ostringstream os;
    for (std::size_t i = 0; i < grid.size(); ++i)
      os << (i ? " " : "") << format_g17(grid[i]);
    cfg.entries["lambda_grid"] = os.str();
  }
  if (ov.replicates > 0) {
    cfg.experiment.replicates = ov.replicates;
    cfg.entries["replicates"] = std::to_string(ov.replicates);
  }
  // refresh canonical text and hash after overrides
  cfg.canonical = emit_config(cfg);
  cfg.hash_hex = hex64(fnv1a64(cfg.canonical));
  return cfg;
}

int run_simulation(const Overrides& ov, const std::string& force_mode) {
  ParsedConfig cfg = load_config(ov, force_mode);
  fs::create_directories(cfg.out_dir);

  RunManifest man;
  man.config_hash = cfg.hash_hex;
  man.seed_root_path = cfg.experiment.seed_root.path;
  man.seed_root_state_hex = hex64(cfg.experiment.seed_raw);
  man.version = PVLAB_VERSION;
  man.started = iso_timestamp();

  ExperimentResult res = run_experiment(cfg.experiment);

  std::string csv_path = cfg.out_dir + "/replicates.csv";
  write_file(csv_path, replicate_csv(res, cfg.hash_hex));
  write_file(cfg.out_dir + "/config.canonical", cfg.canonical);
  write_file(cfg.out_dir + "/summary.json", summary_json(res, cfg.hash_hex));
  man.outputs = {"replicates.csv", "config.canonical", "summary.json",
                 "manifest.json"};
  man.taint_fraction = res.taint_fraction;
  man.tainted = res.tainted;
  man.finished = iso_timestamp();
  write_file(cfg.out_dir + "/manifest.json", manifest_to_json(man));

  std::cout << "rows: " << res.rows.size() << "\n"
            << "taint_fraction: " << res.taint_fraction << "\n"
            << "outputs: " << csv_path << "\n";
  return res.tainted ? 3 : 0;
}

int run_fit(const std::string& in, const std::string& statistic,
            const std::string& aggregate, double center,
            const std::string& out_dir, int iteration) {
  ExperimentResult res = parse_replicate_csv(read_file(in));
  if (res.rows.empty()) throw data_error("fit: empty replicate table");
  ReplicateTable table = extract_table(res, statistic, iteration);
  Aggregate agg = aggregate == "variance" ? Aggregate::variance : Aggregate::mean;
  ScalingFit fit = fit_scaling(table, agg, center);
  fit.statistic = statistic + (agg == Aggregate::variance ? ":variance" : ":mean");
  std::string j = fit_to_json(fit);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::string stem = statistic + (agg == Aggregate::variance ? "_var" : "_mean");
    write_file(out_dir + "/fit_" + stem + ".json", j);
    std::vector<double> err;  // bootstrap CI drawn on the plot only via slope
    write_file(out_dir + "/fit_" + stem + ".svg",
               svg_loglog_plot(fit.fit_lambdas, fit.fit_values, err, fit.slope,
                               fit.intercept, fit.statistic));
  }
  std::cout << j << "\n";
  return 0;
}

int run_constants(const std::string& score, int d, double L, double h,
                  int replicates, const std::string& seed_hex,
                  const std::string& out_dir, int threads) {
  ScoreKind kind = ScoreKind::parse(score);
  std::uint64_t seed =
      seed_hex.empty() ? 0xC0FFEE : std::stoull(seed_hex, nullptr, 16);
  if (threads < 0) threads = env_threads();
  HalfSpaceEstimate est = estimate_constant(
      kind, d, L, h, replicates, SeedPath::root(seed).child("constants"),
      threads);
  std::string j = estimate_to_json(est);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(out_dir + "/constant_" + kind.name() + ".json", j);
  }
  std::cout << j << "\n";
  if (!est.convergence_flag)
    std::cerr << "warning: estimate not stable under h doubling\n";
  return 0;
}

int run_report(const std::string& dir) {
  std::string summary = "# run report\n\n";
  std::string bundle = "[\n";
  bool first = true;
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir))
    names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  for (const std::string& name : names) {
    if (name == "manifest.json" || name == "summary.json" ||
        name.rfind("fit_", 0) == 0 || name.rfind("constant_", 0) == 0 ||
        name.rfind("config.", 0) == 0)
      summary += "- [" + name + "](" + name + ")\n";
    if ((name.rfind("fit_", 0) == 0 || name.rfind("constant_", 0) == 0) &&
        name.size() > 5 && name.substr(name.size() - 5) == ".json") {
      if (!first) bundle += ",\n";
      bundle += read_file(dir + "/" + name);
      first = false;
    }
  }
  bundle += "\n]\n";
  write_file(dir + "/report.md", summary);
  write_file(dir + "/fits.json", bundle);
  std::cout << "report: " << dir << "/report.md\n";
  return 0;
}

bool check(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  return ok;
}

int run_selftest() {
  bool all = true;
  Rng rng(20240601);
  // small fixed-seed diagram against the brute oracles
  PointSample s;
  s.dim = 2;
  s.domain = Domain::cube(2);
  for (int i = 0; i < 60; ++i) {
    s.coords.push_back(rng.next_double() - 0.5);
    s.coords.push_back(rng.next_double() - 0.5);
  }
  s.lambda = 60;
  VoronoiDiagram dia = VoronoiDiagram::build(s);
  auto brute = oracle::brute_cells2(s);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    worst = std::max(worst,
                     std::fabs(dia.cell(int(i)).volume - brute[i].area));
  all &= check("cell volumes vs full clipping", worst < 1e-9,
               "max diff " + format_g17(worst));
  double tile = std::fabs(dia.total_volume() - 1.0);
  all &= check("cells tile the domain", tile < 1e-9,
               "|sum-1| = " + format_g17(tile));
  int oracle_verts = oracle::circumcenter_vertex_count2(s);
  int fast_verts = 0;
  for (const Face& f : dia.faces())
    if (f.dim == 0 && !f.on_clip_boundary) ++fast_verts;
  all &= check("interior vertices vs circumcircle enumeration",
               fast_verts == oracle_verts,
               std::to_string(fast_verts) + " vs " +
                   std::to_string(oracle_verts));
  // maximal points
  PointSample m;
  m.dim = 2;
  m.domain = Domain::cube(2);
  for (int i = 0; i < 1000; ++i) {
    m.coords.push_back(rng.next_double() - 0.5);
    m.coords.push_back(rng.next_double() - 0.5);
  }
  m.lambda = 1000;
  all &= check("maximal points vs pairwise domination",
               maximal_points(m) == oracle::maximal_points_brute(m), "");
  // symdiff vs exact disk/polygon areas
  auto ball = make_ball(2, {0.0, 0.0}, 0.25);
  CellClassification cls = classify(dia, *ball);
  SymdiffOptions opt;
  opt.budget_per_cell = 65536;
  opt.seed = 7;
  StatisticVector sv;
  volume_statistics(dia, cls, *ball, opt, sv);
  double exact = 0.0;
  for (std::size_t i = 0; i < dia.n_cells(); ++i) {
    std::vector<Vec2> poly;
    for (const Vec3& v : dia.cell(int(i)).verts) poly.push_back({v.x, v.y});
    double inter = oracle::disk_poly_area({0, 0}, 0.25, poly);
    exact += cls.inside[i] ? dia.cell(int(i)).volume - inter : inter;
  }
  double sd_err = std::fabs(sv.symdiff_volume - exact);
  all &= check("symdiff vs exact disk clipping", sd_err < 5.0 * sv.symdiff_se,
               format_g17(sd_err) + " at se " + format_g17(sv.symdiff_se));
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pvlab: Poisson-Voronoi approximation laboratory (v" PVLAB_VERSION ")"};
  app.require_subcommand(1);

  Overrides ov;
  std::string fit_in, fit_stat = "symdiff_volume", fit_agg = "mean";
  double fit_center = 0.0;
  int fit_iteration = 1;
  std::string cs_score = "surface", cs_seed, cs_out;
  int cs_d = 2, cs_reps = 400, cs_threads = -1;
  double cs_L = 20.0, cs_h = 8.0;
  std::string report_dir;

  auto* simulate = app.add_subcommand("simulate", "run a scaling experiment");
  add_common(simulate, ov, true);
  auto* iterate = app.add_subcommand("iterate", "run an iterated experiment");
  add_common(iterate, ov, true);
  auto* zone = app.add_subcommand("zone", "run a zone experiment");
  add_common(zone, ov, true);
  auto* maxima = app.add_subcommand("maxima", "run a maximal-point experiment");
  add_common(maxima, ov, true);

  auto* fit = app.add_subcommand("fit", "fit exponents on a replicate CSV");
  fit->add_option("--in", fit_in, "replicate CSV")->required();
  fit->add_option("--statistic", fit_stat, "column name");
  fit->add_option("--aggregate", fit_agg, "mean | variance");
  fit->add_option("--center", fit_center, "known limit to subtract");
  fit->add_option("--iteration", fit_iteration, "iteration filter");
  fit->add_option("--out", cs_out, "output directory");

  auto* constants = app.add_subcommand("constants", "half-space estimates");
  constants->add_option("--score", cs_score,
                        "signed_volume|symdiff_volume|surface|skeleton_L|"
                        "face_count_L|zone_complexity");
  constants->add_option("--d", cs_d, "dimension");
  constants->add_option("--lateral", cs_L, "slab lateral extent");
  constants->add_option("--height", cs_h, "slab half height");
  constants->add_option("--replicates", cs_reps, "replicates");
  constants->add_option("--seed", cs_seed, "seed (hex)");
  constants->add_option("--out", cs_out, "output directory");
  constants->add_option("--threads", cs_threads, "worker threads");

  auto* report = app.add_subcommand("report", "bundle results of a run");
  report->add_option("--dir", report_dir, "run directory")->required();

  app.add_subcommand("selftest", "oracle equivalence at small scale");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulation(ov, "scaling");
    if (iterate->parsed()) return run_simulation(ov, "iterate");
    if (zone->parsed()) return run_simulation(ov, "zone");
    if (maxima->parsed()) return run_simulation(ov, "maxima");
    if (fit->parsed())
      return run_fit(fit_in, fit_stat, fit_agg, fit_center, cs_out,
                     fit_iteration);
    if (constants->parsed())
      return run_constants(cs_score, cs_d, cs_L, cs_h, cs_reps, cs_seed,
                           cs_out, cs_threads);
    if (report->parsed()) return run_report(report_dir);
    return run_selftest();
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
