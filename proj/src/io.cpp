// SPDX-License-Identifier: Apache-2.0
#include "pvlab/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pvlab/errors.hpp"
#include "pvlab/version.hpp"

namespace pvlab {

using nlohmann::json;

std::vector<std::string> csv_columns(int d) {
  std::vector<std::string> cols = {"lambda",    "replicate",
                                   "iteration", "seed",
                                   "n_points",  "volume",
                                   "signed_volume_error", "symdiff_volume",
                                   "symdiff_se", "surface"};
  for (int ell = 0; ell < d; ++ell) {
    cols.push_back("skel_weighted_" + std::to_string(ell));
    cols.push_back("skel_distinct_" + std::to_string(ell));
  }
  for (int ell = 0; ell < d; ++ell)
    cols.push_back("face_count_" + std::to_string(ell));
  cols.push_back("zone_complexity");
  cols.push_back("zone_cells");
  for (int ell = 0; ell < d; ++ell)
    cols.push_back("zone_faces_" + std::to_string(ell));
  cols.push_back("maximal");
  cols.push_back("boundary_touch");
  return cols;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string replicate_csv(const ExperimentResult& res,
                          const std::string& config_hash) {
  std::ostringstream os;
  os << "# pvlab replicates v1 d=" << res.d << " config=" << config_hash
     << "\n";
  auto cols = csv_columns(res.d);
  for (std::size_t i = 0; i < cols.size(); ++i)
    os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const ReplicateRow& r : res.rows) {
    const StatisticVector& s = r.stats;
    os << format_g17(r.lambda) << ',' << r.replicate << ',' << s.iteration
       << ',' << r.seed << ',' << s.n_points << ',' << format_g17(s.volume)
       << ',' << format_g17(s.signed_volume_error) << ','
       << format_g17(s.symdiff_volume) << ',' << format_g17(s.symdiff_se)
       << ',' << format_g17(s.surface);
    for (int ell = 0; ell < res.d; ++ell)
      os << ',' << format_g17(s.skel_weighted[ell]) << ','
         << format_g17(s.skel_distinct[ell]);
    for (int ell = 0; ell < res.d; ++ell) os << ',' << s.face_count[ell];
    os << ',' << format_g17(s.zone_complexity) << ',' << s.zone_cells;
    for (int ell = 0; ell < res.d; ++ell) os << ',' << s.zone_faces[ell];
    os << ',' << s.maximal << ',' << (s.boundary_touch ? 1 : 0) << "\n";
  }
  return os.str();
}

ExperimentResult parse_replicate_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  ExperimentResult res;
  int lineno = 0;
  std::vector<std::string> cols;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("d=");
      if (pos != std::string::npos) res.d = std::stoi(line.substr(pos + 2));
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    if (cols.empty()) {
      cols = f;
      auto expect = csv_columns(res.d);
      if (cols != expect)
        throw data_error("replicate csv: header mismatch at line " +
                         std::to_string(lineno));
      continue;
    }
    if (f.size() != cols.size())
      throw data_error("replicate csv: bad field count at line " +
                       std::to_string(lineno));
    ReplicateRow r;
    std::size_t k = 0;
    auto next_d = [&]() { return std::stod(f[k++]); };
    auto next_ll = [&]() { return std::stoll(f[k++]); };
    r.lambda = next_d();
    r.replicate = int(next_ll());
    r.stats.iteration = int(next_ll());
    r.seed = f[k++];
    r.stats.n_points = next_ll();
    r.stats.volume = next_d();
    r.stats.signed_volume_error = next_d();
    r.stats.symdiff_volume = next_d();
    r.stats.symdiff_se = next_d();
    r.stats.surface = next_d();
    for (int ell = 0; ell < res.d; ++ell) {
      r.stats.skel_weighted[ell] = next_d();
      r.stats.skel_distinct[ell] = next_d();
    }
    for (int ell = 0; ell < res.d; ++ell) r.stats.face_count[ell] = next_ll();
    r.stats.zone_complexity = next_d();
    r.stats.zone_cells = next_ll();
    for (int ell = 0; ell < res.d; ++ell) r.stats.zone_faces[ell] = next_ll();
    r.stats.maximal = next_ll();
    r.stats.boundary_touch = next_ll() != 0;
    res.rows.push_back(std::move(r));
  }
  if (cols.empty()) throw data_error("replicate csv: no header found");
  return res;
}

std::string fit_to_json(const ScalingFit& fit) {
  json j;
  j["statistic"] = fit.statistic;
  j["centering"] = fit.centering;
  j["slope"] = fit.slope;
  j["slope_ci"] = {fit.slope_lo, fit.slope_hi};
  j["intercept"] = fit.intercept;
  j["intercept_ci"] = {fit.intercept_lo, fit.intercept_hi};
  j["r_squared"] = fit.r_squared;
  j["n_lambda"] = fit.n_lambda;
  j["replicates_min"] = fit.replicates_min;
  j["bootstrap_resamples"] = fit.bootstrap_resamples;
  j["lambdas"] = fit.fit_lambdas;
  j["values"] = fit.fit_values;
  j["residuals"] = fit.residuals;
  return j.dump(2);
}

std::string estimate_to_json(const HalfSpaceEstimate& est) {
  json j;
  j["score"] = est.kind.name();
  j["d"] = est.d;
  j["value"] = est.value;
  j["std_error"] = est.std_error;
  j["value_2h"] = est.value_2h;
  j["std_error_2h"] = est.std_error_2h;
  j["convergence_flag"] = est.convergence_flag;
  j["slab"] = {{"L", est.L}, {"h", est.h}, {"replicates", est.replicates}};
  j["discarded"] = est.discarded;
  j["discarded_2h"] = est.discarded_2h;
  j["seed_path"] = est.seed_path;
  j["gamma"] = est.kind.gamma(est.d);
  return j.dump(2);
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["config_hash"] = m.config_hash;
  j["seed_root"] = {{"path", m.seed_root_path}, {"state", m.seed_root_state_hex}};
  j["version"] = m.version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["taint_fraction"] = m.taint_fraction;
  j["tainted"] = m.tainted;
  j["outputs"] = m.outputs;
  return j.dump(2);
}

std::string summary_json(const ExperimentResult& res,
                         const std::string& config_hash) {
  json j;
  j["config"] = config_hash;
  j["d"] = res.d;
  j["taint_fraction"] = res.taint_fraction;
  json groups = json::array();
  std::vector<std::string> cols = csv_columns(res.d);
  // group rows by (lambda, iteration)
  std::vector<std::pair<double, int>> keys;
  for (const ReplicateRow& r : res.rows) {
    std::pair<double, int> k{r.lambda, r.stats.iteration};
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      keys.push_back(k);
  }
  for (auto [lam, iter] : keys) {
    json g;
    g["lambda"] = lam;
    g["iteration"] = iter;
    json stats;
    for (const std::string& col : cols) {
      if (col == "lambda" || col == "replicate" || col == "seed" ||
          col == "iteration")
        continue;
      std::vector<double> v;
      for (const ReplicateRow& r : res.rows)
        if (r.lambda == lam && r.stats.iteration == iter)
          v.push_back(stat_field(r.stats, col, res.d));
      double m = mean_of(v);
      double var = variance_of(v);
      stats[col] = {{"mean", m},
                    {"se", std::sqrt(var / double(v.size()))},
                    {"variance", var}};
    }
    g["replicates"] = stats.empty() ? 0 : int(res.rows.size() / keys.size());
    g["stats"] = std::move(stats);
    groups.push_back(std::move(g));
  }
  j["groups"] = std::move(groups);
  return j.dump(2);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot write " + path);
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace pvlab
