// SPDX-License-Identifier: Apache-2.0
#include "pvlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pvlab/errors.hpp"
#include "pvlab/io.hpp"
#include "pvlab/rng.hpp"

namespace pvlab {

namespace {

const std::vector<std::string>& valid_keys() {
  static const std::vector<std::string> keys = {
      "name",          "mode",
      "d",             "seed",
      "threads",       "out",
      "lambda_grid",   "replicates",
      "margin_multiple", "statistics",
      "symdiff.budget", "zone.spacing_factor",
      "iterations",    "shape.kind",
      "shape.center",  "shape.radius",
      "shape.lo",      "shape.hi",
      "shape.r0",      "shape.harmonics",
      "shape.centers", "shape.radii",
      "shape.origin",  "shape.width",
      "shape.h0",      "shape.slope",
      "shape.quad",    "kappa.kind",
      "kappa.value",   "kappa.a",
  };
  return keys;
}

int levenshtein(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = int(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = int(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      int sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string nearest_key(const std::string& key) {
  int best = 1 << 30;
  std::string out;
  for (const std::string& k : valid_keys()) {
    int d = levenshtein(key, k);
    if (d < best) {
      best = d;
      out = k;
    }
  }
  return out;
}

struct Raw {
  std::map<std::string, std::vector<std::string>> kv;
  std::map<std::string, int> line_of;
};

Raw tokenize(const std::string& text) {
  Raw raw;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto notblank = line.find_first_not_of(" \t\r");
    if (notblank == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected 'key = value'");
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r");
      auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(lineno) +
                         ": empty key");
    if (std::find(valid_keys().begin(), valid_keys().end(), key) ==
        valid_keys().end())
      throw config_error("config line " + std::to_string(lineno) +
                         ": unknown key '" + key + "' (nearest valid key: '" +
                         nearest_key(key) + "')");
    if (raw.kv.count(key))
      throw config_error("config line " + std::to_string(lineno) +
                         ": duplicate key '" + key + "'");
    std::vector<std::string> toks;
    std::istringstream vs(val);
    std::string t;
    while (vs >> t) toks.push_back(t);
    raw.kv[key] = toks;
    raw.line_of[key] = lineno;
  }
  return raw;
}

double to_double(const Raw& raw, const std::string& key,
                 const std::string& tok) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw config_error("config line " + std::to_string(raw.line_of.at(key)) +
                       ": '" + tok + "' is not a number (key " + key + ")");
  }
}

std::vector<double> doubles_of(const Raw& raw, const std::string& key) {
  std::vector<double> out;
  for (const std::string& t : raw.kv.at(key)) out.push_back(to_double(raw, key, t));
  return out;
}

std::string single(const Raw& raw, const std::string& key,
                   const std::string& fallback) {
  auto it = raw.kv.find(key);
  if (it == raw.kv.end()) return fallback;
  if (it->second.size() != 1)
    throw config_error("config line " + std::to_string(raw.line_of.at(key)) +
                       ": key " + key + " expects one value");
  return it->second[0];
}

std::shared_ptr<Shape> build_shape(const Raw& raw, int d) {
  std::string kind = single(raw, "shape.kind", "ball");
  auto line = [&](const std::string& k) {
    auto it = raw.line_of.find(k);
    return it == raw.line_of.end() ? std::string("?")
                                   : std::to_string(it->second);
  };
  auto need = [&](const std::string& k) {
    if (!raw.kv.count(k))
      throw config_error("config: shape.kind " + kind + " requires key " + k);
  };
  if (kind == "ball") {
    need("shape.radius");
    std::vector<double> c(d, 0.0);
    if (raw.kv.count("shape.center")) {
      c = doubles_of(raw, "shape.center");
      if (int(c.size()) != d)
        throw config_error("config line " + line("shape.center") +
                           ": shape.center needs " + std::to_string(d) +
                           " values");
    }
    return make_ball(d, c, doubles_of(raw, "shape.radius")[0]);
  }
  if (kind == "box") {
    need("shape.lo");
    need("shape.hi");
    auto lo = doubles_of(raw, "shape.lo");
    auto hi = doubles_of(raw, "shape.hi");
    if (int(lo.size()) != d || int(hi.size()) != d)
      throw config_error("config: shape.lo/hi need " + std::to_string(d) +
                         " values each");
    return make_box(d, lo, hi);
  }
  if (kind == "blob") {
    if (d != 2) throw config_error("config: blob shapes are d=2");
    need("shape.r0");
    std::vector<double> c(2, 0.0);
    if (raw.kv.count("shape.center")) c = doubles_of(raw, "shape.center");
    std::vector<BlobHarmonic> hs;
    if (raw.kv.count("shape.harmonics")) {
      auto v = doubles_of(raw, "shape.harmonics");
      if (v.size() % 3 != 0)
        throw config_error("config line " + line("shape.harmonics") +
                           ": harmonics are (k amp phase) triples");
      for (std::size_t i = 0; i < v.size(); i += 3)
        hs.push_back({int(v[i]), v[i + 1], v[i + 2]});
    }
    return make_blob2(c, doubles_of(raw, "shape.r0")[0], hs);
  }
  if (kind == "ball_union") {
    need("shape.centers");
    need("shape.radii");
    auto cs = doubles_of(raw, "shape.centers");
    auto rs = doubles_of(raw, "shape.radii");
    if (cs.size() != rs.size() * std::size_t(d))
      throw config_error("config: shape.centers must hold d values per ball");
    std::vector<std::vector<double>> centers;
    for (std::size_t i = 0; i < rs.size(); ++i)
      centers.push_back(std::vector<double>(cs.begin() + i * d,
                                            cs.begin() + (i + 1) * d));
    return make_ball_union(d, centers, rs);
  }
  if (kind == "graph_region") {
    if (d != 2) throw config_error("config: graph_region shapes are d=2");
    need("shape.origin");
    need("shape.width");
    need("shape.h0");
    need("shape.slope");
    auto o = doubles_of(raw, "shape.origin");
    double q = raw.kv.count("shape.quad") ? doubles_of(raw, "shape.quad")[0]
                                          : 0.0;
    return make_graph_region2(o[0], o[1], doubles_of(raw, "shape.width")[0],
                              doubles_of(raw, "shape.h0")[0],
                              doubles_of(raw, "shape.slope")[0], q);
  }
  throw config_error("config: unknown shape.kind '" + kind + "'");
}

IntensityField build_kappa(const Raw& raw, const std::shared_ptr<Shape>& shape,
                           const std::string& mode) {
  std::string kind = single(raw, "kappa.kind",
                            mode == "maxima" ? "uniform-on-shape" : "constant");
  if (kind == "constant") {
    double v = raw.kv.count("kappa.value")
                   ? doubles_of(raw, "kappa.value")[0]
                   : 1.0;
    return IntensityField::constant(v);
  }
  if (kind == "linear-x1") {
    double a = raw.kv.count("kappa.a") ? doubles_of(raw, "kappa.a")[0] : 1.0;
    return IntensityField::linear_x1(a);
  }
  if (kind == "uniform-on-shape") {
    auto sp = shape;
    return IntensityField::callable(
        [sp](const double* x) { return sp->contains(x) ? 1.0 : 0.0; }, 1.0,
        0.0, "uniform-on-shape");
  }
  throw config_error("config: unknown kappa.kind '" + kind + "'");
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text) {
  Raw raw = tokenize(text);
  ParsedConfig out;
  ExperimentConfig& e = out.experiment;

  out.mode = single(raw, "mode", "scaling");
  if (out.mode != "scaling" && out.mode != "iterate" && out.mode != "maxima" &&
      out.mode != "zone")
    throw config_error("config: mode must be scaling|iterate|maxima|zone");
  e.name = single(raw, "name", "experiment");
  out.out_dir = single(raw, "out", "runs/" + e.name);
  e.d = int(to_double(raw, "d", single(raw, "d", "2")));
  if (e.d != 2 && e.d != 3) throw config_error("config: d must be 2 or 3");

  std::string seedtok = single(raw, "seed", "c0ffee");
  if (seedtok.rfind("0x", 0) == 0) seedtok = seedtok.substr(2);
  std::uint64_t seed = 0;
  for (char c : seedtok) {
    int v;
    if (c >= '0' && c <= '9')
      v = c - '0';
    else if (c >= 'a' && c <= 'f')
      v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      v = c - 'A' + 10;
    else
      throw config_error("config: seed must be hexadecimal");
    seed = seed * 16 + std::uint64_t(v);
  }
  e.seed_raw = seed;
  e.seed_root = SeedPath::root(seed);

  e.threads = raw.kv.count("threads")
                  ? int(doubles_of(raw, "threads")[0])
                  : 0;
  if (!raw.kv.count("lambda_grid"))
    throw config_error("config: lambda_grid is required");
  e.lambda_grid = doubles_of(raw, "lambda_grid");
  e.replicates = raw.kv.count("replicates")
                     ? int(doubles_of(raw, "replicates")[0])
                     : 200;
  e.margin_multiple = raw.kv.count("margin_multiple")
                          ? doubles_of(raw, "margin_multiple")[0]
                          : 3.0;
  e.symdiff_budget = raw.kv.count("symdiff.budget")
                         ? int(doubles_of(raw, "symdiff.budget")[0])
                         : 4096;
  e.zone_spacing_factor = raw.kv.count("zone.spacing_factor")
                              ? doubles_of(raw, "zone.spacing_factor")[0]
                              : 0.1;
  e.iterations =
      raw.kv.count("iterations") ? int(doubles_of(raw, "iterations")[0]) : 0;

  e.shape = build_shape(raw, e.d);
  e.kappa = build_kappa(raw, e.shape, out.mode);

  // statistic selection
  e.with_geometry = true;
  e.with_symdiff = true;
  e.with_zone = out.mode == "zone";
  e.with_maximal = false;
  if (raw.kv.count("statistics")) {
    e.with_symdiff = false;
    e.with_zone = false;
    bool geometry = false;
    for (const std::string& s : raw.kv.at("statistics")) {
      if (s == "symdiff") {
        e.with_symdiff = true;
        geometry = true;
      } else if (s == "zone") {
        e.with_zone = true;
        geometry = true;
      } else if (s == "maximal") {
        e.with_maximal = true;
      } else if (s == "volume" || s == "surface" || s == "skeleton" ||
                 s == "faces") {
        geometry = true;
      } else {
        throw config_error(
            "config line " + std::to_string(raw.line_of.at("statistics")) +
            ": unknown statistic '" + s +
            "' (volume surface skeleton faces symdiff zone maximal)");
      }
    }
    e.with_geometry = geometry;
  }
  if (out.mode == "maxima") {
    e.with_maximal = true;
    e.with_geometry = false;
    e.with_symdiff = false;
    e.with_zone = false;
    e.require_positive_kappa = false;
  }
  if (out.mode == "iterate") {
    if (e.iterations < 1) e.iterations = 3;
    e.with_zone = false;
  } else {
    e.iterations = 0;
  }

  // normalized entry map: every key the build consumed, numeric tokens
  // reformatted, defaults made explicit, so that the canonical text is a
  // parse fixed point
  auto norm_tokens = [&](const std::string& key) {
    std::ostringstream os;
    const auto& toks = raw.kv.at(key);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) os << " ";
      try {
        std::size_t used = 0;
        double v = std::stod(toks[i], &used);
        if (used == toks[i].size()) {
          os << format_g17(v);
          continue;
        }
      } catch (...) {
      }
      os << toks[i];
    }
    return os.str();
  };
  auto& en = out.entries;
  en["name"] = e.name;
  en["mode"] = out.mode;
  en["d"] = std::to_string(e.d);
  en["seed"] = hex64(e.seed_raw);
  // threads and the output directory are runtime placement, not part of
  // the experiment identity: they stay out of the canonical form
  {
    std::ostringstream os;
    for (std::size_t i = 0; i < e.lambda_grid.size(); ++i)
      os << (i ? " " : "") << format_g17(e.lambda_grid[i]);
    en["lambda_grid"] = os.str();
  }
  en["replicates"] = std::to_string(e.replicates);
  en["margin_multiple"] = format_g17(e.margin_multiple);
  {
    std::ostringstream os;
    if (e.with_geometry) os << "volume surface skeleton faces";
    if (e.with_symdiff) os << " symdiff";
    if (e.with_zone) os << " zone";
    if (e.with_maximal) os << (e.with_geometry ? " " : "") << "maximal";
    std::string s = os.str();
    if (!s.empty() && s[0] == ' ') s = s.substr(1);
    en["statistics"] = s;
  }
  en["symdiff.budget"] = std::to_string(e.symdiff_budget);
  en["zone.spacing_factor"] = format_g17(e.zone_spacing_factor);
  if (e.iterations > 0) en["iterations"] = std::to_string(e.iterations);
  for (const auto& [key, toks] : raw.kv) {
    (void)toks;
    if (key.rfind("shape.", 0) == 0 || key.rfind("kappa.", 0) == 0)
      en[key] = norm_tokens(key);
  }
  if (!en.count("shape.kind")) en["shape.kind"] = "ball";
  if (!en.count("kappa.kind"))
    en["kappa.kind"] = out.mode == "maxima" ? "uniform-on-shape" : "constant";

  out.canonical = emit_config(out);
  out.hash_hex = hex64(fnv1a64(out.canonical));
  return out;
}

std::string emit_config(const ParsedConfig& cfg) {
  std::ostringstream os;
  for (const auto& [key, value] : cfg.entries)
    os << key << " = " << value << "\n";
  return os.str();
}

}  // namespace pvlab
