// SPDX-License-Identifier: Apache-2.0
#include "pvlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pvlab/errors.hpp"
#include "pvlab/threadpool.hpp"

namespace pvlab {

namespace {

std::string lambda_label(double l) {
  std::ostringstream os;
  os << "lam" << l;
  return os.str();
}

}  // namespace

BoundaryPatch zone_patch_for(const Shape& shape, double lambda,
                             double kappa_sup, double factor) {
  const int d = shape.dim();
  const double target =
      factor * std::pow(1.0 / (lambda * kappa_sup), 1.0 / d);
  double tol = target * target;
  for (int it = 0; it < 24; ++it) {
    BoundaryPatch p = shape.boundary_patch({}, tol);
    if (p.max_spacing <= target) return p;
    tol *= 0.25;
  }
  throw precision_error("zone_patch_for: could not reach the node spacing");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (!cfg.shape) throw config_error("experiment: no shape configured");
  if (cfg.d != cfg.shape->dim())
    throw config_error("experiment: shape dimension mismatch");
  if (cfg.lambda_grid.empty())
    throw config_error("experiment: empty lambda grid");
  for (std::size_t i = 1; i < cfg.lambda_grid.size(); ++i)
    if (!(cfg.lambda_grid[i] > cfg.lambda_grid[i - 1]))
      throw config_error("experiment: lambda grid must increase strictly");
  if (cfg.replicates < 1) throw config_error("experiment: replicates < 1");
  if (cfg.require_positive_kappa) cfg.kappa.require_positive_density();

  // margin policy against the smallest intensity
  const double lam_min = cfg.lambda_grid.front();
  const double need = cfg.margin_multiple * std::pow(lam_min, -1.0 / cfg.d);
  if (cfg.shape->margin() < need) {
    std::ostringstream os;
    os << "experiment: shape margin " << cfg.shape->margin()
       << " violates the policy " << cfg.margin_multiple << " * lambda^(-1/d) = "
       << need;
    throw config_error(os.str());
  }

  // one zone patch per lambda, shared across replicates
  std::vector<BoundaryPatch> patches;
  if (cfg.with_zone)
    for (double l : cfg.lambda_grid)
      patches.push_back(zone_patch_for(*cfg.shape, l, cfg.kappa.sup_bound,
                                       cfg.zone_spacing_factor));

  const int iters = std::max(1, cfg.iterations);
  const std::size_t n_tasks = cfg.lambda_grid.size() * std::size_t(cfg.replicates);
  std::vector<std::vector<ReplicateRow>> slots(n_tasks);

  parallel_for(n_tasks, cfg.threads, [&](std::size_t t) {
    const std::size_t li = t / cfg.replicates;
    const int rep = int(t % cfg.replicates);
    const double lambda = cfg.lambda_grid[li];
    SeedPath seed = cfg.seed_root.child(lambda_label(lambda))
                        .child("rep" + std::to_string(rep));
    SymdiffOptions opt;
    opt.budget_per_cell = cfg.with_symdiff ? cfg.symdiff_budget : 0;
    opt.seed = seed.child("mc").state;

    std::vector<ReplicateRow> rows;
    if (cfg.iterations > 0) {
      auto svs = iterate_pv(*cfg.shape, lambda, iters, seed, opt);
      for (auto& sv : svs)
        rows.push_back({lambda, rep, seed.path, std::move(sv)});
    } else {
      PointSample sample = sample_poisson_cube(lambda, cfg.kappa, cfg.d, seed);
      StatisticVector sv;
      sv.n_points = (long long)(sample.size());
      long long maximal = -1;
      if (cfg.with_maximal) maximal = maximal_points(sample);
      if (cfg.with_geometry && sample.size() > 0) {
        VoronoiDiagram dia = VoronoiDiagram::build(sample);
        const BoundaryPatch* patch = cfg.with_zone ? &patches[li] : nullptr;
        sv = compute_statistics(dia, *cfg.shape, opt, patch,
                                cfg.zone_spacing_factor);
        sv.n_points = (long long)(sample.size());
      } else if (cfg.with_geometry) {
        // empty process: the approximation is empty
        sv.signed_volume_error = -cfg.shape->volume();
        sv.symdiff_volume = cfg.shape->volume();
      }
      sv.maximal = maximal;
      rows.push_back({lambda, rep, seed.path, std::move(sv)});
    }
    slots[t] = std::move(rows);
  });

  ExperimentResult res;
  res.d = cfg.d;
  std::size_t touched = 0, total = 0;
  for (auto& rs : slots)
    for (auto& r : rs) {
      touched += r.stats.boundary_touch ? 1 : 0;
      ++total;
      res.rows.push_back(std::move(r));
    }
  res.taint_fraction = total ? double(touched) / double(total) : 0.0;
  res.tainted = res.taint_fraction > 0.01;
  return res;
}

double stat_field(const StatisticVector& s, const std::string& column, int d) {
  if (column == "volume") return s.volume;
  if (column == "signed_volume_error") return s.signed_volume_error;
  if (column == "symdiff_volume") return s.symdiff_volume;
  if (column == "symdiff_se") return s.symdiff_se;
  if (column == "surface") return s.surface;
  if (column == "zone_complexity") return s.zone_complexity;
  if (column == "zone_cells") return double(s.zone_cells);
  if (column == "maximal") return double(s.maximal);
  if (column == "n_points") return double(s.n_points);
  if (column == "boundary_touch") return s.boundary_touch ? 1.0 : 0.0;
  if (column == "iteration") return double(s.iteration);
  for (int ell = 0; ell < d; ++ell) {
    std::string suffix = std::to_string(ell);
    if (column == "skel_weighted_" + suffix) return s.skel_weighted[ell];
    if (column == "skel_distinct_" + suffix) return s.skel_distinct[ell];
    if (column == "face_count_" + suffix) return double(s.face_count[ell]);
    if (column == "zone_faces_" + suffix) return double(s.zone_faces[ell]);
  }
  throw std::invalid_argument("unknown statistic column: " + column);
}

ReplicateTable extract_table(const ExperimentResult& res,
                             const std::string& column, int iteration) {
  ReplicateTable t;
  for (const ReplicateRow& r : res.rows) {
    if (r.stats.iteration != iteration) continue;
    std::size_t i = 0;
    while (i < t.lambdas.size() && t.lambdas[i] != r.lambda) ++i;
    if (i == t.lambdas.size()) {
      t.lambdas.push_back(r.lambda);
      t.values.emplace_back();
    }
    t.values[i].push_back(stat_field(r.stats, column, res.d));
  }
  return t;
}

InvarianceReport invariance_test(const ReplicateTable& ta, double content_a,
                                 const ReplicateTable& tb, double content_b,
                                 Aggregate agg, int bootstrap,
                                 std::uint64_t seed) {
  if (ta.lambdas != tb.lambdas)
    throw std::invalid_argument("invariance_test: lambda grids differ");
  ScalingFit fa = fit_scaling(ta, agg, 0.0, 0, seed);
  ScalingFit fb = fit_scaling(tb, agg, 0.0, 0, seed);
  InvarianceReport rep;
  rep.prefactor_ratio = std::exp(fa.intercept - fb.intercept);
  rep.content_ratio = content_a / content_b;
  rep.ratio_of_ratios = rep.prefactor_ratio / rep.content_ratio;

  Rng rng(seed);
  std::vector<double> rr;
  auto resample_fit = [&](const ReplicateTable& t) {
    ReplicateTable rt;
    rt.lambdas = t.lambdas;
    rt.values.resize(t.values.size());
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      const auto& src = t.values[i];
      rt.values[i].resize(src.size());
      for (std::size_t k = 0; k < src.size(); ++k)
        rt.values[i][k] = src[rng.below(src.size())];
    }
    return fit_scaling(rt, agg, 0.0, 0, 0);
  };
  for (int b = 0; b < bootstrap; ++b) {
    try {
      ScalingFit ba = resample_fit(ta);
      ScalingFit bb = resample_fit(tb);
      rr.push_back(std::exp(ba.intercept - bb.intercept) / rep.content_ratio);
    } catch (const data_error&) {
      // sign-flipped resample, skip
    }
  }
  if (rr.size() < std::size_t(bootstrap) / 2)
    throw data_error("invariance_test: bootstrap unstable");
  std::sort(rr.begin(), rr.end());
  rep.lo = rr[std::size_t(0.025 * (rr.size() - 1))];
  rep.hi = rr[std::size_t(0.975 * (rr.size() - 1))];
  rep.contains_one = rep.lo <= 1.0 && 1.0 <= rep.hi;
  return rep;
}

CLTReport clt_diagnostic(const std::vector<double>& values, double lambda) {
  if (values.size() < 400)
    throw config_error("clt_diagnostic: needs at least 400 replicates");
  double m = mean_of(values);
  double v = variance_of(values);
  if (!(v > 0.0)) throw data_error("clt_diagnostic: degenerate statistic");
  double sd = std::sqrt(v);
  std::vector<double> z(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - m) / sd;
  CLTReport rep;
  rep.lambda = lambda;
  rep.replicates = int(values.size());
  rep.ks_distance = ks_distance_normal(std::move(z));
  rep.pass_threshold = ks_critical_value(double(values.size()), 0.01);
  return rep;
}

IteratedReport iterated_prediction_test(
    const std::vector<ReplicateTable>& per_iter, double surface_factor,
    int d,
    int bootstrap, std::uint64_t seed) {
  if (per_iter.empty())
    throw std::invalid_argument("iterated_prediction_test: empty input");
  for (const auto& t : per_iter)
    if (t.lambdas.size() != 1)
      throw std::invalid_argument(
          "iterated_prediction_test: expects a single fixed lambda");
  IteratedReport rep;
  rep.surface_factor = surface_factor;
  const auto& base = per_iter[0].values[0];
  double base_mean = mean_of(base);
  Rng rng(seed);
  for (std::size_t ni = 0; ni < per_iter.size(); ++ni) {
    const auto& cur = per_iter[ni].values[0];
    rep.n.push_back(int(ni) + 1);
    rep.ratio.push_back(mean_of(cur) / base_mean);
    double pred = 0.0, pred_adj = 0.0;
    for (std::size_t k = 1; k <= ni + 1; ++k) {
      pred += std::pow(surface_factor, double(k - 1));
      pred_adj +=
          std::pow(double(k), -1.0 / double(d)) *
          std::pow(surface_factor, double(k - 1));
    }
    rep.predicted.push_back(pred);
    rep.predicted_adjusted.push_back(pred_adj);
    std::vector<double> boot;
    for (int b = 0; b < bootstrap; ++b) {
      double s1 = 0.0, sn = 0.0;
      for (std::size_t k = 0; k < base.size(); ++k)
        s1 += base[rng.below(base.size())];
      for (std::size_t k = 0; k < cur.size(); ++k)
        sn += cur[rng.below(cur.size())];
      boot.push_back((sn / double(cur.size())) / (s1 / double(base.size())));
    }
    std::sort(boot.begin(), boot.end());
    rep.lo.push_back(boot[std::size_t(0.025 * (boot.size() - 1))]);
    rep.hi.push_back(boot[std::size_t(0.975 * (boot.size() - 1))]);
  }
  return rep;
}

}  // namespace pvlab
