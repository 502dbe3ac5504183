// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pvlab/fitting.hpp"
#include "pvlab/halfspace.hpp"
#include "pvlab/shapes.hpp"
#include "pvlab/statistics.hpp"

namespace pvlab {

struct ExperimentConfig {
  std::string name = "experiment";
  int d = 2;
  std::shared_ptr<Shape> shape;
  IntensityField kappa = IntensityField::constant(1.0);
  std::vector<double> lambda_grid;
  int replicates = 200;
  bool with_geometry = true;  // tessellation statistics
  bool with_symdiff = true;
  bool with_zone = false;
  bool with_maximal = false;
  bool require_positive_kappa = true;  // density bounded away from zero
  int symdiff_budget = 4096;
  double zone_spacing_factor = 0.1;
  int iterations = 0;  // > 0 selects the iterated pipeline
  double margin_multiple = 3.0;
  std::uint64_t seed_raw = 0xC0FFEE;  // as given in the config
  SeedPath seed_root = SeedPath::root(0xC0FFEE);
  int threads = 0;
};

struct ReplicateRow {
  double lambda = 0.0;
  int replicate = 0;
  std::string seed;
  StatisticVector stats;
};

struct ExperimentResult {
  int d = 2;
  std::vector<ReplicateRow> rows;  // ordered by (lambda, replicate, iter)
  double taint_fraction = 0.0;
  bool tainted = false;  // boundary contact in > 1% of replicates
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// named column of the statistic vector (matches the CSV schema)
double stat_field(const StatisticVector& s, const std::string& column, int d);

// group one column by lambda; iterated rows are filtered by iteration
ReplicateTable extract_table(const ExperimentResult& res,
                             const std::string& column, int iteration = 1);

// boundary patch with node spacing at most factor * (lambda kappa)^(-1/d)
BoundaryPatch zone_patch_for(const Shape& shape, double lambda,
                             double kappa_sup, double factor);

struct InvarianceReport {
  double prefactor_ratio = 0.0;  // exp(intercept_a - intercept_b)
  double content_ratio = 0.0;
  double ratio_of_ratios = 0.0;
  double lo = 0.0, hi = 0.0;  // bootstrap CI of the ratio of ratios
  bool contains_one = false;
};

InvarianceReport invariance_test(const ReplicateTable& ta, double content_a,
                                 const ReplicateTable& tb, double content_b,
                                 Aggregate agg = Aggregate::mean,
                                 int bootstrap = 1000,
                                 std::uint64_t seed = 77);

struct CLTReport {
  double lambda = 0.0;
  int replicates = 0;
  double ks_distance = 1.0;
  double pass_threshold = 0.0;  // 1% critical value for this n
};

CLTReport clt_diagnostic(const std::vector<double>& values, double lambda);

struct IteratedReport {
  double surface_factor = 0.0;  // slab surface constant for the prediction
  std::vector<int> n;
  std::vector<double> ratio, lo, hi;      // mean error ratios vs n = 1
  std::vector<double> predicted;          // geometric sums in the factor
  std::vector<double> predicted_adjusted; // with the k^{-1/d} intensity factor
};

IteratedReport iterated_prediction_test(
    const std::vector<ReplicateTable>& per_iteration_tables,
    double surface_factor, int d,
    int bootstrap = 1000, std::uint64_t seed = 99);

}  // namespace pvlab
