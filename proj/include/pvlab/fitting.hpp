// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pvlab {

// replicate values of one statistic, grouped by intensity
struct ReplicateTable {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> values;  // values[i] ~ lambdas[i]
};

enum class Aggregate { mean, variance };

struct ScalingFit {
  std::string statistic;
  std::string centering = "none";
  double slope = 0.0;
  double intercept = 0.0;  // log prefactor
  double r_squared = 0.0;
  double slope_lo = 0.0, slope_hi = 0.0;
  double intercept_lo = 0.0, intercept_hi = 0.0;
  int n_lambda = 0;
  int replicates_min = 0;
  int bootstrap_resamples = 0;
  std::vector<double> fit_lambdas;
  std::vector<double> fit_values;  // aggregated (centered) per lambda
  std::vector<double> residuals;   // log-space residuals
};

// OLS of log(aggregate - center) against log(lambda), replicate-level
// bootstrap percentile intervals. Throws data_error when a centered
// aggregate is not positive.
ScalingFit fit_scaling(const ReplicateTable& table, Aggregate agg,
                       double center = 0.0, int bootstrap_resamples = 1000,
                       std::uint64_t seed = 2024);

double normal_cdf(double x);

// sup distance between the empirical cdf of the (already standardized)
// sample and the standard normal cdf
double ks_distance_normal(std::vector<double> sample);

// asymptotic one-sample Kolmogorov-Smirnov critical value
double ks_critical_value(double n, double alpha);

// two-sided chi-square upper quantile via Wilson-Hilferty
double chi2_upper_quantile(double dof, double alpha);

double mean_of(const std::vector<double>& v);
double variance_of(const std::vector<double>& v);

}  // namespace pvlab
