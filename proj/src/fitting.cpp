// SPDX-License-Identifier: Apache-2.0
#include "pvlab/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pvlab/errors.hpp"
#include "pvlab/rng.hpp"

namespace pvlab {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

namespace {

struct Line {
  double slope, intercept;
};

Line ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  return {(n * sxy - sx * sy) / denom, (sy * sxx - sx * sxy) / denom};
}

double aggregate(const std::vector<double>& v, Aggregate agg, double center) {
  return agg == Aggregate::mean ? mean_of(v) - center : variance_of(v);
}

}  // namespace

ScalingFit fit_scaling(const ReplicateTable& table, Aggregate agg,
                       double center, int bootstrap_resamples,
                       std::uint64_t seed) {
  const std::size_t m = table.lambdas.size();
  if (m < 4)
    throw config_error("fit_scaling: need at least 4 intensity values");
  if (table.values.size() != m)
    throw std::invalid_argument("fit_scaling: table shape mismatch");
  for (std::size_t i = 1; i < m; ++i)
    if (!(table.lambdas[i] > table.lambdas[i - 1]))
      throw config_error("fit_scaling: lambda grid must increase strictly");

  ScalingFit fit;
  fit.n_lambda = int(m);
  fit.centering = center != 0.0 ? "subtract-known-limit" : "none";
  fit.bootstrap_resamples = bootstrap_resamples;
  fit.replicates_min = int(table.values[0].size());

  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    fit.replicates_min =
        std::min(fit.replicates_min, int(table.values[i].size()));
    double v = aggregate(table.values[i], agg, center);
    if (!(v > 0.0))
      throw data_error(
          "fit_scaling: non-positive centered aggregate at lambda=" +
          std::to_string(table.lambdas[i]) + " (value " + std::to_string(v) +
          ")");
    lx[i] = std::log(table.lambdas[i]);
    ly[i] = std::log(v);
    fit.fit_lambdas.push_back(table.lambdas[i]);
    fit.fit_values.push_back(v);
  }
  Line line = ols(lx, ly);
  fit.slope = line.slope;
  fit.intercept = line.intercept;

  double ss_res = 0.0, ss_tot = 0.0, ym = mean_of(ly);
  for (std::size_t i = 0; i < m; ++i) {
    double r = ly[i] - (line.slope * lx[i] + line.intercept);
    fit.residuals.push_back(r);
    ss_res += r * r;
    ss_tot += (ly[i] - ym) * (ly[i] - ym);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;

  if (bootstrap_resamples > 0) {
    std::vector<double> slopes, intercepts;
    slopes.reserve(bootstrap_resamples);
    Rng rng(seed);
    std::vector<double> bly(m), buf;
    for (int b = 0; b < bootstrap_resamples; ++b) {
      bool ok = true;
      for (std::size_t i = 0; i < m && ok; ++i) {
        const auto& src = table.values[i];
        buf.resize(src.size());
        for (std::size_t k = 0; k < src.size(); ++k)
          buf[k] = src[rng.below(src.size())];
        double v = aggregate(buf, agg, center);
        if (!(v > 0.0))
          ok = false;
        else
          bly[i] = std::log(v);
      }
      if (!ok) continue;  // sign-flipped resample: skipped, CI from the rest
      Line bl = ols(lx, bly);
      slopes.push_back(bl.slope);
      intercepts.push_back(bl.intercept);
    }
    if (slopes.size() < std::size_t(bootstrap_resamples) / 2)
      throw data_error("fit_scaling: bootstrap unstable (sign flips)");
    auto pct = [](std::vector<double>& v, double q) {
      std::sort(v.begin(), v.end());
      double idx = q * (double(v.size()) - 1.0);
      std::size_t lo = std::size_t(idx);
      double frac = idx - double(lo);
      if (lo + 1 >= v.size()) return v.back();
      return v[lo] * (1 - frac) + v[lo + 1] * frac;
    };
    fit.slope_lo = pct(slopes, 0.025);
    fit.slope_hi = pct(slopes, 0.975);
    fit.intercept_lo = pct(intercepts, 0.025);
    fit.intercept_hi = pct(intercepts, 0.975);
  }
  return fit;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance_normal(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = normal_cdf(sample[i]);
    d = std::max(d, std::fabs((double(i) + 1.0) / n - f));
    d = std::max(d, std::fabs(f - double(i) / n));
  }
  return d;
}

double ks_critical_value(double n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0) / n);
}

double chi2_upper_quantile(double dof, double alpha) {
  // Wilson-Hilferty: X ~ dof (1 - 2/(9 dof) + z sqrt(2/(9 dof)))^3
  // inverse normal via Acklam-style rational approximation
  auto inv_norm = [](double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (p < plow) {
      q = std::sqrt(-2 * std::log(p));
      return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
              c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
      q = std::sqrt(-2 * std::log(1 - p));
      return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
               c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
            a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  };
  double z = inv_norm(1.0 - alpha);
  double t = 1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof));
  return dof * t * t * t;
}

}  // namespace pvlab
