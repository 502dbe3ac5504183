// SPDX-License-Identifier: Apache-2.0
#include "pvlab/point_process.hpp"

#include <cmath>
#include <sstream>

#include "pvlab/errors.hpp"

namespace pvlab {

double Domain::volume() const {
  if (kind == Kind::cube) return 1.0;
  double v = 2.0 * h;
  for (int k = 0; k < dim - 1; ++k) v *= L;
  return v;
}

bool Domain::contains(const double* x) const {
  if (kind == Kind::cube) {
    for (int k = 0; k < dim; ++k)
      if (x[k] < -0.5 || x[k] > 0.5) return false;
    return true;
  }
  for (int k = 0; k < dim - 1; ++k)
    if (x[k] < 0.0 || x[k] > L) return false;
  return x[dim - 1] >= -h && x[dim - 1] <= h;
}

IntensityField IntensityField::constant(double v) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw config_error("intensity: constant value must be finite and >= 0");
  IntensityField f;
  f.kind = Kind::constant;
  f.sup_bound = v;
  f.inf_bound = v;
  std::ostringstream os;
  os << "constant " << v;
  f.description = os.str();
  return f;
}

IntensityField IntensityField::linear_x1(double a) {
  if (!std::isfinite(a) || std::fabs(a) > 2.0)
    throw config_error("intensity: |a| must be <= 2 so 1+a*x1 stays >= 0 on Q");
  IntensityField f;
  f.kind = Kind::callable;
  f.sup_bound = 1.0 + std::fabs(a) * 0.5;
  f.inf_bound = 1.0 - std::fabs(a) * 0.5;
  f.evaluator = [a](const double* x) { return 1.0 + a * x[0]; };
  std::ostringstream os;
  os << "linear-x1 " << a;
  f.description = os.str();
  return f;
}

IntensityField IntensityField::callable(
    std::function<double(const double*)> fn, double sup, double inf,
    std::string desc) {
  if (!std::isfinite(sup) || sup <= 0.0)
    throw config_error("intensity: sup_bound must be finite and positive");
  IntensityField f;
  f.kind = Kind::callable;
  f.sup_bound = sup;
  f.inf_bound = inf;
  f.evaluator = std::move(fn);
  f.description = std::move(desc);
  return f;
}

void IntensityField::require_positive_density() const {
  if (!(inf_bound > 0.0))
    throw config_error(
        "intensity: field must be bounded away from zero for this experiment");
}

PointSample sample_poisson_cube(double lambda, const IntensityField& kappa,
                                int d, const SeedPath& seed) {
  if (!(lambda > 0.0)) throw config_error("sample_poisson_cube: lambda <= 0");
  if (d != 2 && d != 3) throw config_error("sample_poisson_cube: d must be 2 or 3");
  if (!std::isfinite(kappa.sup_bound))
    throw config_error("sample_poisson_cube: sup_bound not finite");

  PointSample s;
  s.dim = d;
  s.domain = Domain::cube(d);
  s.lambda = lambda;
  s.seed_path = seed.path;
  s.kappa_desc = kappa.description;

  Rng rng(seed);
  const long long n = rng.poisson(lambda * kappa.sup_bound);
  s.coords.reserve(std::size_t(n) * d);
  double x[3];
  for (long long i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) x[k] = rng.next_double() - 0.5;
    double u = rng.next_double();
    if (kappa.kind == IntensityField::Kind::constant) {
      // thinning probability is 1
    } else {
      double v = kappa.eval(x);
      if (v < 0.0 || v > kappa.sup_bound * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "sample_poisson_cube: intensity "
           << (v < 0.0 ? "negative" : "exceeds sup_bound") << " at (";
        for (int k = 0; k < d; ++k) os << (k ? ", " : "") << x[k];
        os << ")";
        throw data_error(os.str());
      }
      if (u * kappa.sup_bound >= v) continue;
    }
    for (int k = 0; k < d; ++k) s.coords.push_back(x[k]);
  }
  return s;
}

PointSample sample_poisson_slab(double tau, double L, double h, int d,
                                const SeedPath& seed) {
  if (!(tau > 0.0)) throw config_error("sample_poisson_slab: tau <= 0");
  if (!(L > 0.0)) throw config_error("sample_poisson_slab: L <= 0");
  if (!(h > 0.0)) throw config_error("sample_poisson_slab: h <= 0");
  if (d != 2 && d != 3) throw config_error("sample_poisson_slab: d must be 2 or 3");

  PointSample s;
  s.dim = d;
  s.domain = Domain::slab(d, L, h);
  s.lambda = tau;
  s.seed_path = seed.path;
  s.kappa_desc = "constant 1";

  Rng rng(seed);
  const long long n = rng.poisson(tau * s.domain.volume());
  s.coords.reserve(std::size_t(n) * d);
  for (long long i = 0; i < n; ++i) {
    for (int k = 0; k < d - 1; ++k) s.coords.push_back(rng.next_double() * L);
    s.coords.push_back((2.0 * rng.next_double() - 1.0) * h);
  }
  return s;
}

}  // namespace pvlab
