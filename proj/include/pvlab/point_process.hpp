// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pvlab/rng.hpp"

namespace pvlab {

// Sampling domain: the unit cube Q = [-1/2,1/2]^d, or a laterally
// periodic slab [0,L]^{d-1} x [-h,h]. Periodicity is a property declared
// here and honoured by the geometry layer via ghost copies.
struct Domain {
  enum class Kind { cube, slab };
  Kind kind = Kind::cube;
  int dim = 2;
  double L = 0.0;  // lateral extent (slab)
  double h = 0.0;  // half-height (slab)

  double volume() const;
  bool contains(const double* x) const;

  static Domain cube(int d) { return {Kind::cube, d, 0.0, 0.0}; }
  static Domain slab(int d, double L, double h) {
    return {Kind::slab, d, L, h};
  }
  bool operator==(const Domain&) const = default;
};

// Intensity density kappa on Q with a finite sup bound used for
// rejection thinning. scaling experiments require
// inf_bound > 0; the bound is recorded either way.
struct IntensityField {
  enum class Kind { constant, callable };
  Kind kind = Kind::constant;
  double sup_bound = 1.0;
  double inf_bound = 1.0;
  std::function<double(const double*)> evaluator;  // unused for constant
  std::string description = "constant 1";

  double eval(const double* x) const {
    return kind == Kind::constant ? sup_bound : evaluator(x);
  }

  static IntensityField constant(double v);
  // kappa(x) = 1 + a*x1 on Q
  static IntensityField linear_x1(double a);
  static IntensityField callable(std::function<double(const double*)> f,
                                 double sup, double inf, std::string desc);

  // rejects fields not bounded away from zero
  void require_positive_density() const;
};

struct PointSample {
  std::vector<double> coords;  // flat, dim-major per point
  int dim = 2;
  Domain domain;
  double lambda = 0.0;  // intensity multiplier (tau for slabs)
  std::string seed_path;
  std::string kappa_desc;

  std::size_t size() const { return coords.size() / std::size_t(dim); }
  const double* point(std::size_t i) const { return &coords[i * dim]; }
};

// Poisson sample on Q with density lambda*kappa, realized by thinning a
// homogeneous Poisson(lambda * sup_bound) candidate set.
PointSample sample_poisson_cube(double lambda, const IntensityField& kappa,
                                int d, const SeedPath& seed);

// Homogeneous Poisson sample of intensity tau on [0,L]^{d-1} x [-h,h].
PointSample sample_poisson_slab(double tau, double L, double h, int d,
                                const SeedPath& seed);

}  // namespace pvlab
