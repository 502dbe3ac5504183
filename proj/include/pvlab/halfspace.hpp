// SPDX-License-Identifier: Apache-2.0
//
// Universal constants of the first-order limits, estimated directly on
// the half-space reference model: a unit-intensity process on a
// laterally periodic slab, the lower half classified as the target.
// The per-unit-lateral-area expectation of each score is the constant
// that multiplies the kappa-weighted surface content at finite
// intensity.
#pragma once

#include <string>

#include "pvlab/point_process.hpp"
#include "pvlab/shapes.hpp"

namespace pvlab {

struct ScoreKind {
  enum class Base {
    signed_volume,
    symdiff_volume,
    surface,
    skeleton,
    face_count,
    zone_complexity
  };
  Base base = Base::surface;
  int ell = 0;  // skeleton / face_count dimension

  // homogeneity order of the score
  double gamma(int d) const {
    switch (base) {
      case Base::signed_volume:
      case Base::symdiff_volume:
        return double(d);
      case Base::surface:
        return double(d - 1);
      case Base::skeleton:
        return double(ell);
      default:
        return 0.0;
    }
  }
  std::string name() const;
  static ScoreKind parse(const std::string& s);
};

struct HalfSpaceEstimate {
  ScoreKind kind;
  int d = 2;
  double value = 0.0;
  double std_error = 0.0;
  double value_2h = 0.0;
  double std_error_2h = 0.0;
  bool convergence_flag = false;
  double L = 0.0, h = 0.0;
  int replicates = 0;
  int discarded = 0;
  int discarded_2h = 0;
  std::string seed_path;
};

// Monte Carlo estimate of the per-area constant, with an h-doubling
// stability run. Replicates whose contributing cells touch a slab cap
// are discarded and counted.
HalfSpaceEstimate estimate_constant(ScoreKind kind, int d, double L, double h,
                                    int replicates, const SeedPath& seed,
                                    int threads = 0);

// first-order prediction: value * H_{kappa,gamma}(boundary) * lambda^{(d-1-gamma)/d}
double predict_mean(const HalfSpaceEstimate& est, const Shape& shape,
                    const IntensityField& kappa, double gamma, double lambda);

// per-replicate slab total for one score, per unit lateral area; used
// by the estimator and exposed for tests
double slab_score_once(ScoreKind kind, int d, double L, double h,
                       const SeedPath& seed, bool& contaminated);

}  // namespace pvlab
