// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "pvlab/errors.hpp"
#include "pvlab/fitting.hpp"
#include "pvlab/point_process.hpp"
#include "pvlab/rng.hpp"

using namespace pvlab;

TEST_CASE("seed derivation is deterministic and label-injective") {
  SeedPath root = SeedPath::root(42);
  CHECK(root.child("rep/0").state == root.child("rep/0").state);
  CHECK(root.child("rep/0").path == "root/rep/0");
  CHECK(root.child("rep/0").state != root.child("rep/1").state);
  CHECK(root.child("a").child("b").state != root.child("b").child("a").state);
  std::set<std::uint64_t> states;
  for (int i = 0; i < 10000; ++i)
    states.insert(root.child("rep/" + std::to_string(i)).state);
  CHECK(states.size() == 10000);
}

TEST_CASE("derived streams pass a pairwise correlation screen") {
  // 100 uniforms from each of 64 streams; |r| < 0.1 for all pairs
  SeedPath root = SeedPath::root(7);
  const int S = 64, N = 100;
  std::vector<std::vector<double>> u(S, std::vector<double>(N));
  for (int s = 0; s < S; ++s) {
    Rng rng(root.child("stream/" + std::to_string(s)));
    for (int i = 0; i < N; ++i) u[s][i] = rng.next_double();
  }
  double maxr = 0.0, sumr = 0.0;
  int pairs = 0;
  for (int a = 0; a < S; ++a)
    for (int b = a + 1; b < S; ++b) {
      double ma = mean_of(u[a]), mb = mean_of(u[b]);
      double num = 0, va = 0, vb = 0;
      for (int i = 0; i < N; ++i) {
        num += (u[a][i] - ma) * (u[b][i] - mb);
        va += (u[a][i] - ma) * (u[a][i] - ma);
        vb += (u[b][i] - mb) * (u[b][i] - mb);
      }
      double r = num / std::sqrt(va * vb);
      maxr = std::max(maxr, std::fabs(r));
      sumr += std::fabs(r);
      ++pairs;
    }
  // mean |r| for independent streams is about 0.08 at N=100; the max
  // over ~2000 pairs sits near 4 sigma
  CHECK(sumr / pairs < 0.1);
  CHECK(maxr < 0.5);
}

TEST_CASE("poisson sampler matches mean and variance") {
  Rng rng(5);
  for (double mean : {0.5, 7.0, 40.0, 900.0}) {
    const int n = 4000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      double v = double(rng.poisson(mean));
      s += v;
      s2 += v * v;
    }
    double m = s / n;
    double var = s2 / n - m * m;
    CHECK(std::fabs(m - mean) < 5.0 * std::sqrt(mean / n));
    CHECK(std::fabs(var - mean) < 0.15 * mean + 0.5);
  }
}

TEST_CASE("cube sampler: Poisson count and reproducibility") {
  IntensityField unit = IntensityField::constant(1.0);
  SeedPath root = SeedPath::root(11);
  // mean over 400 seeds within 4 standard errors of 1000
  const int reps = 400;
  double sum = 0;
  for (int r = 0; r < reps; ++r)
    sum += double(
        sample_poisson_cube(1000, unit, 2, root.child("r" + std::to_string(r)))
            .size());
  double mean = sum / reps;
  CHECK(std::fabs(mean - 1000.0) < 4.0 * std::sqrt(1000.0 / reps));

  PointSample a = sample_poisson_cube(500, unit, 2, root.child("fixed"));
  PointSample b = sample_poisson_cube(500, unit, 2, root.child("fixed"));
  CHECK(a.coords == b.coords);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a.domain.contains(a.point(i)));
}

TEST_CASE("zero intensity gives an empty sample") {
  IntensityField zero = IntensityField::callable(
      [](const double*) { return 0.0; }, 1.0, 0.0, "zero");
  PointSample s = sample_poisson_cube(1000, zero, 2, SeedPath::root(3));
  CHECK(s.size() == 0);
}

TEST_CASE("thinning matches region masses (chi-square at 0.01)") {
  // kappa = 1 + x1 on Q, lambda = 2000: quadrant masses from the
  // closed-form integral of (1 + x1) over each quadrant
  IntensityField kap = IntensityField::linear_x1(1.0);
  SeedPath root = SeedPath::root(17);
  double counts[4] = {0, 0, 0, 0};
  double expect_frac[4];
  // left quadrants: integral of (1+x) over x in [-1/2,0] is 3/8 each total,
  // split evenly between the two y-halves
  expect_frac[0] = expect_frac[1] = (3.0 / 8.0) / 2.0;
  expect_frac[2] = expect_frac[3] = (5.0 / 8.0) / 2.0;
  const int reps = 200;
  double total = 0;
  for (int r = 0; r < reps; ++r) {
    PointSample s =
        sample_poisson_cube(2000, kap, 2, root.child("r" + std::to_string(r)));
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double* p = s.point(i);
      int q = (p[0] >= 0 ? 2 : 0) + (p[1] >= 0 ? 1 : 0);
      counts[q] += 1;
      total += 1;
    }
  }
  double chi2 = 0;
  for (int q = 0; q < 4; ++q) {
    double e = expect_frac[q] * total;
    chi2 += (counts[q] - e) * (counts[q] - e) / e;
  }
  CHECK(chi2 < chi2_upper_quantile(3.0, 0.01));
}

TEST_CASE("slab sampler counts and validation errors") {
  SeedPath root = SeedPath::root(23);
  double sum = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r)
    sum += double(
        sample_poisson_slab(1.0, 10, 5, 2, root.child("s" + std::to_string(r)))
            .size());
  CHECK(std::fabs(sum / reps - 100.0) < 4.0 * std::sqrt(100.0 / reps));

  double sum3 = 0;
  for (int r = 0; r < reps; ++r)
    sum3 += double(
        sample_poisson_slab(2.0, 5, 2, 3, root.child("t" + std::to_string(r)))
            .size());
  CHECK(std::fabs(sum3 / reps - 200.0) < 4.0 * std::sqrt(200.0 / reps));

  CHECK_THROWS_AS(sample_poisson_slab(1.0, 0.0, 5, 2, root), config_error);
  CHECK_THROWS_AS(sample_poisson_cube(-1, IntensityField::constant(1), 2, root),
                  config_error);
}

TEST_CASE("positive-density requirement rejects vanishing fields") {
  IntensityField zero = IntensityField::callable(
      [](const double*) { return 0.0; }, 1.0, 0.0, "zero");
  CHECK_THROWS_AS(zero.require_positive_density(), config_error);
  CHECK_NOTHROW(IntensityField::linear_x1(1.0).require_positive_density());
}
