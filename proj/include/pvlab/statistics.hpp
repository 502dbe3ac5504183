// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <vector>

#include "pvlab/shapes.hpp"
#include "pvlab/voronoi.hpp"

namespace pvlab {

struct CellClassification {
  std::vector<char> inside;                      // generator in the shape
  std::vector<std::int32_t> boundary_facets;     // separating (d-1)-faces
  std::array<std::vector<char>, 3> boundary_face_flag;  // per dim, by face id
  bool boundary_touch = false;  // the cell union reaches a clip wall
};

struct StatisticVector {
  double volume = 0.0;
  double signed_volume_error = 0.0;
  double symdiff_volume = 0.0;
  double symdiff_se = 0.0;
  double surface = 0.0;
  std::array<double, 3> skel_weighted{};     // 1/(d-ell) weighted
  std::array<double, 3> skel_distinct{};  // each face once
  std::array<long long, 3> face_count{};
  double zone_complexity = -1.0;
  std::array<long long, 3> zone_faces{};
  long long zone_cells = -1;
  double zone_spacing = 0.0;
  long long maximal = -1;
  long long n_points = 0;
  bool boundary_touch = false;
  int iteration = 1;
};

struct SymdiffOptions {
  int budget_per_cell = 4096;  // stratified samples per boundary cell
  std::uint64_t seed = 1;
};

CellClassification classify(const VoronoiDiagram& dia, const Shape& shape);

// volume of the classified union, signed error and symmetric difference
// against `target` (usually the classification shape; the original set
// for iterated runs). Exact cell sums for the volume; cell-local
// stratified Monte Carlo for curved intersections, standard error
// recorded in out.symdiff_se.
void volume_statistics(const VoronoiDiagram& dia, const CellClassification& cls,
                       const Shape& target, const SymdiffOptions& opt,
                       StatisticVector& out);

double surface_statistic(const VoronoiDiagram& dia,
                         const CellClassification& cls);

// (1/(d-l)-weighted, distinct-sum, face count) for skeleton dimension ell
void skeleton_statistics(const VoronoiDiagram& dia,
                         const CellClassification& cls, int ell,
                         double& weighted_sum, double& distinct_sum,
                         long long& count);

// zone of a boundary patch: complexity (total distinct faces over all
// dimensions), per-dimension counts, and the confirmed zone cell set
struct ZoneResult {
  std::vector<std::int32_t> zone_cells;
  std::array<long long, 3> faces{};
  double complexity = 0.0;
};
ZoneResult zone_statistics(const VoronoiDiagram& dia, const BoundaryPatch& patch,
                           double spacing_factor = 0.1);

// full statistic vector for one diagram/shape pair
StatisticVector compute_statistics(const VoronoiDiagram& dia, const Shape& shape,
                                   const SymdiffOptions& opt,
                                   const BoundaryPatch* zone_patch = nullptr,
                                   double zone_spacing_factor = 0.1);

// iterated approximation: iteration k is built from a fresh sample of
// intensity k*lambda classified by the previous iterate; errors are
// always measured against the original shape
std::vector<StatisticVector> iterate_pv(const Shape& shape, double lambda,
                                        int n, const SeedPath& seed,
                                        const SymdiffOptions& opt);

// points not coordinatewise dominated by any other sample point
long long maximal_points(const PointSample& sample);

}  // namespace pvlab
