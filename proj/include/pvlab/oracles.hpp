// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used to cross-check the fast
// pipeline: linear-scan nearest neighbour, full O(n) half-plane
// clipping per cell, pixel rasterization, empty-circumcircle vertex
// enumeration, pairwise maximal-point domination, and exact
// disk/polygon intersection area. Deliberately simple and kept apart
// from the production code paths.
#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "pvlab/point_process.hpp"
#include "pvlab/vec.hpp"

namespace pvlab::oracle {

// nearest generator by linear scan; ties toward the lower index
int nearest_linear(const PointSample& s, const double* q);

struct BruteCell2 {
  std::vector<Vec2> poly;
  double area = 0.0;
  std::vector<std::pair<int, double>> facets;  // neighbour gen, edge length
};

// cube domain only: every cell clipped against every other generator
std::vector<BruteCell2> brute_cells2(const PointSample& s);

// pixel-count cell areas on a grid x grid rasterization of Q (d = 2)
std::vector<double> raster_cell_areas(const PointSample& s, int grid);

// pixel-center membership on a grid x grid rasterization of Q (d = 2)
std::vector<char> raster_membership(
    const std::function<bool(const double*)>& contains, int grid);

// pixel-center membership of the cell union {x : nearest generator is
// flagged inside}, by linear scan
std::vector<char> raster_pv_membership(const PointSample& s,
                                       const std::vector<char>& inside_cells,
                                       int grid);

// number of interior Voronoi vertices: empty-circumcircle triples whose
// circumcenter lies strictly inside Q
int circumcenter_vertex_count2(const PointSample& s);

// O(n^2) pairwise-domination maximal point count
int maximal_points_brute(const PointSample& s);

// exact area of convex polygon (ccw) intersected with the disk (c, r)
double disk_poly_area(Vec2 c, double r, const std::vector<Vec2>& poly);

}  // namespace pvlab::oracle
