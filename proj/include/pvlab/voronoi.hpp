// SPDX-License-Identifier: Apache-2.0
//
// Voronoi tessellation clipped to the sampling domain, with the full
// face lattice. Cells are built by half-space intersection against the
// Delaunay neighbours of each generator (slab domains add lateral ghost
// copies), so the combinatorial structure comes from exact predicates
// while coordinates and measures are floating point. Faces are
// registered once, keyed by the sorted set of incident generators (plus
// lateral shift class and clip-wall tags), and every incident cell
// links back to the shared record.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pvlab/point_process.hpp"
#include "pvlab/vec.hpp"

namespace pvlab {

// Wall ids: 0,1 = x-/x+, 2,3 = y-/y+, 4,5 = z-/z+. Slabs in d=2 use
// ids 2,3 for the caps (the vertical coordinate is the second one).
// Sentinel ids >= 6 mark the artificial lateral box of slab builds;
// they must never survive into a finished diagram.
struct FaceKeyEntry {
  std::int32_t gen = 0;
  std::int8_t sx = 0, sy = 0;  // lateral period shifts relative to key frame
  bool operator==(const FaceKeyEntry&) const = default;
  bool operator<(const FaceKeyEntry& o) const {
    if (gen != o.gen) return gen < o.gen;
    if (sx != o.sx) return sx < o.sx;
    return sy < o.sy;
  }
};

struct Face {
  std::int8_t dim = 0;
  bool on_clip_boundary = false;
  double measure = 0.0;  // H^ell; counting measure (1) for vertices
  std::array<FaceKeyEntry, 4> gens{};
  std::int8_t n_gens = 0;
  std::array<std::int8_t, 3> walls{};
  std::int8_t n_walls = 0;
  std::vector<std::int32_t> cells;     // incident cell indices
  std::vector<std::int32_t> sub0;      // vertex face ids (dim >= 1)
  std::vector<std::int32_t> sub1;      // edge face ids (dim == 2)
  std::int32_t vertex_id = -1;         // coordinate index for dim == 0
};

struct VCell {
  std::int32_t generator = 0;
  double volume = 0.0;
  double max_vertex_dist = 0.0;
  double zmin = 0.0, zmax = 0.0;  // vertical extent (slab diagnostics)
  // registry ids of this cell's faces, by face dimension
  std::array<std::vector<std::int32_t>, 3> faces_by_dim;
  // facet-adjacent generators with the lateral shift of the neighbour
  std::vector<FaceKeyEntry> neighbors;
  bool touches_wall = false;  // any clip wall
  // cell geometry, for sampling and diagnostics
  std::vector<Vec3> verts;                       // z = 0 in d = 2
  std::vector<std::vector<std::int32_t>> loops;  // d = 3 face loops
};

class VoronoiDiagram {
 public:
  // builds the diagram; throws data_error on duplicate generators
  static VoronoiDiagram build(const PointSample& sample);

  int dim() const { return dim_; }
  const Domain& domain() const { return domain_; }
  std::size_t n_cells() const { return cells_.size(); }
  const VCell& cell(int i) const { return cells_[std::size_t(i)]; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::array<double, 3>& vertex(int id) const {
    return vert_coords_[std::size_t(id)];
  }
  const double* generator(int i) const { return &gen_[std::size_t(i) * dim_]; }
  double total_volume() const { return total_volume_; }

  // ids of all faces of dimension ell
  std::vector<std::int32_t> faces_of_dim(int ell) const;

  // nearest generator; ties broken toward the lower index
  int locate(const double* x) const;

  // diameter of the union of cell i and all facet-adjacent cells
  double neighborhood_diameter(int i) const;

  std::string debug_json() const;

 private:
  friend struct DiagramBuilder;

  Domain domain_;
  int dim_ = 2;
  std::vector<double> gen_;
  std::vector<VCell> cells_;
  std::vector<Face> faces_;
  std::vector<std::array<double, 3>> vert_coords_;
  double total_volume_ = 0.0;

  // locate grid
  int grid_n_ = 1;
  double grid_x0_ = 0.0, grid_y0_ = 0.0, grid_z0_ = 0.0, grid_w_ = 1.0;
  std::vector<std::vector<std::int32_t>> grid_;
  void build_grid();
  double min_image_dist2(const double* a, const double* b) const;
};

}  // namespace pvlab
