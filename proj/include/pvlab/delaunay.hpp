// SPDX-License-Identifier: Apache-2.0
//
// Incremental Delaunay triangulation (2D) and tetrahedralization (3D),
// Bowyer-Watson with a ghost vertex closing the hull. All orientation
// and emptiness decisions go through the perturbed exact predicates, so
// the output is the Delaunay complex of the symbolically perturbed
// point set: normal, unique, and valid for any distinct input points
// including fully collinear/coplanar configurations.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pvlab/vec.hpp"

namespace pvlab {

class Delaunay2 {
 public:
  static constexpr int kGhost = -1;

  struct Tri {
    std::array<int, 3> v;  // counterclockwise for finite triangles
    std::array<int, 3> n;  // n[k] across the edge opposite v[k]
    bool alive = false;
  };

  explicit Delaunay2(std::span<const Vec2> pts);

  const std::vector<Vec2>& points() const { return pts_; }
  std::size_t n_points() const { return pts_.size(); }

  // finite vertex adjacency, sorted and deduplicated
  const std::vector<std::vector<int>>& neighbors() const { return nbr_; }

  // finite triangles, each vertex triple sorted ascending
  std::vector<std::array<int, 3>> finite_triangles() const;

  void validate() const;  // structural + Delaunay checks, test use

 private:
  int locate_conflict(Vec2 p, int pi) const;
  bool conflicts(int t, Vec2 p, int pi) const;
  void insert(int pi);
  void build_neighbor_lists();

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<std::vector<int>> nbr_;
  int last_real_ = -1;
  mutable std::uint64_t walk_state_ = 0x9E3779B97F4A7C15ULL;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t epoch_ = 0;
};

class Delaunay3 {
 public:
  static constexpr int kGhost = -1;

  struct Tet {
    std::array<int, 4> v;  // positively oriented for finite tets
    std::array<int, 4> n;
    bool alive = false;
  };

  explicit Delaunay3(std::span<const Vec3> pts);

  const std::vector<Vec3>& points() const { return pts_; }
  std::size_t n_points() const { return pts_.size(); }
  const std::vector<std::vector<int>>& neighbors() const { return nbr_; }

  // finite tetrahedra, each vertex quadruple sorted ascending
  std::vector<std::array<int, 4>> finite_tets() const;
  // finite Delaunay triangles and edges (sorted tuples, deduplicated)
  std::vector<std::array<int, 3>> finite_triangles() const;

  void validate() const;

 private:
  int locate_conflict(Vec3 p, int pi) const;
  bool conflicts(int t, Vec3 p, int pi) const;
  void insert(int pi);
  void build_neighbor_lists();

  std::vector<Vec3> pts_;
  std::vector<Tet> tets_;
  std::vector<std::vector<int>> nbr_;
  int last_real_ = -1;
  mutable std::uint64_t walk_state_ = 0x9E3779B97F4A7C15ULL;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t epoch_ = 0;
};

}  // namespace pvlab
