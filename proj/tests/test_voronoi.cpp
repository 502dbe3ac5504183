// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "pvlab/delaunay.hpp"
#include "pvlab/oracles.hpp"
#include "pvlab/point_process.hpp"
#include "pvlab/voronoi.hpp"

using namespace pvlab;

namespace {

PointSample fixed_sample2(std::vector<Vec2> pts) {
  PointSample s;
  s.dim = 2;
  s.domain = Domain::cube(2);
  s.lambda = double(pts.size());
  for (Vec2 p : pts) {
    s.coords.push_back(p.x);
    s.coords.push_back(p.y);
  }
  return s;
}

PointSample random_sample2(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i)
    pts.push_back({rng.next_double() - 0.5, rng.next_double() - 0.5});
  return fixed_sample2(pts);
}

}  // namespace

TEST_CASE("single point: cell is the whole cube") {
  auto dia = VoronoiDiagram::build(fixed_sample2({{0.1, -0.2}}));
  CHECK(dia.n_cells() == 1);
  CHECK(dia.cell(0).volume == doctest::Approx(1.0).epsilon(1e-12));
  int clip_edges = 0, verts = 0;
  for (const Face& f : dia.faces()) {
    if (f.dim == 1) {
      CHECK(f.on_clip_boundary);
      ++clip_edges;
    }
    if (f.dim == 0) ++verts;
  }
  CHECK(clip_edges == 4);
  CHECK(verts == 4);
  CHECK(dia.neighborhood_diameter(0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("two points split by the bisector") {
  auto dia = VoronoiDiagram::build(fixed_sample2({{-0.25, 0.0}, {0.25, 0.0}}));
  CHECK(dia.cell(0).volume == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dia.cell(1).volume == doctest::Approx(0.5).epsilon(1e-12));
  int interior_edges = 0, clip_edges = 0, verts = 0;
  for (const Face& f : dia.faces()) {
    if (f.dim == 1 && !f.on_clip_boundary) {
      ++interior_edges;
      CHECK(f.measure == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(f.n_gens == 2);
      CHECK(f.cells.size() == 2);
    }
    if (f.dim == 1 && f.on_clip_boundary) ++clip_edges;
    if (f.dim == 0) ++verts;
  }
  CHECK(interior_edges == 1);
  CHECK(clip_edges == 6);
  CHECK(verts == 6);  // 4 corners + 2 bisector crossings
  CHECK(dia.neighborhood_diameter(0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(dia.neighborhood_diameter(1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("random diagrams tile the cube and match the brute oracle") {
  for (auto [n, seed] : std::vector<std::pair<int, std::uint64_t>>{
           {5, 1}, {50, 2}, {200, 3}}) {
    PointSample s = random_sample2(n, seed);
    auto dia = VoronoiDiagram::build(s);
    CHECK(dia.total_volume() == doctest::Approx(1.0).epsilon(1e-9));

    auto brute = oracle::brute_cells2(s);
    double interior_len_fast = 0.0;
    std::set<std::pair<int, int>> fast_facets;
    for (const Face& f : dia.faces())
      if (f.dim == 1 && !f.on_clip_boundary) {
        interior_len_fast += f.measure;
        fast_facets.insert({f.gens[0].gen, f.gens[1].gen});
      }
    double interior_len_brute = 0.0;
    std::set<std::pair<int, int>> brute_facets;
    for (int i = 0; i < n; ++i) {
      CHECK(dia.cell(i).volume ==
            doctest::Approx(brute[i].area).epsilon(1e-9));
      for (auto [j, len] : brute[i].facets) {
        if (j > i) {
          interior_len_brute += len;
          brute_facets.insert({i, j});
        }
      }
    }
    CHECK(fast_facets == brute_facets);
    CHECK(interior_len_fast ==
          doctest::Approx(interior_len_brute).epsilon(1e-6));

    // rasterization oracle: per-cell areas within 2e-3 at 2048^2
    if (n == 50) {
      auto areas = oracle::raster_cell_areas(s, 2048);
      for (int i = 0; i < n; ++i)
        CHECK(std::fabs(areas[i] - dia.cell(i).volume) < 2e-3);
    }

    // interior vertices match the empty-circumcircle enumeration
    if (n <= 50) {
      int oracle_verts = oracle::circumcenter_vertex_count2(s);
      int fast_verts = 0;
      for (const Face& f : dia.faces())
        if (f.dim == 0 && !f.on_clip_boundary) ++fast_verts;
      CHECK(fast_verts == oracle_verts);
    }
  }
}

TEST_CASE("normality and face registry invariants") {
  PointSample s = random_sample2(120, 9);
  auto dia = VoronoiDiagram::build(s);
  for (const Face& f : dia.faces()) {
    if (!f.on_clip_boundary) {
      // interior ell-face has exactly d - ell + 1 generators
      CHECK(int(f.n_gens) == 2 - int(f.dim) + 1);
      if (f.dim == 1) CHECK(f.cells.size() == 2);
      if (f.dim == 0) CHECK(f.cells.size() == 3);
    }
    CHECK(f.measure >= 0.0);
  }
  // per-cell perimeter equals the sum of its edge measures
  for (std::size_t i = 0; i < dia.n_cells(); ++i) {
    const VCell& c = dia.cell(int(i));
    double per = 0.0;
    for (std::size_t k = 0; k < c.verts.size(); ++k)
      per += std::sqrt(
          dist2(c.verts[k], c.verts[(k + 1) % c.verts.size()]));
    double edge_sum = 0.0;
    for (auto id : c.faces_by_dim[1]) edge_sum += dia.faces()[id].measure;
    CHECK(per == doctest::Approx(edge_sum).epsilon(1e-9));
  }
  // Euler relation for the induced planar subdivision of Q
  std::size_t V = 0, E = 0;
  for (const Face& f : dia.faces()) {
    if (f.dim == 0) ++V;
    if (f.dim == 1) ++E;
  }
  std::size_t F = dia.n_cells() + 1;  // cells plus the outer face
  CHECK(V - E + F == 2);
}

TEST_CASE("locate agrees with linear scan and breaks ties low") {
  PointSample s = random_sample2(300, 17);
  auto dia = VoronoiDiagram::build(s);
  Rng rng(99);
  for (int t = 0; t < 10000; ++t) {
    double q[2] = {rng.next_double() - 0.5, rng.next_double() - 0.5};
    CHECK(dia.locate(q) == oracle::nearest_linear(s, q));
  }
  auto two = VoronoiDiagram::build(fixed_sample2({{-0.25, 0.0}, {0.25, 0.0}}));
  double onbis[2] = {0.0, 0.1};
  CHECK(two.locate(onbis) == 0);
  double left[2] = {-0.3, 0.1};
  CHECK(two.locate(left) == 0);
}

TEST_CASE("neighborhood diameter matches explicit union scan") {
  PointSample s = random_sample2(200, 23);
  auto dia = VoronoiDiagram::build(s);
  for (int i = 0; i < 20; ++i) {
    const VCell& c = dia.cell(i);
    std::vector<Vec3> pts = c.verts;
    std::set<int> nbrs;
    for (const Face& f : dia.faces())
      if (f.dim == 1 && !f.on_clip_boundary && f.n_gens == 2) {
        if (f.gens[0].gen == i) nbrs.insert(f.gens[1].gen);
        if (f.gens[1].gen == i) nbrs.insert(f.gens[0].gen);
      }
    for (int j : nbrs)
      for (const Vec3& v : dia.cell(j).verts) pts.push_back(v);
    double best = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b)
        best = std::max(best, dist2(pts[a], pts[b]));
    CHECK(dia.neighborhood_diameter(i) ==
          doctest::Approx(std::sqrt(best)).epsilon(1e-9));
  }
}

TEST_CASE("slab diagram tiles and respects periodicity") {
  SeedPath seed = SeedPath::root(5).child("slabtest");
  PointSample s = sample_poisson_slab(1.0, 12.0, 5.0, 2, seed);
  auto dia = VoronoiDiagram::build(s);
  CHECK(dia.total_volume() ==
        doctest::Approx(s.domain.volume()).epsilon(1e-9));
  // locate wraps laterally
  double q1[2] = {0.05, 1.0};
  double q2[2] = {0.05 + 12.0, 1.0};
  CHECK(dia.locate(q1) == dia.locate(q2));
}

TEST_CASE("3d diagrams tile the cube") {
  Rng rng(31);
  PointSample s;
  s.dim = 3;
  s.domain = Domain::cube(3);
  int n = 150;
  s.lambda = n;
  for (int i = 0; i < 3 * n; ++i) s.coords.push_back(rng.next_double() - 0.5);
  auto dia = VoronoiDiagram::build(s);
  CHECK(dia.total_volume() == doctest::Approx(1.0).epsilon(1e-9));
  for (const Face& f : dia.faces()) {
    if (f.on_clip_boundary) continue;
    CHECK(int(f.n_gens) == 3 - int(f.dim) + 1);
  }
  // locate sanity
  Rng rq(77);
  for (int t = 0; t < 2000; ++t) {
    double q[3] = {rq.next_double() - 0.5, rq.next_double() - 0.5,
                   rq.next_double() - 0.5};
    CHECK(dia.locate(q) == oracle::nearest_linear(s, q));
  }
}

TEST_CASE("3d slab tiles") {
  SeedPath seed = SeedPath::root(5).child("slab3");
  PointSample s = sample_poisson_slab(1.0, 6.0, 3.0, 3, seed);
  auto dia = VoronoiDiagram::build(s);
  CHECK(dia.total_volume() ==
        doctest::Approx(s.domain.volume()).epsilon(1e-9));
}

TEST_CASE("duplicate generators are rejected") {
  CHECK_THROWS_AS(
      VoronoiDiagram::build(fixed_sample2({{0.1, 0.1}, {0.1, 0.1}, {0, 0}})),
      std::invalid_argument);
}

TEST_CASE("duality: interior circumcenters appear as vertices keyed by the triple") {
  PointSample s = random_sample2(80, 41);
  auto dia = VoronoiDiagram::build(s);
  Delaunay2 del(std::vector<Vec2>{[&] {
    std::vector<Vec2> v;
    for (std::size_t i = 0; i < s.size(); ++i)
      v.push_back({s.point(i)[0], s.point(i)[1]});
    return v;
  }()});
  std::set<std::array<int, 3>> vertex_keys;
  for (const Face& f : dia.faces())
    if (f.dim == 0 && !f.on_clip_boundary)
      vertex_keys.insert({f.gens[0].gen, f.gens[1].gen, f.gens[2].gen});
  int inside_q = 0;
  for (auto tri : del.finite_triangles()) {
    Vec2 a{s.point(tri[0])[0], s.point(tri[0])[1]};
    Vec2 b{s.point(tri[1])[0], s.point(tri[1])[1]};
    Vec2 c{s.point(tri[2])[0], s.point(tri[2])[1]};
    double den =
        2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if (den == 0.0) continue;
    double ux = (a.norm2() * (b.y - c.y) + b.norm2() * (c.y - a.y) +
                 c.norm2() * (a.y - b.y)) /
                den;
    double uy = (a.norm2() * (c.x - b.x) + b.norm2() * (a.x - c.x) +
                 c.norm2() * (b.x - a.x)) /
                den;
    if (ux <= -0.5 || ux >= 0.5 || uy <= -0.5 || uy >= 0.5) continue;
    ++inside_q;
    CHECK(vertex_keys.count(tri) == 1);
  }
  CHECK(inside_q == int(vertex_keys.size()));
}

TEST_CASE("faces_of_dim filters and rejects bad input") {
  auto dia = VoronoiDiagram::build(random_sample2(40, 43));
  auto verts = dia.faces_of_dim(0);
  auto edges = dia.faces_of_dim(1);
  for (auto id : verts) CHECK(dia.faces()[id].dim == 0);
  for (auto id : edges) CHECK(dia.faces()[id].dim == 1);
  CHECK(verts.size() + edges.size() == dia.faces().size());
  CHECK_THROWS_AS(dia.faces_of_dim(2), std::invalid_argument);
}

TEST_CASE("cells contain their generators") {
  auto dia = VoronoiDiagram::build(random_sample2(150, 47));
  for (std::size_t i = 0; i < dia.n_cells(); ++i) {
    const VCell& c = dia.cell(int(i));
    Vec2 g{dia.generator(int(i))[0], dia.generator(int(i))[1]};
    const std::size_t m = c.verts.size();
    for (std::size_t k = 0; k < m; ++k) {
      Vec2 a{c.verts[k].x, c.verts[k].y};
      Vec2 b{c.verts[(k + 1) % m].x, c.verts[(k + 1) % m].y};
      double cr = (b.x - a.x) * (g.y - a.y) - (b.y - a.y) * (g.x - a.x);
      CHECK(cr >= -1e-12);
    }
  }
}

TEST_CASE("debug dump carries the face registry") {
  auto dia = VoronoiDiagram::build(fixed_sample2({{-0.25, 0.0}, {0.25, 0.0}}));
  std::string j = dia.debug_json();
  CHECK(j.find("\"dim\": 2") != std::string::npos);
  std::size_t verts = 0, edges = 0, pos = 0;
  while ((pos = j.find("\"dim\": 0", pos)) != std::string::npos) {
    ++verts;
    pos += 8;
  }
  pos = 0;
  while ((pos = j.find("\"dim\": 1", pos)) != std::string::npos) {
    ++edges;
    pos += 8;
  }
  CHECK(verts == 6);
  CHECK(edges == 7);
}
