// SPDX-License-Identifier: Apache-2.0
#include "pvlab/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "pvlab/delaunay.hpp"
#include "pvlab/errors.hpp"

namespace pvlab {

namespace {

// edge/face provenance tag: >= 0 is a point id in the (extended) point
// set, negative encodes a wall: tag = -1 - wall_id
constexpr std::int64_t wall_tag(int wall) { return -1 - std::int64_t(wall); }
constexpr bool is_wall(std::int64_t t) { return t < 0; }
constexpr int wall_of(std::int64_t t) { return int(-1 - t); }

struct TaggedPoly2 {
  std::vector<Vec2> v;
  std::vector<std::int64_t> tag;  // tag[k]: edge v[k] -> v[k+1]
};

// clip to the closed half-plane f(z) <= 0 where f(z) = 2 z.(b-a) - (|b|^2-|a|^2)
void clip_poly2(TaggedPoly2& poly, Vec2 a, Vec2 b, std::int64_t cut_tag,
                std::vector<double>& fbuf) {
  const double nx = 2.0 * (b.x - a.x), ny = 2.0 * (b.y - a.y);
  const double c = (b.x * b.x + b.y * b.y) - (a.x * a.x + a.y * a.y);
  const std::size_t m = poly.v.size();
  fbuf.resize(m);
  bool any_out = false, any_in = false;
  for (std::size_t k = 0; k < m; ++k) {
    fbuf[k] = nx * poly.v[k].x + ny * poly.v[k].y - c;
    (fbuf[k] <= 0.0 ? any_in : any_out) = true;
  }
  if (!any_out) return;
  TaggedPoly2 out;
  out.v.reserve(m + 2);
  out.tag.reserve(m + 2);
  if (!any_in) {
    poly = std::move(out);
    return;
  }
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t k2 = (k + 1) % m;
    double fp = fbuf[k], fq = fbuf[k2];
    Vec2 p = poly.v[k], q = poly.v[k2];
    if (fp <= 0.0) {
      if (fq <= 0.0) {
        out.v.push_back(p);
        out.tag.push_back(poly.tag[k]);
      } else {
        double t = fp / (fp - fq);
        out.v.push_back(p);
        out.tag.push_back(poly.tag[k]);
        out.v.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        out.tag.push_back(cut_tag);
      }
    } else if (fq <= 0.0) {
      double t = fp / (fp - fq);
      out.v.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      out.tag.push_back(poly.tag[k]);
    }
  }
  // drop exact zero-length edges produced by on-line vertices; the
  // surviving vertex keeps the later outgoing tag
  TaggedPoly2 dedup;
  for (std::size_t k = 0; k < out.v.size(); ++k) {
    std::size_t k2 = (k + 1) % out.v.size();
    if (out.v[k] == out.v[k2]) continue;
    dedup.v.push_back(out.v[k]);
    dedup.tag.push_back(out.tag[k]);
  }
  poly = dedup.v.size() >= 3 ? std::move(dedup) : TaggedPoly2{};
}

struct TaggedPoly3 {
  std::vector<Vec3> v;
  struct F {
    std::int64_t tag;
    std::vector<int> loop;
  };
  std::vector<F> faces;
};

struct I64PairHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const {
    return std::size_t((std::uint64_t(p.first) * 0x9E3779B97F4A7C15ULL) ^
                       std::uint64_t(p.second));
  }
};

// clip convex polyhedron to f(z) <= 0; bisector of a (kept side) and b
void clip_poly3(TaggedPoly3& poly, Vec3 a, Vec3 b, std::int64_t cut_tag) {
  const Vec3 n = (b - a) * 2.0;
  const double c = b.norm2() - a.norm2();
  const std::size_t nv = poly.v.size();
  std::vector<double> f(nv);
  bool any_out = false, any_in = false;
  for (std::size_t k = 0; k < nv; ++k) {
    f[k] = n.dot(poly.v[k]) - c;
    (f[k] <= 0.0 ? any_in : any_out) = true;
  }
  if (!any_out) return;
  if (!any_in) {
    poly = TaggedPoly3{};
    return;
  }

  std::vector<Vec3> nverts = poly.v;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, int, I64PairHash>
      cutpt;
  // coordinate-level canonicalization so coincident cut points (vertex
  // exactly on the plane) share one id across all faces
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, int, I64PairHash>
      bycoord;
  auto coord_key = [](Vec3 p) {
    std::int64_t bx, by, bz;
    std::memcpy(&bx, &p.x, 8);
    std::memcpy(&by, &p.y, 8);
    std::memcpy(&bz, &p.z, 8);
    return std::make_pair(bx ^ (bz << 21) ^ (bz >> 43), by ^ (bz << 42));
  };
  for (std::size_t k = 0; k < nv; ++k)
    if (f[k] == 0.0) bycoord.emplace(coord_key(poly.v[k]), int(k));
  auto intersect = [&](int p, int q) {
    auto key = p < q ? std::make_pair<std::int64_t, std::int64_t>(p, q)
                     : std::make_pair<std::int64_t, std::int64_t>(q, p);
    auto it = cutpt.find(key);
    if (it != cutpt.end()) return it->second;
    double t = f[p] / (f[p] - f[q]);
    Vec3 ip = poly.v[p] + (poly.v[q] - poly.v[p]) * t;
    auto ck = coord_key(ip);
    auto cit = bycoord.find(ck);
    int id;
    if (cit != bycoord.end()) {
      id = cit->second;
    } else {
      id = int(nverts.size());
      nverts.push_back(ip);
      bycoord.emplace(ck, id);
    }
    cutpt.emplace(key, id);
    return id;
  };

  std::vector<TaggedPoly3::F> nfaces;
  std::unordered_map<int, int> next_on_cut;  // entry -> exit per clipped face
  for (const auto& face : poly.faces) {
    const auto& loop = face.loop;
    const std::size_t m = loop.size();
    std::vector<int> nl;
    int entry = -1, exit = -1;
    for (std::size_t k = 0; k < m; ++k) {
      int p = loop[k], q = loop[(k + 1) % m];
      bool pin = f[p] <= 0.0, qin = f[q] <= 0.0;
      if (pin) nl.push_back(p);
      if (pin != qin) {
        int id = intersect(p, q);
        nl.push_back(id);
        if (pin)
          exit = id;  // leaving the kept side
        else
          entry = id;  // entering the kept side
      }
    }
    // drop consecutive duplicates (on-plane vertices)
    std::vector<int> clean;
    for (std::size_t k = 0; k < nl.size(); ++k) {
      int p = nl[k], q = nl[(k + 1) % nl.size()];
      if (p == q) continue;
      clean.push_back(p);
    }
    if (clean.size() >= 3) nfaces.push_back({face.tag, std::move(clean)});
    if (entry >= 0 && exit >= 0 && entry != exit) next_on_cut[entry] = exit;
  }

  // stitch the section polygon
  if (next_on_cut.size() >= 3) {
    std::vector<int> loop;
    int start = next_on_cut.begin()->first;
    int cur = start;
    for (std::size_t guard = 0; guard <= next_on_cut.size(); ++guard) {
      loop.push_back(cur);
      auto it = next_on_cut.find(cur);
      if (it == next_on_cut.end()) break;
      cur = it->second;
      if (cur == start) break;
    }
    if (loop.size() >= 3 && cur == start)
      nfaces.push_back({cut_tag, std::move(loop)});
  }

  // compact vertex indices
  std::vector<int> remap(nverts.size(), -1);
  TaggedPoly3 out;
  for (auto& face : nfaces) {
    for (int& id : face.loop) {
      if (remap[id] < 0) {
        remap[id] = int(out.v.size());
        out.v.push_back(nverts[id]);
      }
      id = remap[id];
    }
  }
  out.faces = std::move(nfaces);
  poly = out.faces.size() >= 4 ? std::move(out) : TaggedPoly3{};
}

double loop_area(const std::vector<Vec3>& verts, const std::vector<int>& loop) {
  Vec3 s{0, 0, 0};
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const Vec3& p = verts[loop[k]];
    const Vec3& q = verts[loop[(k + 1) % loop.size()]];
    s = s + p.cross(q);
  }
  return 0.5 * s.norm();
}

std::uint64_t mix64_collide(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  return z ^ (z >> 31);
}

}  // namespace

// -----------------------------------------------------------------------
// builder
// -----------------------------------------------------------------------

struct DiagramBuilder {
  const PointSample& sample;
  VoronoiDiagram& dia;
  int dim;
  bool slab;
  double L = 0.0, h = 0.0;
  double margin = 0.0;  // ghost band width (slab)

  // extended point set: primaries then ghosts
  std::vector<double> xpts;
  std::vector<std::int32_t> owner;
  std::vector<std::int8_t> shift_x, shift_y;
  std::vector<std::vector<int>> nbr;

  std::unordered_map<std::uint64_t, std::int32_t> registry;

  explicit DiagramBuilder(const PointSample& s, VoronoiDiagram& d)
      : sample(s), dia(d) {
    dim = s.dim;
    slab = s.domain.kind == Domain::Kind::slab;
    L = s.domain.L;
    h = s.domain.h;
  }

  const double* xp(int i) const { return &xpts[std::size_t(i) * dim]; }

  void make_extended(bool full_replication) {
    const std::size_t n = sample.size();
    xpts.assign(sample.coords.begin(), sample.coords.end());
    owner.resize(n);
    shift_x.assign(n, 0);
    shift_y.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) owner[i] = std::int32_t(i);
    if (!slab) return;
    const int lat = dim - 1;
    const int smax = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = sample.point(i);
      for (int sx = -smax; sx <= smax; ++sx)
        for (int sy = (lat == 2 ? -smax : 0); sy <= (lat == 2 ? smax : 0);
             ++sy) {
          if (sx == 0 && sy == 0) continue;
          double q[3] = {p[0] + sx * L, 0, 0};
          if (lat == 2) {
            q[1] = p[1] + sy * L;
            q[2] = p[2];
          } else {
            q[1] = p[1];
          }
          bool keep = true;
          if (!full_replication) {
            for (int k = 0; k < lat; ++k)
              if (q[k] < -margin || q[k] > L + margin) keep = false;
          }
          if (!keep) continue;
          for (int k = 0; k < dim; ++k) xpts.push_back(q[k]);
          owner.push_back(std::int32_t(i));
          shift_x.push_back(std::int8_t(sx));
          shift_y.push_back(std::int8_t(sy));
        }
    }
  }

  void make_neighbors() {
    const std::size_t m = xpts.size() / std::size_t(dim);
    if ((dim == 2 && m >= 3) || (dim == 3 && m >= 4)) {
      if (dim == 2) {
        std::vector<Vec2> pts(m);
        for (std::size_t i = 0; i < m; ++i)
          pts[i] = {xp(int(i))[0], xp(int(i))[1]};
        Delaunay2 del(pts);
        nbr = del.neighbors();
      } else {
        std::vector<Vec3> pts(m);
        for (std::size_t i = 0; i < m; ++i)
          pts[i] = {xp(int(i))[0], xp(int(i))[1], xp(int(i))[2]};
        Delaunay3 del(pts);
        nbr = del.neighbors();
      }
    } else {
      nbr.assign(m, {});
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          if (i != j) nbr[i].push_back(int(j));
    }
  }

  // face key canonicalization and registration -------------------------

  struct KeyParts {
    std::array<FaceKeyEntry, 4> gens{};
    int n_gens = 0;
    std::array<std::int8_t, 3> walls{};
    int n_walls = 0;
  };

  KeyParts make_key(int cell_gen, const std::int64_t* tags, int ntags) const {
    KeyParts kp;
    kp.gens[kp.n_gens++] = {cell_gen, 0, 0};
    for (int t = 0; t < ntags; ++t) {
      if (is_wall(tags[t])) {
        int w = wall_of(tags[t]);
        bool have = false;
        for (int k = 0; k < kp.n_walls; ++k) have |= kp.walls[k] == w;
        if (!have) kp.walls[kp.n_walls++] = std::int8_t(w);
      } else {
        int pid = int(tags[t]);
        FaceKeyEntry e{owner[pid], shift_x[pid], shift_y[pid]};
        bool have = false;
        for (int k = 0; k < kp.n_gens; ++k) have |= kp.gens[k] == e;
        if (!have) kp.gens[kp.n_gens++] = e;
      }
    }
    std::sort(kp.gens.begin(), kp.gens.begin() + kp.n_gens);
    std::sort(kp.walls.begin(), kp.walls.begin() + kp.n_walls);
    const std::int8_t bx = kp.gens[0].sx, by = kp.gens[0].sy;
    for (int k = 0; k < kp.n_gens; ++k) {
      kp.gens[k].sx = std::int8_t(kp.gens[k].sx - bx);
      kp.gens[k].sy = std::int8_t(kp.gens[k].sy - by);
    }
    std::sort(kp.gens.begin(), kp.gens.begin() + kp.n_gens);
    return kp;
  }

  static std::uint64_t hash_key(int fdim, const KeyParts& kp) {
    std::uint64_t hsh = 0xCBF29CE484222325ULL;
    auto mixv = [&hsh](std::uint64_t v) {
      hsh ^= v;
      hsh *= 0x100000001B3ULL;
    };
    mixv(std::uint64_t(fdim) + 1);
    mixv(std::uint64_t(kp.n_gens) * 131 + std::uint64_t(kp.n_walls));
    for (int k = 0; k < kp.n_gens; ++k) {
      mixv(std::uint64_t(std::uint32_t(kp.gens[k].gen)) + 0x1000);
      mixv(std::uint64_t(std::uint32_t(kp.gens[k].sx + 4)) |
           (std::uint64_t(std::uint32_t(kp.gens[k].sy + 4)) << 8));
    }
    for (int k = 0; k < kp.n_walls; ++k)
      mixv(std::uint64_t(std::uint32_t(kp.walls[k])) + 7);
    return hsh;
  }

  static bool same_key(const Face& f, int fdim, const KeyParts& kp) {
    if (f.dim != fdim || f.n_gens != kp.n_gens || f.n_walls != kp.n_walls)
      return false;
    for (int k = 0; k < kp.n_gens; ++k)
      if (!(f.gens[k] == kp.gens[k])) return false;
    for (int k = 0; k < kp.n_walls; ++k)
      if (f.walls[k] != kp.walls[k]) return false;
    return true;
  }

  std::int32_t register_face(int fdim, const KeyParts& kp, double measure,
                             std::int32_t cell_idx, const double* coords) {
    std::uint64_t hsh = hash_key(fdim, kp);
    // open addressing over the mixed hash to rule out silent collisions
    auto it = registry.find(hsh);
    while (it != registry.end() &&
           !same_key(dia.faces_[std::size_t(it->second)], fdim, kp)) {
      hsh = mix64_collide(hsh);
      it = registry.find(hsh);
    }
    if (it != registry.end()) {
      Face& f = dia.faces_[std::size_t(it->second)];
      bool have = false;
      for (auto c : f.cells) have |= c == cell_idx;
      if (!have) f.cells.push_back(cell_idx);
      return it->second;
    }
    Face f;
    f.dim = std::int8_t(fdim);
    f.on_clip_boundary = kp.n_walls > 0;
    f.measure = measure;
    f.gens = kp.gens;
    f.n_gens = std::int8_t(kp.n_gens);
    f.walls = kp.walls;
    f.n_walls = std::int8_t(kp.n_walls);
    f.cells.push_back(cell_idx);
    if (fdim == 0) {
      f.vertex_id = std::int32_t(dia.vert_coords_.size());
      dia.vert_coords_.push_back(
          {coords[0], coords[1], dim == 3 ? coords[2] : 0.0});
    }
    std::int32_t id = std::int32_t(dia.faces_.size());
    dia.faces_.push_back(std::move(f));
    registry.emplace(hsh, id);
    return id;
  }

  // 2D ------------------------------------------------------------------

  TaggedPoly2 initial_box2() const {
    TaggedPoly2 p;
    double x0, x1, y0, y1;
    std::int64_t tb, tr, tt, tl;
    if (!slab) {
      x0 = -0.5, x1 = 0.5, y0 = -0.5, y1 = 0.5;
      tb = wall_tag(2);
      tr = wall_tag(1);
      tt = wall_tag(3);
      tl = wall_tag(0);
    } else {
      double pad = margin + 1.0;
      x0 = -pad, x1 = L + pad, y0 = -h, y1 = h;
      tb = wall_tag(2);      // lower cap
      tr = wall_tag(7);      // lateral sentinel
      tt = wall_tag(3);      // upper cap
      tl = wall_tag(6);      // lateral sentinel
    }
    p.v = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    p.tag = {tb, tr, tt, tl};
    return p;
  }

  bool build_cell2(std::int32_t ci, std::vector<double>& fbuf) {
    const int gi = dia.cells_[ci].generator;
    const Vec2 g{xp(gi)[0], xp(gi)[1]};
    TaggedPoly2 poly = initial_box2();

    std::vector<std::pair<double, int>> order;
    order.reserve(nbr[gi].size());
    for (int j : nbr[gi]) {
      Vec2 q{xp(j)[0], xp(j)[1]};
      order.push_back({dist2(g, q), j});
    }
    std::sort(order.begin(), order.end());
    for (auto [d2, j] : order) {
      double md = 0.0;
      for (const Vec2& v : poly.v) md = std::max(md, dist2(g, v));
      if (d2 > 4.0 * md) break;  // bisector cannot reach the cell
      clip_poly2(poly, g, {xp(j)[0], xp(j)[1]}, j, fbuf);
      if (poly.v.empty())
        throw precision_error("voronoi: cell clipped away (degenerate input)");
    }

    VCell& cell = dia.cells_[ci];
    const std::size_t m = poly.v.size();
    double area = 0.0, maxd = 0.0;
    double zlo = std::numeric_limits<double>::max(), zhi = -zlo;
    for (std::size_t k = 0; k < m; ++k) {
      const Vec2& p = poly.v[k];
      const Vec2& q = poly.v[(k + 1) % m];
      area += p.x * q.y - q.x * p.y;
      maxd = std::max(maxd, dist2(g, p));
      zlo = std::min(zlo, p.y);
      zhi = std::max(zhi, p.y);
    }
    cell.volume = 0.5 * std::fabs(area);
    cell.max_vertex_dist = std::sqrt(maxd);
    cell.zmin = zlo;
    cell.zmax = zhi;
    cell.verts.resize(m);
    for (std::size_t k = 0; k < m; ++k)
      cell.verts[k] = {poly.v[k].x, poly.v[k].y, 0.0};

    if (slab) {
      if (2.0 * cell.max_vertex_dist > margin) return false;
      for (std::int64_t t : poly.tag)
        if (is_wall(t) && wall_of(t) >= 6) return false;
    }

    // vertices, then edges referencing them
    std::vector<std::int32_t> vids(m);
    for (std::size_t k = 0; k < m; ++k) {
      std::int64_t tags[2] = {poly.tag[(k + m - 1) % m], poly.tag[k]};
      KeyParts kp = make_key(cell.generator, tags, 2);
      double c[3] = {poly.v[k].x, poly.v[k].y, 0.0};
      vids[k] = register_face(0, kp, 1.0, ci, c);
      cell.faces_by_dim[0].push_back(vids[k]);
    }
    for (std::size_t k = 0; k < m; ++k) {
      std::int64_t tags[1] = {poly.tag[k]};
      KeyParts kp = make_key(cell.generator, tags, 1);
      double len = std::sqrt(dist2(poly.v[k], poly.v[(k + 1) % m]));
      std::int32_t id = register_face(1, kp, len, ci, nullptr);
      Face& f = dia.faces_[id];
      if (f.sub0.empty()) {
        f.sub0.push_back(vids[k]);
        f.sub0.push_back(vids[(k + 1) % m]);
      }
      cell.faces_by_dim[1].push_back(id);
      if (is_wall(poly.tag[k])) {
        cell.touches_wall = cell.touches_wall || wall_of(poly.tag[k]) < 6;
      } else {
        int pid = int(poly.tag[k]);
        cell.neighbors.push_back({owner[pid], shift_x[pid], shift_y[pid]});
      }
    }
    return true;
  }

  // 3D ------------------------------------------------------------------

  TaggedPoly3 initial_box3() const {
    double x0, x1, y0, y1, z0, z1;
    std::int64_t wx0, wx1, wy0, wy1, wz0, wz1;
    if (!slab) {
      x0 = y0 = z0 = -0.5;
      x1 = y1 = z1 = 0.5;
      wx0 = wall_tag(0);
      wx1 = wall_tag(1);
      wy0 = wall_tag(2);
      wy1 = wall_tag(3);
      wz0 = wall_tag(4);
      wz1 = wall_tag(5);
    } else {
      double pad = margin + 1.0;
      x0 = y0 = -pad;
      x1 = y1 = L + pad;
      z0 = -h;
      z1 = h;
      wx0 = wall_tag(6);
      wx1 = wall_tag(7);
      wy0 = wall_tag(8);
      wy1 = wall_tag(9);
      wz0 = wall_tag(4);
      wz1 = wall_tag(5);
    }
    TaggedPoly3 p;
    p.v = {{x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0}, {x0, y1, z0},
           {x0, y0, z1}, {x1, y0, z1}, {x1, y1, z1}, {x0, y1, z1}};
    // loops counterclockwise seen from outside
    p.faces = {{wz0, {0, 3, 2, 1}}, {wz1, {4, 5, 6, 7}}, {wy0, {0, 1, 5, 4}},
               {wx1, {1, 2, 6, 5}}, {wy1, {2, 3, 7, 6}}, {wx0, {3, 0, 4, 7}}};
    return p;
  }

  bool build_cell3(std::int32_t ci) {
    const int gi = dia.cells_[ci].generator;
    const Vec3 g{xp(gi)[0], xp(gi)[1], xp(gi)[2]};
    TaggedPoly3 poly = initial_box3();

    std::vector<std::pair<double, int>> order;
    order.reserve(nbr[gi].size());
    for (int j : nbr[gi]) {
      Vec3 q{xp(j)[0], xp(j)[1], xp(j)[2]};
      order.push_back({dist2(g, q), j});
    }
    std::sort(order.begin(), order.end());
    for (auto [d2, j] : order) {
      double md = 0.0;
      for (const Vec3& v : poly.v) md = std::max(md, dist2(g, v));
      if (d2 > 4.0 * md) break;
      clip_poly3(poly, g, {xp(j)[0], xp(j)[1], xp(j)[2]}, j);
      if (poly.v.empty())
        throw precision_error("voronoi: cell clipped away (degenerate input)");
    }

    VCell& cell = dia.cells_[ci];
    double maxd = 0.0;
    double zlo = std::numeric_limits<double>::max(), zhi = -zlo;
    for (const Vec3& v : poly.v) {
      maxd = std::max(maxd, dist2(g, v));
      zlo = std::min(zlo, v.z);
      zhi = std::max(zhi, v.z);
    }
    cell.max_vertex_dist = std::sqrt(maxd);
    cell.zmin = zlo;
    cell.zmax = zhi;
    if (slab) {
      if (2.0 * cell.max_vertex_dist > margin) return false;
      for (const auto& f : poly.faces)
        if (is_wall(f.tag) && wall_of(f.tag) >= 6) return false;
    }

    // volume by centroid fan
    Vec3 cen{0, 0, 0};
    for (const Vec3& v : poly.v) cen = cen + v;
    cen = cen * (1.0 / double(poly.v.size()));
    double vol = 0.0;
    for (const auto& f : poly.faces)
      for (std::size_t k = 1; k + 1 < f.loop.size(); ++k) {
        Vec3 a = poly.v[f.loop[0]] - cen;
        Vec3 b = poly.v[f.loop[k]] - cen;
        Vec3 c = poly.v[f.loop[k + 1]] - cen;
        vol += std::fabs(a.dot(b.cross(c))) / 6.0;
      }
    cell.volume = vol;
    cell.verts = poly.v;
    cell.loops.clear();
    for (const auto& f : poly.faces)
      cell.loops.push_back(std::vector<std::int32_t>(f.loop.begin(),
                                                     f.loop.end()));

    // vertex -> adjacent faces; edge -> its two faces
    const std::size_t nv = poly.v.size();
    std::vector<std::vector<int>> vfaces(nv);
    std::unordered_map<std::pair<std::int64_t, std::int64_t>,
                       std::array<int, 2>, I64PairHash>
        edges;
    for (int fi = 0; fi < int(poly.faces.size()); ++fi) {
      const auto& loop = poly.faces[fi].loop;
      for (std::size_t k = 0; k < loop.size(); ++k) {
        int a = loop[k], b = loop[(k + 1) % loop.size()];
        vfaces[a].push_back(fi);
        auto key = a < b ? std::make_pair<std::int64_t, std::int64_t>(a, b)
                         : std::make_pair<std::int64_t, std::int64_t>(b, a);
        auto it = edges.find(key);
        if (it == edges.end())
          edges.emplace(key, std::array<int, 2>{fi, -1});
        else
          it->second[1] = fi;
      }
    }

    // register vertices
    std::vector<std::int32_t> vids(nv, -1);
    for (std::size_t k = 0; k < nv; ++k) {
      std::vector<std::int64_t> tags;
      for (int fi : vfaces[k]) tags.push_back(poly.faces[fi].tag);
      KeyParts kp = make_key(cell.generator, tags.data(), int(tags.size()));
      double c[3] = {poly.v[k].x, poly.v[k].y, poly.v[k].z};
      vids[k] = register_face(0, kp, 1.0, ci, c);
      cell.faces_by_dim[0].push_back(vids[k]);
    }
    // edges
    std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::int32_t,
                       I64PairHash>
        edge_ids;
    for (const auto& [key, fpair] : edges) {
      if (fpair[1] < 0) continue;  // sliver from a dropped degenerate face
      std::int64_t tags[2] = {poly.faces[fpair[0]].tag,
                              poly.faces[fpair[1]].tag};
      KeyParts kp = make_key(cell.generator, tags, 2);
      int a = int(key.first), b = int(key.second);
      double len = (poly.v[a] - poly.v[b]).norm();
      std::int32_t id = register_face(1, kp, len, ci, nullptr);
      Face& f = dia.faces_[id];
      if (f.sub0.empty()) {
        f.sub0.push_back(vids[a]);
        f.sub0.push_back(vids[b]);
      }
      cell.faces_by_dim[1].push_back(id);
      edge_ids.emplace(key, id);
    }
    // facets
    for (const auto& face : poly.faces) {
      std::int64_t tags[1] = {face.tag};
      KeyParts kp = make_key(cell.generator, tags, 1);
      double area = loop_area(poly.v, face.loop);
      std::int32_t id = register_face(2, kp, area, ci, nullptr);
      Face& f = dia.faces_[id];
      if (f.sub0.empty()) {
        for (int v : face.loop) f.sub0.push_back(vids[v]);
        for (std::size_t k = 0; k < face.loop.size(); ++k) {
          int a = face.loop[k], b = face.loop[(k + 1) % face.loop.size()];
          auto key = a < b ? std::make_pair<std::int64_t, std::int64_t>(a, b)
                           : std::make_pair<std::int64_t, std::int64_t>(b, a);
          f.sub1.push_back(edge_ids.at(key));
        }
      }
      cell.faces_by_dim[2].push_back(id);
      if (is_wall(face.tag)) {
        cell.touches_wall = cell.touches_wall || wall_of(face.tag) < 6;
      } else {
        int pid = int(face.tag);
        cell.neighbors.push_back({owner[pid], shift_x[pid], shift_y[pid]});
      }
    }
    return true;
  }

  bool run(bool full_replication) {
    make_extended(full_replication);
    make_neighbors();
    dia.cells_.assign(sample.size(), {});
    dia.faces_.clear();
    dia.vert_coords_.clear();
    registry.clear();
    std::vector<double> fbuf;
    for (std::int32_t i = 0; i < std::int32_t(sample.size()); ++i) {
      dia.cells_[i].generator = i;
      bool ok = dim == 2 ? build_cell2(i, fbuf) : build_cell3(i);
      if (!ok) return false;
    }
    return true;
  }
};

VoronoiDiagram VoronoiDiagram::build(const PointSample& sample) {
  if (sample.size() == 0)
    throw data_error("voronoi: sample must contain at least one point");
  VoronoiDiagram dia;
  dia.domain_ = sample.domain;
  dia.dim_ = sample.dim;
  dia.gen_ = sample.coords;

  DiagramBuilder builder(sample, dia);
  if (sample.domain.kind == Domain::Kind::slab) {
    double tau = sample.lambda > 0 ? sample.lambda : 1.0;
    builder.margin = 4.0 * std::pow(1.0 / tau, 1.0 / sample.dim);
    bool ok = false;
    for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
      bool full = builder.margin >= 0.5 * sample.domain.L;
      if (full) builder.margin = sample.domain.L;
      ok = builder.run(full);
      if (!ok) {
        if (full)
          throw precision_error(
              "voronoi: slab cells exceed the full lateral period");
        builder.margin *= 2.0;
      }
    }
    if (!ok)
      throw precision_error("voronoi: ghost margin did not stabilize");
  } else {
    builder.run(false);
  }

  dia.total_volume_ = 0.0;
  for (const VCell& c : dia.cells_) dia.total_volume_ += c.volume;
  dia.build_grid();
  return dia;
}

std::vector<std::int32_t> VoronoiDiagram::faces_of_dim(int ell) const {
  if (ell < 0 || ell >= dim_)
    throw std::invalid_argument("faces_of_dim: ell out of range");
  std::vector<std::int32_t> out;
  for (std::int32_t i = 0; i < std::int32_t(faces_.size()); ++i)
    if (faces_[i].dim == ell) out.push_back(i);
  return out;
}

void VoronoiDiagram::build_grid() {
  const std::size_t n = n_cells();
  grid_n_ = std::max(1, int(std::floor(std::pow(double(n), 1.0 / dim_))));
  if (domain_.kind == Domain::Kind::cube) {
    grid_x0_ = grid_y0_ = grid_z0_ = -0.5;
    grid_w_ = 1.0 / grid_n_;
  } else {
    grid_x0_ = 0.0;
    grid_y0_ = dim_ == 3 ? 0.0 : -domain_.h;
    grid_z0_ = -domain_.h;
    // one grid pitch for all axes, sized to the lateral period
    grid_w_ = domain_.L / grid_n_;
  }
  int cells_total = 1;
  for (int k = 0; k < dim_; ++k) cells_total *= grid_n_;
  grid_.assign(std::size_t(cells_total), {});
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = generator(int(i));
    int idx = 0, mul = 1;
    const double orig[3] = {grid_x0_, grid_y0_, grid_z0_};
    for (int k = 0; k < dim_; ++k) {
      int c = int(std::floor((p[k] - orig[k]) / grid_w_));
      c = std::clamp(c, 0, grid_n_ - 1);
      idx += c * mul;
      mul *= grid_n_;
    }
    grid_[std::size_t(idx)].push_back(std::int32_t(i));
  }
}

double VoronoiDiagram::min_image_dist2(const double* a, const double* b) const {
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double d = std::fabs(a[k] - b[k]);
    if (domain_.kind == Domain::Kind::slab && k < dim_ - 1)
      d = std::min(d, domain_.L - d);
    s += d * d;
  }
  return s;
}

int VoronoiDiagram::locate(const double* x) const {
  if (!domain_.contains(x)) {
    // lateral wrap is fine for slabs; everything else is a usage error
    if (domain_.kind == Domain::Kind::cube)
      throw std::invalid_argument("locate: query outside domain");
  }
  double q[3] = {x[0], x[1], dim_ == 3 ? x[2] : 0.0};
  if (domain_.kind == Domain::Kind::slab) {
    for (int k = 0; k < dim_ - 1; ++k) {
      q[k] = std::fmod(q[k], domain_.L);
      if (q[k] < 0) q[k] += domain_.L;
    }
    if (q[dim_ - 1] < -domain_.h || q[dim_ - 1] > domain_.h)
      throw std::invalid_argument("locate: query outside slab");
  }
  const double orig[3] = {grid_x0_, grid_y0_, grid_z0_};
  int base[3] = {0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    int c = int(std::floor((q[k] - orig[k]) / grid_w_));
    base[k] = std::clamp(c, 0, grid_n_ - 1);
  }
  double best = std::numeric_limits<double>::max();
  int best_idx = -1;
  const bool wrap = domain_.kind == Domain::Kind::slab;
  for (int r = 0; r < 2 * grid_n_ + 2; ++r) {
    if (best_idx >= 0) {
      double ring_min = (r - 1) > 0 ? (r - 1) * grid_w_ : 0.0;
      if (ring_min * ring_min > best) break;
    }
    bool any = false;
    const int lo = -r, hi = r;
    for (int dz = (dim_ == 3 ? lo : 0); dz <= (dim_ == 3 ? hi : 0); ++dz)
      for (int dy = lo; dy <= hi; ++dy)
        for (int dx = lo; dx <= hi; ++dx) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r)
            continue;
          int cc[3] = {base[0] + dx, base[1] + dy, base[2] + dz};
          bool ok = true;
          for (int k = 0; k < dim_; ++k) {
            bool lateral = wrap && k < dim_ - 1;
            if (lateral) {
              cc[k] = ((cc[k] % grid_n_) + grid_n_) % grid_n_;
            } else if (cc[k] < 0 || cc[k] >= grid_n_) {
              ok = false;
            }
          }
          if (!ok) continue;
          any = true;
          int idx = 0, mul = 1;
          for (int k = 0; k < dim_; ++k) {
            idx += cc[k] * mul;
            mul *= grid_n_;
          }
          for (std::int32_t pi : grid_[std::size_t(idx)]) {
            double d2 = min_image_dist2(q, generator(pi));
            if (d2 < best || (d2 == best && pi < best_idx)) {
              best = d2;
              best_idx = pi;
            }
          }
        }
    if (!any && r > 2 * grid_n_) break;
  }
  return best_idx;
}

double VoronoiDiagram::neighborhood_diameter(int i) const {
  const VCell& c = cells_[std::size_t(i)];
  std::vector<Vec3> pts = c.verts;
  for (const FaceKeyEntry& nb : c.neighbors) {
    const VCell& oc = cells_[std::size_t(nb.gen)];
    Vec3 off{0, 0, 0};
    if (domain_.kind == Domain::Kind::slab) {
      off.x = nb.sx * domain_.L;
      if (dim_ == 3) off.y = nb.sy * domain_.L;
    }
    for (const Vec3& v : oc.verts) pts.push_back(v + off);
  }
  double best = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      best = std::max(best, dist2(pts[a], pts[b]));
  return std::sqrt(best);
}

std::string VoronoiDiagram::debug_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\n  \"dim\": " << dim_ << ",\n  \"generators\": [";
  for (std::size_t i = 0; i < n_cells(); ++i) {
    os << (i ? ", " : "") << "[";
    for (int k = 0; k < dim_; ++k)
      os << (k ? ", " : "") << generator(int(i))[k];
    os << "]";
  }
  os << "],\n  \"vertices\": [";
  for (std::size_t i = 0; i < vert_coords_.size(); ++i) {
    os << (i ? ", " : "") << "[";
    for (int k = 0; k < dim_; ++k) os << (k ? ", " : "") << vert_coords_[i][k];
    os << "]";
  }
  os << "],\n  \"faces\": [\n";
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    const Face& f = faces_[i];
    os << "    {\"dim\": " << int(f.dim) << ", \"measure\": " << f.measure
       << ", \"clip\": " << (f.on_clip_boundary ? "true" : "false")
       << ", \"gens\": [";
    for (int k = 0; k < f.n_gens; ++k)
      os << (k ? ", " : "") << f.gens[k].gen;
    os << "], \"walls\": [";
    for (int k = 0; k < f.n_walls; ++k)
      os << (k ? ", " : "") << int(f.walls[k]);
    os << "], \"cells\": [";
    for (std::size_t k = 0; k < f.cells.size(); ++k)
      os << (k ? ", " : "") << f.cells[k];
    os << "]}" << (i + 1 < faces_.size() ? "," : "") << "\n";
  }
  os << "  ],\n  \"volume\": " << total_volume_ << "\n}\n";
  return os.str();
}

}  // namespace pvlab
