// SPDX-License-Identifier: Apache-2.0
#include "pvlab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "pvlab/errors.hpp"
#include "pvlab/rng.hpp"

namespace pvlab {

CellClassification classify(const VoronoiDiagram& dia, const Shape& shape) {
  if (shape.dim() != dia.dim())
    throw std::invalid_argument("classify: dimension mismatch");
  CellClassification cls;
  const std::size_t n = dia.n_cells();
  cls.inside.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    cls.inside[i] = shape.contains(dia.generator(int(i))) ? 1 : 0;

  const int d = dia.dim();
  const auto& faces = dia.faces();
  for (int ell = 0; ell < d; ++ell)
    cls.boundary_face_flag[ell].assign(faces.size(), 0);

  for (std::int32_t id = 0; id < std::int32_t(faces.size()); ++id) {
    const Face& f = faces[id];
    if (f.dim != d - 1) continue;
    if (f.on_clip_boundary) {
      // a wall facet of an inside cell means PV touches the clip box;
      // excluded from the boundary, recorded as a flag
      if (f.n_gens >= 1 && cls.inside[f.gens[0].gen]) cls.boundary_touch = true;
      continue;
    }
    if (f.n_gens != 2) continue;
    if (cls.inside[f.gens[0].gen] == cls.inside[f.gens[1].gen]) continue;
    cls.boundary_facets.push_back(id);
    cls.boundary_face_flag[d - 1][id] = 1;
    for (std::int32_t v : f.sub0) cls.boundary_face_flag[0][v] = 1;
    if (d == 3)
      for (std::int32_t e : f.sub1) cls.boundary_face_flag[1][e] = 1;
  }
  return cls;
}

namespace {

// deterministic stratified sampling of a convex cell: fan triangles
// (d=2) or fan tetrahedra per face (d=3), buckets proportional to size
double cell_fraction_outside(const VoronoiDiagram& dia, const VCell& cell,
                             const Shape& target, bool want_outside,
                             int budget, Rng& rng, double& var_out) {
  const int d = dia.dim();
  struct Piece {
    Vec3 a, b, c, e;
    double vol;
  };
  std::vector<Piece> pieces;
  double total = 0.0;
  if (d == 2) {
    for (std::size_t k = 1; k + 1 < cell.verts.size(); ++k) {
      Vec3 a = cell.verts[0], b = cell.verts[k], c = cell.verts[k + 1];
      double v =
          0.5 * std::fabs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
      if (v <= 0) continue;
      pieces.push_back({a, b, c, {}, v});
      total += v;
    }
  } else {
    Vec3 cen{0, 0, 0};
    for (const Vec3& v : cell.verts) cen = cen + v;
    cen = cen * (1.0 / double(cell.verts.size()));
    for (const auto& loop : cell.loops)
      for (std::size_t k = 1; k + 1 < loop.size(); ++k) {
        Vec3 a = cell.verts[loop[0]], b = cell.verts[loop[k]],
             c = cell.verts[loop[k + 1]];
        double v = std::fabs((a - cen).dot((b - cen).cross(c - cen))) / 6.0;
        if (v <= 0) continue;
        pieces.push_back({a, b, c, cen, v});
        total += v;
      }
  }
  if (pieces.empty() || total <= 0.0) {
    var_out = 0.0;
    return 0.0;
  }

  double est = 0.0, var = 0.0;
  for (const Piece& p : pieces) {
    int m = std::max(1, int(std::llround(budget * p.vol / total)));
    long long hits = 0;
    for (int i = 0; i < m; ++i) {
      double x[3];
      if (d == 2) {
        double u = rng.next_double(), v = rng.next_double();
        if (u + v > 1.0) {
          u = 1.0 - u;
          v = 1.0 - v;
        }
        x[0] = p.a.x + u * (p.b.x - p.a.x) + v * (p.c.x - p.a.x);
        x[1] = p.a.y + u * (p.b.y - p.a.y) + v * (p.c.y - p.a.y);
      } else {
        // uniform in the tetrahedron by folding the unit cube
        double s = rng.next_double(), t = rng.next_double(),
               u = rng.next_double();
        if (s + t > 1.0) {
          s = 1.0 - s;
          t = 1.0 - t;
        }
        if (t + u > 1.0) {
          double tu = u;
          u = 1.0 - s - t;
          t = 1.0 - tu;
        } else if (s + t + u > 1.0) {
          double su = u;
          u = s + t + u - 1.0;
          s = 1.0 - t - su;
        }
        double w = 1.0 - s - t - u;
        x[0] = p.e.x * w + p.a.x * s + p.b.x * t + p.c.x * u;
        x[1] = p.e.y * w + p.a.y * s + p.b.y * t + p.c.y * u;
        x[2] = p.e.z * w + p.a.z * s + p.b.z * t + p.c.z * u;
      }
      bool in_target = target.contains(x);
      if (in_target != want_outside) ++hits;  // count the wanted side
    }
    // per-stratum contribution; mildly smoothed binomial variance
    est += p.vol * double(hits) / double(m);
    double ph = (double(hits) + 1.0) / (double(m) + 2.0);
    var += p.vol * p.vol * ph * (1.0 - ph) / double(m);
  }
  var_out = var;
  return est;
}

}  // namespace

void volume_statistics(const VoronoiDiagram& dia, const CellClassification& cls,
                       const Shape& target, const SymdiffOptions& opt,
                       StatisticVector& out) {
  double vol = 0.0;
  for (std::size_t i = 0; i < dia.n_cells(); ++i)
    if (cls.inside[i]) vol += dia.cell(int(i)).volume;
  out.volume = vol;
  out.signed_volume_error = vol - target.volume();

  if (opt.budget_per_cell <= 0) {
    out.symdiff_volume = 0.0;
    out.symdiff_se = 0.0;
    return;
  }
  double symdiff = 0.0, var = 0.0;
  for (std::size_t i = 0; i < dia.n_cells(); ++i) {
    const VCell& cell = dia.cell(int(i));
    const bool in_pv = cls.inside[i] != 0;
    const double sd = target.signed_distance(dia.generator(int(i)));
    const bool in_target = sd <= 0.0;
    if (std::fabs(sd) > cell.max_vertex_dist) {
      // cell lies entirely on one side of the target boundary
      if (in_pv != in_target) symdiff += cell.volume;
      continue;
    }
    Rng rng(mix64(opt.seed ^ (0x5851F42D4C957F2DULL * (i + 1))));
    double v = 0.0, pvar = 0.0;
    // inside cells contribute Vol(cell \ target), outside Vol(cell ^ target)
    v = cell_fraction_outside(dia, cell, target, in_pv, opt.budget_per_cell,
                              rng, pvar);
    symdiff += v;
    var += pvar;
  }
  out.symdiff_volume = symdiff;
  out.symdiff_se = std::sqrt(var);
}

double surface_statistic(const VoronoiDiagram& dia,
                         const CellClassification& cls) {
  double s = 0.0;
  for (std::int32_t id : cls.boundary_facets) s += dia.faces()[id].measure;
  return s;
}

void skeleton_statistics(const VoronoiDiagram& dia,
                         const CellClassification& cls, int ell,
                         double& weighted_sum, double& distinct_sum,
                         long long& count) {
  const int d = dia.dim();
  if (ell < 0 || ell >= d)
    throw std::invalid_argument("skeleton_statistics: ell out of range");
  const auto& faces = dia.faces();
  const auto& flag = cls.boundary_face_flag[ell];

  distinct_sum = 0.0;
  count = 0;
  for (std::int32_t id = 0; id < std::int32_t(faces.size()); ++id) {
    if (!flag[id]) continue;
    ++count;
    distinct_sum += faces[id].measure;
  }

  double pw = 0.0;
  for (std::size_t i = 0; i < dia.n_cells(); ++i) {
    if (!cls.inside[i]) continue;
    for (std::int32_t id : dia.cell(int(i)).faces_by_dim[ell])
      if (flag[id]) pw += faces[id].measure;
  }
  weighted_sum = pw / double(d - ell);
}

namespace {

// exact convex-polygon vs circle intersection test (d=2)
bool circle_hits_cell(const VoronoiDiagram& dia, int ci, Vec2 c, double r) {
  const VCell& cell = dia.cell(ci);
  double maxd = 0.0, mind = std::numeric_limits<double>::max();
  const std::size_t m = cell.verts.size();
  for (std::size_t k = 0; k < m; ++k) {
    Vec2 a{cell.verts[k].x, cell.verts[k].y};
    Vec2 b{cell.verts[(k + 1) % m].x, cell.verts[(k + 1) % m].y};
    maxd = std::max(maxd, dist2(a, c));
    Vec2 ab = b - a;
    double nn = ab.norm2();
    double t = nn > 0 ? std::clamp((c - a).dot(ab) / nn, 0.0, 1.0) : 0.0;
    mind = std::min(mind, dist2(c, a + ab * t));
  }
  double r2 = r * r;
  if (maxd < r2) return false;  // cell strictly inside the disk
  // center inside the polygon?
  bool inside = true;
  for (std::size_t k = 0; k < m && inside; ++k) {
    Vec2 a{cell.verts[k].x, cell.verts[k].y};
    Vec2 b{cell.verts[(k + 1) % m].x, cell.verts[(k + 1) % m].y};
    double cr = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (cr < 0) inside = false;
  }
  if (inside) return maxd >= r2;
  return mind <= r2 && maxd >= r2;
}

bool segment_hits_cell(const VoronoiDiagram& dia, int ci, Vec2 p, Vec2 q) {
  const VCell& cell = dia.cell(ci);
  const std::size_t m = cell.verts.size();
  // convex polygon: clip the segment by every edge half-plane
  double t0 = 0.0, t1 = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    Vec2 a{cell.verts[k].x, cell.verts[k].y};
    Vec2 b{cell.verts[(k + 1) % m].x, cell.verts[(k + 1) % m].y};
    Vec2 n{a.y - b.y, b.x - a.x};  // inward normal for ccw polygon
    double fp = n.dot(p - a), fq = n.dot(q - a);
    // inside is n.(x-a) >= 0 for ccw
    double denom = fq - fp;
    if (std::fabs(denom) < 1e-300) {
      if (fp < 0) return false;
      continue;
    }
    double t = -fp / denom;
    if (denom > 0)
      t0 = std::max(t0, t);
    else
      t1 = std::min(t1, t);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

ZoneResult zone_statistics(const VoronoiDiagram& dia,
                           const BoundaryPatch& patch, double spacing_factor) {
  const int d = dia.dim();
  const double diameter_hat =
      std::pow(dia.domain().volume() / double(dia.n_cells()), 1.0 / d);
  if (patch.max_spacing > spacing_factor * diameter_hat + 1e-30)
    throw config_error(
        "zone_statistics: patch node spacing exceeds the configured fraction "
        "of the expected cell diameter");

  std::vector<char> in_zone(dia.n_cells(), 0);
  std::vector<std::int32_t> frontier;
  for (std::size_t i = 0; i < patch.size(); ++i) {
    int c = dia.locate(patch.node(i));
    if (!in_zone[c]) {
      in_zone[c] = 1;
      frontier.push_back(c);
    }
  }

  // confirm grazed neighbours by exact curve-cell intersection until a
  // fixed point is reached
  auto hits = [&](int ci) {
    if (d != 2) return false;  // node coverage only in d=3
    if (patch.curve == BoundaryPatch::Curve::circle2)
      return circle_hits_cell(dia, ci, patch.circle_center, patch.circle_r);
    if (patch.curve == BoundaryPatch::Curve::polyline2) {
      const auto& pl = patch.polyline;
      std::size_t nseg = patch.closed ? pl.size() : pl.size() - 1;
      for (std::size_t k = 0; k < nseg; ++k)
        if (segment_hits_cell(dia, ci, pl[k], pl[(k + 1) % pl.size()]))
          return true;
      return false;
    }
    return false;
  };
  while (!frontier.empty()) {
    std::vector<std::int32_t> next;
    for (std::int32_t ci : frontier)
      for (const FaceKeyEntry& nb : dia.cell(ci).neighbors) {
        if (in_zone[nb.gen]) continue;
        if (hits(nb.gen)) {
          in_zone[nb.gen] = 1;
          next.push_back(nb.gen);
        }
      }
    frontier = std::move(next);
  }

  ZoneResult res;
  std::array<std::vector<char>, 3> seen;
  for (int ell = 0; ell < d; ++ell) seen[ell].assign(dia.faces().size(), 0);
  for (std::size_t i = 0; i < dia.n_cells(); ++i) {
    if (!in_zone[i]) continue;
    res.zone_cells.push_back(std::int32_t(i));
    for (int ell = 0; ell < d; ++ell)
      for (std::int32_t id : dia.cell(int(i)).faces_by_dim[ell])
        seen[ell][id] = 1;
  }
  for (int ell = 0; ell < d; ++ell) {
    long long c = 0;
    for (char s : seen[ell]) c += s != 0;
    res.faces[ell] = c;
    res.complexity += double(c);
  }
  return res;
}

StatisticVector compute_statistics(const VoronoiDiagram& dia,
                                   const Shape& shape,
                                   const SymdiffOptions& opt,
                                   const BoundaryPatch* zone_patch,
                                   double zone_spacing_factor) {
  StatisticVector out;
  out.n_points = (long long)(dia.n_cells());
  CellClassification cls = classify(dia, shape);
  out.boundary_touch = cls.boundary_touch;
  volume_statistics(dia, cls, shape, opt, out);
  out.surface = surface_statistic(dia, cls);
  for (int ell = 0; ell < dia.dim(); ++ell)
    skeleton_statistics(dia, cls, ell, out.skel_weighted[ell],
                        out.skel_distinct[ell], out.face_count[ell]);
  if (zone_patch) {
    ZoneResult z = zone_statistics(dia, *zone_patch, zone_spacing_factor);
    out.zone_complexity = z.complexity;
    out.zone_faces = z.faces;
    out.zone_cells = (long long)(z.zone_cells.size());
    out.zone_spacing = zone_patch->max_spacing;
  }
  return out;
}

std::vector<StatisticVector> iterate_pv(const Shape& shape, double lambda,
                                        int n, const SeedPath& seed,
                                        const SymdiffOptions& opt) {
  if (n < 1) throw std::invalid_argument("iterate_pv: n must be >= 1");
  std::vector<StatisticVector> out;
  std::shared_ptr<Shape> current;  // previous iterate; original for k=1
  const Shape* cls_shape = &shape;
  IntensityField unit = IntensityField::constant(1.0);
  for (int k = 1; k <= n; ++k) {
    SeedPath sk = seed.child("iter/" + std::to_string(k));
    PointSample sample =
        sample_poisson_cube(double(k) * lambda, unit, shape.dim(), sk);
    auto dia = std::make_shared<VoronoiDiagram>(VoronoiDiagram::build(sample));
    CellClassification cls = classify(*dia, *cls_shape);
    StatisticVector sv;
    sv.n_points = (long long)(sample.size());
    sv.iteration = k;
    sv.boundary_touch = cls.boundary_touch;
    SymdiffOptions o = opt;
    o.seed = mix64(opt.seed ^ std::uint64_t(k) * 0x9E3779B97F4A7C15ULL);
    // errors always against the original set
    volume_statistics(*dia, cls, shape, o, sv);
    sv.surface = surface_statistic(*dia, cls);
    for (int ell = 0; ell < dia->dim(); ++ell)
      skeleton_statistics(*dia, cls, ell, sv.skel_weighted[ell],
                          sv.skel_distinct[ell], sv.face_count[ell]);
    out.push_back(sv);
    current = polytopal_union_from_cells(dia, cls.inside);
    cls_shape = current.get();
  }
  return out;
}

long long maximal_points(const PointSample& sample) {
  const int n = int(sample.size());
  if (n == 0) return 0;
  if (sample.dim == 2) {
    // sort by x descending, break ties by y descending; a point is
    // maximal iff it tops its x-group and beats the running best y
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (sample.point(a)[0] != sample.point(b)[0])
        return sample.point(a)[0] > sample.point(b)[0];
      return sample.point(a)[1] > sample.point(b)[1];
    });
    long long count = 0;
    double best_y = -std::numeric_limits<double>::infinity();
    int i = 0;
    while (i < n) {
      int j = i;
      double x = sample.point(idx[i])[0];
      double gy = sample.point(idx[i])[1];
      while (j < n && sample.point(idx[j])[0] == x) ++j;
      if (gy > best_y) {
        // duplicates of the group maximum are mutually non-dominating
        for (int k = i; k < j && sample.point(idx[k])[1] == gy; ++k) ++count;
      }
      best_y = std::max(best_y, gy);
      i = j;
    }
    return count;
  }
  if (sample.dim != 3)
    throw std::invalid_argument("maximal_points: d must be 2 or 3");

  // divide and conquer on x with a (y,z) staircase filter
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double* pa = sample.point(a);
    const double* pb = sample.point(b);
    if (pa[0] != pb[0]) return pa[0] > pb[0];
    if (pa[1] != pb[1]) return pa[1] > pb[1];
    return pa[2] > pb[2];
  });
  auto dominates = [&](int a, int b) {
    const double* pa = sample.point(a);
    const double* pb = sample.point(b);
    bool geq = pa[0] >= pb[0] && pa[1] >= pb[1] && pa[2] >= pb[2];
    bool strict = pa[0] > pb[0] || pa[1] > pb[1] || pa[2] > pb[2];
    return geq && strict;
  };
  // maxima of idx[lo, hi) returned as indices into sample
  std::function<std::vector<int>(int, int)> solve = [&](int lo,
                                                        int hi) {
    const int m = hi - lo;
    if (m <= 64) {
      std::vector<int> out;
      for (int i = lo; i < hi; ++i) {
        bool dom = false;
        for (int j = lo; j < hi && !dom; ++j)
          if (j != i) dom = dominates(idx[j], idx[i]);
        if (!dom) out.push_back(idx[i]);
      }
      return out;
    }
    int mid = lo + m / 2;
    // split on a strict x boundary so A strictly precedes B in x
    while (mid < hi &&
           sample.point(idx[mid])[0] == sample.point(idx[mid - 1])[0])
      ++mid;
    if (mid == hi) {
      // the whole right part ties in x; fall back
      std::vector<int> out;
      for (int i = lo; i < hi; ++i) {
        bool dom = false;
        for (int j = lo; j < hi && !dom; ++j)
          if (j != i) dom = dominates(idx[j], idx[i]);
        if (!dom) out.push_back(idx[i]);
      }
      return out;
    }
    std::vector<int> A = solve(lo, mid);   // larger x
    std::vector<int> B = solve(mid, hi);
    // staircase of A's maxima in (y,z): y descending, track max z
    std::vector<std::pair<double, double>> stair;  // (y, max z for >= y)
    {
      std::vector<std::pair<double, double>> yz;
      for (int a : A) yz.push_back({sample.point(a)[1], sample.point(a)[2]});
      std::sort(yz.begin(), yz.end(),
                [](auto& l, auto& r) { return l.first > r.first; });
      double mz = -std::numeric_limits<double>::infinity();
      for (auto& [y, z] : yz) {
        mz = std::max(mz, z);
        stair.push_back({y, mz});
      }
    }
    std::vector<int> out = A;
    for (int b : B) {
      double by = sample.point(b)[1], bz = sample.point(b)[2];
      // largest prefix of stair with y >= by
      int lo2 = 0, hi2 = int(stair.size());
      while (lo2 < hi2) {
        int m2 = (lo2 + hi2) / 2;
        if (stair[m2].first >= by)
          lo2 = m2 + 1;
        else
          hi2 = m2;
      }
      bool dom = false;
      if (lo2 > 0 && stair[lo2 - 1].second >= bz) {
        // a point with y >= by and z >= bz exists in A; x is strictly
        // larger by the split, so domination is strict
        dom = true;
      }
      if (!dom) out.push_back(b);
    }
    return out;
  };
  return (long long)(solve(0, n).size());
}

}  // namespace pvlab
