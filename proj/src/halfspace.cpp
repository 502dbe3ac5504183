// SPDX-License-Identifier: Apache-2.0
#include "pvlab/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pvlab/errors.hpp"
#include "pvlab/statistics.hpp"
#include "pvlab/threadpool.hpp"

namespace pvlab {

std::string ScoreKind::name() const {
  switch (base) {
    case Base::signed_volume:
      return "signed_volume";
    case Base::symdiff_volume:
      return "symdiff_volume";
    case Base::surface:
      return "surface";
    case Base::skeleton:
      return "skeleton_" + std::to_string(ell);
    case Base::face_count:
      return "face_count_" + std::to_string(ell);
    case Base::zone_complexity:
      return "zone_complexity";
  }
  return "?";
}

ScoreKind ScoreKind::parse(const std::string& s) {
  ScoreKind k;
  if (s == "signed_volume") {
    k.base = Base::signed_volume;
  } else if (s == "symdiff_volume") {
    k.base = Base::symdiff_volume;
  } else if (s == "surface") {
    k.base = Base::surface;
  } else if (s == "zone_complexity") {
    k.base = Base::zone_complexity;
  } else if (s.rfind("skeleton_", 0) == 0) {
    k.base = Base::skeleton;
    k.ell = std::stoi(s.substr(9));
  } else if (s.rfind("face_count_", 0) == 0) {
    k.base = Base::face_count;
    k.ell = std::stoi(s.substr(11));
  } else {
    throw config_error("unknown score kind: " + s);
  }
  return k;
}

namespace {

// lower half-space in slab coordinates: last coordinate <= 0
class LowerHalfShape final : public Shape {
 public:
  explicit LowerHalfShape(int d) : Shape(d) {}
  bool contains(const double* x) const override { return x[dim_ - 1] <= 0.0; }
  double signed_distance(const double* x) const override {
    return x[dim_ - 1];
  }
  double volume() const override {
    throw std::logic_error("half-space: no finite volume");
  }
  double surface_content() const override {
    throw std::logic_error("half-space: use lateral area");
  }
  BoundaryPatch boundary_patch(const PatchSpec&, double) const override {
    throw std::logic_error("half-space: no patch");
  }
  double margin() const override { return 0.0; }
  std::string describe() const override { return "lower half-space"; }
};

// area of the part of triangle (a, b, c) with z > 0 (2D: y > 0)
double tri_area_above(Vec2 a, Vec2 b, Vec2 c) {
  Vec2 poly[7] = {a, b, c};
  int n = 3;
  Vec2 out[7];
  int m = 0;
  for (int k = 0; k < n; ++k) {
    Vec2 p = poly[k], q = poly[(k + 1) % n];
    bool pin = p.y > 0, qin = q.y > 0;
    if (pin) out[m++] = p;
    if (pin != qin) {
      double t = p.y / (p.y - q.y);
      out[m++] = {p.x + t * (q.x - p.x), 0.0};
    }
  }
  double s = 0.0;
  for (int k = 0; k < m; ++k) {
    Vec2 p = out[k], q = out[(k + 1) % m];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::fabs(s);
}

// volume of the part of tetrahedron (a, b, c, d) with z > 0
double tet_vol_above(Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
  Vec3 v[4] = {a, b, c, d};
  double f[4] = {a.z, b.z, c.z, d.z};
  double vol = std::fabs((b - a).dot((c - a).cross(d - a))) / 6.0;
  int npos = 0;
  for (double z : f) npos += z > 0;
  if (npos == 0) return 0.0;
  if (npos == 4) return vol;
  auto cut = [&](int i, int j) {
    double t = f[i] / (f[i] - f[j]);
    return v[i] + (v[j] - v[i]) * t;
  };
  // order so positives come first
  int pos[4], neg[4];
  int np = 0, nn = 0;
  for (int i = 0; i < 4; ++i)
    (f[i] > 0 ? pos[np++] : neg[nn++]) = i;
  auto tetvol = [](Vec3 p, Vec3 q, Vec3 r, Vec3 s) {
    return std::fabs((q - p).dot((r - p).cross(s - p))) / 6.0;
  };
  if (npos == 1) {
    Vec3 p = v[pos[0]];
    return tetvol(p, cut(pos[0], neg[0]), cut(pos[0], neg[1]),
                  cut(pos[0], neg[2]));
  }
  if (npos == 3) {
    Vec3 p = v[neg[0]];
    double below = tetvol(p, cut(neg[0], pos[0]), cut(neg[0], pos[1]),
                          cut(neg[0], pos[2]));
    return vol - below;
  }
  // npos == 2: prism with vertices pos0, pos1 and four cut points
  Vec3 p0 = v[pos[0]], p1 = v[pos[1]];
  Vec3 c00 = cut(pos[0], neg[0]), c01 = cut(pos[0], neg[1]);
  Vec3 c10 = cut(pos[1], neg[0]), c11 = cut(pos[1], neg[1]);
  return tetvol(p0, p1, c00, c10) + tetvol(p0, c00, c01, c11) +
         tetvol(p0, c00, c10, c11);
}

// exact volume of the cell part strictly above z = 0
double cell_volume_above(const VoronoiDiagram& dia, const VCell& cell) {
  if (dia.dim() == 2) {
    double s = 0.0;
    for (std::size_t k = 1; k + 1 < cell.verts.size(); ++k)
      s += tri_area_above({cell.verts[0].x, cell.verts[0].y},
                          {cell.verts[k].x, cell.verts[k].y},
                          {cell.verts[k + 1].x, cell.verts[k + 1].y});
    return s;
  }
  Vec3 cen{0, 0, 0};
  for (const Vec3& v : cell.verts) cen = cen + v;
  cen = cen * (1.0 / double(cell.verts.size()));
  double s = 0.0;
  for (const auto& loop : cell.loops)
    for (std::size_t k = 1; k + 1 < loop.size(); ++k)
      s += tet_vol_above(cen, cell.verts[loop[0]], cell.verts[loop[k]],
                         cell.verts[loop[k + 1]]);
  return s;
}

}  // namespace

double slab_score_once(ScoreKind kind, int d, double L, double h,
                       const SeedPath& seed, bool& contaminated) {
  contaminated = false;
  PointSample sample = sample_poisson_slab(1.0, L, h, d, seed);
  if (sample.size() == 0) return 0.0;
  VoronoiDiagram dia = VoronoiDiagram::build(sample);
  LowerHalfShape half(d);
  CellClassification cls = classify(dia, half);

  const double cap = 0.5 * h;
  // neighbourhood z-extent per cell
  auto nbhd_ok = [&](int i) {
    const VCell& c = dia.cell(i);
    double lo = c.zmin, hi = c.zmax;
    for (const FaceKeyEntry& nb : c.neighbors) {
      lo = std::min(lo, dia.cell(nb.gen).zmin);
      hi = std::max(hi, dia.cell(nb.gen).zmax);
    }
    return lo >= -cap && hi <= cap;
  };
  auto mark_contaminated = [&](int i) {
    if (dia.cell(i).touches_wall) contaminated = true;
  };

  const double lateral_area = d == 2 ? L : L * L;
  const auto& faces = dia.faces();

  switch (kind.base) {
    case ScoreKind::Base::signed_volume:
    case ScoreKind::Base::symdiff_volume: {
      const bool absolute = kind.base == ScoreKind::Base::symdiff_volume;
      double total = 0.0;
      for (std::size_t i = 0; i < dia.n_cells(); ++i) {
        const VCell& c = dia.cell(int(i));
        bool crosses = c.zmin < 0.0 && c.zmax > 0.0;
        if (!crosses) continue;
        mark_contaminated(int(i));
        if (!nbhd_ok(int(i))) continue;
        double above = cell_volume_above(dia, c);
        double score;
        if (cls.inside[i])
          score = above;  // inside cell sticking above the interface
        else
          score = absolute ? (c.volume - above) : -(c.volume - above);
        total += score;
      }
      return total / lateral_area;
    }
    case ScoreKind::Base::surface: {
      double total = 0.0;
      std::vector<char> owner_done(dia.n_cells(), 0);
      for (std::int32_t id : cls.boundary_facets) {
        const Face& f = faces[id];
        int owner = cls.inside[f.gens[0].gen] ? f.gens[0].gen : f.gens[1].gen;
        mark_contaminated(owner);
        if (!nbhd_ok(owner)) continue;
        total += f.measure;
      }
      return total / lateral_area;
    }
    case ScoreKind::Base::skeleton: {
      const int ell = kind.ell;
      if (ell < 0 || ell >= d)
        throw std::invalid_argument("slab score: skeleton ell out of range");
      double total = 0.0;
      for (std::size_t i = 0; i < dia.n_cells(); ++i) {
        if (!cls.inside[i]) continue;
        const VCell& c = dia.cell(int(i));
        double cellsum = 0.0;
        for (std::int32_t id : c.faces_by_dim[ell])
          if (cls.boundary_face_flag[ell][id]) cellsum += faces[id].measure;
        if (cellsum == 0.0) continue;
        mark_contaminated(int(i));
        if (!nbhd_ok(int(i))) continue;
        total += cellsum;
      }
      return total / (double(d - kind.ell) * lateral_area);
    }
    case ScoreKind::Base::face_count: {
      const int ell = kind.ell;
      if (ell < 0 || ell >= d)
        throw std::invalid_argument("slab score: face ell out of range");
      long long count = 0;
      for (std::int32_t id = 0; id < std::int32_t(faces.size()); ++id) {
        if (!cls.boundary_face_flag[ell][id]) continue;
        const Face& f = faces[id];
        // restrict by direct geometric extent
        bool ok = true;
        const auto check_vertex = [&](std::int32_t vid) {
          double z = dia.vertex(vid)[d - 1];
          if (std::fabs(z) > cap) ok = false;
        };
        if (f.dim == 0) {
          check_vertex(f.vertex_id);
        } else {
          for (std::int32_t v : f.sub0) check_vertex(v);
        }
        for (std::int32_t ci : f.cells) mark_contaminated(ci);
        if (!ok) continue;
        ++count;
      }
      return double(count) / lateral_area;
    }
    case ScoreKind::Base::zone_complexity: {
      std::array<std::vector<char>, 3> seen;
      for (int ell = 0; ell < d; ++ell) seen[ell].assign(faces.size(), 0);
      for (std::size_t i = 0; i < dia.n_cells(); ++i) {
        const VCell& c = dia.cell(int(i));
        if (!(c.zmin <= 0.0 && c.zmax >= 0.0)) continue;
        mark_contaminated(int(i));
        if (!nbhd_ok(int(i))) continue;
        for (int ell = 0; ell < d; ++ell)
          for (std::int32_t id : c.faces_by_dim[ell]) seen[ell][id] = 1;
      }
      long long count = 0;
      for (int ell = 0; ell < d; ++ell)
        for (char s : seen[ell]) count += s != 0;
      return double(count) / lateral_area;
    }
  }
  throw std::logic_error("slab_score_once: unhandled kind");
}

namespace {

struct Agg {
  double mean = 0.0, se = 0.0;
  int used = 0, discarded = 0;
};

Agg run_batch(ScoreKind kind, int d, double L, double h, int replicates,
              const SeedPath& seed, int threads) {
  std::vector<double> vals(replicates);
  std::vector<char> bad(replicates, 0);
  parallel_for(std::size_t(replicates), threads, [&](std::size_t r) {
    bool contaminated = false;
    double v = slab_score_once(kind, d, L, h,
                               seed.child("rep/" + std::to_string(r)),
                               contaminated);
    vals[r] = v;
    bad[r] = contaminated ? 1 : 0;
  });
  Agg a;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < replicates; ++r) {
    if (bad[r]) {
      ++a.discarded;
      continue;
    }
    sum += vals[r];
    ++a.used;
  }
  if (a.used == 0) throw precision_error("halfspace: every replicate discarded");
  a.mean = sum / a.used;
  for (int r = 0; r < replicates; ++r)
    if (!bad[r]) sum2 += (vals[r] - a.mean) * (vals[r] - a.mean);
  a.se = a.used > 1 ? std::sqrt(sum2 / (double(a.used) * (a.used - 1))) : 0.0;
  return a;
}

}  // namespace

HalfSpaceEstimate estimate_constant(ScoreKind kind, int d, double L, double h,
                                    int replicates, const SeedPath& seed,
                                    int threads) {
  if (d != 2 && d != 3) throw config_error("estimate_constant: d must be 2 or 3");
  if (!(L > 0) || !(h > 0) || replicates < 2)
    throw config_error("estimate_constant: bad slab parameters");
  // preconditions in units of the expected cell diameter (unit intensity)
  if (L < 10.0) throw config_error("estimate_constant: L must be >= 10");
  if (h < 5.0) throw config_error("estimate_constant: h must be >= 5");

  HalfSpaceEstimate est;
  est.kind = kind;
  est.d = d;
  est.L = L;
  est.h = h;
  est.replicates = replicates;
  est.seed_path = seed.path;

  Agg a = run_batch(kind, d, L, h, replicates, seed.child("h1"), threads);
  Agg b = run_batch(kind, d, L, 2.0 * h, replicates, seed.child("h2"), threads);
  est.value = a.mean;
  est.std_error = a.se;
  est.discarded = a.discarded;
  est.value_2h = b.mean;
  est.std_error_2h = b.se;
  est.discarded_2h = b.discarded;
  est.convergence_flag =
      std::fabs(a.mean - b.mean) <=
      2.0 * std::sqrt(a.se * a.se + b.se * b.se) + 1e-300;
  return est;
}

double predict_mean(const HalfSpaceEstimate& est, const Shape& shape,
                    const IntensityField& kappa, double gamma, double lambda) {
  if (shape.dim() != est.d)
    throw std::invalid_argument("predict_mean: dimension mismatch");
  if (std::fabs(gamma - est.kind.gamma(est.d)) > 1e-12)
    throw std::invalid_argument(
        "predict_mean: gamma does not match the score kind");
  double content = weighted_surface_content(shape, kappa, gamma, 1);
  double expo = (double(est.d) - 1.0 - gamma) / double(est.d);
  return est.value * content * std::pow(lambda, expo);
}

}  // namespace pvlab
