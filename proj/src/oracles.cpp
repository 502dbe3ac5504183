// SPDX-License-Identifier: Apache-2.0
#include "pvlab/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "pvlab/exact.hpp"

namespace pvlab::oracle {

int nearest_linear(const PointSample& s, const double* q) {
  int best = -1;
  double bd = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double* p = s.point(i);
    double d = 0.0;
    for (int k = 0; k < s.dim; ++k) d += (q[k] - p[k]) * (q[k] - p[k]);
    if (best < 0 || d < bd) {
      bd = d;
      best = int(i);
    }
  }
  return best;
}

std::vector<BruteCell2> brute_cells2(const PointSample& s) {
  const std::size_t n = s.size();
  std::vector<BruteCell2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 g{s.point(i)[0], s.point(i)[1]};
    // polygon with parallel owner tags: -1 for box walls, j for bisectors
    std::vector<Vec2> poly = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
    std::vector<int> tag = {-1, -1, -1, -1};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      Vec2 b{s.point(j)[0], s.point(j)[1]};
      double nx = 2.0 * (b.x - g.x), ny = 2.0 * (b.y - g.y);
      double c = b.norm2() - g.norm2();
      std::vector<Vec2> nv;
      std::vector<int> nt;
      const std::size_t m = poly.size();
      for (std::size_t k = 0; k < m; ++k) {
        std::size_t k2 = (k + 1) % m;
        double fp = nx * poly[k].x + ny * poly[k].y - c;
        double fq = nx * poly[k2].x + ny * poly[k2].y - c;
        if (fp <= 0.0) {
          nv.push_back(poly[k]);
          nt.push_back(tag[k]);
          if (fq > 0.0) {
            double t = fp / (fp - fq);
            nv.push_back({poly[k].x + t * (poly[k2].x - poly[k].x),
                          poly[k].y + t * (poly[k2].y - poly[k].y)});
            nt.push_back(int(j));
          }
        } else if (fq <= 0.0) {
          double t = fp / (fp - fq);
          nv.push_back({poly[k].x + t * (poly[k2].x - poly[k].x),
                        poly[k].y + t * (poly[k2].y - poly[k].y)});
          nt.push_back(tag[k]);
        }
      }
      std::vector<Vec2> cv;
      std::vector<int> ct;
      for (std::size_t k = 0; k < nv.size(); ++k) {
        std::size_t k2 = (k + 1) % nv.size();
        if (nv[k] == nv[k2]) continue;
        cv.push_back(nv[k]);
        ct.push_back(nt[k]);
      }
      poly = std::move(cv);
      tag = std::move(ct);
    }
    BruteCell2& cell = out[i];
    cell.poly = poly;
    double a = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      std::size_t k2 = (k + 1) % poly.size();
      a += poly[k].x * poly[k2].y - poly[k2].x * poly[k].y;
      if (tag[k] >= 0) {
        double len = std::sqrt(dist2(poly[k], poly[k2]));
        if (len > 0.0) cell.facets.push_back({tag[k], len});
      }
    }
    cell.area = 0.5 * std::fabs(a);
    std::sort(cell.facets.begin(), cell.facets.end());
  }
  return out;
}

std::vector<double> raster_cell_areas(const PointSample& s, int grid) {
  std::vector<double> area(s.size(), 0.0);
  const double px = 1.0 / grid;
  const double pa = px * px;
  for (int iy = 0; iy < grid; ++iy)
    for (int ix = 0; ix < grid; ++ix) {
      double q[2] = {-0.5 + (ix + 0.5) * px, -0.5 + (iy + 0.5) * px};
      area[std::size_t(nearest_linear(s, q))] += pa;
    }
  return area;
}

std::vector<char> raster_membership(
    const std::function<bool(const double*)>& contains, int grid) {
  std::vector<char> out(std::size_t(grid) * grid);
  const double px = 1.0 / grid;
  for (int iy = 0; iy < grid; ++iy)
    for (int ix = 0; ix < grid; ++ix) {
      double q[2] = {-0.5 + (ix + 0.5) * px, -0.5 + (iy + 0.5) * px};
      out[std::size_t(iy) * grid + ix] = contains(q) ? 1 : 0;
    }
  return out;
}

std::vector<char> raster_pv_membership(const PointSample& s,
                                       const std::vector<char>& inside_cells,
                                       int grid) {
  std::vector<char> out(std::size_t(grid) * grid);
  const double px = 1.0 / grid;
  for (int iy = 0; iy < grid; ++iy)
    for (int ix = 0; ix < grid; ++ix) {
      double q[2] = {-0.5 + (ix + 0.5) * px, -0.5 + (iy + 0.5) * px};
      out[std::size_t(iy) * grid + ix] =
          inside_cells[std::size_t(nearest_linear(s, q))];
    }
  return out;
}

int circumcenter_vertex_count2(const PointSample& s) {
  const int n = int(s.size());
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Vec2 a{s.point(i)[0], s.point(i)[1]};
        Vec2 b{s.point(j)[0], s.point(j)[1]};
        Vec2 c{s.point(k)[0], s.point(k)[1]};
        int orient = geom::orient2d_sos(a, b, c, i, j, k);
        bool empty = true;
        for (int l = 0; l < n && empty; ++l) {
          if (l == i || l == j || l == k) continue;
          Vec2 d{s.point(l)[0], s.point(l)[1]};
          int sgn = geom::incircle_sos(a, b, c, d, i, j, k, l);
          if (sgn * orient > 0) empty = false;  // d strictly inside
        }
        if (!empty) continue;
        double den = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) +
                            c.x * (a.y - b.y));
        if (den == 0.0) continue;  // collinear: no finite circumcenter
        double ux = (a.norm2() * (b.y - c.y) + b.norm2() * (c.y - a.y) +
                     c.norm2() * (a.y - b.y)) /
                    den;
        double uy = (a.norm2() * (c.x - b.x) + b.norm2() * (a.x - c.x) +
                     c.norm2() * (b.x - a.x)) /
                    den;
        if (ux > -0.5 && ux < 0.5 && uy > -0.5 && uy < 0.5) ++count;
      }
  return count;
}

int maximal_points_brute(const PointSample& s) {
  const int n = int(s.size());
  const int d = s.dim;
  int count = 0;
  for (int i = 0; i < n; ++i) {
    bool dominated = false;
    for (int j = 0; j < n && !dominated; ++j) {
      if (j == i) continue;
      bool geq = true, strict = false;
      for (int k = 0; k < d; ++k) {
        if (s.point(j)[k] < s.point(i)[k]) geq = false;
        if (s.point(j)[k] > s.point(i)[k]) strict = true;
      }
      dominated = geq && strict;
    }
    if (!dominated) ++count;
  }
  return count;
}

namespace {

// signed area contribution of the wedge (c, p, q) clipped to the disk
double wedge_area(Vec2 c, double r, Vec2 p, Vec2 q) {
  Vec2 u = p - c, v = q - c;
  auto tri = [](Vec2 a, Vec2 b) { return 0.5 * (a.x * b.y - a.y * b.x); };
  auto sector = [&](Vec2 a, Vec2 b) {
    double ang = std::atan2(a.x * b.y - a.y * b.x, a.dot(b));
    return 0.5 * r * r * ang;
  };
  double ru = u.norm(), rv = v.norm();
  bool pin = ru <= r, qin = rv <= r;
  if (pin && qin) return tri(u, v);
  Vec2 w = v - u;
  double A = w.norm2();
  double B = 2.0 * u.dot(w);
  double C = u.norm2() - r * r;
  double disc = B * B - 4 * A * C;
  if (disc <= 0.0 || A == 0.0) return sector(u, v);
  double sq = std::sqrt(disc);
  double t0 = (-B - sq) / (2 * A), t1 = (-B + sq) / (2 * A);
  if (pin && !qin) {
    Vec2 m = u + w * std::clamp(t1, 0.0, 1.0);
    return tri(u, m) + sector(m, v);
  }
  if (!pin && qin) {
    Vec2 m = u + w * std::clamp(t0, 0.0, 1.0);
    return sector(u, m) + tri(m, v);
  }
  if (t0 > 0.0 && t1 < 1.0 && t0 < t1) {
    Vec2 m0 = u + w * t0, m1 = u + w * t1;
    return sector(u, m0) + tri(m0, m1) + sector(m1, v);
  }
  return sector(u, v);
}

}  // namespace

double disk_poly_area(Vec2 c, double r, const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k)
    a += wedge_area(c, r, poly[k], poly[(k + 1) % poly.size()]);
  return std::fabs(a);
}

}  // namespace pvlab::oracle
