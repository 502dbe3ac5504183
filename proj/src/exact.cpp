// SPDX-License-Identifier: Apache-2.0
#include "pvlab/exact.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace pvlab::geom {

namespace {

// ---------------------------------------------------------------------
// error-free transforms
// ---------------------------------------------------------------------

inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  double bv = s - a;
  double av = s - bv;
  e = (a - av) + (b - bv);
}

inline void fast_two_sum(double a, double b, double& s, double& e) {
  // requires |a| >= |b|
  s = a + b;
  e = b - (s - a);
}

inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

}  // namespace

// ---------------------------------------------------------------------
// Expansion
// ---------------------------------------------------------------------

Expansion Expansion::two_sum_of(double a, double b) {
  Expansion r;
  double s, e;
  two_sum(a, b, s, e);
  if (e != 0.0) r.c_.push_back(e);
  if (s != 0.0) r.c_.push_back(s);
  return r;
}

Expansion Expansion::product_of(double a, double b) {
  Expansion r;
  double p, e;
  two_prod(a, b, p, e);
  if (e != 0.0) r.c_.push_back(e);
  if (p != 0.0) r.c_.push_back(p);
  return r;
}

Expansion Expansion::operator+(const Expansion& o) const {
  // repeated grow_expansion; preserves the non-overlapping invariant
  Expansion r = *this;
  for (double b : o.c_) {
    std::vector<double> h;
    h.reserve(r.c_.size() + 1);
    double q = b;
    for (double comp : r.c_) {
      double s, e;
      two_sum(q, comp, s, e);
      if (e != 0.0) h.push_back(e);
      q = s;
    }
    if (q != 0.0) h.push_back(q);
    r.c_ = std::move(h);
  }
  return r;
}

Expansion Expansion::negated() const {
  Expansion r = *this;
  for (double& v : r.c_) v = -v;
  return r;
}

Expansion Expansion::operator-(const Expansion& o) const {
  return *this + o.negated();
}

Expansion Expansion::scaled(double b) const {
  Expansion r;
  if (c_.empty() || b == 0.0) return r;
  std::vector<double>& h = r.c_;
  h.reserve(2 * c_.size());
  double q, hh;
  two_prod(c_[0], b, q, hh);
  if (hh != 0.0) h.push_back(hh);
  for (std::size_t i = 1; i < c_.size(); ++i) {
    double t1, t0;
    two_prod(c_[i], b, t1, t0);
    double q2;
    two_sum(q, t0, q2, hh);
    if (hh != 0.0) h.push_back(hh);
    fast_two_sum(t1, q2, q, hh);
    if (hh != 0.0) h.push_back(hh);
  }
  if (q != 0.0) h.push_back(q);
  return r;
}

Expansion Expansion::operator*(const Expansion& o) const {
  Expansion acc;
  for (double b : o.c_) acc = acc + scaled(b);
  return acc;
}

double Expansion::estimate() const {
  double s = 0.0;
  for (double v : c_) s += v;
  return s;
}

namespace {

// ---------------------------------------------------------------------
// filtered evaluation: value plus a conservative forward error bound
// ---------------------------------------------------------------------

constexpr double kEps = DBL_EPSILON;  // 2^-52

struct Approx {
  double v = 0.0;
  double e = 0.0;

  static Approx exact(double x) { return {x, 0.0}; }
  static Approx diff(double a, double b) {
    double d = a - b;
    return {d, kEps * std::fabs(d)};
  }
  Approx operator+(Approx o) const {
    double s = v + o.v;
    return {s, e + o.e + kEps * std::fabs(s)};
  }
  Approx operator-(Approx o) const {
    double s = v - o.v;
    return {s, e + o.e + kEps * std::fabs(s)};
  }
  Approx operator*(Approx o) const {
    double p = v * o.v;
    return {p, std::fabs(v) * o.e + std::fabs(o.v) * e + e * o.e +
                   kEps * std::fabs(p)};
  }
  int sign_or(int unknown) const {
    if (v > e) return 1;
    if (-v > e) return -1;
    return unknown;
  }
};

constexpr int kUnknown = 2;

inline Approx det2(Approx a, Approx b, Approx c, Approx d) {
  return a * d - b * c;
}

Approx det3(const Approx m[3][3]) {
  return m[0][0] * det2(m[1][1], m[1][2], m[2][1], m[2][2]) -
         m[0][1] * det2(m[1][0], m[1][2], m[2][0], m[2][2]) +
         m[0][2] * det2(m[1][0], m[1][1], m[2][0], m[2][1]);
}

Approx det4(const Approx m[4][4]) {
  Approx r = Approx::exact(0.0);
  for (int i = 0; i < 4; ++i) {
    Approx minor[3][3];
    int rr = 0;
    for (int r2 = 0; r2 < 4; ++r2) {
      if (r2 == i) continue;
      int cc = 0;
      for (int c2 = 1; c2 < 4; ++c2) minor[rr][cc++] = m[r2][c2];
      ++rr;
    }
    Approx term = m[i][0] * det3(minor);
    r = (i % 2 == 0) ? r + term : r - term;
  }
  return r;
}

// ---------------------------------------------------------------------
// exact determinants of Expansion matrices (Laplace along first column)
// ---------------------------------------------------------------------

Expansion edet(const std::vector<std::vector<Expansion>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  Expansion acc;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i][0].zero()) continue;
    std::vector<std::vector<Expansion>> minor;
    minor.reserve(n - 1);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == i) continue;
      minor.emplace_back(m[r].begin() + 1, m[r].end());
    }
    Expansion term = m[i][0] * edet(minor);
    acc = (i % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

Expansion sq_norm2(Vec2 p) {
  return Expansion::product_of(p.x, p.x) + Expansion::product_of(p.y, p.y);
}

Expansion sq_norm3(Vec3 p) {
  return Expansion::product_of(p.x, p.x) + Expansion::product_of(p.y, p.y) +
         Expansion::product_of(p.z, p.z);
}

// ---------------------------------------------------------------------
// symbolic perturbation
//
// Matrix entries become univariate polynomials in the row's perturbation
// parameter. The full determinant is expanded symbolically; monomials
// are visited in dominance order (lower point index = larger parameter)
// and the first exactly nonzero coefficient decides the sign. The
// constant-column monomials have coefficient 1, so a nonzero term always
// exists and the loop terminates for distinct points.
// ---------------------------------------------------------------------

struct PolyEntry {
  // (degree, coefficient) pairs, degree 0 = unperturbed part
  std::array<std::pair<int, Expansion>, 5> t;
  int n = 0;

  void add(int deg, Expansion c) { t[n++] = {deg, std::move(c)}; }
};

int sos_sign(const std::vector<std::vector<PolyEntry>>& m,
             const std::vector<int>& idx) {
  const int n = int(m.size());
  // rank by ascending global index: rank 0 perturbs the most
  std::vector<int> rank(n);
  for (int r = 0; r < n; ++r)
    for (int j = 0; j < n; ++j)
      if (idx[j] < idx[r]) ++rank[r];

  // base-9 dominance key; max degree is 8 so digits never collide
  std::map<std::uint64_t, Expansion> terms;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  std::uint64_t pw[6] = {1, 9, 81, 729, 6561, 59049};

  do {
    int parity = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++parity;
    const int psign = (parity % 2 == 0) ? 1 : -1;

    // expand the product over rows of the chosen polynomial entries
    struct Partial {
      std::uint64_t key;
      Expansion coeff;
    };
    std::vector<Partial> acc{{0, Expansion(psign > 0 ? 1.0 : -1.0)}};
    for (int r = 0; r < n; ++r) {
      const PolyEntry& pe = m[r][perm[r]];
      std::vector<Partial> next;
      next.reserve(acc.size() * pe.n);
      for (const Partial& pa : acc)
        for (int k = 0; k < pe.n; ++k) {
          Expansion c = pa.coeff * pe.t[k].second;
          if (c.zero()) continue;
          next.push_back(
              {pa.key + std::uint64_t(pe.t[k].first) * pw[rank[r]],
               std::move(c)});
        }
      acc = std::move(next);
      if (acc.empty()) break;
    }
    for (Partial& pa : acc) {
      auto it = terms.find(pa.key);
      if (it == terms.end())
        terms.emplace(pa.key, std::move(pa.coeff));
      else
        it->second = it->second + pa.coeff;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (const auto& [key, coeff] : terms) {
    if (key == 0) continue;  // base determinant, already known to vanish
    int s = coeff.sign();
    if (s != 0) return s;
  }
  throw std::logic_error("sos_sign: fully degenerate input (duplicate points?)");
}

PolyEntry col_x(double x) {
  PolyEntry e;
  e.add(0, Expansion(x));
  e.add(1, Expansion(1.0));
  return e;
}
PolyEntry col_y(double y) {
  PolyEntry e;
  e.add(0, Expansion(y));
  e.add(2, Expansion(1.0));
  return e;
}
PolyEntry col_z(double z) {
  PolyEntry e;
  e.add(0, Expansion(z));
  e.add(4, Expansion(1.0));
  return e;
}
PolyEntry col_one() {
  PolyEntry e;
  e.add(0, Expansion(1.0));
  return e;
}
PolyEntry col_w2(Vec2 p) {
  // (x+u)^2 + (y+u^2)^2 = w + 2x u + (1+2y) u^2 + u^4
  PolyEntry e;
  e.add(0, sq_norm2(p));
  e.add(1, Expansion(2.0 * p.x));
  e.add(2, Expansion::two_sum_of(1.0, 2.0 * p.y));
  e.add(4, Expansion(1.0));
  return e;
}
PolyEntry col_w3(Vec3 p) {
  // (x+u)^2 + (y+u^2)^2 + (z+u^4)^2 = w + 2x u + (1+2y) u^2 + (1+2z) u^4 + u^8
  PolyEntry e;
  e.add(0, sq_norm3(p));
  e.add(1, Expansion(2.0 * p.x));
  e.add(2, Expansion::two_sum_of(1.0, 2.0 * p.y));
  e.add(4, Expansion::two_sum_of(1.0, 2.0 * p.z));
  e.add(8, Expansion(1.0));
  return e;
}

}  // namespace

// ---------------------------------------------------------------------
// public predicates
// ---------------------------------------------------------------------

int sign_orient2d(Vec2 a, Vec2 b, Vec2 c) {
  Approx d = det2(Approx::diff(b.x, a.x), Approx::diff(b.y, a.y),
                  Approx::diff(c.x, a.x), Approx::diff(c.y, a.y));
  int s = d.sign_or(kUnknown);
  if (s != kUnknown) return s;
  std::vector<std::vector<Expansion>> m{
      {Expansion(a.x), Expansion(a.y), Expansion(1.0)},
      {Expansion(b.x), Expansion(b.y), Expansion(1.0)},
      {Expansion(c.x), Expansion(c.y), Expansion(1.0)}};
  return edet(m).sign();
}

int sign_incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  Approx m[3][3];
  const Vec2 pts[3] = {a, b, c};
  for (int i = 0; i < 3; ++i) {
    Approx dx = Approx::diff(pts[i].x, d.x);
    Approx dy = Approx::diff(pts[i].y, d.y);
    m[i][0] = dx;
    m[i][1] = dy;
    m[i][2] = dx * dx + dy * dy;
  }
  int s = det3(m).sign_or(kUnknown);
  if (s != kUnknown) return s;
  std::vector<std::vector<Expansion>> em;
  const Vec2 all[4] = {a, b, c, d};
  for (Vec2 p : all)
    em.push_back(
        {Expansion(p.x), Expansion(p.y), sq_norm2(p), Expansion(1.0)});
  return edet(em).sign();
}

int sign_orient3d(Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
  Approx m[3][3];
  const Vec3 pts[3] = {a, b, c};
  for (int i = 0; i < 3; ++i) {
    m[i][0] = Approx::diff(pts[i].x, d.x);
    m[i][1] = Approx::diff(pts[i].y, d.y);
    m[i][2] = Approx::diff(pts[i].z, d.z);
  }
  int s = det3(m).sign_or(kUnknown);
  if (s != kUnknown) return s;
  std::vector<std::vector<Expansion>> em;
  const Vec3 all[4] = {a, b, c, d};
  for (Vec3 p : all)
    em.push_back(
        {Expansion(p.x), Expansion(p.y), Expansion(p.z), Expansion(1.0)});
  return edet(em).sign();
}

int sign_insphere(Vec3 a, Vec3 b, Vec3 c, Vec3 d, Vec3 e) {
  Approx m[4][4];
  const Vec3 pts[4] = {a, b, c, d};
  for (int i = 0; i < 4; ++i) {
    Approx dx = Approx::diff(pts[i].x, e.x);
    Approx dy = Approx::diff(pts[i].y, e.y);
    Approx dz = Approx::diff(pts[i].z, e.z);
    m[i][0] = dx;
    m[i][1] = dy;
    m[i][2] = dz;
    m[i][3] = dx * dx + dy * dy + dz * dz;
  }
  int s = det4(m).sign_or(kUnknown);
  if (s != kUnknown) return s;
  std::vector<std::vector<Expansion>> em;
  const Vec3 all[5] = {a, b, c, d, e};
  for (Vec3 p : all)
    em.push_back({Expansion(p.x), Expansion(p.y), Expansion(p.z), sq_norm3(p),
                  Expansion(1.0)});
  return edet(em).sign();
}

int orient2d_sos(Vec2 a, Vec2 b, Vec2 c, int ia, int ib, int ic) {
  int s = sign_orient2d(a, b, c);
  if (s != 0) return s;
  std::vector<std::vector<PolyEntry>> m;
  for (Vec2 p : {a, b, c}) m.push_back({col_x(p.x), col_y(p.y), col_one()});
  return sos_sign(m, {ia, ib, ic});
}

int incircle_sos(Vec2 a, Vec2 b, Vec2 c, Vec2 d, int ia, int ib, int ic,
                 int id) {
  int s = sign_incircle(a, b, c, d);
  if (s != 0) return s;
  std::vector<std::vector<PolyEntry>> m;
  for (Vec2 p : {a, b, c, d})
    m.push_back({col_x(p.x), col_y(p.y), col_w2(p), col_one()});
  return sos_sign(m, {ia, ib, ic, id});
}

int orient3d_sos(Vec3 a, Vec3 b, Vec3 c, Vec3 d, int ia, int ib, int ic,
                 int id) {
  int s = sign_orient3d(a, b, c, d);
  if (s != 0) return s;
  std::vector<std::vector<PolyEntry>> m;
  for (Vec3 p : {a, b, c, d})
    m.push_back({col_x(p.x), col_y(p.y), col_z(p.z), col_one()});
  return sos_sign(m, {ia, ib, ic, id});
}

int insphere_sos(Vec3 a, Vec3 b, Vec3 c, Vec3 d, Vec3 e, int ia, int ib,
                 int ic, int id, int ie) {
  int s = sign_insphere(a, b, c, d, e);
  if (s != 0) return s;
  std::vector<std::vector<PolyEntry>> m;
  for (Vec3 p : {a, b, c, d, e})
    m.push_back({col_x(p.x), col_y(p.y), col_z(p.z), col_w3(p), col_one()});
  return sos_sign(m, {ia, ib, ic, id, ie});
}

}  // namespace pvlab::geom
