// SPDX-License-Identifier: Apache-2.0
#include "pvlab/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pvlab/errors.hpp"

namespace pvlab {

using std::numbers::pi;

double BoundaryPatch::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

namespace {

double cube_margin(int d, const double* lo, const double* hi) {
  double m = std::numeric_limits<double>::max();
  for (int k = 0; k < d; ++k) {
    m = std::min(m, lo[k] + 0.5);
    m = std::min(m, 0.5 - hi[k]);
  }
  return m;
}

// ----------------------------------------------------------------- ball

class BallShape final : public Shape {
 public:
  BallShape(int d, std::vector<double> c, double r)
      : Shape(d), c_(std::move(c)), r_(r) {
    if (r <= 0.0) throw config_error("ball: radius must be positive");
    if (int(c_.size()) != d) throw config_error("ball: center dim mismatch");
  }

  bool contains(const double* x) const override {
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) s += (x[k] - c_[k]) * (x[k] - c_[k]);
    return s <= r_ * r_;
  }
  double signed_distance(const double* x) const override {
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) s += (x[k] - c_[k]) * (x[k] - c_[k]);
    return std::sqrt(s) - r_;
  }
  double volume() const override {
    return dim_ == 2 ? pi * r_ * r_ : 4.0 / 3.0 * pi * r_ * r_ * r_;
  }
  double surface_content() const override {
    return dim_ == 2 ? 2.0 * pi * r_ : 4.0 * pi * r_ * r_;
  }
  double margin() const override {
    std::vector<double> lo(dim_), hi(dim_);
    for (int k = 0; k < dim_; ++k) {
      lo[k] = c_[k] - r_;
      hi[k] = c_[k] + r_;
    }
    return cube_margin(dim_, lo.data(), hi.data());
  }

  BoundaryPatch boundary_patch(const PatchSpec& spec,
                               double tol) const override {
    BoundaryPatch p;
    p.dim = dim_;
    if (dim_ == 2) {
      double t0 = 0.0, t1 = 2.0 * pi;
      if (spec.kind == PatchSpec::Kind::angular_window) {
        t0 = spec.a;
        t1 = spec.b;
        if (!(t1 > t0)) throw std::invalid_argument("ball patch: empty window");
      }
      // chord sagitta r(1 - cos(dt/2)) <= tol
      double dt_max = 2.0 * std::acos(std::clamp(1.0 - tol / r_, -1.0, 1.0));
      if (dt_max <= 0.0) dt_max = 1e-4;
      int n = std::max(8, int(std::ceil((t1 - t0) / dt_max)));
      double dt = (t1 - t0) / n;
      for (int i = 0; i < n; ++i) {
        double th = t0 + (i + 0.5) * dt;
        p.nodes.push_back(c_[0] + r_ * std::cos(th));
        p.nodes.push_back(c_[1] + r_ * std::sin(th));
        p.weights.push_back(r_ * dt);
      }
      p.chord_tolerance = r_ * (1.0 - std::cos(dt / 2));
      p.max_spacing = r_ * dt;
      p.closed = spec.kind == PatchSpec::Kind::whole;
      if (p.closed) {
        p.curve = BoundaryPatch::Curve::circle2;
        p.circle_center = {c_[0], c_[1]};
        p.circle_r = r_;
        p.theta0 = t0;
        p.theta1 = t1;
      } else {
        // windowed arc as fine chords for exact-chord confirmation
        p.curve = BoundaryPatch::Curve::polyline2;
        for (int i = 0; i <= n; ++i) {
          double th = t0 + i * dt;
          p.polyline.push_back(
              {c_[0] + r_ * std::cos(th), c_[1] + r_ * std::sin(th)});
        }
      }
      return p;
    }
    // d = 3: latitude bands with exact zonal areas
    if (spec.kind != PatchSpec::Kind::whole)
      throw std::invalid_argument("ball patch: only whole boundary in d=3");
    double dt_max = std::sqrt(8.0 * tol / r_);
    int nb = std::max(8, int(std::ceil(pi / std::max(dt_max, 1e-4))));
    for (int ib = 0; ib < nb; ++ib) {
      double phi0 = ib * pi / nb, phi1 = (ib + 1) * pi / nb;
      double phim = 0.5 * (phi0 + phi1);
      double band_area = 2.0 * pi * r_ * r_ * (std::cos(phi0) - std::cos(phi1));
      int nl = std::max(4, int(std::ceil(2.0 * pi * std::sin(phim) * nb / pi)));
      for (int il = 0; il < nl; ++il) {
        double th = (il + 0.5) * 2.0 * pi / nl;
        p.nodes.push_back(c_[0] + r_ * std::sin(phim) * std::cos(th));
        p.nodes.push_back(c_[1] + r_ * std::sin(phim) * std::sin(th));
        p.nodes.push_back(c_[2] + r_ * std::cos(phim));
        p.weights.push_back(band_area / nl);
      }
      p.max_spacing = std::max(p.max_spacing, r_ * pi / nb);
    }
    p.chord_tolerance = r_ * (pi / nb) * (pi / nb) / 8.0;
    return p;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "ball r=" << r_ << " c=(";
    for (int k = 0; k < dim_; ++k) os << (k ? "," : "") << c_[k];
    os << ")";
    return os.str();
  }

  std::vector<double> c_;
  double r_;
};

// ------------------------------------------------------------------ box

class BoxShape final : public Shape {
 public:
  BoxShape(int d, std::vector<double> lo, std::vector<double> hi)
      : Shape(d), lo_(std::move(lo)), hi_(std::move(hi)) {
    for (int k = 0; k < d; ++k)
      if (!(hi_[k] > lo_[k])) throw config_error("box: hi must exceed lo");
  }

  bool contains(const double* x) const override {
    for (int k = 0; k < dim_; ++k)
      if (x[k] < lo_[k] || x[k] > hi_[k]) return false;
    return true;
  }
  double signed_distance(const double* x) const override {
    double out2 = 0.0, inn = std::numeric_limits<double>::max();
    bool inside = true;
    for (int k = 0; k < dim_; ++k) {
      double below = lo_[k] - x[k], above = x[k] - hi_[k];
      double d = std::max(below, above);
      if (d > 0.0) {
        inside = false;
        out2 += d * d;
      } else {
        inn = std::min(inn, -d);
      }
    }
    return inside ? -inn : std::sqrt(out2);
  }
  double volume() const override {
    double v = 1.0;
    for (int k = 0; k < dim_; ++k) v *= hi_[k] - lo_[k];
    return v;
  }
  double surface_content() const override {
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
      double f = 1.0;
      for (int j = 0; j < dim_; ++j)
        if (j != k) f *= hi_[j] - lo_[j];
      s += 2.0 * f;
    }
    return s;
  }
  double margin() const override {
    return cube_margin(dim_, lo_.data(), hi_.data());
  }

  BoundaryPatch boundary_patch(const PatchSpec& spec,
                               double tol) const override {
    if (dim_ != 2)
      throw std::invalid_argument("box patch: implemented for d=2");
    BoundaryPatch p;
    p.dim = dim_;
    p.chord_tolerance = 0.0;  // flat pieces are represented exactly
    Vec2 corners[4] = {{lo_[0], lo_[1]},
                       {hi_[0], lo_[1]},
                       {hi_[0], hi_[1]},
                       {lo_[0], hi_[1]}};
    int s0 = 0, s1 = 4;
    if (spec.kind == PatchSpec::Kind::side) {
      if (spec.side < 0 || spec.side > 3)
        throw std::invalid_argument("box patch: side must be 0..3");
      s0 = spec.side;
      s1 = spec.side + 1;
    }
    p.curve = BoundaryPatch::Curve::polyline2;
    p.closed = spec.kind == PatchSpec::Kind::whole;
    for (int s = s0; s < s1; ++s) {
      Vec2 a = corners[s % 4], b = corners[(s + 1) % 4];
      p.polyline.push_back(a);
      double len = std::sqrt(dist2(a, b));
      int n = std::max(2, int(std::ceil(len / std::max(tol * 64, 1e-4))));
      for (int i = 0; i < n; ++i) {
        double t = (i + 0.5) / n;
        p.nodes.push_back(a.x + t * (b.x - a.x));
        p.nodes.push_back(a.y + t * (b.y - a.y));
        p.weights.push_back(len / n);
      }
      p.max_spacing = std::max(p.max_spacing, len / n);
      if (s + 1 == s1 && !p.closed) p.polyline.push_back(b);
    }
    return p;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "box";
    for (int k = 0; k < dim_; ++k) os << " [" << lo_[k] << "," << hi_[k] << "]";
    return os.str();
  }

  std::vector<double> lo_, hi_;
};

// ----------------------------------------------------------------- blob

class Blob2Shape final : public Shape {
 public:
  Blob2Shape(std::vector<double> c, double r0, std::vector<BlobHarmonic> hs)
      : Shape(2), c_(std::move(c)), r0_(r0), hs_(std::move(hs)) {
    double amp = 0.0, damp = 0.0;
    for (const auto& h : hs_) {
      amp += std::fabs(h.amp);
      damp += std::fabs(h.amp) * h.k;
    }
    rho_min_ = r0_ - amp;
    rho_max_ = r0_ + amp;
    if (rho_min_ <= 0.0)
      throw config_error("blob: harmonics too large, rho must stay positive");
    lip_scale_ = std::sqrt(1.0 + (damp / rho_min_) * (damp / rho_min_));
  }

  double rho(double th) const {
    double r = r0_;
    for (const auto& h : hs_) r += h.amp * std::cos(h.k * th + h.phase);
    return r;
  }
  double drho(double th) const {
    double r = 0.0;
    for (const auto& h : hs_) r -= h.amp * h.k * std::sin(h.k * th + h.phase);
    return r;
  }

  bool contains(const double* x) const override {
    double dx = x[0] - c_[0], dy = x[1] - c_[1];
    double th = std::atan2(dy, dx);
    double rr = rho(th);
    return dx * dx + dy * dy <= rr * rr;
  }
  double signed_distance(const double* x) const override {
    double dx = x[0] - c_[0], dy = x[1] - c_[1];
    double th = std::atan2(dy, dx);
    // (r - rho)/lip: exact sign, conservative magnitude
    return (std::sqrt(dx * dx + dy * dy) - rho(th)) / lip_scale_;
  }
  double volume() const override {
    // (1/2) integral rho^2; cross terms vanish over full turns
    double v = pi * r0_ * r0_;
    for (const auto& h : hs_) v += 0.5 * pi * h.amp * h.amp;
    return v;
  }
  double surface_content() const override {
    int n = 1 << 12;
    double prev = arclength(0.0, 2.0 * pi, n);
    for (int it = 0; it < 8; ++it) {
      n *= 2;
      double cur = arclength(0.0, 2.0 * pi, n);
      if (std::fabs(cur - prev) <= 1e-12 * std::fabs(cur)) return cur;
      prev = cur;
    }
    return prev;
  }
  double margin() const override {
    return std::min(0.5 - std::fabs(c_[0]), 0.5 - std::fabs(c_[1])) - rho_max_;
  }

  double arclength(double t0, double t1, int n) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double th = t0 + (i + 0.5) * (t1 - t0) / n;
      double r = rho(th), dr = drho(th);
      s += std::sqrt(r * r + dr * dr);
    }
    return s * (t1 - t0) / n;
  }

  BoundaryPatch boundary_patch(const PatchSpec& spec,
                               double tol) const override {
    double t0 = 0.0, t1 = 2.0 * pi;
    if (spec.kind == PatchSpec::Kind::angular_window) {
      t0 = spec.a;
      t1 = spec.b;
      if (!(t1 > t0)) throw std::invalid_argument("blob patch: empty window");
    }
    int n = 256;
    double prev = arclength(t0, t1, n);
    for (int it = 0; it < 14; ++it) {
      int n2 = n * 2;
      double cur = arclength(t0, t1, n2);
      double sag = rho_max_ * std::pow((t1 - t0) / n2, 2.0);
      bool ok = std::fabs(cur - prev) <= 0.5 * tol * std::fabs(cur) &&
                sag <= tol;
      prev = cur;
      n = n2;
      if (ok) break;
    }
    BoundaryPatch p;
    p.dim = 2;
    p.curve = BoundaryPatch::Curve::polyline2;
    p.closed = spec.kind == PatchSpec::Kind::whole;
    double dt = (t1 - t0) / n;
    for (int i = 0; i < n; ++i) {
      double th = t0 + (i + 0.5) * dt;
      double r = rho(th), dr = drho(th);
      p.nodes.push_back(c_[0] + r * std::cos(th));
      p.nodes.push_back(c_[1] + r * std::sin(th));
      double w = std::sqrt(r * r + dr * dr) * dt;
      p.weights.push_back(w);
      p.max_spacing = std::max(p.max_spacing, w);
    }
    for (int i = 0; i <= n; ++i) {
      double th = t0 + i * dt;
      double r = rho(th);
      p.polyline.push_back(
          {c_[0] + r * std::cos(th), c_[1] + r * std::sin(th)});
    }
    p.chord_tolerance = rho_max_ * dt * dt / 8.0;
    return p;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "blob r0=" << r0_ << " harmonics=" << hs_.size();
    return os.str();
  }

  std::vector<double> c_;
  double r0_, rho_min_, rho_max_, lip_scale_;
  std::vector<BlobHarmonic> hs_;
};

// ----------------------------------------------------------- ball union

class BallUnionShape final : public Shape {
 public:
  BallUnionShape(int d, std::vector<std::vector<double>> cs,
                 std::vector<double> rs)
      : Shape(d), cs_(std::move(cs)), rs_(std::move(rs)) {
    const std::size_t n = rs_.size();
    if (n == 0) throw config_error("ball_union: needs at least one ball");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double d2 = 0.0;
        for (int k = 0; k < dim_; ++k)
          d2 += (cs_[i][k] - cs_[j][k]) * (cs_[i][k] - cs_[j][k]);
        double dd = std::sqrt(d2);
        double tol = 1e-9 * (rs_[i] + rs_[j]);
        if (std::fabs(dd - (rs_[i] + rs_[j])) < tol ||
            std::fabs(dd - std::fabs(rs_[i] - rs_[j])) < tol)
          throw config_error("ball_union: osculating pair rejected");
        if (dd + rs_[j] <= rs_[i] || dd + rs_[i] <= rs_[j])
          throw config_error("ball_union: nested balls rejected");
      }
    if (dim_ == 2) {
      // no triple overlaps: check lens midpoints against third balls
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          double dd = std::hypot(cs_[i][0] - cs_[j][0], cs_[i][1] - cs_[j][1]);
          if (dd >= rs_[i] + rs_[j]) continue;
          double mx = 0.5 * (cs_[i][0] + cs_[j][0]);
          double my = 0.5 * (cs_[i][1] + cs_[j][1]);
          for (std::size_t k = 0; k < n; ++k) {
            if (k == i || k == j) continue;
            if (std::hypot(mx - cs_[k][0], my - cs_[k][1]) < rs_[k])
              throw config_error("ball_union: triple overlap rejected");
          }
        }
    }
  }

  bool contains(const double* x) const override {
    for (std::size_t i = 0; i < rs_.size(); ++i) {
      double s = 0.0;
      for (int k = 0; k < dim_; ++k)
        s += (x[k] - cs_[i][k]) * (x[k] - cs_[i][k]);
      if (s <= rs_[i] * rs_[i]) return true;
    }
    return false;
  }
  double signed_distance(const double* x) const override {
    double best = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < rs_.size(); ++i) {
      double s = 0.0;
      for (int k = 0; k < dim_; ++k)
        s += (x[k] - cs_[i][k]) * (x[k] - cs_[i][k]);
      best = std::min(best, std::sqrt(s) - rs_[i]);
    }
    return best;  // exact outside, conservative depth inside
  }
  double volume() const override {
    if (dim_ != 2)
      throw std::logic_error("ball_union: volume implemented for d=2");
    double v = 0.0;
    for (double r : rs_) v += pi * r * r;
    for (std::size_t i = 0; i < rs_.size(); ++i)
      for (std::size_t j = i + 1; j < rs_.size(); ++j) v -= lens_area(i, j);
    return v;
  }
  double surface_content() const override {
    if (dim_ != 2)
      throw std::logic_error("ball_union: surface implemented for d=2");
    double s = 0.0;
    for (std::size_t i = 0; i < rs_.size(); ++i)
      for (auto [a, b] : exposed_arcs(i)) s += rs_[i] * (b - a);
    return s;
  }
  double margin() const override {
    double m = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < rs_.size(); ++i) {
      std::vector<double> lo(dim_), hi(dim_);
      for (int k = 0; k < dim_; ++k) {
        lo[k] = cs_[i][k] - rs_[i];
        hi[k] = cs_[i][k] + rs_[i];
      }
      m = std::min(m, cube_margin(dim_, lo.data(), hi.data()));
    }
    return m;
  }

  // angular intervals of circle i not covered by the other balls (d=2)
  std::vector<std::pair<double, double>> exposed_arcs(std::size_t i) const {
    std::vector<std::pair<double, double>> segs;
    for (std::size_t j = 0; j < rs_.size(); ++j) {
      if (j == i) continue;
      double dx = cs_[j][0] - cs_[i][0], dy = cs_[j][1] - cs_[i][1];
      double dd = std::hypot(dx, dy);
      if (dd >= rs_[i] + rs_[j]) continue;
      double cosw = (dd * dd + rs_[i] * rs_[i] - rs_[j] * rs_[j]) /
                    (2.0 * dd * rs_[i]);
      double w = std::acos(std::clamp(cosw, -1.0, 1.0));
      double mid = std::atan2(dy, dx);
      double a = mid - w, b = mid + w;
      while (a < 0) {
        a += 2 * pi;
        b += 2 * pi;
      }
      if (b <= 2 * pi) {
        segs.push_back({a, b});
      } else {
        segs.push_back({a, 2 * pi});
        segs.push_back({0.0, b - 2 * pi});
      }
    }
    std::sort(segs.begin(), segs.end());
    std::vector<std::pair<double, double>> merged;
    for (auto s : segs) {
      if (!merged.empty() && s.first <= merged.back().second)
        merged.back().second = std::max(merged.back().second, s.second);
      else
        merged.push_back(s);
    }
    std::vector<std::pair<double, double>> exposed;
    double cur = 0.0;
    for (auto [a, b] : merged) {
      if (a > cur) exposed.push_back({cur, a});
      cur = std::max(cur, b);
    }
    if (cur < 2 * pi) exposed.push_back({cur, 2 * pi});
    return exposed;
  }

  double lens_area(std::size_t i, std::size_t j) const {
    double dd = std::hypot(cs_[j][0] - cs_[i][0], cs_[j][1] - cs_[i][1]);
    double r = rs_[i], R = rs_[j];
    if (dd >= r + R) return 0.0;
    double a1 = std::acos(
        std::clamp((dd * dd + r * r - R * R) / (2 * dd * r), -1.0, 1.0));
    double a2 = std::acos(
        std::clamp((dd * dd + R * R - r * r) / (2 * dd * R), -1.0, 1.0));
    return r * r * (a1 - std::sin(2 * a1) / 2) +
           R * R * (a2 - std::sin(2 * a2) / 2);
  }

  BoundaryPatch boundary_patch(const PatchSpec& spec,
                               double tol) const override {
    if (dim_ != 2 || spec.kind != PatchSpec::Kind::whole)
      throw std::invalid_argument("ball_union patch: whole boundary, d=2");
    BoundaryPatch p;
    p.dim = 2;
    p.curve = BoundaryPatch::Curve::polyline2;
    for (std::size_t i = 0; i < rs_.size(); ++i) {
      for (auto [a, b] : exposed_arcs(i)) {
        double dt_max =
            2.0 * std::acos(std::clamp(1.0 - tol / rs_[i], -1.0, 1.0));
        int n = std::max(4, int(std::ceil((b - a) / std::max(dt_max, 1e-4))));
        double dt = (b - a) / n;
        for (int q = 0; q < n; ++q) {
          double th = a + (q + 0.5) * dt;
          p.nodes.push_back(cs_[i][0] + rs_[i] * std::cos(th));
          p.nodes.push_back(cs_[i][1] + rs_[i] * std::sin(th));
          p.weights.push_back(rs_[i] * dt);
          p.max_spacing = std::max(p.max_spacing, rs_[i] * dt);
        }
        for (int q = 0; q <= n; ++q) {
          double th = a + q * dt;
          p.polyline.push_back({cs_[i][0] + rs_[i] * std::cos(th),
                                cs_[i][1] + rs_[i] * std::sin(th)});
        }
        p.chord_tolerance =
            std::max(p.chord_tolerance, rs_[i] * (1.0 - std::cos(dt / 2)));
      }
    }
    return p;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "ball_union n=" << rs_.size();
    return os.str();
  }

  std::vector<std::vector<double>> cs_;
  std::vector<double> rs_;
};

// ---------------------------------------------------------- graph region

class GraphRegion2Shape final : public Shape {
 public:
  GraphRegion2Shape(double ox, double oy, double w, double h0, double s,
                    double q)
      : Shape(2), ox_(ox), oy_(oy), w_(w), h0_(h0), s_(s), q_(q) {
    if (!(w > 0) || !(h0 > 0) || !(s > 0) || q < 0)
      throw config_error("graph_region: need w,h0,s > 0 and q >= 0");
    if (f(w_) <= 0) throw config_error("graph_region: f must stay positive");
  }

  double f(double u) const { return h0_ - s_ * u - q_ * u * u; }

  bool contains(const double* x) const override {
    double u = x[0] - ox_, v = x[1] - oy_;
    return u >= 0.0 && u <= w_ && v >= 0.0 && v <= f(u);
  }
  double signed_distance(const double* x) const override {
    double u = x[0] - ox_, v = x[1] - oy_;
    auto seg_dist = [](Vec2 p, Vec2 a, Vec2 b) {
      Vec2 ab = b - a;
      double t = std::clamp((p - a).dot(ab) / ab.norm2(), 0.0, 1.0);
      return std::sqrt(dist2(p, a + ab * t));
    };
    Vec2 p{u, v};
    double d = seg_dist(p, {0, 0}, {w_, 0});
    d = std::min(d, seg_dist(p, {0, 0}, {0, f(0.0)}));
    d = std::min(d, seg_dist(p, {w_, 0}, {w_, f(w_)}));
    const int n = 64;
    for (int i = 0; i < n; ++i) {
      double u0 = w_ * i / n, u1 = w_ * (i + 1) / n;
      d = std::min(d, seg_dist(p, {u0, f(u0)}, {u1, f(u1)}));
    }
    return contains(x) ? -d : d;
  }
  double volume() const override {
    return h0_ * w_ - s_ * w_ * w_ / 2 - q_ * w_ * w_ * w_ / 3;
  }
  double surface_content() const override {
    double arc = 0.0;
    const int n = 1 << 14;
    for (int i = 0; i < n; ++i) {
      double u = w_ * (i + 0.5) / n;
      double df = -s_ - 2 * q_ * u;
      arc += std::sqrt(1 + df * df) * (w_ / n);
    }
    return w_ + f(0.0) + f(w_) + arc;
  }
  double margin() const override {
    double lo[2] = {ox_, oy_}, hi[2] = {ox_ + w_, oy_ + f(0.0)};
    return cube_margin(2, lo, hi);
  }
  BoundaryPatch boundary_patch(const PatchSpec&, double tol) const override {
    BoundaryPatch p;
    p.dim = 2;
    p.curve = BoundaryPatch::Curve::polyline2;
    p.closed = true;
    int n = std::max(64, int(std::ceil(w_ / std::max(std::sqrt(tol), 1e-5))));
    std::vector<Vec2> ring;
    ring.push_back({0, 0});
    ring.push_back({w_, 0});
    for (int i = 0; i <= n; ++i) {
      double u = w_ * (n - i) / double(n);
      ring.push_back({u, f(u)});
    }
    for (std::size_t k = 0; k < ring.size(); ++k) {
      Vec2 a = ring[k], b = ring[(k + 1) % ring.size()];
      double len = std::sqrt(dist2(a, b));
      if (len == 0) continue;
      int m = std::max(1, int(std::ceil(len / std::max(tol * 64, 1e-4))));
      for (int i = 0; i < m; ++i) {
        double t = (i + 0.5) / m;
        p.nodes.push_back(ox_ + a.x + t * (b.x - a.x));
        p.nodes.push_back(oy_ + a.y + t * (b.y - a.y));
        p.weights.push_back(len / m);
        p.max_spacing = std::max(p.max_spacing, len / m);
      }
      p.polyline.push_back({ox_ + a.x, oy_ + a.y});
    }
    p.chord_tolerance = 2 * q_ * (w_ / n) * (w_ / n);
    return p;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "graph_region w=" << w_ << " h0=" << h0_ << " s=" << s_
       << " q=" << q_;
    return os.str();
  }

  double ox_, oy_, w_, h0_, s_, q_;
};

// -------------------------------------------------------- polytopal union

class PolytopalUnionShape final : public Shape {
 public:
  PolytopalUnionShape(std::shared_ptr<const VoronoiDiagram> dia,
                      std::vector<char> inside)
      : Shape(dia->dim()), dia_(std::move(dia)), inside_(std::move(inside)) {
    if (inside_.size() != dia_->n_cells())
      throw std::invalid_argument("polytopal_union: flag size mismatch");
    for (const Face& f : dia_->faces()) {
      if (f.dim != dim_ - 1) continue;
      bool bdry = false;
      if (!f.on_clip_boundary && f.n_gens == 2)
        bdry = inside_[f.gens[0].gen] != inside_[f.gens[1].gen];
      else if (f.on_clip_boundary && f.n_gens >= 1)
        bdry = inside_[f.gens[0].gen] != 0;
      if (!bdry) continue;
      if (dim_ == 2) {
        boundary_segs_.push_back(
            {Vec2{dia_->vertex(f.sub0[0])[0], dia_->vertex(f.sub0[0])[1]},
             Vec2{dia_->vertex(f.sub0[1])[0], dia_->vertex(f.sub0[1])[1]}});
      } else {
        for (std::size_t k = 1; k + 1 < f.sub0.size(); ++k)
          boundary_tris_.push_back(
              {to3(f.sub0[0]), to3(f.sub0[k]), to3(f.sub0[k + 1])});
      }
    }
  }

  Vec3 to3(int vid) const {
    const auto& c = dia_->vertex(vid);
    return {c[0], c[1], c[2]};
  }

  bool contains(const double* x) const override {
    if (!dia_->domain().contains(x)) return false;
    return inside_[std::size_t(dia_->locate(x))] != 0;
  }
  double signed_distance(const double* x) const override {
    double best = std::numeric_limits<double>::max();
    if (dim_ == 2) {
      Vec2 p{x[0], x[1]};
      for (const auto& s : boundary_segs_) {
        Vec2 ab = s[1] - s[0];
        double nn = ab.norm2();
        double t = nn > 0 ? std::clamp((p - s[0]).dot(ab) / nn, 0.0, 1.0) : 0.0;
        best = std::min(best, dist2(p, s[0] + ab * t));
      }
    } else {
      Vec3 p{x[0], x[1], x[2]};
      for (const auto& t : boundary_tris_)
        best = std::min(best, tri_dist2(p, t[0], t[1], t[2]));
    }
    double d = best == std::numeric_limits<double>::max()
                   ? 1e30
                   : std::sqrt(best);
    return contains(x) ? -d : d;
  }
  double volume() const override {
    double v = 0.0;
    for (std::size_t i = 0; i < dia_->n_cells(); ++i)
      if (inside_[i]) v += dia_->cell(int(i)).volume;
    return v;
  }
  double surface_content() const override {
    double s = 0.0;
    for (const Face& f : dia_->faces())
      if (f.dim == dim_ - 1 && !f.on_clip_boundary && f.n_gens == 2 &&
          inside_[f.gens[0].gen] != inside_[f.gens[1].gen])
        s += f.measure;
    return s;
  }
  double margin() const override { return 0.0; }
  BoundaryPatch boundary_patch(const PatchSpec&, double) const override {
    throw std::logic_error("polytopal_union: no boundary quadrature");
  }
  std::string describe() const override {
    std::ostringstream os;
    long long k = 0;
    for (char c : inside_) k += c != 0;
    os << "polytopal_union cells=" << k << "/" << inside_.size();
    return os.str();
  }

  static double tri_dist2(Vec3 p, Vec3 a, Vec3 b, Vec3 c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return dist2(p, a);
    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return dist2(p, b);
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) {
      double t = d1 / (d1 - d3);
      return dist2(p, a + ab * t);
    }
    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return dist2(p, c);
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) {
      double t = d2 / (d2 - d6);
      return dist2(p, a + ac * t);
    }
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
      double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
      return dist2(p, b + (c - b) * t);
    }
    double denom = 1.0 / (va + vb + vc);
    return dist2(p, a + ab * (vb * denom) + ac * (vc * denom));
  }

  std::shared_ptr<const VoronoiDiagram> dia_;
  std::vector<char> inside_;
  std::vector<std::array<Vec2, 2>> boundary_segs_;
  std::vector<std::array<Vec3, 3>> boundary_tris_;
};

}  // namespace

std::shared_ptr<Shape> make_ball(int d, std::vector<double> center, double r) {
  return std::make_shared<BallShape>(d, std::move(center), r);
}
std::shared_ptr<Shape> make_box(int d, std::vector<double> lo,
                                std::vector<double> hi) {
  return std::make_shared<BoxShape>(d, std::move(lo), std::move(hi));
}
std::shared_ptr<Shape> make_blob2(std::vector<double> center, double r0,
                                  std::vector<BlobHarmonic> harmonics) {
  return std::make_shared<Blob2Shape>(std::move(center), r0,
                                      std::move(harmonics));
}
std::shared_ptr<Shape> make_ball_union(
    int d, std::vector<std::vector<double>> centers, std::vector<double> radii) {
  return std::make_shared<BallUnionShape>(d, std::move(centers),
                                          std::move(radii));
}
std::shared_ptr<Shape> make_graph_region2(double ox, double oy, double w,
                                          double h0, double s, double q) {
  return std::make_shared<GraphRegion2Shape>(ox, oy, w, h0, s, q);
}
std::shared_ptr<Shape> polytopal_union_from_cells(
    std::shared_ptr<const VoronoiDiagram> dia, std::vector<char> inside) {
  return std::make_shared<PolytopalUnionShape>(std::move(dia),
                                               std::move(inside));
}

double weighted_surface_content(const Shape& shape, const IntensityField& kappa,
                                double gamma, int power) {
  if (power != 1 && power != 2)
    throw std::invalid_argument(
        "weighted_surface_content: power must be 1 or 2");
  const double expo = 1.0 - gamma / shape.dim();
  auto eval = [&](const BoundaryPatch& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double k = kappa.eval(p.node(i));
      double base = power == 2 ? k * k : k;
      s += p.weights[i] * std::pow(base, expo);
    }
    return s;
  };
  BoundaryPatch coarse = shape.boundary_patch({}, 1e-5);
  BoundaryPatch fine = shape.boundary_patch({}, 2.5e-6);
  double a = eval(coarse), b = eval(fine);
  if (std::fabs(a - b) > 1e-3 * std::max(std::fabs(b), 1e-12))
    throw precision_error(
        "weighted_surface_content: quadrature did not converge (" +
        std::to_string(a) + " vs " + std::to_string(b) + ")");
  return b;
}

}  // namespace pvlab
