// SPDX-License-Identifier: Apache-2.0
//
// Exact geometric predicates: orientation and in-circle/in-sphere signs.
//
// Three-stage evaluation: a floating-point pass with a running forward
// error bound, an exact pass over non-overlapping floating-point
// expansions, and (for the *_sos variants) an index-ordered symbolic
// perturbation that resolves exact ties. The perturbation moves point i
// to (x + u_i, y + u_i^2[, z + u_i^4]) with u ordered so that lower
// point indices dominate; all predicates share the one perturbed point
// set, so orientation and emptiness decisions never contradict each
// other on degenerate input.
#pragma once

#include <vector>

#include "pvlab/vec.hpp"

namespace pvlab::geom {

// Signs of the usual determinants; 0 on exact degeneracy.
int sign_orient2d(Vec2 a, Vec2 b, Vec2 c);
int sign_incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
int sign_orient3d(Vec3 a, Vec3 b, Vec3 c, Vec3 d);
int sign_insphere(Vec3 a, Vec3 b, Vec3 c, Vec3 d, Vec3 e);

// Perturbed variants. Indices must be pairwise distinct, points must be
// pairwise distinct; the result is never 0.
int orient2d_sos(Vec2 a, Vec2 b, Vec2 c, int ia, int ib, int ic);
int incircle_sos(Vec2 a, Vec2 b, Vec2 c, Vec2 d, int ia, int ib, int ic,
                 int id);
int orient3d_sos(Vec3 a, Vec3 b, Vec3 c, Vec3 d, int ia, int ib, int ic,
                 int id);
int insphere_sos(Vec3 a, Vec3 b, Vec3 c, Vec3 d, Vec3 e, int ia, int ib,
                 int ic, int id, int ie);

// Non-overlapping expansion of doubles, components in increasing
// magnitude order, exact zeros elided. Exposed for the test oracles.
class Expansion {
 public:
  Expansion() = default;
  explicit Expansion(double v) {
    if (v != 0.0) c_.push_back(v);
  }

  static Expansion two_sum_of(double a, double b);
  static Expansion product_of(double a, double b);

  Expansion operator+(const Expansion& o) const;
  Expansion operator-(const Expansion& o) const;
  Expansion operator*(const Expansion& o) const;
  Expansion scaled(double b) const;
  Expansion negated() const;

  int sign() const {
    if (c_.empty()) return 0;
    return c_.back() > 0.0 ? 1 : -1;
  }
  double estimate() const;
  bool zero() const { return c_.empty(); }
  std::size_t size() const { return c_.size(); }

 private:
  std::vector<double> c_;
};

}  // namespace pvlab::geom
