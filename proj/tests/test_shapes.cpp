// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pvlab/errors.hpp"
#include "pvlab/oracles.hpp"
#include "pvlab/rng.hpp"
#include "pvlab/shapes.hpp"

using namespace pvlab;
using std::numbers::pi;

TEST_CASE("ball membership and distance") {
  auto b = make_ball(2, {0, 0}, 0.25);
  double p1[2] = {0.1, 0.0}, p2[2] = {0.3, 0.0}, p3[2] = {0.25, 0.0};
  CHECK(b->contains(p1));
  CHECK(!b->contains(p2));
  CHECK(b->contains(p3));  // closed set
  CHECK(b->signed_distance(p2) == doctest::Approx(0.05));
  CHECK(b->margin() == doctest::Approx(0.25));
  CHECK(b->volume() == doctest::Approx(pi * 0.0625));
}

TEST_CASE("box membership includes the boundary") {
  auto b = make_box(2, {-0.2, -0.2}, {0.2, 0.2});
  double edge[2] = {0.2, 0.0};
  CHECK(b->contains(edge));
  CHECK(b->surface_content() == doctest::Approx(1.6));
}

TEST_CASE("membership and signed distance agree in sign") {
  auto blob = make_blob2({0, 0}, 0.25, {{3, 0.05, 0.0}});
  auto ball = make_ball(2, {0.1, -0.05}, 0.2);
  Rng rng(99);
  for (int t = 0; t < 100000; ++t) {
    double x[2] = {rng.next_double() - 0.5, rng.next_double() - 0.5};
    for (const Shape* s : {blob.get(), ball.get()}) {
      double sd = s->signed_distance(x);
      if (sd != 0.0) CHECK(s->contains(x) == (sd < 0.0));
    }
  }
}

TEST_CASE("blob membership matches a fine polygonization oracle") {
  auto blob = make_blob2({0, 0}, 0.25, {{3, 0.05, 0.0}});
  // dense polygon of the boundary
  const int N = 1 << 20;
  std::vector<double> rho(N);
  for (int i = 0; i < N; ++i) {
    double th = 2 * pi * i / N;
    rho[i] = 0.25 + 0.05 * std::cos(3 * th);
  }
  Rng rng(5);
  const double chord_tol = 1e-5;
  for (int t = 0; t < 100000; ++t) {
    double x[2] = {rng.next_double() - 0.5, rng.next_double() - 0.5};
    double th = std::atan2(x[1], x[0]);
    if (th < 0) th += 2 * pi;
    int i = int(th / (2 * pi) * N) % N;
    double r = std::hypot(x[0], x[1]);
    if (std::fabs(r - rho[i]) < chord_tol) continue;  // near-boundary skip
    CHECK(blob->contains(x) == (r < rho[i]));
  }
}

TEST_CASE("boundary patches integrate to the surface content") {
  auto ball = make_ball(2, {0, 0}, 0.25);
  BoundaryPatch p = ball->boundary_patch({}, 1e-4);
  CHECK(p.weight_sum() == doctest::Approx(2 * pi * 0.25).epsilon(1e-4));

  auto box = make_box(2, {-0.2, -0.1}, {0.2, 0.3});
  PatchSpec side;
  side.kind = PatchSpec::Kind::side;
  side.side = 0;
  BoundaryPatch ps = box->boundary_patch(side, 1e-6);
  CHECK(ps.weight_sum() == doctest::Approx(0.4).epsilon(1e-12));

  auto blob = make_blob2({0, 0}, 0.25, {{3, 0.05, 0.0}});
  PatchSpec win;
  win.kind = PatchSpec::Kind::angular_window;
  win.a = 0.0;
  win.b = pi;
  BoundaryPatch pw = blob->boundary_patch(win, 1e-5);
  // against the quadrature oracle at 10x refinement
  double oracle = 0.0;
  const int N = 1 << 18;
  for (int i = 0; i < N; ++i) {
    double th = pi * (i + 0.5) / N;
    double r = 0.25 + 0.05 * std::cos(3 * th);
    double dr = -0.15 * std::sin(3 * th);
    oracle += std::sqrt(r * r + dr * dr) * pi / N;
  }
  CHECK(pw.weight_sum() == doctest::Approx(oracle).epsilon(1e-4));

  auto ball3 = make_ball(3, {0, 0, 0}, 0.25);
  BoundaryPatch p3 = ball3->boundary_patch({}, 1e-4);
  CHECK(p3.weight_sum() == doctest::Approx(4 * pi * 0.0625).epsilon(1e-9));
}

TEST_CASE("monotone refinement of patches") {
  auto blob = make_blob2({0, 0}, 0.22, {{4, 0.03, 0.7}});
  double prev = blob->boundary_patch({}, 1e-3).weight_sum();
  for (double tol : {5e-4, 2.5e-4, 1.25e-4}) {
    double cur = blob->boundary_patch({}, tol).weight_sum();
    CHECK(std::fabs(cur - prev) < 2e-3 * std::fabs(cur) + 1e-12);
    prev = cur;
  }
}

TEST_CASE("weighted surface content") {
  auto ball = make_ball(2, {0, 0}, 0.25);
  IntensityField unit = IntensityField::constant(1.0);
  // kappa = 1: plain perimeter for any gamma
  CHECK(weighted_surface_content(*ball, unit, 0.0, 1) ==
        doctest::Approx(2 * pi * 0.25).epsilon(1e-6));
  CHECK(weighted_surface_content(*ball, unit, 1.37, 1) ==
        doctest::Approx(2 * pi * 0.25).epsilon(1e-6));
  // gamma = d: plain perimeter for any kappa
  IntensityField kap = IntensityField::linear_x1(1.0);
  CHECK(weighted_surface_content(*ball, kap, 2.0, 1) ==
        doctest::Approx(2 * pi * 0.25).epsilon(1e-6));

  // kappa = 1 + x1, gamma = 0: high-resolution Riemann oracle
  double oracle = 0.0;
  const int N = 1 << 20;
  for (int i = 0; i < N; ++i) {
    double th = 2 * pi * (i + 0.5) / N;
    oracle += (1.0 + 0.25 * std::cos(th)) * 0.25 * 2 * pi / N;
  }
  CHECK(weighted_surface_content(*ball, kap, 0.0, 1) ==
        doctest::Approx(oracle).epsilon(1e-6));

  // power = 2 gives the kappa^2 weighting
  double oracle2 = 0.0;
  for (int i = 0; i < N; ++i) {
    double th = 2 * pi * (i + 0.5) / N;
    double k = 1.0 + 0.25 * std::cos(th);
    oracle2 += k * k * 0.25 * 2 * pi / N;
  }
  CHECK(weighted_surface_content(*ball, kap, 0.0, 2) ==
        doctest::Approx(oracle2).epsilon(1e-6));
}

TEST_CASE("dilation scales surface content like t^(d-1)") {
  for (double t : {0.5, 2.0}) {
    auto a = make_ball(2, {0, 0}, 0.1);
    auto b = make_ball(2, {0, 0}, 0.1 * t);
    IntensityField unit = IntensityField::constant(1.0);
    double ca = weighted_surface_content(*a, unit, 0.0, 1);
    double cb = weighted_surface_content(*b, unit, 0.0, 1);
    CHECK(cb / ca == doctest::Approx(t).epsilon(1e-9));
  }
}

TEST_CASE("ball union: exact surface and volume, osculating rejection") {
  auto u = make_ball_union(2, {{-0.1, 0.0}, {0.1, 0.0}}, {0.12, 0.12});
  // two overlapping circles, closed forms
  double d = 0.2, r = 0.12;
  double half = std::acos(d / (2 * r));
  double expected_surface = 2.0 * (2 * pi - 2 * half) * r;
  CHECK(u->surface_content() == doctest::Approx(expected_surface).epsilon(1e-12));
  double lens = 2 * r * r * (half - std::sin(2 * half) / 2);
  CHECK(u->volume() == doctest::Approx(2 * pi * r * r - lens).epsilon(1e-12));
  BoundaryPatch p = u->boundary_patch({}, 1e-5);
  CHECK(p.weight_sum() == doctest::Approx(expected_surface).epsilon(1e-4));

  CHECK_THROWS_AS(make_ball_union(2, {{0.0, 0.0}, {0.2, 0.0}}, {0.1, 0.1}),
                  config_error);  // externally tangent
  CHECK_THROWS_AS(
      make_ball_union(2, {{0.0, 0.0}, {0.05, 0.0}, {-0.05, 0.0}},
                      {0.1, 0.08, 0.08}),
      config_error);  // triple overlap
}

TEST_CASE("graph region basics") {
  auto g = make_graph_region2(-0.2, -0.2, 0.35, 0.3, 0.5, 0.2);
  double in[2] = {-0.1, -0.1}, out[2] = {0.2, 0.2};
  CHECK(g->contains(in));
  CHECK(!g->contains(out));
  CHECK(g->volume() ==
        doctest::Approx(0.3 * 0.35 - 0.5 * 0.35 * 0.35 / 2 -
                        0.2 * std::pow(0.35, 3) / 3));
  CHECK(g->margin() > 0.0);
}

TEST_CASE("polytopal union membership agrees with per-cell containment") {
  Rng rng(31);
  PointSample s;
  s.dim = 2;
  s.domain = Domain::cube(2);
  for (int i = 0; i < 200; ++i) s.coords.push_back(rng.next_double() - 0.5);
  s.lambda = 100;
  auto dia = std::make_shared<VoronoiDiagram>(VoronoiDiagram::build(s));
  std::vector<char> inside(dia->n_cells());
  for (std::size_t i = 0; i < inside.size(); ++i)
    inside[i] = rng.next_double() < 0.5 ? 1 : 0;
  auto u = polytopal_union_from_cells(dia, inside);
  for (int t = 0; t < 10000; ++t) {
    double x[2] = {rng.next_double() - 0.5, rng.next_double() - 0.5};
    int owner = oracle::nearest_linear(s, x);
    CHECK(u->contains(x) == (inside[owner] != 0));
  }
  // all cells / no cells
  std::vector<char> all(dia->n_cells(), 1), none(dia->n_cells(), 0);
  auto ua = polytopal_union_from_cells(dia, all);
  auto un = polytopal_union_from_cells(dia, none);
  double q[2] = {0.3, -0.4};
  CHECK(ua->contains(q));
  CHECK(!un->contains(q));
  CHECK(ua->volume() == doctest::Approx(1.0));
  CHECK(un->volume() == doctest::Approx(0.0));
}
