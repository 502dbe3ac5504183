// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pvlab/point_process.hpp"
#include "pvlab/vec.hpp"
#include "pvlab/voronoi.hpp"

namespace pvlab {

// Discretized boundary (or boundary subset) with quadrature weights.
// The curve descriptor lets the zone machinery run exact
// curve-versus-cell confirmation instead of relying on nodes alone.
struct BoundaryPatch {
  int dim = 2;
  std::vector<double> nodes;    // flat, dim-major
  std::vector<double> weights;  // H^{d-1} weights, sum = patch content
  double chord_tolerance = 0.0;
  double max_spacing = 0.0;  // max within-patch node spacing

  enum class Curve { none, circle2, polyline2 };
  Curve curve = Curve::none;
  Vec2 circle_center{};
  double circle_r = 0.0;
  double theta0 = 0.0, theta1 = 0.0;  // angular window (circle2)
  std::vector<Vec2> polyline;         // polyline2 chords
  bool closed = false;

  std::size_t size() const { return weights.size(); }
  const double* node(std::size_t i) const { return &nodes[i * dim]; }
  double weight_sum() const;
};

struct PatchSpec {
  enum class Kind { whole, angular_window, side } kind = Kind::whole;
  double a = 0.0, b = 0.0;  // angular window [a, b]
  int side = 0;             // box side index
};

class Shape {
 public:
  virtual ~Shape() = default;
  int dim() const { return dim_; }

  virtual bool contains(const double* x) const = 0;
  // negative inside; the sign is exact, the magnitude is a conservative
  // lower bound on the true distance to the boundary
  virtual double signed_distance(const double* x) const = 0;
  virtual double volume() const = 0;
  virtual double surface_content() const = 0;  // H^{d-1}(boundary)
  virtual BoundaryPatch boundary_patch(const PatchSpec& spec,
                                       double target_tol) const = 0;
  // distance from the shape to the boundary of Q
  virtual double margin() const = 0;
  virtual std::string describe() const = 0;

 protected:
  explicit Shape(int d) : dim_(d) {}
  int dim_;
};

std::shared_ptr<Shape> make_ball(int d, std::vector<double> center, double r);
std::shared_ptr<Shape> make_box(int d, std::vector<double> lo,
                                std::vector<double> hi);
// 2D star-shaped set rho(theta) = r0 + sum_k amp_k cos(k_j theta + phase_j)
struct BlobHarmonic {
  int k = 0;
  double amp = 0.0, phase = 0.0;
};
std::shared_ptr<Shape> make_blob2(std::vector<double> center, double r0,
                                  std::vector<BlobHarmonic> harmonics);
// union of balls; pairwise overlaps must be transversal or empty
std::shared_ptr<Shape> make_ball_union(int d,
                                       std::vector<std::vector<double>> centers,
                                       std::vector<double> radii);
// region under a decreasing graph f(u) = h0 - s*u - q*u^2 over [0, w],
// translated by (ox, oy); the derivative stays in [-(s+2qw), -s]
std::shared_ptr<Shape> make_graph_region2(double ox, double oy, double w,
                                          double h0, double s, double q);

// membership = nearest generator of the stored diagram is flagged inside
std::shared_ptr<Shape> polytopal_union_from_cells(
    std::shared_ptr<const VoronoiDiagram> dia, std::vector<char> inside);

// integral over the boundary of kappa^{power*(1) - gamma/d}-style weights:
// power=1 gives kappa^{1-gamma/d}, power=2 gives (kappa^2)^{1-gamma/d}.
// Verified by re-evaluating at doubled resolution (1e-3 relative).
double weighted_surface_content(const Shape& shape, const IntensityField& kappa,
                                double gamma, int power);

}  // namespace pvlab
