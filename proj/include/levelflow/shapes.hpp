#pragma once

// Analytic shapes seeding the initial hypersurface, as signed distance
// functions (negative inside). Composites use min/max of primitives; that is
// exact on the zero set and near-band accurate, which is all the evolution
// needs.

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levelflow/grid.hpp"

namespace levelflow {

enum class ShapeKind { Sphere, CylinderSlab, Torus, Dumbbell, Union, Offset };

struct ShapeSpec {
  ShapeKind kind = ShapeKind::Sphere;

  // sphere
  Vec center;
  double radius = 1.0;

  // cylinder-slab: solid {dist to axis line <= radius}; axis passes through
  // `center` with direction `axis` (unit).
  Vec axis;

  // torus around the z-axis centered at `center`
  double major_radius = 1.0;
  double minor_radius = 0.25;

  // dumbbell: two balls of `radius` centered at center +- half_sep * axis,
  // joined by a cosh-profile neck of waist `neck_radius` (C^1 tangent blend)
  double half_sep = 0.5;
  double neck_radius = 0.15;

  // offset
  double offset = 0.0;

  std::vector<ShapeSpec> children;

  static ShapeSpec sphere(const Vec& c, double r) {
    ShapeSpec s;
    s.kind = ShapeKind::Sphere;
    s.center = c;
    s.radius = r;
    return s;
  }
  static ShapeSpec cylinder_slab(const Vec& c, const Vec& axis, double r) {
    ShapeSpec s;
    s.kind = ShapeKind::CylinderSlab;
    s.center = c;
    s.axis = normalized(axis);
    s.radius = r;
    return s;
  }
  static ShapeSpec torus(const Vec& c, double R, double r) {
    ShapeSpec s;
    s.kind = ShapeKind::Torus;
    s.center = c;
    s.major_radius = R;
    s.minor_radius = r;
    return s;
  }
  static ShapeSpec dumbbell(const Vec& c, const Vec& axis, double half_sep,
                            double ball_r, double neck_r) {
    ShapeSpec s;
    s.kind = ShapeKind::Dumbbell;
    s.center = c;
    s.axis = normalized(axis);
    s.half_sep = half_sep;
    s.radius = ball_r;
    s.neck_radius = neck_r;
    return s;
  }
  static ShapeSpec unite(std::vector<ShapeSpec> parts) {
    ShapeSpec s;
    s.kind = ShapeKind::Union;
    s.children = std::move(parts);
    return s;
  }
  static ShapeSpec offset_of(ShapeSpec base, double delta) {
    ShapeSpec s;
    s.kind = ShapeKind::Offset;
    s.offset = delta;
    s.children.push_back(std::move(base));
    return s;
  }
};

namespace detail {

// Tangency of the neck profile rho = a*cosh(z/b) against the ball profile
// sqrt(R^2 - (z-d)^2): solve for the junction height z_j and scale b.
// At the junction the union of ball caps and neck is C^1; the cosh piece is
// strictly mean-convex iff a < b.
struct DumbbellProfile {
  double a = 0.0;      // waist radius
  double b = 0.0;      // cosh scale
  double d = 0.0;      // ball center offset along axis
  double R = 0.0;      // ball radius
  double zj = 0.0;     // junction |z|
  std::vector<double> pz, pr;  // sampled boundary polyline (z, rho), z >= 0 half
};

inline std::optional<DumbbellProfile> solve_dumbbell_profile(double half_sep,
                                                             double R,
                                                             double a) {
  const double d = half_sep;
  if (!(R > 0) || !(a > 0) || !(d > 0) || a >= R) return std::nullopt;
  if (d <= R) {
    // balls overlap the waist plane: require the waist to sit below the ball
    // profile so a neck exists at all
    if (a >= std::sqrt(std::max(0.0, R * R - d * d))) return std::nullopt;
  }

  auto ball = [&](double z) { return std::sqrt(std::max(0.0, R * R - (z - d) * (z - d))); };
  auto ball_slope = [&](double z) {
    const double s = ball(z);
    return s > 0 ? (d - z) / s : 0.0;
  };
  // G(zj) = neck slope - ball slope with b eliminated through the height match
  auto mismatch = [&](double zj) -> std::optional<double> {
    const double s = ball(zj);
    if (s <= a) return std::nullopt;
    const double b = zj / std::acosh(s / a);
    const double slope = (a / b) * std::sinh(zj / b);
    return slope - ball_slope(zj);
  };

  const double z_lo = std::max(1e-6, d - R + 1e-6);
  const double z_hi = d - 1e-6;
  const int scan = 400;
  double prev_z = 0.0;
  std::optional<double> prev_g;
  double root = -1.0;
  for (int m = 0; m <= scan; ++m) {
    const double z = z_lo + (z_hi - z_lo) * m / scan;
    auto g = mismatch(z);
    if (g && prev_g && (*prev_g) * (*g) <= 0.0 && (*prev_g != *g)) {
      double lo = prev_z, hi = z, glo = *prev_g;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto gm = mismatch(mid);
        if (!gm) break;
        if ((*gm) * glo > 0.0) {
          lo = mid;
          glo = *gm;
        } else {
          hi = mid;
        }
      }
      root = 0.5 * (lo + hi);
      break;
    }
    prev_z = z;
    prev_g = g;
  }
  if (root < 0.0) return std::nullopt;

  DumbbellProfile p;
  p.a = a;
  p.d = d;
  p.R = R;
  p.zj = root;
  p.b = root / std::acosh(ball(root) / a);
  if (p.b <= a) return std::nullopt;  // not mean-convex

  // Sample the upper-half boundary polyline: cosh neck on [0, zj], ball cap
  // on [zj, d+R]. Dense enough that chord error is far below any grid h.
  const int n1 = 512, n2 = 512;
  for (int m = 0; m <= n1; ++m) {
    const double z = p.zj * m / n1;
    p.pz.push_back(z);
    p.pr.push_back(a * std::cosh(z / p.b));
  }
  for (int m = 1; m <= n2; ++m) {
    const double z = p.zj + (d + R - p.zj) * m / n2;
    p.pz.push_back(z);
    p.pr.push_back(ball(z));
  }
  return p;
}

inline double dist_point_segment(double px, double py, double ax, double ay,
                                 double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double L2 = dx * dx + dy * dy;
  double t = L2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / L2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double qx = ax + t * dx, qy = ay + t * dy;
  return std::hypot(px - qx, py - qy);
}

// Signed distance in the (rho, z) half-plane to the revolved boundary.
inline double dumbbell_profile_sdf(const DumbbellProfile& p, double rho, double z) {
  const double az = std::abs(z);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m + 1 < p.pz.size(); ++m) {
    best = std::min(best, dist_point_segment(az, rho, p.pz[m], p.pr[m], p.pz[m + 1], p.pr[m + 1]));
  }
  double prof;
  if (az <= p.zj)
    prof = p.a * std::cosh(az / p.b);
  else if (az <= p.d + p.R)
    prof = std::sqrt(std::max(0.0, p.R * p.R - (az - p.d) * (az - p.d)));
  else
    prof = -1.0;  // past the poles: outside
  return rho <= prof ? -best : best;
}

}  // namespace detail

class Shape {
 public:
  explicit Shape(const ShapeSpec& spec, int n) : spec_(spec), n_(n) { build(spec_); }

  int dim() const { return n_; }
  const ShapeSpec& spec() const { return spec_; }

  // Signed distance, negative inside. Exact for primitives, min/max
  // composition for union/offset.
  double signed_distance(const Vec& p) const { return eval(spec_, p); }

 private:
  ShapeSpec spec_;
  int n_ = 3;
  std::shared_ptr<detail::DumbbellProfile> dumbbell_;

  void build(ShapeSpec& s) {
    switch (s.kind) {
      case ShapeKind::Sphere:
        if (!(s.radius > 0)) throw std::invalid_argument("sphere: radius must be positive");
        break;
      case ShapeKind::CylinderSlab:
        if (n_ != 3) throw std::invalid_argument("cylinder-slab: requires n=3");
        if (!(s.radius > 0)) throw std::invalid_argument("cylinder-slab: radius must be positive");
        break;
      case ShapeKind::Torus:
        if (n_ != 3) throw std::invalid_argument("torus: requires n=3");
        if (!(s.minor_radius > 0) || !(s.major_radius > 0))
          throw std::invalid_argument("torus: radii must be positive");
        // mean-convex iff the inner equator curvature sum stays positive
        if (!(s.major_radius > 2.0 * s.minor_radius))
          throw std::invalid_argument(
              "torus: not mean-convex (needs major_radius > 2*minor_radius)");
        break;
      case ShapeKind::Dumbbell: {
        if (n_ != 3) throw std::invalid_argument("dumbbell: requires n=3");
        auto prof = detail::solve_dumbbell_profile(s.half_sep, s.radius, s.neck_radius);
        if (!prof)
          throw std::invalid_argument(
              "dumbbell: no mean-convex C1 neck for these parameters "
              "(try a thinner neck or closer balls)");
        dumbbell_ = std::make_shared<detail::DumbbellProfile>(std::move(*prof));
        break;
      }
      case ShapeKind::Union:
        if (s.children.empty()) throw std::invalid_argument("union: no children");
        for (auto& c : s.children) build(c);
        break;
      case ShapeKind::Offset:
        if (s.children.size() != 1) throw std::invalid_argument("offset: needs one child");
        build(s.children[0]);
        break;
    }
  }

  double eval(const ShapeSpec& s, const Vec& p) const {
    switch (s.kind) {
      case ShapeKind::Sphere:
        return dist(p, s.center) - s.radius;
      case ShapeKind::CylinderSlab: {
        Vec w = p - s.center;
        const double t = dot(w, s.axis);
        Vec r = w - t * s.axis;
        return norm(r) - s.radius;
      }
      case ShapeKind::Torus: {
        const double rho = std::hypot(p[0] - s.center[0], p[1] - s.center[1]);
        return std::hypot(rho - s.major_radius, p[2] - s.center[2]) - s.minor_radius;
      }
      case ShapeKind::Dumbbell: {
        Vec w = p - s.center;
        const double z = dot(w, s.axis);
        Vec r = w - z * s.axis;
        return detail::dumbbell_profile_sdf(*dumbbell_, norm(r), z);
      }
      case ShapeKind::Union: {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& c : s.children) d = std::min(d, eval(c, p));
        return d;
      }
      case ShapeKind::Offset:
        return eval(s.children[0], p) - s.offset;
    }
    return 0.0;
  }
};

// Sample the signed distance of a shape onto a grid. Rejects shapes whose
// boundary misses the box entirely.
inline ScalarField signed_distance_init(const ShapeSpec& spec, const GridSpec& grid) {
  Shape shape(spec, grid.n);
  ScalarField f(grid, FieldKind::SignedDistance);
  bool any_inside = false, any_outside = false;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const GridIndex g = grid.unflat(c);
    const double d = shape.signed_distance(grid.point(g));
    f.data[c] = d;
    (d < 0 ? any_inside : any_outside) = true;
  }
  if (!any_inside)
    throw std::invalid_argument("signed_distance_init: shape boundary is empty inside the box");
  if (!any_outside)
    throw std::invalid_argument("signed_distance_init: box lies entirely inside the shape");
  return f;
}

// Axisymmetric sampling: the (rho, z) plane field of a solid of revolution
// about the +z axis through the origin. The 2D grid axes are (rho, z) with
// rho mirrored to negative values.
inline ScalarField signed_distance_init_axisym(const ShapeSpec& spec, const GridSpec& grid2) {
  if (grid2.n != 2) throw std::invalid_argument("axisym init: grid must be 2D");
  Shape shape(spec, 3);
  ScalarField f(grid2, FieldKind::SignedDistance);
  for (std::size_t c = 0; c < grid2.size(); ++c) {
    const GridIndex g = grid2.unflat(c);
    const Vec q = grid2.point(g);
    f.data[c] = shape.signed_distance(Vec(std::abs(q[0]), 0.0, q[1]));
  }
  return f;
}

}  // namespace levelflow
