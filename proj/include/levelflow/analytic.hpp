#pragma once

// Closed-form arrival-time models and the field concept shared by the
// differential-geometry routines. A field exposes value/gradient/hessian at
// a point plus a validity predicate and a gradient floor below which a point
// is treated as near-singular.

#include <cmath>

#include "levelflow/grid.hpp"

namespace levelflow {

// Arrival time of the shrinking generalized cylinder S^{n-k-1} x R^k with
// axis spanned by the last k coordinates:
//   u(y,z) = t0 - |y - c|^2 / (2(n-k-1)).
// k = 0 is the round (shrinking sphere) model. Supports n up to 4 for the
// analytic-only paths; no grid storage involved.
struct CylinderArrivalModel {
  int n = 3;
  int k = 0;
  double t0 = 0.0;  // arrival value at the singular set
  Vec center;       // applied to the first n-k coordinates

  CylinderArrivalModel(int n_, int k_, double t0_ = 0.0) : n(n_), k(k_), t0(t0_) {
    if (n < 2 || n > kMaxDim || k < 0 || k > n - 2)
      throw std::invalid_argument("CylinderArrivalModel: need 0 <= k <= n-2");
    center = Vec(n);
  }

  int dim() const { return n; }
  int radial_dim() const { return n - k; }

  double value(const Vec& p) const {
    double r2 = 0.0;
    for (int a = 0; a < n - k; ++a) {
      const double d = p[a] - center[a];
      r2 += d * d;
    }
    return t0 - r2 / (2.0 * (n - k - 1));
  }

  Vec gradient(const Vec& p) const {
    Vec g(n);
    for (int a = 0; a < n - k; ++a) g[a] = -(p[a] - center[a]) / (n - k - 1);
    return g;
  }

  SymMat hessian(const Vec&) const {
    SymMat m(n);
    for (int a = 0; a < n - k; ++a) m(a, a) = -1.0 / (n - k - 1);
    return m;
  }

  bool valid(const Vec&) const { return true; }
  double grad_floor() const { return 1e-9; }
};

// Grid-backed field: interpolated values, node-central-difference gradients
// and Hessians blended multilinearly. Optional reached-mask for arrival
// fields; a query point is valid only if the surrounding stencil cells are
// reached and inside a two-cell margin.
class GridField {
 public:
  explicit GridField(const ScalarField& f, const std::vector<uint8_t>* reached = nullptr,
                     double grad_floor_mult = 10.0)
      : f_(&f), reached_(reached), floor_(grad_floor_mult * f.grid.h) {}

  int dim() const { return f_->grid.n; }
  const ScalarField& field() const { return *f_; }
  const GridSpec& grid() const { return f_->grid; }

  double value(const Vec& p) const { return interpolate(*f_, p); }
  Vec gradient(const Vec& p) const { return interpolate_gradient(*f_, p); }
  SymMat hessian(const Vec& p) const { return interpolate_hessian(*f_, p); }

  bool valid(const Vec& p) const {
    const GridSpec& g = f_->grid;
    if (!g.inside_margin(p, 2.0)) return false;
    if (!reached_) return true;
    // require the 4^n block feeding the blended stencils to be reached
    const GridIndex c = g.nearest(p);
    const int kr = (g.n == 3) ? 2 : 0;
    for (int dk = (g.n == 3 ? -2 : 0); dk <= kr; ++dk)
      for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di) {
          const int i = c.i + di, j = c.j + dj, k = c.k + dk;
          if (i < 0 || j < 0 || k < 0 || i >= g.npts[0] || j >= g.npts[1] ||
              k >= g.npts[2])
            return false;
          if (!(*reached_)[g.flat(i, j, k)]) return false;
        }
    return true;
  }

  double grad_floor() const { return floor_; }

 private:
  const ScalarField* f_;
  const std::vector<uint8_t>* reached_;
  double floor_;
};

}  // namespace levelflow
