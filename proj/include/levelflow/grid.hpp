#pragma once

// Uniform isotropic grids over a box in R^n (n in {2,3}) and scalar fields
// sampled on them, with second-order finite-difference calculus and
// multilinear interpolation. All differential queries exclude a one-cell
// margin so that only centered stencils are ever used.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "levelflow/core.hpp"

namespace levelflow {

struct GridIndex {
  int i = 0, j = 0, k = 0;
};

struct GridSpec {
  int n = 0;                   // ambient dimension, 2 or 3
  Vec lo;                      // lower corner [length]
  Vec hi;                      // upper corner [length]
  std::array<int, 3> npts{1, 1, 1};  // samples per axis (1 on unused axes)
  double h = 0.0;              // spacing, equal on all axes [length]

  static GridSpec make(int n, const Vec& lo, const Vec& hi,
                       const std::array<int, 3>& npts) {
    if (n != 2 && n != 3) throw std::invalid_argument("GridSpec: n must be 2 or 3");
    GridSpec g;
    g.n = n;
    g.lo = lo;
    g.hi = hi;
    g.lo.n = n;
    g.hi.n = n;
    g.npts = npts;
    if (n == 2) g.npts[2] = 1;
    double h0 = 0.0;
    for (int a = 0; a < n; ++a) {
      if (g.npts[a] < 8) throw std::invalid_argument("GridSpec: need >= 8 samples per axis");
      if (!(hi[a] > lo[a])) throw std::invalid_argument("GridSpec: empty box");
      const double ha = (hi[a] - lo[a]) / (g.npts[a] - 1);
      if (a == 0) {
        h0 = ha;
      } else if (std::abs(ha - h0) > 1e-9 * h0) {
        throw std::invalid_argument("GridSpec: spacing must be equal on all axes");
      }
    }
    g.h = h0;
    return g;
  }

  std::size_t size() const {
    return static_cast<std::size_t>(npts[0]) * npts[1] * npts[2];
  }

  std::size_t flat(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(npts[0]) * (static_cast<std::size_t>(j) +
                                                static_cast<std::size_t>(npts[1]) * k);
  }
  std::size_t flat(const GridIndex& g) const { return flat(g.i, g.j, g.k); }

  GridIndex unflat(std::size_t f) const {
    GridIndex g;
    g.i = static_cast<int>(f % npts[0]);
    g.j = static_cast<int>((f / npts[0]) % npts[1]);
    g.k = static_cast<int>(f / (static_cast<std::size_t>(npts[0]) * npts[1]));
    return g;
  }

  Vec point(int i, int j, int k = 0) const {
    Vec p(n);
    p[0] = lo[0] + i * h;
    p[1] = lo[1] + j * h;
    if (n == 3) p[2] = lo[2] + k * h;
    return p;
  }
  Vec point(const GridIndex& g) const { return point(g.i, g.j, g.k); }

  // Distance (in cells) from the closest face of the box.
  int margin(const GridIndex& g) const {
    int m = std::min(g.i, npts[0] - 1 - g.i);
    m = std::min(m, std::min(g.j, npts[1] - 1 - g.j));
    if (n == 3) m = std::min(m, std::min(g.k, npts[2] - 1 - g.k));
    return m;
  }

  bool inside_margin(const Vec& p, double cells = 1.0) const {
    for (int a = 0; a < n; ++a) {
      if (p[a] < lo[a] + cells * h || p[a] > hi[a] - cells * h) return false;
    }
    return true;
  }

  GridIndex nearest(const Vec& p) const {
    GridIndex g;
    g.i = std::clamp(static_cast<int>(std::lround((p[0] - lo[0]) / h)), 0, npts[0] - 1);
    g.j = std::clamp(static_cast<int>(std::lround((p[1] - lo[1]) / h)), 0, npts[1] - 1);
    if (n == 3)
      g.k = std::clamp(static_cast<int>(std::lround((p[2] - lo[2]) / h)), 0, npts[2] - 1);
    return g;
  }

  double diagonal() const { return dist(hi, lo); }
};

enum class FieldKind { SignedDistance, LevelFunction, ArrivalTime };

struct ScalarField {
  GridSpec grid;
  std::vector<double> data;
  FieldKind kind = FieldKind::LevelFunction;

  ScalarField() = default;
  ScalarField(const GridSpec& g, FieldKind k, double fill = 0.0)
      : grid(g), data(g.size(), fill), kind(k) {}

  double& at(int i, int j, int k = 0) { return data[grid.flat(i, j, k)]; }
  double at(int i, int j, int k = 0) const { return data[grid.flat(i, j, k)]; }
  double& at(const GridIndex& g) { return data[grid.flat(g)]; }
  double at(const GridIndex& g) const { return data[grid.flat(g)]; }

  void check_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) throw std::runtime_error("ScalarField: non-finite value");
  }
};

namespace detail {
inline void require_margin(const GridSpec& g, const GridIndex& idx, int cells,
                           const char* op) {
  if (g.margin(idx) < cells)
    throw std::out_of_range(std::string(op) + ": index within one-cell margin");
}
}  // namespace detail

// Central differences, O(h^2); exact on quadratics.
inline Vec gradient_fd(const ScalarField& f, const GridIndex& idx) {
  detail::require_margin(f.grid, idx, 1, "gradient_fd");
  const double inv2h = 0.5 / f.grid.h;
  Vec g(f.grid.n);
  g[0] = (f.at(idx.i + 1, idx.j, idx.k) - f.at(idx.i - 1, idx.j, idx.k)) * inv2h;
  g[1] = (f.at(idx.i, idx.j + 1, idx.k) - f.at(idx.i, idx.j - 1, idx.k)) * inv2h;
  if (f.grid.n == 3)
    g[2] = (f.at(idx.i, idx.j, idx.k + 1) - f.at(idx.i, idx.j, idx.k - 1)) * inv2h;
  return g;
}

// Standard second-order stencil; symmetric by construction.
inline SymMat hessian_fd(const ScalarField& f, const GridIndex& idx) {
  detail::require_margin(f.grid, idx, 1, "hessian_fd");
  const int n = f.grid.n;
  const double invh2 = 1.0 / (f.grid.h * f.grid.h);
  SymMat m(n);
  const int di[3] = {1, 0, 0}, dj[3] = {0, 1, 0}, dk[3] = {0, 0, 1};
  const double c = f.at(idx);
  for (int a = 0; a < n; ++a) {
    const double fp = f.at(idx.i + di[a], idx.j + dj[a], idx.k + dk[a]);
    const double fm = f.at(idx.i - di[a], idx.j - dj[a], idx.k - dk[a]);
    m(a, a) = (fp - 2.0 * c + fm) * invh2;
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double fpp = f.at(idx.i + di[a] + di[b], idx.j + dj[a] + dj[b], idx.k + dk[a] + dk[b]);
      const double fpm = f.at(idx.i + di[a] - di[b], idx.j + dj[a] - dj[b], idx.k + dk[a] - dk[b]);
      const double fmp = f.at(idx.i - di[a] + di[b], idx.j - dj[a] + dj[b], idx.k - dk[a] + dk[b]);
      const double fmm = f.at(idx.i - di[a] - di[b], idx.j - dj[a] - dj[b], idx.k - dk[a] - dk[b]);
      const double v = (fpp - fpm - fmp + fmm) * 0.25 * invh2;
      m(a, b) = v;
      m(b, a) = v;
    }
  }
  return m;
}

namespace detail {

struct CellLocator {
  int i0, j0, k0;
  double fx, fy, fz;  // fractions in [0,1]
};

inline CellLocator locate(const GridSpec& g, const Vec& p, const char* op) {
  if (!g.inside_margin(p, 1.0))
    throw std::out_of_range(std::string(op) + ": point outside one-cell margin");
  CellLocator c{};
  auto axis = [&](double x, double lo, int npts, int& i0, double& fr) {
    double s = (x - lo) / g.h;
    i0 = static_cast<int>(std::floor(s));
    i0 = std::clamp(i0, 0, npts - 2);
    fr = s - i0;
  };
  axis(p[0], g.lo[0], g.npts[0], c.i0, c.fx);
  axis(p[1], g.lo[1], g.npts[1], c.j0, c.fy);
  if (g.n == 3)
    axis(p[2], g.lo[2], g.npts[2], c.k0, c.fz);
  else {
    c.k0 = 0;
    c.fz = 0.0;
  }
  return c;
}

template <class Get>
inline double multilinear(const GridSpec& g, const CellLocator& c, Get&& get) {
  if (g.n == 2) {
    const double v00 = get(c.i0, c.j0, 0), v10 = get(c.i0 + 1, c.j0, 0);
    const double v01 = get(c.i0, c.j0 + 1, 0), v11 = get(c.i0 + 1, c.j0 + 1, 0);
    const double a = v00 * (1 - c.fx) + v10 * c.fx;
    const double b = v01 * (1 - c.fx) + v11 * c.fx;
    return a * (1 - c.fy) + b * c.fy;
  }
  double acc = 0.0;
  for (int dk = 0; dk <= 1; ++dk) {
    const double wz = dk ? c.fz : 1 - c.fz;
    for (int dj = 0; dj <= 1; ++dj) {
      const double wy = dj ? c.fy : 1 - c.fy;
      for (int di = 0; di <= 1; ++di) {
        const double wx = di ? c.fx : 1 - c.fx;
        acc += wx * wy * wz * get(c.i0 + di, c.j0 + dj, c.k0 + dk);
      }
    }
  }
  return acc;
}

}  // namespace detail

// Multilinear interpolation of node values; exact on multilinear fields and
// reproduces grid values at grid points.
inline double interpolate(const ScalarField& f, const Vec& p) {
  const auto c = detail::locate(f.grid, p, "interpolate");
  return detail::multilinear(f.grid, c, [&](int i, int j, int k) { return f.at(i, j, k); });
}

// Multilinear blend of node-wise central-difference gradients. Second-order
// accurate and exact on quadratic fields, unlike differentiating the value
// interpolant. Needs a two-cell margin (one for the cell, one for stencils).
inline Vec interpolate_gradient(const ScalarField& f, const Vec& p) {
  if (!f.grid.inside_margin(p, 1.0))
    throw std::out_of_range("interpolate_gradient: point outside one-cell margin");
  const auto c = detail::locate(f.grid, p, "interpolate_gradient");
  const int n = f.grid.n;
  Vec g(n);
  const double inv2h = 0.5 / f.grid.h;
  auto clampi = [&](int i, int axis) { return std::clamp(i, 1, f.grid.npts[axis] - 2); };
  for (int a = 0; a < n; ++a) {
    g[a] = detail::multilinear(f.grid, c, [&](int i, int j, int k) {
      i = clampi(i, 0);
      j = clampi(j, 1);
      if (n == 3) k = clampi(k, 2);
      if (a == 0) return (f.at(i + 1, j, k) - f.at(i - 1, j, k)) * inv2h;
      if (a == 1) return (f.at(i, j + 1, k) - f.at(i, j - 1, k)) * inv2h;
      return (f.at(i, j, k + 1) - f.at(i, j, k - 1)) * inv2h;
    });
  }
  return g;
}

// Multilinear blend of node-wise finite-difference Hessians.
inline SymMat interpolate_hessian(const ScalarField& f, const Vec& p) {
  const auto c = detail::locate(f.grid, p, "interpolate_hessian");
  const int n = f.grid.n;
  auto clampi = [&](int i, int axis) { return std::clamp(i, 1, f.grid.npts[axis] - 2); };

  SymMat corner[8];
  const int ncorner = (n == 3) ? 8 : 4;
  for (int c8 = 0; c8 < ncorner; ++c8) {
    GridIndex idx{clampi(c.i0 + (c8 & 1), 0), clampi(c.j0 + ((c8 >> 1) & 1), 1),
                  n == 3 ? clampi(c.k0 + ((c8 >> 2) & 1), 2) : 0};
    corner[c8] = hessian_fd(f, idx);
  }

  double w[8];
  for (int c8 = 0; c8 < ncorner; ++c8) {
    const double wx = (c8 & 1) ? c.fx : 1 - c.fx;
    const double wy = ((c8 >> 1) & 1) ? c.fy : 1 - c.fy;
    const double wz = (n == 3) ? (((c8 >> 2) & 1) ? c.fz : 1 - c.fz) : 1.0;
    w[c8] = wx * wy * wz;
  }

  SymMat m(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      double v = 0.0;
      for (int c8 = 0; c8 < ncorner; ++c8) v += w[c8] * corner[c8](a, b);
      m(a, b) = v;
      m(b, a) = v;
    }
  return m;
}

}  // namespace levelflow
