#pragma once

// Arrival-time computation: explicit level-set stepping of the mean
// curvature flow with periodic fast-sweeping reinitialization, recording
// per-cell zero-crossing times. An axisymmetric mode evolves a 2D (rho, z)
// field carrying the full 3D normal speed; lift_axisymmetric turns its
// arrival field into a 3D one for analysis.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "levelflow/core.hpp"
#include "levelflow/grid.hpp"
#include "levelflow/shapes.hpp"

namespace levelflow {

struct EvolveConfig {
  double dt = 0.0;          // [time]; 0 = derive as dt_factor * h^2 / n_eq
  double dt_factor = 0.2;   // explicit-scheme stability needs <= 0.25
  double eps_reg = 1e-6;    // regularizer, dimensionless multiple of h
  int reinit_every = 5;     // steps between reinitializations
  double t_max = 1.0;       // [time] evolution cap
  bool axisymmetric = false;  // 2D (rho,z) grid evolving a 3D flow
  int threads = 1;

  // internal banding (dense storage; updates restricted near the front)
  double band_update_cells = 8.0;
  double band_total_cells = 16.0;

  int equation_dim(const GridSpec& g) const { return axisymmetric ? 3 : g.n; }

  double step_size(const GridSpec& g) const {
    const int n = equation_dim(g);
    return dt > 0.0 ? dt : dt_factor * g.h * g.h / n;
  }

  void validate(const GridSpec& g) const {
    const int n = equation_dim(g);
    const double limit = 0.25 * g.h * g.h / n;
    if (dt < 0.0) throw std::invalid_argument("evolve.dt: time step must be positive");
    const double step = step_size(g);
    if (!(step > 0.0))
      throw std::invalid_argument("evolve.dt: time step must be positive");
    if (step > limit * (1.0 + 1e-12))
      throw std::invalid_argument("evolve.dt: violates CFL bound 0.25*h^2/n");
    if (!(eps_reg > 0.0) || eps_reg > 1.0)
      throw std::invalid_argument("evolve.eps_reg: must lie in (0, 1]");
    if (reinit_every < 1)
      throw std::invalid_argument("evolve.reinit_every: must be >= 1");
    if (!(t_max > 0.0)) throw std::invalid_argument("evolve.t_max: must be positive");
    if (axisymmetric && g.n != 2)
      throw std::invalid_argument("evolve.axisymmetric: needs a 2D (rho,z) grid");
  }
};

namespace detail {

// phi_t at one interior cell: |grad| * H of the level set, in the
// non-divergence form  lap(phi) - (grad^T hess grad) / (|grad|^2 + (eps*h)^2),
// plus phi_rho / rho for the axisymmetric 3D speed (L'Hopital at the axis).
struct StepKernel {
  const double* phi;
  int sx, sy, sz;  // flat strides
  double h, inv2h, invh2, eps2;
  bool axisym;
  double rho_lo;  // grid.lo[0], to recover rho from i

  double operator()(std::size_t f, int i, bool threed) const {
    const double c = phi[f];
    const double xm = phi[f - sx], xp = phi[f + sx];
    const double ym = phi[f - sy], yp = phi[f + sy];
    const double px = (xp - xm) * inv2h;
    const double py = (yp - ym) * inv2h;
    const double pxx = (xp - 2 * c + xm) * invh2;
    const double pyy = (yp - 2 * c + ym) * invh2;
    const double pxy =
        (phi[f + sx + sy] - phi[f - sx + sy] - phi[f + sx - sy] + phi[f - sx - sy]) *
        0.25 * invh2;

    double lap = pxx + pyy;
    double quad = px * px * pxx + 2 * px * py * pxy + py * py * pyy;
    double g2 = px * px + py * py;

    if (threed) {
      const double zm = phi[f - sz], zp = phi[f + sz];
      const double pz = (zp - zm) * inv2h;
      const double pzz = (zp - 2 * c + zm) * invh2;
      const double pxz =
          (phi[f + sx + sz] - phi[f - sx + sz] - phi[f + sx - sz] + phi[f - sx - sz]) *
          0.25 * invh2;
      const double pyz =
          (phi[f + sy + sz] - phi[f - sy + sz] - phi[f + sy - sz] + phi[f - sy - sz]) *
          0.25 * invh2;
      lap += pzz;
      quad += pz * pz * pzz + 2 * (px * pz * pxz + py * pz * pyz);
      g2 += pz * pz;
    }

    double rate = lap - quad / (g2 + eps2);
    if (axisym) {
      const double rho = rho_lo + i * h;
      rate += (std::abs(rho) < 0.5 * h) ? pxx : px / rho;
    }
    return rate;
  }
};

inline StepKernel make_kernel(const ScalarField& phi, const EvolveConfig& cfg) {
  StepKernel k{};
  k.phi = phi.data.data();
  k.sx = 1;
  k.sy = phi.grid.npts[0];
  k.sz = phi.grid.npts[0] * phi.grid.npts[1];
  k.h = phi.grid.h;
  k.inv2h = 0.5 / k.h;
  k.invh2 = 1.0 / (k.h * k.h);
  const double eps = cfg.eps_reg * k.h;
  k.eps2 = eps * eps;
  k.axisym = cfg.axisymmetric;
  k.rho_lo = phi.grid.lo[0];
  return k;
}

// Neumann closure: copy the adjacent interior value onto each boundary node.
inline void fill_boundary(ScalarField& f) {
  const auto& g = f.grid;
  const int nx = g.npts[0], ny = g.npts[1], nz = g.npts[2];
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) {
      f.at(0, j, k) = f.at(1, j, k);
      f.at(nx - 1, j, k) = f.at(nx - 2, j, k);
    }
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) {
      f.at(i, 0, k) = f.at(i, 1, k);
      f.at(i, ny - 1, k) = f.at(i, ny - 2, k);
    }
  if (g.n == 3)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        f.at(i, j, 0) = f.at(i, j, 1);
        f.at(i, j, nz - 1) = f.at(i, j, nz - 2);
      }
}

}  // namespace detail

// One explicit Euler step over the full grid. Values are clamped to +-(box
// diagonal). Pure function of the snapshot; cell updates are independent.
inline ScalarField mcf_step(const ScalarField& phi, const EvolveConfig& cfg) {
  cfg.validate(phi.grid);
  const auto& g = phi.grid;
  const double dt = cfg.step_size(g);
  const double clampv = g.diagonal();
  ScalarField out = phi;
  const auto kern = detail::make_kernel(phi, cfg);
  const bool threed = g.n == 3;
  const int nx = g.npts[0], ny = g.npts[1], nz = g.npts[2];
  const int klo = threed ? 1 : 0, khi = threed ? nz - 1 : 1;

  parallel_for(static_cast<std::size_t>(khi - klo) * (ny - 2), cfg.threads,
               [&](std::size_t lo, std::size_t hi) {
                 for (std::size_t row = lo; row < hi; ++row) {
                   const int k = klo + static_cast<int>(row / (ny - 2));
                   const int j = 1 + static_cast<int>(row % (ny - 2));
                   std::size_t f = g.flat(1, j, k);
                   for (int i = 1; i < nx - 1; ++i, ++f) {
                     double v = phi.data[f] + dt * kern(f, i, threed);
                     out.data[f] = std::clamp(v, -clampv, clampv);
                   }
                 }
               });
  detail::fill_boundary(out);
  return out;
}

// ---------------------------------------------------------------------------
// Fast sweeping redistancing

namespace detail {

constexpr double kFar = std::numeric_limits<double>::max();

// Subcell distances for cells adjacent to a sign change. Distance estimate
// |phi| / |grad phi| (exact on linear data of any scale), capped by the
// nearest linear axis crossing; preserves crossing positions to O(h^2).
inline void init_interface(const ScalarField& phi, std::vector<double>& m,
                           std::vector<uint8_t>& frozen) {
  const auto& g = phi.grid;
  const int nx = g.npts[0], ny = g.npts[1], nz = g.npts[2];
  const double h = g.h;
  m.assign(g.size(), kFar);
  frozen.assign(g.size(), 0);
  auto sgn = [](double v) { return v < 0.0 ? -1 : 1; };
  const int dirs[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double c = phi.at(i, j, k);
        double theta_min = kFar;    // nearest axis crossing
        double grad2 = 0.0;         // central-difference gradient, one-sided at walls
        double slope_max = 0.0;
        const int pos[3] = {i, j, k};
        for (int a = 0; a < g.n; ++a) {
          const int limit = g.npts[a] - 1;
          const bool has_p = pos[a] + 1 <= limit;
          const bool has_m = pos[a] - 1 >= 0;
          const double fp = has_p ? phi.at(i + dirs[a][0], j + dirs[a][1], k + dirs[a][2]) : c;
          const double fm = has_m ? phi.at(i - dirs[a][0], j - dirs[a][1], k - dirs[a][2]) : c;
          const int span = (has_p ? 1 : 0) + (has_m ? 1 : 0);
          const double da = span > 0 ? (fp - fm) / (span * h) : 0.0;
          grad2 += da * da;
          for (int s = -1; s <= 1; s += 2) {
            if ((s > 0 && !has_p) || (s < 0 && !has_m)) continue;
            const double nb = s > 0 ? fp : fm;
            if (sgn(nb) != sgn(c)) {
              const double denom = std::abs(c) + std::abs(nb);
              theta_min = std::min(theta_min, denom > 0 ? h * std::abs(c) / denom : 0.0);
              slope_max = std::max(slope_max, std::abs(nb - c) / h);
            }
          }
        }
        if (theta_min < kFar) {
          const std::size_t f = g.flat(i, j, k);
          const double gn = std::sqrt(grad2);
          double d = theta_min;
          if (gn > 0.25 * slope_max) d = std::min(std::abs(c) / gn, theta_min);
          m[f] = d;
          frozen[f] = 1;
        }
      }
}

inline double godunov_update(double a, double b, double c, double h, int n) {
  // solve for x with upwind neighbors sorted ascending
  double v[3] = {a, b, c};
  std::sort(v, v + n);
  double x = v[0] + h;
  if (n >= 2 && x > v[1]) {
    const double s = v[0] + v[1];
    x = 0.5 * (s + std::sqrt(std::max(0.0, 2 * h * h - (v[0] - v[1]) * (v[0] - v[1]))));
    if (n == 3 && x > v[2]) {
      const double q = v[0] + v[1] + v[2];
      const double disc = q * q - 3 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - h * h);
      x = (q + std::sqrt(std::max(0.0, disc))) / 3.0;
    }
  }
  return x;
}

// Gauss-Seidel sweeps over the 2^n axis orderings until the max update falls
// below tol. `cap`, when positive, freezes distances beyond the band and
// restricts the sweeps to a dilated bounding box of the interface.
inline void fast_sweep(const GridSpec& g, std::vector<double>& m,
                       const std::vector<uint8_t>& frozen, double tol, double cap) {
  int nx = g.npts[0], ny = g.npts[1], nz = g.npts[2];
  int bi0 = 0, bj0 = 0, bk0 = 0, bi1 = nx, bj1 = ny, bk1 = nz;
  if (cap > 0) {
    bi0 = nx;
    bj0 = ny;
    bk0 = nz;
    bi1 = bj1 = bk1 = 0;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          if (frozen[g.flat(i, j, k)]) {
            bi0 = std::min(bi0, i);
            bj0 = std::min(bj0, j);
            bk0 = std::min(bk0, k);
            bi1 = std::max(bi1, i + 1);
            bj1 = std::max(bj1, j + 1);
            bk1 = std::max(bk1, k + 1);
          }
    const int pad = static_cast<int>(cap / g.h) + 2;
    bi0 = std::max(0, bi0 - pad);
    bj0 = std::max(0, bj0 - pad);
    bk0 = std::max(0, bk0 - pad);
    bi1 = std::min(nx, bi1 + pad);
    bj1 = std::min(ny, bj1 + pad);
    bk1 = std::min(nz, bk1 + pad);
  }

  const double h = g.h;
  const int ndir = g.n == 3 ? 8 : 4;
  auto get = [&](int i, int j, int k) -> double {
    if (i < bi0 || j < bj0 || k < bk0 || i >= bi1 || j >= bj1 || k >= bk1) return kFar;
    const double v = m[g.flat(i, j, k)];
    return v;
  };
  for (int round = 0; round < 8; ++round) {
    double max_change = 0.0;
    for (int dir = 0; dir < ndir; ++dir) {
      const int si = (dir & 1) ? -1 : 1;
      const int sj = (dir & 2) ? -1 : 1;
      const int sk = (dir & 4) ? -1 : 1;
      const int i0 = si > 0 ? bi0 : bi1 - 1, i1 = si > 0 ? bi1 : bi0 - 1;
      const int j0 = sj > 0 ? bj0 : bj1 - 1, j1 = sj > 0 ? bj1 : bj0 - 1;
      const int k0 = sk > 0 ? bk0 : bk1 - 1, k1 = sk > 0 ? bk1 : bk0 - 1;
      for (int k = k0; k != k1; k += sk)
        for (int j = j0; j != j1; j += sj)
          for (int i = i0; i != i1; i += si) {
            const std::size_t f = g.flat(i, j, k);
            if (frozen[f]) continue;
            const double cur = m[f];
            const double ax = std::min(get(i - 1, j, k), get(i + 1, j, k));
            const double ay = std::min(get(i, j - 1, k), get(i, j + 1, k));
            double nmin = std::min(ax, ay);
            double az = kFar;
            if (g.n == 3) {
              az = std::min(get(i, j, k - 1), get(i, j, k + 1));
              nmin = std::min(nmin, az);
            }
            // beyond the band: nothing below the cap can arrive from here
            if (cap > 0 && nmin >= cap) continue;
            double x = godunov_update(ax, ay, az, h, g.n);
            if (cap > 0 && x > cap) x = cap;
            if (x < cur) {
              max_change = std::max(max_change, cur == kFar ? kFar : cur - x);
              m[f] = x;
            }
          }
    }
    if (max_change < tol) break;
  }
}

}  // namespace detail

// Redistance phi to an approximate signed distance with the same zero set.
// Returns nullopt when phi has no sign change (front extinct).
// `cap` > 0 limits distances to the band (internal use).
inline std::optional<ScalarField> reinitialize(const ScalarField& phi, double cap = 0.0) {
  const auto& g = phi.grid;
  std::vector<double> m;
  std::vector<uint8_t> frozen;
  detail::init_interface(phi, m, frozen);
  bool any = false;
  for (auto fz : frozen)
    if (fz) {
      any = true;
      break;
    }
  if (!any) return std::nullopt;

  detail::fast_sweep(g, m, frozen, 1e-3 * g.h, cap);
  ScalarField out(g, FieldKind::SignedDistance);
  const double fallback = cap > 0 ? cap : g.diagonal();
  for (std::size_t f = 0; f < g.size(); ++f) {
    double d = m[f];
    if (d >= detail::kFar) d = fallback;
    out.data[f] = phi.data[f] < 0.0 ? -d : d;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Arrival time

struct ArrivalField {
  ScalarField u;                  // arrival times; -1 on cells never reached
  std::vector<uint8_t> reached;   // mask, same layout as u
  double extinction_time = 0.0;   // max recorded arrival
  double coverage = 0.0;          // fraction of initially-inside interior cells reached
  int steps = 0;
  bool partial = false;           // coverage < 99%
  int resurrected_cells = 0;      // monotone-advance violations observed
  std::vector<std::string> warnings;

  bool reached_at(const GridIndex& g) const { return reached[u.grid.flat(g)] != 0; }
};

using SnapshotCallback =
    std::function<void(int step, double time, const ScalarField& phi)>;

// Minimum level-set mean curvature sampled on cells adjacent to the zero
// set; the mean-convexity gate for initial data.
inline double initial_min_curvature(const ScalarField& phi, const EvolveConfig& cfg) {
  const auto& g = phi.grid;
  const auto kern = detail::make_kernel(phi, cfg);
  const bool threed = g.n == 3;
  const double eps = cfg.eps_reg * g.h;
  double minH = std::numeric_limits<double>::infinity();
  const int nx = g.npts[0], ny = g.npts[1], nz = g.npts[2];
  const int klo = threed ? 1 : 0, khi = threed ? nz - 1 : 1;
  for (int k = klo; k < khi; ++k)
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        const std::size_t f = g.flat(i, j, k);
        const double c = phi.data[f];
        if (std::abs(c) > g.h) continue;
        bool near = false;
        const std::size_t nbrs[6] = {f - 1, f + 1, f - g.npts[0], f + g.npts[0],
                                     threed ? f - static_cast<std::size_t>(g.npts[0]) * ny : f,
                                     threed ? f + static_cast<std::size_t>(g.npts[0]) * ny : f};
        for (int b = 0; b < (threed ? 6 : 4); ++b)
          if ((phi.data[nbrs[b]] < 0) != (c < 0)) near = true;
        if (!near) continue;
        // rate = |grad| * H; divide out the gradient magnitude
        Vec gr = gradient_fd(phi, {i, j, k});
        const double gn = std::sqrt(dot(gr, gr) + eps * eps);
        if (gn < 0.3) continue;  // badly conditioned sample, skip
        minH = std::min(minH, kern(f, i, threed) / gn);
      }
  return minH;
}

// Evolve the level function of `shape` on `grid` and record arrival times.
inline ArrivalField compute_arrival_time(const ShapeSpec& shape, const GridSpec& grid,
                                         const EvolveConfig& cfg,
                                         const SnapshotCallback& emit = nullptr,
                                         int emit_every = 0) {
  cfg.validate(grid);
  ScalarField phi = cfg.axisymmetric ? signed_distance_init_axisym(shape, grid)
                                     : signed_distance_init(shape, grid);

  const double minH = initial_min_curvature(phi, cfg);
  if (!(minH > 0.0))
    throw std::invalid_argument(
        "compute_arrival_time: initial boundary is not mean-convex (min H = " +
        std::to_string(minH) + ")");

  const auto& g = grid;
  const double dt = cfg.step_size(g);
  const double band_update = cfg.band_update_cells * g.h;
  const double band_cap = cfg.band_total_cells * g.h;
  const bool threed = g.n == 3;
  const int nx = g.npts[0], ny = g.npts[1], nz = g.npts[2];

  ArrivalField out;
  out.u = ScalarField(g, FieldKind::ArrivalTime, -1.0);
  out.reached.assign(g.size(), 0);

  // interior cells initially inside; the one-cell margin is excluded from
  // coverage accounting (boundary closure is extrapolated, not evolved)
  std::vector<uint8_t> inside(g.size(), 0);
  std::size_t n_inside = 0;
  {
    const int klo = threed ? 1 : 0, khi = threed ? nz - 1 : 1;
    for (int k = klo; k < khi; ++k)
      for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) {
          const std::size_t f = g.flat(i, j, k);
          if (phi.data[f] < 0.0) {
            inside[f] = 1;
            ++n_inside;
          }
        }
  }
  if (n_inside == 0)
    throw std::invalid_argument("compute_arrival_time: no interior cells inside the shape");
  std::size_t remaining = n_inside;

  // cap the initial distances to the band
  for (auto& v : phi.data) v = std::clamp(v, -band_cap, band_cap);

  ScalarField next = phi;
  std::vector<std::size_t> active;
  auto rebuild_active = [&]() {
    active.clear();
    const int klo = threed ? 1 : 0, khi = threed ? nz - 1 : 1;
    for (int k = klo; k < khi; ++k)
      for (int j = 1; j < ny - 1; ++j) {
        std::size_t f = g.flat(1, j, k);
        for (int i = 1; i < nx - 1; ++i, ++f)
          if (std::abs(phi.data[f]) <= band_update) active.push_back(f);
      }
  };
  rebuild_active();

  double t = 0.0;
  int step = 0;
  const double crossing_eps = 0.0;
  (void)crossing_eps;

  while (t < cfg.t_max && remaining > 0) {
    const auto kern = detail::make_kernel(phi, cfg);
    const int sy = g.npts[0];
    // map over the active band
    parallel_for(active.size(), cfg.threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t a = lo; a < hi; ++a) {
        const std::size_t f = active[a];
        const int i = static_cast<int>(f % sy);
        double v = phi.data[f] + dt * kern(f, i, threed);
        next.data[f] = std::clamp(v, -band_cap, band_cap);
      }
    });
    // crossings + monotonicity bookkeeping (serial; deterministic order)
    for (std::size_t f : active) {
      const double a = phi.data[f], b = next.data[f];
      if (a < 0.0 && b >= 0.0) {
        if (!out.reached[f]) {
          const double frac = (b > a) ? (-a) / (b - a) : 1.0;
          out.u.data[f] = t + frac * dt;
          out.reached[f] = 1;
          if (inside[f] && remaining > 0) --remaining;
        }
      } else if (a >= 0.0 && b < 0.0) {
        ++out.resurrected_cells;
      }
    }
    std::swap(phi.data, next.data);
    detail::fill_boundary(phi);  // walls track the interior (Neumann closure)
    t += dt;
    ++step;

    if (emit && emit_every > 0 && step % emit_every == 0) emit(step, t, phi);

    if (step % cfg.reinit_every == 0 && remaining > 0) {
      auto rd = reinitialize(phi, band_cap);
      if (!rd) break;  // zero set gone: extinction
      // sign flips across reinit are sub-tolerance events; record them
      for (std::size_t f = 0; f < g.size(); ++f) {
        if (phi.data[f] < 0.0 && rd->data[f] >= 0.0 && !out.reached[f]) {
          out.u.data[f] = t;
          out.reached[f] = 1;
          if (inside[f] && remaining > 0) --remaining;
        }
      }
      phi.data = std::move(rd->data);
      detail::fill_boundary(phi);
      rebuild_active();
      next.data = phi.data;
    }
  }

  out.steps = step;
  out.coverage = n_inside ? 1.0 - static_cast<double>(remaining) / n_inside : 1.0;
  double umax = 0.0;
  for (std::size_t f = 0; f < g.size(); ++f)
    if (out.reached[f]) umax = std::max(umax, out.u.data[f]);
  out.extinction_time = umax;
  if (out.coverage < 0.99) {
    out.partial = true;
    out.warnings.push_back("partial result: front swept " +
                           std::to_string(100.0 * out.coverage) +
                           "% of the inside region before t_max");
  }
  if (out.resurrected_cells > 0)
    out.warnings.push_back("monotone advance violated at " +
                           std::to_string(out.resurrected_cells) + " cell updates");
  return out;
}

// Lift an axisymmetric (rho, z) arrival field to a 3D grid around the z axis.
inline ArrivalField lift_axisymmetric(const ArrivalField& a2, const GridSpec& grid3) {
  if (a2.u.grid.n != 2 || grid3.n != 3)
    throw std::invalid_argument("lift_axisymmetric: needs 2D source, 3D target");
  const GridSpec& g2 = a2.u.grid;
  const GridSpec& g3 = grid3;
  ArrivalField out;
  out.u = ScalarField(g3, FieldKind::ArrivalTime, -1.0);
  out.reached.assign(g3.size(), 0);
  out.extinction_time = a2.extinction_time;
  out.coverage = a2.coverage;
  out.steps = a2.steps;
  out.partial = a2.partial;
  out.warnings = a2.warnings;

  for (std::size_t f = 0; f < g3.size(); ++f) {
    const GridIndex gi = g3.unflat(f);
    const Vec p = g3.point(gi);
    const Vec q(std::hypot(p[0], p[1]), p[2]);
    if (!g2.inside_margin(q, 1.0)) continue;
    const auto c = detail::locate(g2, q, "lift");
    bool ok = true;
    for (int dj = 0; dj <= 1 && ok; ++dj)
      for (int di = 0; di <= 1 && ok; ++di)
        if (!a2.reached[g2.flat(c.i0 + di, c.j0 + dj, 0)]) ok = false;
    if (!ok) continue;
    out.u.data[f] = interpolate(a2.u, q);
    out.reached[f] = 1;
  }
  return out;
}

// Residual of the arrival-time equation at a node:
//   | -(I - N (x) N) : hess(u) - 1 |, N = grad u / |grad u|.
inline double level_set_residual(const ScalarField& u, const GridIndex& idx) {
  const Vec gr = gradient_fd(u, idx);
  const double gn = norm(gr);
  if (gn <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  const SymMat H = hessian_fd(u, idx);
  const Vec N = normalized(gr);
  const double lhs = -(H.trace() - H.quad(N));
  return std::abs(lhs - 1.0);
}

}  // namespace levelflow
