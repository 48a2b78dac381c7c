#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levelflow/evolve.hpp"

using namespace levelflow;

namespace {

ScalarField sample(const GridSpec& g, const std::function<double(const Vec&)>& f,
                   FieldKind kind = FieldKind::SignedDistance) {
  ScalarField out(g, kind);
  for (std::size_t c = 0; c < g.size(); ++c) out.data[c] = f(g.point(g.unflat(c)));
  return out;
}

// zero-crossing position of f along the +x ray from the origin
double crossing_radius(const ScalarField& f) {
  const auto& g = f.grid;
  const int j = (g.npts[1] - 1) / 2;
  const int k = g.n == 3 ? (g.npts[2] - 1) / 2 : 0;
  const int i_mid = (g.npts[0] - 1) / 2;
  for (int i = i_mid; i + 1 < g.npts[0]; ++i) {
    const double a = f.at(i, j, k), b = f.at(i + 1, j, k);
    if (a < 0.0 && b >= 0.0) {
      const double frac = -a / (b - a);
      return g.point(i, j, k)[0] + frac * g.h;
    }
  }
  return -1.0;
}

}  // namespace

TEST_CASE("config validation rejects CFL violations") {
  auto g = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {65, 65, 1});
  EvolveConfig cfg;
  cfg.dt = 0.3 * g.h * g.h / 2;  // above the 0.25 h^2/n bound
  CHECK_THROWS_AS(cfg.validate(g), std::invalid_argument);
  cfg.dt = -1.0;
  CHECK_THROWS_AS(cfg.validate(g), std::invalid_argument);
  cfg.dt = 0.0;
  CHECK_NOTHROW(cfg.validate(g));
}

TEST_CASE("mcf_step: flat zero set is stationary") {
  auto g = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {65, 65, 1});
  // tilted plane, exercises the mixed derivatives too
  auto phi = sample(g, [](const Vec& p) { return 0.6 * p[0] + 0.8 * p[1] - 0.1; });
  EvolveConfig cfg;
  auto next = mcf_step(phi, cfg);
  double maxd = 0.0;
  for (int j = 1; j < 64; ++j)
    for (int i = 1; i < 64; ++i) maxd = std::max(maxd, std::abs(next.at(i, j) - phi.at(i, j)));
  CHECK(maxd <= 1e-14);
}

TEST_CASE("mcf_step: circle shrinks at rate (n-1)/r") {
  const double R = 0.5;
  auto g = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {257, 257, 1});  // h = R/64
  auto phi = sample(g, [&](const Vec& p) { return norm(p) - R; });
  EvolveConfig cfg;
  const double dt = cfg.step_size(g);

  const double r0 = crossing_radius(phi);
  auto next = mcf_step(phi, cfg);
  const double r1 = crossing_radius(next);
  const double want = (2 - 1) * dt / R;  // dr = (n-1) dt / r
  CHECK(r0 - r1 == Catch::Approx(want).epsilon(0.10));
}

TEST_CASE("mcf_step: cylinder tube shrinks at rate 1/r in R^3") {
  const double R = 0.5;
  auto g = GridSpec::make(3, Vec(-1.0, -1.0, -1.0), Vec(1.0, 1.0, 1.0), {65, 65, 65});
  auto phi = sample(g, [&](const Vec& p) { return std::hypot(p[0], p[1]) - R; });
  EvolveConfig cfg;
  const double dt = cfg.step_size(g);
  const double r0 = crossing_radius(phi);
  auto next = mcf_step(phi, cfg);
  const double r1 = crossing_radius(next);
  CHECK(r0 - r1 == Catch::Approx(dt / R).epsilon(0.10));
}

namespace {

// restrict comparisons to cells whose nearest interface point lies safely in
// the box: sweeping measures distance to the in-box zero set only, and feet
// grazing the walls pick up one-sided-stencil error
bool foot_in_box(const GridSpec& g, const Vec& p, const Vec& normal, double d) {
  const Vec foot = p - d * normal;
  for (int a = 0; a < g.n; ++a)
    if (foot[a] < g.lo[a] + 8 * g.h || foot[a] > g.hi[a] - 8 * g.h) return false;
  return true;
}

}  // namespace

TEST_CASE("reinitialize: plane distance is a fixed point") {
  auto g = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {65, 65, 1});
  const Vec nrm(0.6, 0.8);
  auto d = sample(g, [&](const Vec& p) { return dot(nrm, p) - 0.05; });
  auto out = reinitialize(d);
  REQUIRE(out.has_value());
  double maxdiff = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (g.margin(g.unflat(c)) < 2) continue;
    const Vec p = g.point(g.unflat(c));
    if (!foot_in_box(g, p, nrm, d.data[c])) continue;
    maxdiff = std::max(maxdiff, std::abs(out->data[c] - d.data[c]));
  }
  CHECK(maxdiff <= 1e-3 * g.h);

  // applying the operator again barely moves anything
  auto out2 = reinitialize(*out);
  REQUIRE(out2.has_value());
  double drift = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c)
    drift = std::max(drift, std::abs(out2->data[c] - out->data[c]));
  CHECK(drift <= 0.05 * g.h);
}

TEST_CASE("reinitialize: rescaled input recovers unit gradient") {
  auto g = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {65, 65, 1});
  const Vec nrm(0.6, 0.8);
  auto d = sample(g, [&](const Vec& p) { return dot(nrm, p) - 0.05; });
  auto twice = d;
  for (auto& v : twice.data) v *= 2.0;
  auto out = reinitialize(twice);
  REQUIRE(out.has_value());
  double maxdiff = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (g.margin(g.unflat(c)) < 2) continue;
    const Vec p = g.point(g.unflat(c));
    if (!foot_in_box(g, p, nrm, d.data[c])) continue;
    maxdiff = std::max(maxdiff, std::abs(out->data[c] - d.data[c]));
  }
  CHECK(maxdiff <= 1e-2 * g.h);
}

TEST_CASE("reinitialize: circle redistancing stays near truth") {
  auto g = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {129, 129, 1});
  auto skew = sample(g, [](const Vec& p) { return 3.0 * (norm(p) - 0.6); });
  auto out = reinitialize(skew);
  REQUIRE(out.has_value());
  double band = 0.0, global = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Vec p = g.point(g.unflat(c));
    const double truth = norm(p) - 0.6;
    const double diff = std::abs(out->data[c] - truth);
    global = std::max(global, diff);
    if (std::abs(truth) <= 4 * g.h) band = std::max(band, diff);
  }
  // first-order sweeping: tight near the interface, O(h) drift far away
  CHECK(band <= 0.1 * g.h);
  CHECK(global <= 2.0 * g.h);
}

TEST_CASE("reinitialize: no sign change signals extinction") {
  auto g = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {33, 33, 1});
  auto pos = sample(g, [](const Vec& p) { return 1.0 + dot(p, p); });
  CHECK_FALSE(reinitialize(pos).has_value());
}

TEST_CASE("arrival time of the shrinking circle matches the closed form") {
  const double R = 0.8;
  auto g = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {129, 129, 1});
  EvolveConfig cfg;
  cfg.t_max = 0.5;
  auto a = compute_arrival_time(ShapeSpec::sphere(Vec(0.0, 0.0), R), g, cfg);

  CHECK(a.coverage >= 0.99);
  CHECK_FALSE(a.partial);
  CHECK(a.resurrected_cells == 0);
  CHECK(a.extinction_time == Catch::Approx(R * R / 2).margin(0.02));

  double linf = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Vec p = g.point(g.unflat(c));
    if (norm(p) > 0.56) continue;
    REQUIRE(a.reached[c]);
    linf = std::max(linf, std::abs(a.u.data[c] - (R * R - dot(p, p)) / 2.0));
  }
  CHECK(linf <= 0.02);  // half the acceptance resolution, double the bound

  // u >= 0 on reached cells, < t_max
  for (std::size_t c = 0; c < g.size(); ++c)
    if (a.reached[c]) {
      REQUIRE(a.u.data[c] >= 0.0);
      REQUIRE(a.u.data[c] < cfg.t_max);
    }
}

TEST_CASE("no interior local minima of the arrival time") {
  const double R = 0.7;
  auto g = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {97, 97, 1});
  EvolveConfig cfg;
  cfg.t_max = 0.5;
  auto a = compute_arrival_time(ShapeSpec::sphere(Vec(0.0, 0.0), R), g, cfg);
  // every strict local minimum over reached cells must sit in the initial
  // boundary band (arrival within a few steps of t=0)
  const double t_band = 4.0 * cfg.step_size(g) + 1e-12;
  int bad = 0;
  for (int j = 2; j < g.npts[1] - 2; ++j)
    for (int i = 2; i < g.npts[0] - 2; ++i) {
      const std::size_t f = g.flat(i, j, 0);
      if (!a.reached[f]) continue;
      bool strict_min = true;
      for (int dj = -1; dj <= 1 && strict_min; ++dj)
        for (int di = -1; di <= 1 && strict_min; ++di) {
          if (!di && !dj) continue;
          const std::size_t nb = g.flat(i + di, j + dj, 0);
          if (!a.reached[nb] || a.u.data[nb] <= a.u.data[f]) strict_min = false;
        }
      if (strict_min && a.u.data[f] > t_band) ++bad;
    }
  CHECK(bad == 0);
}

TEST_CASE("level-set equation residual decreases with resolution") {
  const double R = 0.8;
  EvolveConfig cfg;
  cfg.t_max = 0.5;
  auto residual_med = [&](int npts) {
    auto g = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {npts, npts, 1});
    auto a = compute_arrival_time(ShapeSpec::sphere(Vec(0.0, 0.0), R), g, cfg);
    std::vector<double> res;
    for (int j = 2; j < g.npts[1] - 2; ++j)
      for (int i = 2; i < g.npts[0] - 2; ++i) {
        const GridIndex idx{i, j, 0};
        bool ok = true;
        for (int dj = -1; dj <= 1; ++dj)
          for (int di = -1; di <= 1; ++di)
            if (!a.reached[g.flat(i + di, j + dj, 0)]) ok = false;
        if (!ok) continue;
        if (norm(gradient_fd(a.u, idx)) <= 0.1) continue;
        res.push_back(level_set_residual(a.u, idx));
      }
    REQUIRE(res.size() > 100);
    std::sort(res.begin(), res.end());
    return res[res.size() / 2];
  };
  const double coarse = residual_med(65);
  const double fine = residual_med(129);
  CHECK(fine < coarse);
  const double h_fine = 2.0 / 128;
  CHECK(fine <= 2.0 * std::sqrt(h_fine));  // C sqrt(h) with a generous C
}

TEST_CASE("parabolic rescaling: lambda-scaled run gives lambda^2 u") {
  EvolveConfig cfg;
  cfg.t_max = 0.3;
  const double R = 0.4, lam = 2.0;
  auto g1 = GridSpec::make(2, Vec(-0.6, -0.6), Vec(0.6, 0.6), {97, 97, 1});
  auto a1 = compute_arrival_time(ShapeSpec::sphere(Vec(0.0, 0.0), R), g1, cfg);
  auto g2 = GridSpec::make(2, Vec(-1.2, -1.2), Vec(1.2, 1.2), {97, 97, 1});
  EvolveConfig cfg2 = cfg;
  cfg2.t_max = cfg.t_max * lam * lam;
  auto a2 = compute_arrival_time(ShapeSpec::sphere(Vec(0.0, 0.0), lam * R), g2, cfg2);

  double worst = 0.0;
  for (int j = 10; j < 87; ++j)
    for (int i = 10; i < 87; ++i) {
      const std::size_t f = g1.flat(i, j, 0);
      if (!a1.reached[f] || !a2.reached[f]) continue;
      if (norm(g1.point(i, j)) > 0.3) continue;
      worst = std::max(worst, std::abs(a2.u.data[f] - lam * lam * a1.u.data[f]));
    }
  // discretization error at these resolutions, scaled by lambda^2
  CHECK(worst <= 0.04);
}

TEST_CASE("axisymmetric evolution reproduces the 3D sphere arrival time") {
  const double R = 0.8;
  auto g2 = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {129, 129, 1});
  EvolveConfig cfg;
  cfg.axisymmetric = true;
  cfg.t_max = 0.3;
  auto a = compute_arrival_time(ShapeSpec::sphere(Vec(0.0, 0.0, 0.0), R), g2, cfg);
  CHECK(a.coverage >= 0.99);
  // u(rho,z) = (R^2 - rho^2 - z^2) / (2(n-1)), n = 3
  double linf = 0.0;
  for (std::size_t c = 0; c < g2.size(); ++c) {
    const Vec q = g2.point(g2.unflat(c));
    if (dot(q, q) > 0.56 * 0.56) continue;
    REQUIRE(a.reached[c]);
    linf = std::max(linf, std::abs(a.u.data[c] - (R * R - dot(q, q)) / 4.0));
  }
  CHECK(linf <= 0.02);
}

TEST_CASE("axisymmetric cylinder arrival matches the k=1 closed form") {
  const double R = 0.6;
  auto g2 = GridSpec::make(2, Vec(-1.0, -0.5), Vec(1.0, 0.5), {129, 65, 1});
  EvolveConfig cfg;
  cfg.axisymmetric = true;
  cfg.t_max = 0.4;
  auto a = compute_arrival_time(
      ShapeSpec::cylinder_slab(Vec(0.0, 0.0, 0.0), Vec(0.0, 0.0, 1.0), R), g2, cfg);
  double linf = 0.0;
  for (std::size_t c = 0; c < g2.size(); ++c) {
    const Vec q = g2.point(g2.unflat(c));
    if (std::abs(q[0]) > 0.45 || std::abs(q[1]) > 0.3) continue;
    REQUIRE(a.reached[c]);
    linf = std::max(linf, std::abs(a.u.data[c] - (R * R - q[0] * q[0]) / 2.0));
  }
  CHECK(linf <= 0.02);
}

TEST_CASE("dumbbell neck pinches before the lobes vanish") {
  auto g2 = GridSpec::make(2, Vec(-0.8, -1.4), Vec(0.8, 1.4), {129, 225, 1});
  EvolveConfig cfg;
  cfg.axisymmetric = true;
  cfg.t_max = 0.12;
  auto a = compute_arrival_time(
      ShapeSpec::dumbbell(Vec(0.0, 0.0, 0.0), Vec(0.0, 0.0, 1.0), 0.7, 0.5, 0.15), g2, cfg);
  CHECK(a.coverage >= 0.99);
  const GridIndex neck = g2.nearest(Vec(0.0, 0.0));
  const GridIndex lobe = g2.nearest(Vec(0.0, 0.7));
  const GridIndex shoulder = g2.nearest(Vec(0.1, 0.0));
  REQUIRE(a.reached_at(neck));
  REQUIRE(a.reached_at(lobe));
  // mixed pattern at the saddle: later than radial neighbors, earlier than
  // the lobes along the axis
  CHECK(a.u.at(neck) > a.u.at(shoulder));
  CHECK(a.u.at(neck) < a.u.at(lobe));
  CHECK(a.extinction_time > 2.0 * a.u.at(neck));
}

TEST_CASE("lift_axisymmetric produces a consistent 3D field") {
  const double R = 0.8;
  auto g2 = GridSpec::make(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {129, 129, 1});
  EvolveConfig cfg;
  cfg.axisymmetric = true;
  cfg.t_max = 0.3;
  auto a2 = compute_arrival_time(ShapeSpec::sphere(Vec(0.0, 0.0, 0.0), R), g2, cfg);
  auto g3 = GridSpec::make(3, Vec(-0.9, -0.9, -0.9), Vec(0.9, 0.9, 0.9), {49, 49, 49});
  auto a3 = lift_axisymmetric(a2, g3);
  const Vec p(0.3, 0.2, -0.1);
  const GridIndex idx = g3.nearest(p);
  REQUIRE(a3.reached_at(idx));
  const Vec q = g3.point(idx);
  CHECK(a3.u.at(idx) == Catch::Approx((R * R - dot(q, q)) / 4.0).margin(0.02));
}
