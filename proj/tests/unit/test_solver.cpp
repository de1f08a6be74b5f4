#include <doctest.h>

#include <cmath>
#include <optional>

#include "bgkale/solver.hpp"
#include "oracles.hpp"

using namespace bgkale;

namespace {

RunConfig closed_box(int n, int n_v = 10) {
  RunConfig c;
  c.dims = 2;
  c.n_per_axis = n;
  c.n_v = n_v;
  c.workers = 1;
  return c;
}

template <int Dim>
double max_moment_change(const ParticleCloud<Dim>& a, const ParticleCloud<Dim>& b, double R,
                         double T0) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(b.rho[i] - a.rho[i]) / a.rho[i]);
    worst = std::max(worst, (b.U[i] - a.U[i]).norm() / std::sqrt(R * T0));
    worst = std::max(worst, std::abs(b.T[i] - a.T[i]) / a.T[i]);
  }
  return worst;
}

}  // namespace

TEST_CASE("initial state: global Maxwellian with g2 = R T0 g1") {
  Simulation<2> sim(closed_box(8));
  const auto& c = sim.cloud();
  const auto n = sim.grid().node_count();
  const double RT = sim.config().gas.R * sim.config().T0;
  for (Eigen::Index i = 0; i < c.f.cols(); ++i)
    CHECK((c.f.col(i).segment(n, n) - RT * c.f.col(i).head(n)).abs().maxCoeff() <
          1e-12 * RT * c.f.col(i).head(n).maxCoeff());
  CHECK(c.rho[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(c.T[0] == doctest::Approx(270.0).epsilon(1e-3));
  CHECK(sim.history().size() == 1);
}

TEST_CASE("equilibrium with stationary walls is a fixed point") {
  auto cfg = closed_box(12);
  Simulation<2> sim(cfg);
  const auto before = sim.cloud();
  sim.step();
  CHECK(max_moment_change(before, sim.cloud(), cfg.gas.R, cfg.T0) < 1e-6);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(sim.cloud().x[i] == before.x[i]);
  for (int s = 0; s < 19; ++s) sim.step();
  CHECK(max_moment_change(before, sim.cloud(), cfg.gas.R, cfg.T0) < 1e-9);
  CHECK(sim.history().back().max_wall_flux < 1e-12);
}

TEST_CASE("plain equilibrium drifts by the quadrature defect of the Maxwellian") {
  // The interior relaxes toward a Maxwellian whose discrete moments miss the
  // target by eps, so one step moves the state by eps dt / (tau + dt).
  auto cfg = closed_box(12);
  cfg.equilibrium = EquilibriumModel::plain;
  Simulation<2> sim(cfg);
  const auto before = sim.cloud();
  const auto m = before.macro(0);
  Eigen::ArrayXd M(KineticModel<2>::rows(sim.grid()));
  KineticModel<2>::equilibrium(m, sim.grid(), cfg.gas.R, M);
  const auto back = KineticModel<2>::moments(M, sim.grid(), cfg.gas.R);
  const double eps = std::max(std::abs(back.rho - m.rho) / m.rho, std::abs(back.T - m.T) / m.T);
  const double tau = relaxation_time(m, cfg.gas).tau;
  const double bound = eps * cfg.dt / (tau + cfg.dt);
  sim.step();
  const double change = max_moment_change(before, sim.cloud(), cfg.gas.R, cfg.T0);
  CHECK(change <= 1.01 * bound);
  CHECK(change >= 0.5 * bound);
  CHECK(eps < 1e-3);
}

TEST_CASE("3D equilibrium is a fixed point") {
  RunConfig cfg;
  cfg.dims = 3;
  cfg.n_per_axis = 6;
  cfg.n_v = 6;
  cfg.workers = 1;
  Simulation<3> sim(cfg);
  const auto before = sim.cloud();
  sim.step();
  CHECK(max_moment_change(before, sim.cloud(), cfg.gas.R, cfg.T0) < 1e-9);
}

TEST_CASE("a step with dt = 0 is the identity on interior data") {
  auto cfg = cavity_config(2, 10, 10);
  cfg.workers = 1;
  Simulation<2> sim(cfg);
  for (int s = 0; s < 3; ++s) sim.step();
  const auto before = sim.cloud();
  sim.set_time_step(0.0);
  sim.step();
  const auto& after = sim.cloud();
  REQUIRE(after.size() == before.size());
  for (std::size_t i = 0; i < after.size(); ++i) {
    CHECK(after.x[i] == before.x[i]);
    if (!after.is_boundary(i))
      CHECK((after.f.col(static_cast<Eigen::Index>(i)) - before.f.col(static_cast<Eigen::Index>(i)))
                .abs()
                .maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(sim.set_time_step(-1.0), InvalidArgument);
}

TEST_CASE("advection leaves a uniform distribution unchanged") {
  auto cfg = closed_box(10);
  Simulation<2> sim(cfg);
  sim.rebuild_neighbors();
  sim.build_operators();
  sim.advect_explicit();
  const auto& c = sim.cloud();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!c.is_boundary(i))
      CHECK((c.f_tilde.col(static_cast<Eigen::Index>(i)) - c.f.col(static_cast<Eigen::Index>(i)))
                .abs()
                .maxCoeff() == 0.0);
}

TEST_CASE("diffuse reflection: wall in equilibrium with the gas") {
  const double R = 208.0, Tw = 300.0;
  const auto grid = build_velocity_grid(2, 1500.0, 16);
  WallSpec spec;
  spec.wall_id = 3;  // y = L, inward normal -y
  spec.T_wall = Tw;
  spec.U_wall = {40.0, 0.0};
  const auto wall = make_wall_state<2>(spec, grid, R);
  Eigen::ArrayXd dist(KineticModel<2>::rows(grid));
  KineticModel<2>::equilibrium(make_macro_state<2>(0.7, Vec<2>(40.0, 0.0), Tw, R), grid, R, dist);
  const Eigen::ArrayXd expect = dist;
  const auto r = apply_diffuse_reflection<2>(dist, wall, grid);
  CHECK(r.rho_wall == doctest::Approx(0.7).epsilon(1e-12));
  CHECK((dist - expect).abs().maxCoeff() < 1e-12 * expect.maxCoeff());
  CHECK(r.relative_flux() < 1e-12);
}

TEST_CASE("diffuse reflection: zero net flux for arbitrary incoming data") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double R = 208.0;
  for (int dims : {2, 3}) {
    const auto grid = build_velocity_grid(dims, 1200.0, dims == 2 ? 10 : 8);
    for (int face = 0; face < 2 * dims; ++face) {
      WallSpec spec;
      spec.wall_id = face;
      spec.T_wall = 200.0 + 100.0 * u(rng);
      spec.U_wall.assign(dims, 0.0);
      spec.U_wall[(face_axis(face) + 1) % dims] = 100.0 * u(rng);
      Eigen::ArrayXd dist = Eigen::ArrayXd::Random(dims == 2 ? 2 * grid.node_count()
                                                             : grid.node_count())
                                .abs();
      ReflectionResult r;
      if (dims == 2)
        r = apply_diffuse_reflection<2>(dist, make_wall_state<2>(spec, grid, R), grid);
      else
        r = apply_diffuse_reflection<3>(dist, make_wall_state<3>(spec, grid, R), grid);
      CHECK(r.relative_flux() < 1e-12);
      CHECK(r.rho_wall > 0.0);
      CHECK(dist.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("diffuse reflection: single incoming beam") {
  const double R = 208.0, Tw = 270.0;
  const auto grid = build_velocity_grid(2, 1000.0, 10);
  WallSpec spec;
  spec.wall_id = 0;  // x = 0, inward normal +x
  spec.T_wall = Tw;
  spec.U_wall = {0.0, 0.0};
  const auto wall = make_wall_state<2>(spec, grid, R);
  const auto n = grid.node_count();
  Eigen::ArrayXd dist = Eigen::ArrayXd::Zero(2 * n);
  // Beam at v = (-400, 200): node i = 3 (x), j = 6 (y).
  const Eigen::Index beam = 6 * 11 + 3;
  REQUIRE(grid.velocities()(beam, 0) == doctest::Approx(-400.0));
  REQUIRE(grid.velocities()(beam, 1) == doctest::Approx(200.0));
  dist[beam] = 2.0;
  const auto r = apply_diffuse_reflection<2>(dist, wall, grid);

  // Hand arithmetic: the outgoing half is rho_w G1(1, 0, Tw) with
  // rho_w sum_{vx>0} vx G1 = 400 * 2.
  double out = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double vx = grid.velocities()(k, 0), vy = grid.velocities()(k, 1);
    if (vx > 0.0) out += vx * std::exp(-(vx * vx + vy * vy) / (2 * R * Tw)) / (2 * M_PI * R * Tw);
  }
  CHECK(r.rho_wall == doctest::Approx(400.0 * 2.0 / out).epsilon(1e-12));
  for (Eigen::Index k = 0; k < n; ++k) {
    const double vx = grid.velocities()(k, 0), vy = grid.velocities()(k, 1);
    if (vx > 0.0) {
      const double g1 =
          r.rho_wall * std::exp(-(vx * vx + vy * vy) / (2 * R * Tw)) / (2 * M_PI * R * Tw);
      CHECK(dist[k] == doctest::Approx(g1).epsilon(1e-12));
      CHECK(dist[n + k] == doctest::Approx(R * Tw * g1).epsilon(1e-12));
    } else if (k != beam) {
      CHECK(dist[k] == 0.0);
    }
  }
  CHECK(dist[beam] == 2.0);
  CHECK(r.relative_flux() < 1e-12);
}

TEST_CASE("diffuse reflection: no outgoing nodes is a degenerate wall") {
  const auto grid = build_velocity_grid(2, 1000.0, 10);
  WallSpec spec;
  spec.wall_id = 0;
  spec.T_wall = 270.0;
  auto wall = make_wall_state<2>(spec, grid, 208.0);
  wall.unit_out_flux = 0.0;
  Eigen::ArrayXd dist = Eigen::ArrayXd::Ones(2 * grid.node_count());
  CHECK_THROWS_AS(apply_diffuse_reflection<2>(dist, wall, grid), DegenerateWall);
}

TEST_CASE("cavity: positivity, zero wall flux and lid-driven motion") {
  auto cfg = cavity_config(2, 14, 10);
  cfg.workers = 1;
  Simulation<2> sim(cfg);
  for (int s = 0; s < 30; ++s) {
    const auto& d = sim.step();
    CHECK(d.min_f >= 0.0);
    CHECK(d.max_wall_flux < 1e-12);
    CHECK(d.deficient == 0);
  }
  const auto& c = sim.cloud();
  double top = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!c.is_boundary(i) && c.x[i][1] > 0.8 * c.L) {
      top += c.U[i][0];
      ++count;
    }
  CHECK(top / count > 0.0);
}

TEST_CASE("cavity: results do not depend on the worker count") {
  auto cfg = cavity_config(2, 12, 10);
  cfg.workers = 1;
  Simulation<2> a(cfg);
  cfg.workers = 3;
  Simulation<2> b(cfg);
  for (int s = 0; s < 10; ++s) {
    a.step();
    b.step();
  }
  CHECK((a.cloud().f == b.cloud().f).all());
  CHECK(a.cloud().x == b.cloud().x);
  CHECK(a.cloud().rho == b.cloud().rho);
}

TEST_CASE("time step above the positivity bound aborts") {
  auto cfg = cavity_config(2, 10, 10);
  cfg.workers = 1;
  cfg.dt = 1e-9;
  Simulation<2> sim(cfg);
  CHECK_THROWS_AS(sim.step(), NumericalAbort);
  cfg.check_stable_dt = false;
  cfg.dt = 1e-11;
  Simulation<2> ok(cfg);
  CHECK(ok.step().stable_dt > 1e-11);
}

TEST_CASE("run: snapshot cadence and zero steps") {
  auto cfg = closed_box(6);
  cfg.n_steps = 0;
  std::vector<int> at;
  auto a = run<2>(cfg, [&](const Simulation<2>& s) { at.push_back(s.step_index()); });
  CHECK(a.snapshots == 1);
  CHECK(at == std::vector<int>{0});
  CHECK(a.diagnostics.size() == 1);

  cfg.n_steps = 7;
  cfg.snapshot_every = 3;
  at.clear();
  a = run<2>(cfg, [&](const Simulation<2>& s) { at.push_back(s.step_index()); });
  CHECK(at == std::vector<int>{0, 3, 6, 7});
  CHECK(a.diagnostics.size() == 8);
}

TEST_CASE("configuration checks") {
  auto cfg = closed_box(10);
  CHECK_NOTHROW(cfg.validate());
  cfg.n_v = 5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = closed_box(10);
  WallSpec w;
  w.wall_id = 0;
  w.T_wall = 270.0;
  w.U_wall = {1.0, 0.0};  // normal to the x = 0 wall
  cfg.walls.push_back(w);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(Simulation<3>(closed_box(10)), ConfigError);
  CHECK(cavity_config(3, 10, 10).walls.front().wall_id == 5);
  CHECK(cavity_config(2, 10, 10).resolved_v_max() ==
        doctest::Approx(1.0 + 4.0 * std::sqrt(208.0 * 270.0)));
}

TEST_CASE("upwind advection of a Gaussian pulse converges at first order") {
  // Exact solution f(x - c t); boundary particles carry the exact values.
  const Vec<2> c(1.0, 0.0);
  const double t_end = 0.1;
  auto exact = [&](const Vec<2>& x, double t) {
    const double s = (x[0] - c[0] * t - 0.35) / 0.08;
    return std::exp(-s * s);
  };
  std::vector<double> err;
  for (int n : {41, 81, 161}) {
    const auto cloud = seed_cavity_cloud<2>(1.0, n);
    const auto idx = build_voxel_index(cloud);
    const auto table = build_neighbor_table(idx, cloud);
    std::vector<std::optional<LsOperator<2>>> ops(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
      if (!cloud.is_boundary(i)) ops[i] = build_ls_operator<2>(cloud.x, i, table.of(i), cloud.h);
    const int steps = static_cast<int>(std::ceil(t_end / (0.5 * cloud.dx)));
    const double dt = t_end / steps;
    for (const auto& op : ops)
      if (op) REQUIRE(dt <= stable_dt(*op, c));
    Eigen::VectorXd f(cloud.size()), next(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) f[i] = exact(cloud.x[i], 0.0);
    for (int s = 1; s <= steps; ++s) {
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (!ops[i]) {
          next[i] = exact(cloud.x[i], s * dt);
          continue;
        }
        Eigen::VectorXd fn(ops[i]->size());
        for (Eigen::Index j = 0; j < fn.size(); ++j) fn[j] = f[ops[i]->neighbors[j]];
        next[i] = f[i] - dt * upwind_flux_2d(*ops[i], c, f[i], fn);
      }
      f.swap(next);
    }
    double e = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
      e += std::abs(f[i] - exact(cloud.x[i], t_end)) * cloud.dx * cloud.dx;
    err.push_back(e);
  }
  for (std::size_t l = 1; l < err.size(); ++l) {
    CHECK(err[l - 1] / err[l] >= 1.6);
    CHECK(err[l - 1] / err[l] <= 2.4);
  }
}
