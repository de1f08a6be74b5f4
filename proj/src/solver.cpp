#include "bgkale/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace bgkale {
namespace {

template <typename Fn>
auto with_particle_context(std::size_t i, Fn&& fn) {
  try {
    return fn();
  } catch (const DegenerateState& e) {
    throw DegenerateState("particle " + std::to_string(i) + ": " + e.what());
  } catch (const DegenerateWall& e) {
    throw DegenerateWall("particle " + std::to_string(i) + ": " + e.what());
  }
}

// (v - u) . n for every velocity node.
template <int Dim>
void project_into(const VelocityGrid& grid, const Vec<Dim>& n, double un, Eigen::ArrayXd& out) {
  const auto& v = grid.velocities();
  if constexpr (Dim == 2)
    out = v.col(0) * n[0] + v.col(1) * n[1] - un;
  else
    out = v.col(0) * n[0] + v.col(1) * n[1] + v.col(2) * n[2] - un;
}

}  // namespace

Eigen::VectorXd WallSpec::velocity(int dims) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dims);
  for (int a = 0; a < dims && a < static_cast<int>(U_wall.size()); ++a) u[a] = U_wall[a];
  return u;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what, key);
  };
  if (dims != 2 && dims != 3) fail("run.dims", "must be 2 or 3");
  if (!(L > 0.0)) fail("domain.L", "must be positive");
  if (n_per_axis < 3) fail("domain.n_per_axis", "must be >= 3");
  if (n_v < 2 || n_v % 2 != 0) fail("velocity.n_v", "must be even and >= 2");
  if (v_max && !(*v_max > 0.0)) fail("velocity.v_max", "must be positive");
  if (!(dt > 0.0)) fail("run.dt", "must be positive");
  if (n_steps < 0) fail("run.steps", "must be >= 0");
  if (!(gas.diameter > 0.0)) fail("gas.diameter", "must be positive");
  if (!(gas.k_boltzmann > 0.0)) fail("gas.k_boltzmann", "must be positive");
  if (!(gas.R > 0.0)) fail("gas.R", "must be positive");
  if (!(rho0 > 0.0)) fail("initial.rho", "must be positive");
  if (!(T0 > 0.0)) fail("initial.T", "must be positive");
  if (!U0.empty() && static_cast<int>(U0.size()) != dims)
    fail("initial.velocity", "needs one component per dimension");
  if (!(h_factor > 0.0)) fail("domain.h_factor", "must be positive");
  if (!(management.r_merge_factor >= 0.0)) fail("management.r_merge", "must be >= 0");
  if (management.m_min < 0) fail("management.m_min", "must be >= 0");
  if (snapshot_every < 0) fail("output.snapshot_every", "must be >= 0");
  if (snapshot_format != "csv" && snapshot_format != "vtk")
    fail("output.format", "must be csv or vtk");

  std::vector<bool> seen(2 * dims, false);
  for (const auto& w : walls) {
    const std::string key = "wall." + std::to_string(w.wall_id);
    if (w.wall_id < 0 || w.wall_id >= 2 * dims) fail(key, "face out of range");
    if (seen[w.wall_id]) fail(key, "wall given twice");
    seen[w.wall_id] = true;
    if (!(w.T_wall > 0.0)) fail(key + ".temperature", "must be positive");
    if (!w.U_wall.empty() && static_cast<int>(w.U_wall.size()) != dims)
      fail(key + ".velocity", "needs one component per dimension");
    const Eigen::VectorXd u = w.velocity(dims);
    if (u[face_axis(w.wall_id)] != 0.0) fail(key + ".velocity", "must be tangential to the wall");
  }
}

std::vector<WallSpec> RunConfig::resolved_walls() const {
  std::vector<WallSpec> out(2 * dims);
  for (int face = 0; face < 2 * dims; ++face) {
    out[face].wall_id = face;
    out[face].T_wall = T0;
    out[face].U_wall.assign(dims, 0.0);
  }
  for (const auto& w : walls) {
    out[w.wall_id] = w;
    out[w.wall_id].U_wall.resize(dims, 0.0);
  }
  return out;
}

double RunConfig::resolved_v_max() const {
  if (v_max) return *v_max;
  double fastest = 0.0;
  for (const auto& w : resolved_walls()) fastest = std::max(fastest, w.velocity(dims).norm());
  if (!U0.empty())
    fastest = std::max(fastest, Eigen::Map<const Eigen::VectorXd>(U0.data(), dims).norm());
  return default_v_max(fastest, gas.R, T0);
}

RunConfig cavity_config(int dims, int n_per_axis, int n_v, double lid_speed) {
  RunConfig c;
  c.dims = dims;
  c.n_per_axis = n_per_axis;
  c.n_v = n_v;
  WallSpec lid;
  lid.wall_id = 2 * (dims - 1) + 1;
  lid.T_wall = c.T0;
  lid.U_wall.assign(dims, 0.0);
  lid.U_wall[0] = lid_speed;
  c.walls.push_back(lid);
  return c;
}

template <int Dim>
WallState<Dim> make_wall_state(const WallSpec& spec, const VelocityGrid& grid, double R) {
  WallState<Dim> w;
  w.spec = spec;
  w.normal = spec.normal<Dim>();
  w.U = spec.velocity(Dim);
  project_into<Dim>(grid, w.normal, w.U.dot(w.normal), w.cn);
  w.maxwell.resize(KineticModel<Dim>::rows(grid));
  KineticModel<Dim>::equilibrium(make_macro_state<Dim>(1.0, w.U, spec.T_wall, R), grid, R,
                                 w.maxwell);
  const Eigen::Index n = grid.node_count();
  w.unit_out_flux = (w.cn.max(0.0) * w.maxwell.head(n)).sum() * grid.cell_volume();
  return w;
}

template <int Dim>
ReflectionResult apply_diffuse_reflection(Eigen::Ref<Eigen::ArrayXd> dist,
                                          const WallState<Dim>& wall, const VelocityGrid& grid) {
  const Eigen::Index n = grid.node_count();
  if (dist.size() != KineticModel<Dim>::rows(grid))
    throw ContractViolation("apply_diffuse_reflection: distribution size mismatch");
  if (!(wall.unit_out_flux > 0.0))
    throw DegenerateWall("wall " + std::to_string(wall.spec.wall_id) +
                         ": no outgoing velocity nodes");

  const double dV = grid.cell_volume();
  const double in_flux = (wall.cn.min(0.0) * dist.head(n)).sum() * dV;
  ReflectionResult r;
  r.rho_wall = -in_flux / wall.unit_out_flux;
  for (int c = 0; c < KineticModel<Dim>::components; ++c) {
    auto seg = dist.segment(c * n, n);
    seg = (wall.cn > 0.0).select(r.rho_wall * wall.maxwell.segment(c * n, n), seg);
  }
  r.net_flux = (wall.cn * dist.head(n)).sum() * dV;
  r.abs_flux = (wall.cn.abs() * dist.head(n)).sum() * dV;
  return r;
}

template <int Dim>
Simulation<Dim>::Simulation(const RunConfig& config) : config_(config), exec_(config.workers) {
  if (config_.dims != Dim)
    throw ConfigError("run.dims: configuration is " + std::to_string(config_.dims) +
                          "D but the simulation is " + std::to_string(Dim) + "D",
                      "run.dims");
  config_.validate();
  config_.gas.validate();
  grid_ = build_velocity_grid(Dim, config_.resolved_v_max(), config_.n_v);
  cloud_ = seed_cavity_cloud<Dim>(config_.L, config_.n_per_axis, config_.h_factor);
  for (const auto& w : config_.resolved_walls())
    walls_.push_back(make_wall_state<Dim>(w, grid_, config_.gas.R));
  retag_boundary();
  initialise();
  current_ = measure();
  history_.push_back(current_);
}

template <int Dim>
void Simulation<Dim>::retag_boundary() {
  for (std::size_t i = 0; i < cloud_.size(); ++i) {
    if (!cloud_.is_boundary(i)) continue;
    const auto faces = faces_of<Dim>(cloud_.x[i], cloud_.L);
    int chosen = faces.front();
    for (int face : faces) {
      if (walls_[face].U.isZero()) {
        chosen = face;
        break;
      }
    }
    cloud_.wall_id[i] = chosen;
  }
}

template <int Dim>
void Simulation<Dim>::initialise() {
  Vec<Dim> U0 = Vec<Dim>::Zero();
  for (int a = 0; a < static_cast<int>(config_.U0.size()); ++a) U0[a] = config_.U0[a];
  const auto m0 = make_macro_state<Dim>(config_.rho0, U0, config_.T0, config_.gas.R);

  cloud_.allocate_distributions(Model::rows(grid_));
  Eigen::ArrayXd M(Model::rows(grid_));
  Model::equilibrium(m0, grid_, config_.gas.R, M);
  const auto discrete = Model::moments(M, grid_, config_.gas.R);
  cloud_.f.colwise() = M;
  for (std::size_t i = 0; i < cloud_.size(); ++i) cloud_.set_macro(i, discrete);
}

template <int Dim>
std::size_t Simulation<Dim>::distribution_bytes() const {
  return static_cast<std::size_t>(cloud_.f.size()) * sizeof(double);
}

template <int Dim>
StepDiagnostics Simulation<Dim>::measure() const {
  StepDiagnostics d;
  d.step = step_;
  d.time = time_;
  d.particles = cloud_.size();
  const double volume = std::pow(cloud_.L, Dim);
  const double n = static_cast<double>(cloud_.size());
  Vec<Dim> p = Vec<Dim>::Zero();
  double m = 0.0;
  for (std::size_t i = 0; i < cloud_.size(); ++i) {
    m += cloud_.rho[i];
    p += cloud_.rho[i] * cloud_.U[i];
  }
  d.mass = volume * m / n;
  d.momentum.resize(Dim);
  for (int a = 0; a < Dim; ++a) d.momentum[a] = volume * p[a] / n;
  d.min_f = cloud_.f.size() > 0 ? cloud_.f.minCoeff() : 0.0;
  d.stable_dt = std::numeric_limits<double>::infinity();
  return d;
}

template <int Dim>
void Simulation<Dim>::rebuild_neighbors() {
  index_ = build_voxel_index<Dim>(cloud_, exec_);
  table_ = build_neighbor_table<Dim>(index_, cloud_, exec_);
}

template <int Dim>
void Simulation<Dim>::manage_particles() {
  if (!config_.management.enabled) return;
  const double r_merge = config_.management.r_merge_factor * cloud_.dx;
  const auto merge =
      merge_close_pairs<Dim>(cloud_, index_, table_, grid_, config_.gas.R, r_merge);
  if (merge.merged > 0) rebuild_neighbors();
  const auto fill = fill_holes<Dim>(cloud_, index_, table_, grid_, config_.gas.R,
                                    config_.resolved_m_min());
  if (fill.inserted > 0) rebuild_neighbors();
  current_.merged = merge.merged;
  current_.inserted = fill.inserted;
  current_.management_skipped = merge.skipped + fill.skipped;
}

template <int Dim>
void Simulation<Dim>::build_operators() {
  const std::size_t n = cloud_.size();
  ops_.assign(n, std::nullopt);
  slot_flag_.assign(n, 0);
  const std::span<const Vec<Dim>> positions(cloud_.x);
  par_map_particles(exec_, n, [&](std::size_t i) {
    if (cloud_.is_boundary(i)) return;
    try {
      ops_[i] = build_ls_operator<Dim>(positions, i, table_.of(i), cloud_.h);
    } catch (const DeficientStencil&) {
      slot_flag_[i] = 1;
    }
  });
  current_.deficient =
      static_cast<int>(std::count(slot_flag_.begin(), slot_flag_.end(), char{1}));
}

template <int Dim>
void Simulation<Dim>::advect_explicit() {
  const std::size_t n = cloud_.size();
  if (cloud_.f_tilde.rows() != cloud_.f.rows() || cloud_.f_tilde.cols() != cloud_.f.cols())
    cloud_.f_tilde.resize(cloud_.f.rows(), cloud_.f.cols());
  slot_rate_.assign(n, 0.0);
  const double dt = config_.dt;
  const Eigen::Index nodes = grid_.node_count();
  const auto& v = grid_.velocities();

  par_map_particles(exec_, n, [&](std::size_t i) {
    const auto col = static_cast<Eigen::Index>(i);
    if (!ops_[i]) {
      cloud_.f_tilde.col(col) = cloud_.f.col(col);
      return;
    }
    const LsOperator<Dim>& op = *ops_[i];
    const Vec<Dim>& Ui = cloud_.U[i];
    thread_local Eigen::ArrayXd acc, rate, K, cn, ct, cb;
    acc.setZero(cloud_.f.rows());
    rate.setZero(nodes);
    const auto fi = cloud_.f.col(col);

    for (Eigen::Index j = 0; j < op.size(); ++j) {
      const auto A = op.frame(j);
      const auto r = op.rotated.col(j);
      const Vec<Dim> AU = A * Ui;
      if constexpr (Dim == 2) {
        cn = v.col(0) * A(0, 0) + v.col(1) * A(0, 1) - AU[0];
        ct = v.col(0) * A(1, 0) + v.col(1) * A(1, 1) - AU[1];
        K = -2.0 * ((r[0] * cn).min(0.0) + (r[1] * ct).min(0.0));
      } else {
        cn = v.col(0) * A(0, 0) + v.col(1) * A(0, 1) + v.col(2) * A(0, 2) - AU[0];
        ct = v.col(0) * A(1, 0) + v.col(1) * A(1, 1) + v.col(2) * A(1, 2) - AU[1];
        cb = v.col(0) * A(2, 0) + v.col(1) * A(2, 1) + v.col(2) * A(2, 2) - AU[2];
        K = -2.0 * ((r[0] * cn).min(0.0) + (r[1] * ct).min(0.0) + (r[2] * cb).min(0.0));
      }
      rate += K;
      const auto fj = cloud_.f.col(op.neighbors[j]);
      for (int c = 0; c < Model::components; ++c)
        acc.segment(c * nodes, nodes) +=
            K * (fj.segment(c * nodes, nodes) - fi.segment(c * nodes, nodes));
    }
    cloud_.f_tilde.col(col) = fi + dt * acc;
    slot_rate_[i] = rate.maxCoeff();
  });

  const double max_rate = *std::max_element(slot_rate_.begin(), slot_rate_.end());
  current_.stable_dt =
      max_rate > 0.0 ? 1.0 / max_rate : std::numeric_limits<double>::infinity();
  if (config_.check_stable_dt && dt > current_.stable_dt) {
    std::ostringstream os;
    os << "step " << step_ << ": dt = " << dt << " exceeds the positivity bound stable_dt = "
       << current_.stable_dt;
    throw NumericalAbort(os.str());
  }
}

template <int Dim>
void Simulation<Dim>::recover_moments() {
  const std::size_t n = cloud_.size();
  next_.resize(n);
  par_map_particles(exec_, n, [&](std::size_t i) {
    if (cloud_.is_boundary(i)) return;
    next_[i] = with_particle_context(i, [&] {
      return Model::moments(cloud_.f_tilde.col(static_cast<Eigen::Index>(i)), grid_,
                            config_.gas.R);
    });
  });
}

template <int Dim>
void Simulation<Dim>::relax_and_move() {
  const std::size_t n = cloud_.size();
  slot_flag_.assign(n, 0);
  const double dt = config_.dt;
  const double R = config_.gas.R;
  const double L = cloud_.L;
  const double inset = 1e-3 * cloud_.dx;
  const bool conservative = config_.equilibrium == EquilibriumModel::conservative;

  par_map_particles(exec_, n, [&](std::size_t i) {
    if (cloud_.is_boundary(i)) return;
    const auto col = static_cast<Eigen::Index>(i);
    const MacroState<Dim>& m = next_[i];
    thread_local Eigen::ArrayXd M, scratch;
    M.resize(Model::rows(grid_));
    scratch.resize(Model::rows(grid_));
    const auto params = conservative ? fit_discrete_equilibrium<Dim>(m, grid_, R, scratch) : m;
    Model::equilibrium(params, grid_, R, M);
    const double tau = relaxation_time(m, config_.gas).tau;
    const auto ft = cloud_.f_tilde.col(col);
    cloud_.f.col(col) = ft + (dt / (tau + dt)) * (M - ft);
    cloud_.set_macro(i, m);

    Vec<Dim> x = cloud_.x[i] + dt * m.U;
    for (int a = 0; a < Dim; ++a) {
      if (x[a] <= 0.0) {
        x[a] = inset;
        slot_flag_[i] = 1;
      } else if (x[a] >= L) {
        x[a] = L - inset;
        slot_flag_[i] = 1;
      }
    }
    cloud_.x[i] = x;
  });
  current_.clamped = static_cast<int>(std::count(slot_flag_.begin(), slot_flag_.end(), char{1}));
}

template <int Dim>
void Simulation<Dim>::reconstruct_boundaries() {
  const std::size_t n = cloud_.size();
  slot_flag_.assign(n, 0);
  const std::span<const Vec<Dim>> positions(cloud_.x);
  par_map_particles(exec_, n, [&](std::size_t b) {
    if (!cloud_.is_boundary(b)) return;
    thread_local std::vector<int> interior;
    interior.clear();
    for (int j : table_.of(b))
      if (!cloud_.is_boundary(j)) interior.push_back(j);
    try {
      const auto st = build_interpolation<Dim>(positions, cloud_.x[b], interior, cloud_.h, b);
      auto out = cloud_.f.col(static_cast<Eigen::Index>(b));
      out.setZero();
      for (std::size_t k = 0; k < st.neighbors.size(); ++k)
        out += st.coeffs[static_cast<Eigen::Index>(k)] * cloud_.f.col(st.neighbors[k]);
      out = out.max(0.0);
    } catch (const DeficientStencil&) {
      slot_flag_[b] = 1;
    }
  });
  current_.boundary_fallbacks =
      static_cast<int>(std::count(slot_flag_.begin(), slot_flag_.end(), char{1}));
}

template <int Dim>
void Simulation<Dim>::reflect_boundaries() {
  const std::size_t n = cloud_.size();
  slot_flux_.assign(n, 0.0);
  par_map_particles(exec_, n, [&](std::size_t b) {
    if (!cloud_.is_boundary(b)) return;
    with_particle_context(b, [&] {
      auto col = cloud_.f.col(static_cast<Eigen::Index>(b));
      const auto r = apply_diffuse_reflection<Dim>(col, walls_[cloud_.wall_id[b]], grid_);
      slot_flux_[b] = r.relative_flux();
      cloud_.set_macro(b, Model::moments(col, grid_, config_.gas.R));
      return 0;
    });
  });
  current_.max_wall_flux = *std::max_element(slot_flux_.begin(), slot_flux_.end());
}

template <int Dim>
const StepDiagnostics& Simulation<Dim>::step() {
  const auto start = std::chrono::steady_clock::now();
  timer_.begin_step();
  current_ = StepDiagnostics{};
  try {
    timer_.time(phase::neighbor_search, [&] { rebuild_neighbors(); });
    timer_.time(phase::particle_organization, [&] { manage_particles(); });
    timer_.time(phase::spatial_derivative, [&] {
      build_operators();
      advect_explicit();
    });
    timer_.time(phase::update_moment, [&] { recover_moments(); });
    timer_.time(phase::update_function, [&] { relax_and_move(); });
    timer_.time(phase::boundary_interpolation, [&] { reconstruct_boundaries(); });
    timer_.time(phase::diffuse_reflection, [&] { reflect_boundaries(); });
  } catch (const DegenerateState& e) {
    throw NumericalAbort("step " + std::to_string(step_) + ": " + e.what());
  } catch (const DegenerateWall& e) {
    throw NumericalAbort("step " + std::to_string(step_) + ": " + e.what());
  }
  ++step_;
  time_ += config_.dt;

  timer_.time(phase::diagnostics, [&] {
    const auto d = measure();
    current_.step = d.step;
    current_.time = d.time;
    current_.particles = d.particles;
    current_.mass = d.mass;
    current_.momentum = d.momentum;
    current_.min_f = d.min_f;
  });
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  current_.seconds = elapsed.count();
  history_.push_back(current_);
  return history_.back();
}

template <int Dim>
RunArtifacts run(const RunConfig& config,
                 const std::function<void(const Simulation<Dim>&)>& on_snapshot) {
  Simulation<Dim> sim(config);
  RunArtifacts out;
  auto snapshot = [&] {
    if (on_snapshot) on_snapshot(sim);
    ++out.snapshots;
  };
  snapshot();
  for (int s = 1; s <= config.n_steps; ++s) {
    sim.step();
    const bool cadence = config.snapshot_every > 0 && s % config.snapshot_every == 0;
    if (cadence || s == config.n_steps) snapshot();
  }
  out.diagnostics = sim.history();
  out.timer = sim.timer();
  return out;
}

template struct WallState<2>;
template struct WallState<3>;
template WallState<2> make_wall_state<2>(const WallSpec&, const VelocityGrid&, double);
template WallState<3> make_wall_state<3>(const WallSpec&, const VelocityGrid&, double);
template ReflectionResult apply_diffuse_reflection<2>(Eigen::Ref<Eigen::ArrayXd>,
                                                      const WallState<2>&, const VelocityGrid&);
template ReflectionResult apply_diffuse_reflection<3>(Eigen::Ref<Eigen::ArrayXd>,
                                                      const WallState<3>&, const VelocityGrid&);
template class Simulation<2>;
template class Simulation<3>;
template RunArtifacts run<2>(const RunConfig&,
                             const std::function<void(const Simulation<2>&)>&);
template RunArtifacts run<3>(const RunConfig&,
                             const std::function<void(const Simulation<3>&)>&);

}  // namespace bgkale
