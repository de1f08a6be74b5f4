#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bgkale/gfdm.hpp"
#include "bgkale/kinetic.hpp"
#include "bgkale/neighbor_search.hpp"
#include "bgkale/parallel.hpp"
#include "bgkale/particle_mgmt.hpp"
#include "bgkale/phase_space.hpp"

namespace bgkale {

/// Diffuse wall on one face of the box. Faces are numbered 2a (x_a = 0) and
/// 2a+1 (x_a = L); the inward normal follows from the face.
struct WallSpec {
  int wall_id = 0;
  double T_wall = 0.0;
  std::vector<double> U_wall;  // length dims; must be tangential

  template <int Dim>
  Vec<Dim> normal() const {
    return inward_normal<Dim>(wall_id);
  }
  Eigen::VectorXd velocity(int dims) const;
};

enum class EquilibriumModel {
  conservative,  // relax toward the discrete-moment-matching equilibrium
  plain,         // relax toward the rectangle-rule Maxwellian of the recovered state
};

struct ManagementConfig {
  bool enabled = true;
  double r_merge_factor = 0.2;  // r_merge = factor * dx
  int m_min = 0;                // 0 selects dims + 3
};

struct RunConfig {
  int dims = 2;
  double L = 1e-6;
  int n_per_axis = 50;
  int n_v = 10;
  std::optional<double> v_max;
  double dt = 1e-11;
  int n_steps = 400;
  GasProperties gas{0.368e-9, 1.3806e-23, 208.0};
  double rho0 = 1.0;
  std::vector<double> U0;  // empty means at rest
  double T0 = 270.0;
  std::vector<WallSpec> walls;  // one per face; missing faces are stationary at T0
  ManagementConfig management;
  EquilibriumModel equilibrium = EquilibriumModel::conservative;
  double h_factor = 3.1;
  int snapshot_every = 50;
  std::string snapshot_format = "csv";
  int workers = 0;
  bool check_stable_dt = true;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// Wall on every face, in face order, with defaults filled in.
  std::vector<WallSpec> resolved_walls() const;
  double resolved_v_max() const;
  int resolved_m_min() const { return management.m_min > 0 ? management.m_min : dims + 3; }
  const char* mode_name() const { return dims == 2 ? "reduced-2d" : "full-3d"; }
};

/// Driven cavity with the lid (face x_{dims-1} = L) moving along +x.
RunConfig cavity_config(int dims, int n_per_axis, int n_v, double lid_speed = 1.0);

/// Precomputed per-wall data used by the diffuse reflection.
template <int Dim>
struct WallState {
  WallSpec spec;
  Vec<Dim> normal;
  Vec<Dim> U;
  Eigen::ArrayXd cn;       // (v - U_wall) . n per velocity node
  Eigen::ArrayXd maxwell;  // unit-density wall equilibrium, rows(grid) entries
  double unit_out_flux = 0.0;
};

template <int Dim>
WallState<Dim> make_wall_state(const WallSpec& spec, const VelocityGrid& grid, double R);

struct ReflectionResult {
  double rho_wall = 0.0;
  double net_flux = 0.0;  // sum over nodes of (v-U_w).n f dv after reflection
  double abs_flux = 0.0;  // sum of |(v-U_w).n| f dv after reflection
  double relative_flux() const { return abs_flux > 0.0 ? std::abs(net_flux) / abs_flux : 0.0; }
};

/// Overwrites the outgoing half (cn > 0) of `dist` with rho_w times the wall
/// Maxwellian so that the discrete normal mass flux vanishes. Throws
/// DegenerateWall when the outgoing normalisation is not positive.
template <int Dim>
ReflectionResult apply_diffuse_reflection(Eigen::Ref<Eigen::ArrayXd> dist,
                                          const WallState<Dim>& wall, const VelocityGrid& grid);

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  std::size_t particles = 0;
  double mass = 0.0;              // L^dims * mean(rho)
  std::vector<double> momentum;   // L^dims * mean(rho U)
  double min_f = 0.0;
  double stable_dt = 0.0;
  double max_wall_flux = 0.0;     // largest relative net flux over boundary particles
  int deficient = 0;              // interior particles advected without an operator
  int clamped = 0;
  int boundary_fallbacks = 0;
  int merged = 0;
  int inserted = 0;
  int management_skipped = 0;
  double seconds = 0.0;
};

/// ALE time stepper for the driven cavity; Dim == 2 runs the reduced model,
/// Dim == 3 the full model.
template <int Dim>
class Simulation {
 public:
  using Model = KineticModel<Dim>;

  explicit Simulation(const RunConfig& config);

  const RunConfig& config() const noexcept { return config_; }
  const VelocityGrid& grid() const noexcept { return grid_; }
  const ParticleCloud<Dim>& cloud() const noexcept { return cloud_; }
  ParticleCloud<Dim>& cloud() noexcept { return cloud_; }
  const std::vector<WallState<Dim>>& walls() const noexcept { return walls_; }
  const Executor& executor() const noexcept { return exec_; }
  void set_workers(int workers) { exec_ = Executor(workers); }
  /// Overrides the configured time step; dt = 0 makes a step the identity on interior data.
  void set_time_step(double dt) {
    if (!(dt >= 0.0)) throw InvalidArgument("time step must be >= 0");
    config_.dt = dt;
  }

  int step_index() const noexcept { return step_; }
  double time() const noexcept { return time_; }
  const PhaseTimer& timer() const noexcept { return timer_; }
  const std::vector<StepDiagnostics>& history() const noexcept { return history_; }
  const VoxelIndex<Dim>& voxel_index() const noexcept { return index_; }
  const NeighborTable& neighbors() const noexcept { return table_; }

  /// Advances one time step; degenerate states abort with NumericalAbort.
  const StepDiagnostics& step();

  /// Global diagnostics of the current state.
  StepDiagnostics measure() const;

  // Individual phases in step order.
  void rebuild_neighbors();
  void manage_particles();
  void build_operators();
  void advect_explicit();
  void recover_moments();
  void relax_and_move();
  void reconstruct_boundaries();
  void reflect_boundaries();

  /// Bytes held by one set of distribution buffers (f or f_tilde).
  std::size_t distribution_bytes() const;

 private:
  void initialise();
  void retag_boundary();

  RunConfig config_;
  VelocityGrid grid_;
  ParticleCloud<Dim> cloud_;
  std::vector<WallState<Dim>> walls_;
  Executor exec_;
  PhaseTimer timer_;

  VoxelIndex<Dim> index_;
  NeighborTable table_;
  std::vector<std::optional<LsOperator<Dim>>> ops_;
  std::vector<MacroState<Dim>> next_;
  std::vector<double> slot_rate_;    // sum_j K_j maximised over nodes
  std::vector<double> slot_flux_;    // relative wall flux per particle
  std::vector<char> slot_flag_;      // per-phase event flags

  StepDiagnostics current_;
  std::vector<StepDiagnostics> history_;
  int step_ = 0;
  double time_ = 0.0;
};

struct RunArtifacts {
  std::vector<StepDiagnostics> diagnostics;
  PhaseTimer timer;
  int snapshots = 0;
};

/// Runs config.n_steps steps. `on_snapshot` fires for the initial state,
/// every snapshot_every steps and after the last step.
template <int Dim>
RunArtifacts run(const RunConfig& config,
                 const std::function<void(const Simulation<Dim>&)>& on_snapshot = {});

}  // namespace bgkale
