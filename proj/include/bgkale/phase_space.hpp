#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "bgkale/error.hpp"

namespace bgkale {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

/// Number of distribution components carried per velocity node: the reduced
/// (Chu) model in two space dimensions carries g1 and g2, the full model one f.
template <int Dim>
inline constexpr int kComponents = Dim == 2 ? 2 : 1;

struct GasProperties {
  double diameter = 0.0;        // [m]
  double k_boltzmann = 1.3806e-23;  // [J/K]
  double R = 0.0;               // specific gas constant [J/(kg K)]

  void validate() const;
};

/// Uniform tensor grid of discrete velocities on [-v_max, v_max]^dims.
///
/// Nodes are flattened with the first axis fastest. `velocities()` holds one
/// column per axis so that per-axis sweeps over all nodes are contiguous.
class VelocityGrid {
 public:
  int dims() const noexcept { return dims_; }
  double v_max() const noexcept { return v_max_; }
  int cells() const noexcept { return cells_; }
  double spacing() const noexcept { return spacing_; }
  int nodes_per_axis() const noexcept { return cells_ + 1; }
  Eigen::Index node_count() const noexcept { return velocities_.rows(); }
  double cell_volume() const noexcept { return cell_volume_; }

  const Eigen::ArrayXd& axis_nodes() const noexcept { return axis_; }
  const Eigen::ArrayXXd& velocities() const noexcept { return velocities_; }
  auto component(int axis) const { return velocities_.col(axis); }

 private:
  friend VelocityGrid build_velocity_grid(int dims, double v_max, int cells);

  int dims_ = 0;
  double v_max_ = 0.0;
  int cells_ = 0;
  double spacing_ = 0.0;
  double cell_volume_ = 0.0;
  Eigen::ArrayXd axis_;
  Eigen::ArrayXXd velocities_;
};

VelocityGrid build_velocity_grid(int dims, double v_max, int cells);

/// Speed bound covering the wall speed plus four thermal speeds.
double default_v_max(double max_wall_speed, double R, double T);

template <int Dim>
struct MacroState {
  double rho = 0.0;
  Vec<Dim> U = Vec<Dim>::Zero();
  double T = 0.0;
  double E = 0.0;

  bool valid() const noexcept { return rho > 0.0 && T > 0.0; }
};

/// Builds a state with E = rho (3/2 R T) + rho |U|^2 / 2.
template <int Dim>
MacroState<Dim> make_macro_state(double rho, const Vec<Dim>& U, double T, double R) {
  MacroState<Dim> m;
  m.rho = rho;
  m.U = U;
  m.T = T;
  m.E = rho * 1.5 * R * T + 0.5 * rho * U.squaredNorm();
  return m;
}

enum class ParticleKind : std::uint8_t { interior, boundary };

/// Face numbering of the box [0,L]^Dim: face 2a is x_a = 0, face 2a+1 is x_a = L.
inline constexpr int face_axis(int face) { return face / 2; }
inline constexpr bool face_is_max(int face) { return face % 2 == 1; }

template <int Dim>
Vec<Dim> inward_normal(int face) {
  Vec<Dim> n = Vec<Dim>::Zero();
  n[face_axis(face)] = face_is_max(face) ? -1.0 : 1.0;
  return n;
}

/// Structure-of-arrays particle storage.
///
/// Distributions are stored one column per particle; a column stacks the
/// components (g1 then g2 in the reduced model) over all velocity nodes, so the
/// data of one particle is contiguous. `f_tilde` is the post-advection buffer.
template <int Dim>
struct ParticleCloud {
  using Point = Vec<Dim>;

  double L = 0.0;
  double dx = 0.0;
  double h = 0.0;

  std::vector<Point> x;
  std::vector<ParticleKind> kind;
  std::vector<int> wall_id;  // -1 for interior particles

  std::vector<double> rho;
  std::vector<Point> U;
  std::vector<double> T;
  std::vector<double> E;

  Eigen::ArrayXXd f;
  Eigen::ArrayXXd f_tilde;

  std::size_t size() const noexcept { return x.size(); }
  bool is_boundary(std::size_t i) const noexcept { return kind[i] == ParticleKind::boundary; }
  std::size_t count(ParticleKind k) const;

  MacroState<Dim> macro(std::size_t i) const;
  void set_macro(std::size_t i, const MacroState<Dim>& m);

  /// Allocates distribution storage with `rows` values per particle.
  void allocate_distributions(Eigen::Index rows);

  /// Drops particles flagged in `remove` (stable order for the survivors) and
  /// appends the particles of `extra`, which must share this cloud's layout.
  void compact_and_append(const std::vector<bool>& remove, const ParticleCloud& extra);
};

/// Regular lattice on [0,L]^Dim with `n_per_axis` points per axis; lattice
/// points on the faces are tagged boundary. A point on several faces takes
/// the first of them in face order (x-min, x-max, y-min, ...), so the face
/// x_{Dim-1} = L (the driven lid of the cavity runs) never claims an edge.
template <int Dim>
ParticleCloud<Dim> seed_cavity_cloud(double L, int n_per_axis, double h_factor = 3.1);

/// Faces that particle position `p` lies on, in face order.
template <int Dim>
std::vector<int> faces_of(const Vec<Dim>& p, double L);

}  // namespace bgkale
