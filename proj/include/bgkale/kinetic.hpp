#pragma once

#include <Eigen/Dense>

#include "bgkale/phase_space.hpp"

namespace bgkale {

/// Temperatures at or below this are treated as a collapsed distribution.
inline constexpr double kTemperatureFloor = 1e-12;

struct RelaxationScales {
  double tau = 0.0;             // [s]
  double mean_free_path = 0.0;  // [m]
};

/// Hard-sphere mean free path and BGK relaxation time,
///   lambda = k_b / (sqrt(2) pi rho R d^2),  tau = 4 lambda / (pi C),  C = sqrt(8 R T / pi).
RelaxationScales relaxation_time(double rho, double T, const GasProperties& gas);

template <int Dim>
RelaxationScales relaxation_time(const MacroState<Dim>& m, const GasProperties& gas) {
  return relaxation_time(m.rho, m.T, gas);
}

/// rho / (2 pi R T)^{3/2} exp(-|v - U|^2 / (2 R T)) at every node of a 3D grid.
Eigen::ArrayXd maxwellian_3d(const MacroState<3>& m, const VelocityGrid& grid, double R);

struct ReducedPair {
  Eigen::ArrayXd g1;
  Eigen::ArrayXd g2;
};

/// v3-marginals of the 3D Maxwellian on a 2D grid: G1 = rho / (2 pi R T) exp(...), G2 = R T G1.
ReducedPair reduced_maxwellians(const MacroState<2>& m, const VelocityGrid& grid2, double R);

/// Rectangle-rule moments (rho, U, T, E) of a full distribution.
/// Throws DegenerateState when rho <= 0 or T <= kTemperatureFloor.
MacroState<3> moments_3d(const Eigen::Ref<const Eigen::ArrayXd>& f, const VelocityGrid& grid,
                         double R);

/// Moments of a reduced pair; 3 rho R T = sum |v-U|^2 g1 dv + sum g2 dv.
MacroState<2> moments_reduced(const Eigen::Ref<const Eigen::ArrayXd>& g1,
                              const Eigen::Ref<const Eigen::ArrayXd>& g2,
                              const VelocityGrid& grid2, double R);

/// Closed-form implicit BGK update (tau f_tilde + dt M) / (tau + dt).
Eigen::ArrayXd relax_implicit(const Eigen::Ref<const Eigen::ArrayXd>& f_tilde,
                              const Eigen::Ref<const Eigen::ArrayXd>& M, double tau, double dt);

/// Model-generic access used by the solver: the reduced model for Dim == 2
/// (components g1, g2 stacked) and the full model for Dim == 3.
template <int Dim>
struct KineticModel {
  static constexpr int components = kComponents<Dim>;

  static Eigen::Index rows(const VelocityGrid& grid) { return components * grid.node_count(); }

  /// Writes the equilibrium for `m` into `out` (length rows(grid)).
  static void equilibrium(const MacroState<Dim>& m, const VelocityGrid& grid, double R,
                          Eigen::Ref<Eigen::ArrayXd> out);

  static MacroState<Dim> moments(const Eigen::Ref<const Eigen::ArrayXd>& dist,
                                 const VelocityGrid& grid, double R);
};

template <>
void KineticModel<2>::equilibrium(const MacroState<2>&, const VelocityGrid&, double,
                                  Eigen::Ref<Eigen::ArrayXd>);
template <>
void KineticModel<3>::equilibrium(const MacroState<3>&, const VelocityGrid&, double,
                                  Eigen::Ref<Eigen::ArrayXd>);
template <>
MacroState<2> KineticModel<2>::moments(const Eigen::Ref<const Eigen::ArrayXd>&,
                                       const VelocityGrid&, double);
template <>
MacroState<3> KineticModel<3>::moments(const Eigen::Ref<const Eigen::ArrayXd>&,
                                       const VelocityGrid&, double);

/// Equilibrium parameters p such that the discrete moments of equilibrium(p)
/// equal the discrete moments `target`. The plain rectangle-rule Maxwellian is
/// biased by the truncated velocity range; relaxing toward equilibrium(p)
/// instead conserves mass, momentum and energy of the discrete model and keeps
/// a discrete equilibrium an exact fixed point. `scratch` has rows(grid) entries.
template <int Dim>
MacroState<Dim> fit_discrete_equilibrium(const MacroState<Dim>& target, const VelocityGrid& grid,
                                         double R, Eigen::Ref<Eigen::ArrayXd> scratch);

}  // namespace bgkale
