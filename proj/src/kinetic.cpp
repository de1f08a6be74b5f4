#include "bgkale/kinetic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bgkale {
namespace {

void require_state(double rho, double T) {
  if (!(rho > 0.0) || !(T > 0.0) || !std::isfinite(rho) || !std::isfinite(T)) {
    std::ostringstream os;
    os << "invalid macroscopic state: rho=" << rho << " T=" << T;
    throw InvalidState(os.str());
  }
}

void require_dims(const VelocityGrid& grid, int dims) {
  if (grid.dims() != dims)
    throw InvalidArgument("expected a " + std::to_string(dims) + "D velocity grid, got " +
                          std::to_string(grid.dims()) + "D");
}

// Gaussian factors exp(-(v_j - u)^2 / (2 R T)) for one axis.
Eigen::ArrayXd axis_factors(const VelocityGrid& grid, double u, double RT) {
  return (-(grid.axis_nodes() - u).square() / (2.0 * RT)).exp();
}

// prefactor * prod_a exp(-(v_a - U_a)^2 / 2RT), filled as a tensor product.
template <int Dim>
void gaussian_into(double prefactor, const Vec<Dim>& U, double RT, const VelocityGrid& grid,
                   Eigen::Ref<Eigen::ArrayXd> out) {
  const int n = grid.nodes_per_axis();
  const Eigen::ArrayXd e0 = axis_factors(grid, U[0], RT);
  const Eigen::ArrayXd e1 = axis_factors(grid, U[1], RT);
  if constexpr (Dim == 2) {
    for (int j1 = 0; j1 < n; ++j1) out.segment(j1 * n, n) = (prefactor * e1[j1]) * e0;
  } else {
    const Eigen::ArrayXd e2 = axis_factors(grid, U[2], RT);
    for (int j2 = 0; j2 < n; ++j2)
      for (int j1 = 0; j1 < n; ++j1)
        out.segment((j2 * n + j1) * n, n) = (prefactor * e2[j2] * e1[j1]) * e0;
  }
}

// rho and rho U from the first component, shared by both models.
template <int Dim>
void mass_and_velocity(const Eigen::Ref<const Eigen::ArrayXd>& f, const VelocityGrid& grid,
                       double& rho, Vec<Dim>& U) {
  const double dV = grid.cell_volume();
  rho = f.sum() * dV;
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    std::ostringstream os;
    os << "non-positive density " << rho << " from quadrature";
    throw DegenerateState(os.str());
  }
  for (int a = 0; a < Dim; ++a) U[a] = (grid.component(a) * f).sum() * dV / rho;
}

template <int Dim>
double peculiar_energy_sum(const Eigen::Ref<const Eigen::ArrayXd>& f, const VelocityGrid& grid,
                           const Vec<Dim>& U) {
  Eigen::ArrayXd c2 = (grid.component(0) - U[0]).square();
  for (int a = 1; a < Dim; ++a) c2 += (grid.component(a) - U[a]).square();
  return (c2 * f).sum();
}

template <int Dim>
MacroState<Dim> finish_state(double rho, const Vec<Dim>& U, double three_rho_RT, double R) {
  const double T = three_rho_RT / (3.0 * rho * R);
  if (!(T > kTemperatureFloor) || !std::isfinite(T)) {
    std::ostringstream os;
    os << "degenerate temperature " << T << " from quadrature";
    throw DegenerateState(os.str());
  }
  return make_macro_state<Dim>(rho, U, T, R);
}

}  // namespace

RelaxationScales relaxation_time(double rho, double T, const GasProperties& gas) {
  require_state(rho, T);
  using std::numbers::pi;
  const double c_mean = std::sqrt(8.0 * gas.R * T / pi);
  RelaxationScales s;
  s.mean_free_path =
      gas.k_boltzmann / (std::numbers::sqrt2 * pi * rho * gas.R * gas.diameter * gas.diameter);
  s.tau = 4.0 * s.mean_free_path / (pi * c_mean);
  return s;
}

template <>
void KineticModel<3>::equilibrium(const MacroState<3>& m, const VelocityGrid& grid, double R,
                                  Eigen::Ref<Eigen::ArrayXd> out) {
  require_state(m.rho, m.T);
  const double RT = R * m.T;
  gaussian_into<3>(m.rho / std::pow(2.0 * std::numbers::pi * RT, 1.5), m.U, RT, grid, out);
}

template <>
void KineticModel<2>::equilibrium(const MacroState<2>& m, const VelocityGrid& grid, double R,
                                  Eigen::Ref<Eigen::ArrayXd> out) {
  require_state(m.rho, m.T);
  const double RT = R * m.T;
  const Eigen::Index n = grid.node_count();
  gaussian_into<2>(m.rho / (2.0 * std::numbers::pi * RT), m.U, RT, grid, out.head(n));
  out.segment(n, n) = RT * out.head(n);
}

template <>
MacroState<3> KineticModel<3>::moments(const Eigen::Ref<const Eigen::ArrayXd>& f,
                                       const VelocityGrid& grid, double R) {
  double rho = 0.0;
  Vec<3> U;
  mass_and_velocity<3>(f, grid, rho, U);
  return finish_state<3>(rho, U, peculiar_energy_sum<3>(f, grid, U) * grid.cell_volume(), R);
}

template <>
MacroState<2> KineticModel<2>::moments(const Eigen::Ref<const Eigen::ArrayXd>& dist,
                                       const VelocityGrid& grid, double R) {
  const Eigen::Index n = grid.node_count();
  const auto g1 = dist.head(n);
  const auto g2 = dist.segment(n, n);
  double rho = 0.0;
  Vec<2> U;
  mass_and_velocity<2>(g1, grid, rho, U);
  const double sum = peculiar_energy_sum<2>(g1, grid, U) + g2.sum();
  return finish_state<2>(rho, U, sum * grid.cell_volume(), R);
}

Eigen::ArrayXd maxwellian_3d(const MacroState<3>& m, const VelocityGrid& grid, double R) {
  require_dims(grid, 3);
  Eigen::ArrayXd out(grid.node_count());
  KineticModel<3>::equilibrium(m, grid, R, out);
  return out;
}

ReducedPair reduced_maxwellians(const MacroState<2>& m, const VelocityGrid& grid2, double R) {
  require_dims(grid2, 2);
  Eigen::ArrayXd both(KineticModel<2>::rows(grid2));
  KineticModel<2>::equilibrium(m, grid2, R, both);
  const Eigen::Index n = grid2.node_count();
  return {both.head(n), both.segment(n, n)};
}

MacroState<3> moments_3d(const Eigen::Ref<const Eigen::ArrayXd>& f, const VelocityGrid& grid,
                         double R) {
  require_dims(grid, 3);
  if (f.size() != grid.node_count()) throw ContractViolation("distribution size mismatch");
  return KineticModel<3>::moments(f, grid, R);
}

MacroState<2> moments_reduced(const Eigen::Ref<const Eigen::ArrayXd>& g1,
                              const Eigen::Ref<const Eigen::ArrayXd>& g2,
                              const VelocityGrid& grid2, double R) {
  require_dims(grid2, 2);
  const Eigen::Index n = grid2.node_count();
  if (g1.size() != n || g2.size() != n) throw ContractViolation("distribution size mismatch");
  Eigen::ArrayXd both(2 * n);
  both << g1, g2;
  return KineticModel<2>::moments(both, grid2, R);
}

Eigen::ArrayXd relax_implicit(const Eigen::Ref<const Eigen::ArrayXd>& f_tilde,
                              const Eigen::Ref<const Eigen::ArrayXd>& M, double tau, double dt) {
  if (f_tilde.size() != M.size()) throw ContractViolation("relax_implicit: shape mismatch");
  if (!(tau > 0.0) || dt < 0.0) throw InvalidArgument("relax_implicit: need tau > 0, dt >= 0");
  return f_tilde + (dt / (tau + dt)) * (M - f_tilde);
}

template <int Dim>
MacroState<Dim> fit_discrete_equilibrium(const MacroState<Dim>& target, const VelocityGrid& grid,
                                         double R, Eigen::Ref<Eigen::ArrayXd> scratch) {
  constexpr int kMaxIterations = 20;
  constexpr double kTolerance = 1e-13;

  MacroState<Dim> p = target;
  for (int it = 0; it < kMaxIterations; ++it) {
    KineticModel<Dim>::equilibrium(p, grid, R, scratch);
    const MacroState<Dim> q = KineticModel<Dim>::moments(scratch, grid, R);
    const double d_rho = target.rho - q.rho;
    const Vec<Dim> d_U = target.U - q.U;
    const double d_T = target.T - q.T;
    MacroState<Dim> next = p;
    next.rho += d_rho;
    next.U += d_U;
    next.T += d_T;
    if (!next.valid()) break;
    p = next;
    const double thermal = std::sqrt(R * target.T);
    if (std::abs(d_rho) <= kTolerance * target.rho && d_U.norm() <= kTolerance * thermal &&
        std::abs(d_T) <= kTolerance * target.T)
      break;
  }
  return make_macro_state<Dim>(p.rho, p.U, p.T, R);
}

template MacroState<2> fit_discrete_equilibrium<2>(const MacroState<2>&, const VelocityGrid&,
                                                   double, Eigen::Ref<Eigen::ArrayXd>);
template MacroState<3> fit_discrete_equilibrium<3>(const MacroState<3>&, const VelocityGrid&,
                                                   double, Eigen::Ref<Eigen::ArrayXd>);

}  // namespace bgkale
