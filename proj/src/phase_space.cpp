#include "bgkale/phase_space.hpp"

#include <cmath>
#include <string>

namespace bgkale {

void GasProperties::validate() const {
  if (!(diameter > 0.0)) throw InvalidArgument("gas diameter must be positive");
  if (!(k_boltzmann > 0.0)) throw InvalidArgument("Boltzmann constant must be positive");
  if (!(R > 0.0)) throw InvalidArgument("gas constant must be positive");
}

VelocityGrid build_velocity_grid(int dims, double v_max, int cells) {
  if (dims != 2 && dims != 3) throw InvalidArgument("velocity grid dims must be 2 or 3");
  if (!(v_max > 0.0)) throw InvalidArgument("v_max must be positive");
  if (cells < 2 || cells % 2 != 0)
    throw InvalidArgument("N_v must be even and >= 2, got " + std::to_string(cells));

  VelocityGrid g;
  g.dims_ = dims;
  g.v_max_ = v_max;
  g.cells_ = cells;
  g.spacing_ = 2.0 * v_max / cells;
  g.cell_volume_ = std::pow(g.spacing_, dims);

  const int n = cells + 1;
  const int half = cells / 2;
  g.axis_.resize(n);
  // (j - N/2) dv keeps the node set exactly symmetric with an exact zero node.
  for (int j = 0; j < n; ++j) g.axis_[j] = (j - half) * g.spacing_;

  Eigen::Index total = 1;
  for (int a = 0; a < dims; ++a) total *= n;
  g.velocities_.resize(total, dims);
  for (Eigen::Index k = 0; k < total; ++k) {
    Eigen::Index rem = k;
    for (int a = 0; a < dims; ++a) {
      g.velocities_(k, a) = g.axis_[rem % n];
      rem /= n;
    }
  }
  return g;
}

double default_v_max(double max_wall_speed, double R, double T) {
  return std::abs(max_wall_speed) + 4.0 * std::sqrt(R * T);
}

template <int Dim>
std::size_t ParticleCloud<Dim>::count(ParticleKind k) const {
  std::size_t c = 0;
  for (auto kk : kind) c += (kk == k);
  return c;
}

template <int Dim>
MacroState<Dim> ParticleCloud<Dim>::macro(std::size_t i) const {
  MacroState<Dim> m;
  m.rho = rho[i];
  m.U = U[i];
  m.T = T[i];
  m.E = E[i];
  return m;
}

template <int Dim>
void ParticleCloud<Dim>::set_macro(std::size_t i, const MacroState<Dim>& m) {
  rho[i] = m.rho;
  U[i] = m.U;
  T[i] = m.T;
  E[i] = m.E;
}

template <int Dim>
void ParticleCloud<Dim>::allocate_distributions(Eigen::Index rows) {
  f.setZero(rows, static_cast<Eigen::Index>(size()));
  f_tilde.setZero(rows, static_cast<Eigen::Index>(size()));
}

template <int Dim>
void ParticleCloud<Dim>::compact_and_append(const std::vector<bool>& remove,
                                            const ParticleCloud& extra) {
  if (remove.size() != size()) throw ContractViolation("removal mask size mismatch");
  if (extra.size() > 0 && extra.f.rows() != f.rows())
    throw ContractViolation("appended particles have a different distribution layout");

  std::vector<std::size_t> keep;
  keep.reserve(size());
  for (std::size_t i = 0; i < size(); ++i)
    if (!remove[i]) keep.push_back(i);

  const std::size_t n_new = keep.size() + extra.size();
  ParticleCloud out;
  out.L = L;
  out.dx = dx;
  out.h = h;
  out.x.reserve(n_new);
  out.kind.reserve(n_new);
  out.wall_id.reserve(n_new);
  out.rho.reserve(n_new);
  out.U.reserve(n_new);
  out.T.reserve(n_new);
  out.E.reserve(n_new);
  out.f.resize(f.rows(), static_cast<Eigen::Index>(n_new));
  out.f_tilde.setZero(f.rows(), static_cast<Eigen::Index>(n_new));

  auto push = [&out](const ParticleCloud& src, std::size_t i) {
    const auto col = static_cast<Eigen::Index>(out.x.size());
    out.x.push_back(src.x[i]);
    out.kind.push_back(src.kind[i]);
    out.wall_id.push_back(src.wall_id[i]);
    out.rho.push_back(src.rho[i]);
    out.U.push_back(src.U[i]);
    out.T.push_back(src.T[i]);
    out.E.push_back(src.E[i]);
    if (src.f.rows() > 0) out.f.col(col) = src.f.col(static_cast<Eigen::Index>(i));
  };
  for (auto i : keep) push(*this, i);
  for (std::size_t i = 0; i < extra.size(); ++i) push(extra, i);
  *this = std::move(out);
}

template <int Dim>
std::vector<int> faces_of(const Vec<Dim>& p, double L) {
  std::vector<int> faces;
  for (int a = 0; a < Dim; ++a) {
    if (p[a] == 0.0) faces.push_back(2 * a);
    if (p[a] == L) faces.push_back(2 * a + 1);
  }
  return faces;
}

template <int Dim>
ParticleCloud<Dim> seed_cavity_cloud(double L, int n_per_axis, double h_factor) {
  if (!(L > 0.0)) throw InvalidArgument("domain length must be positive");
  if (n_per_axis < 3) throw InvalidArgument("n_per_axis must be >= 3");

  ParticleCloud<Dim> c;
  c.L = L;
  c.dx = L / (n_per_axis - 1);
  c.h = h_factor * c.dx;

  std::size_t total = 1;
  for (int a = 0; a < Dim; ++a) total *= static_cast<std::size_t>(n_per_axis);
  c.x.reserve(total);

  for (std::size_t k = 0; k < total; ++k) {
    Vec<Dim> p;
    bool on_face = false;
    std::size_t rem = k;
    for (int a = 0; a < Dim; ++a) {
      const int idx = static_cast<int>(rem % n_per_axis);
      rem /= n_per_axis;
      p[a] = idx == n_per_axis - 1 ? L : idx * c.dx;
      on_face = on_face || idx == 0 || idx == n_per_axis - 1;
    }
    c.x.push_back(p);
    c.kind.push_back(on_face ? ParticleKind::boundary : ParticleKind::interior);
    c.wall_id.push_back(on_face ? faces_of<Dim>(p, L).front() : -1);
  }
  c.rho.assign(total, 0.0);
  c.U.assign(total, Vec<Dim>::Zero());
  c.T.assign(total, 0.0);
  c.E.assign(total, 0.0);
  return c;
}

template struct ParticleCloud<2>;
template struct ParticleCloud<3>;
template ParticleCloud<2> seed_cavity_cloud<2>(double, int, double);
template ParticleCloud<3> seed_cavity_cloud<3>(double, int, double);
template std::vector<int> faces_of<2>(const Vec<2>&, double);
template std::vector<int> faces_of<3>(const Vec<3>&, double);

}  // namespace bgkale
