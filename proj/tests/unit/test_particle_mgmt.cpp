#include <doctest.h>

#include <cmath>

#include "bgkale/kinetic.hpp"
#include "bgkale/particle_mgmt.hpp"
#include "oracles.hpp"

using namespace bgkale;

namespace {

constexpr double kR = 208.0;
constexpr double kL = 1e-6;

MacroState<2> field(const Vec<2>& x) {
  const double s = x[0] / kL, t = x[1] / kL;
  return make_macro_state<2>(1.0 + 0.1 * s * t, Vec<2>(20.0 * t, -10.0 * s), 270.0 + 15.0 * s,
                             kR);
}

struct Setup {
  ParticleCloud<2> cloud;
  VelocityGrid grid;
};

Setup lattice(int n) {
  Setup s{seed_cavity_cloud<2>(kL, n), build_velocity_grid(2, 1400.0, 10)};
  s.cloud.allocate_distributions(KineticModel<2>::rows(s.grid));
  for (std::size_t i = 0; i < s.cloud.size(); ++i) {
    const auto m = field(s.cloud.x[i]);
    KineticModel<2>::equilibrium(m, s.grid, kR, s.cloud.f.col(static_cast<Eigen::Index>(i)));
    s.cloud.set_macro(i, KineticModel<2>::moments(s.cloud.f.col(static_cast<Eigen::Index>(i)),
                                                  s.grid, kR));
  }
  return s;
}

void add_copy(ParticleCloud<2>& c, std::size_t from, const Vec<2>& at) {
  ParticleCloud<2> extra;
  extra.x.push_back(at);
  extra.kind.push_back(ParticleKind::interior);
  extra.wall_id.push_back(-1);
  extra.rho.push_back(c.rho[from]);
  extra.U.push_back(c.U[from]);
  extra.T.push_back(c.T[from]);
  extra.E.push_back(c.E[from]);
  extra.f = c.f.col(static_cast<Eigen::Index>(from));
  c.compact_and_append(std::vector<bool>(c.size(), false), extra);
}

std::size_t nearest(const ParticleCloud<2>& c, const Vec<2>& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if ((c.x[i] - p).norm() < (c.x[best] - p).norm()) best = i;
  return best;
}

MergeReport merge(ParticleCloud<2>& c, const VelocityGrid& g, double factor = 0.2) {
  const auto idx = build_voxel_index(c);
  const auto table = build_neighbor_table(idx, c);
  return merge_close_pairs(c, idx, table, g, kR, factor * c.dx);
}

FillReport fill(ParticleCloud<2>& c, const VelocityGrid& g, int m_min) {
  const auto idx = build_voxel_index(c);
  const auto table = build_neighbor_table(idx, c);
  return fill_holes(c, idx, table, g, kR, m_min);
}

}  // namespace

TEST_CASE("merge: lattice spacing above r_merge leaves the cloud unchanged") {
  auto s = lattice(12);
  const auto before = s.cloud.x;
  const auto r = merge(s.cloud, s.grid);
  CHECK(r.merged == 0);
  CHECK(s.cloud.x == before);
}

TEST_CASE("merge: a close pair becomes one particle at the midpoint") {
  auto s = lattice(12);
  const std::size_t n0 = s.cloud.size();
  const std::size_t a = nearest(s.cloud, Vec<2>(0.5 * kL, 0.5 * kL));
  const Vec<2> pa = s.cloud.x[a];
  const Vec<2> pb = pa + Vec<2>(0.02 * s.cloud.dx, 0.0);  // 0.1 r_merge
  add_copy(s.cloud, a, pb);
  const auto r = merge(s.cloud, s.grid);
  CHECK(r.merged == 1);
  CHECK(r.skipped == 0);
  REQUIRE(s.cloud.size() == n0);
  const auto k = nearest(s.cloud, 0.5 * (pa + pb));
  CHECK((s.cloud.x[k] - 0.5 * (pa + pb)).norm() < 1e-15 * kL);
  CHECK(k == s.cloud.size() - 1);
  const auto m = field(s.cloud.x[k]);
  CHECK(s.cloud.rho[k] == doctest::Approx(m.rho).epsilon(1e-3));
  CHECK(s.cloud.T[k] == doctest::Approx(m.T).epsilon(1e-3));
  CHECK(r.max_density_change < 1e-3);
}

TEST_CASE("merge: constant f is reproduced exactly") {
  auto s = lattice(10);
  s.cloud.f.setConstant(3.0e-7);
  for (std::size_t i = 0; i < s.cloud.size(); ++i)
    s.cloud.set_macro(i, KineticModel<2>::moments(s.cloud.f.col(static_cast<Eigen::Index>(i)),
                                                  s.grid, kR));
  const std::size_t a = nearest(s.cloud, Vec<2>(0.4 * kL, 0.6 * kL));
  add_copy(s.cloud, a, s.cloud.x[a] + Vec<2>(0.0, 0.05 * s.cloud.dx));
  REQUIRE(merge(s.cloud, s.grid).merged == 1);
  const auto col = s.cloud.f.col(static_cast<Eigen::Index>(s.cloud.size() - 1));
  CHECK((col - 3.0e-7).abs().maxCoeff() < 1e-12 * 3.0e-7);
}

TEST_CASE("fill: a regular lattice with m_min = dims + 2 gets no insertions") {
  auto s = lattice(15);
  const auto n0 = s.cloud.size();
  const auto r = fill(s.cloud, s.grid, 4);
  CHECK(r.inserted == 0);
  CHECK(s.cloud.size() == n0);
}

TEST_CASE("fill: a deleted lattice particle is replaced and neighbor counts recover") {
  auto s = lattice(21);
  const std::size_t hole = nearest(s.cloud, Vec<2>(0.5 * kL, 0.5 * kL));
  const Vec<2> hole_x = s.cloud.x[hole];
  const auto full = oracle::brute_force_neighbors<2>(s.cloud.x, s.cloud.h);
  const int m_min = static_cast<int>(full[hole].size());

  std::vector<Vec<2>> former;
  for (int j : full[hole]) former.push_back(s.cloud.x[j]);
  std::vector<bool> remove(s.cloud.size(), false);
  remove[hole] = true;
  ParticleCloud<2> none;
  none.f.resize(s.cloud.f.rows(), 0);
  s.cloud.compact_and_append(remove, none);

  const auto n0 = s.cloud.size();
  const auto r = fill(s.cloud, s.grid, m_min);
  CHECK(r.inserted > 0);
  CHECK(r.skipped == 0);
  REQUIRE(s.cloud.size() == n0 + static_cast<std::size_t>(r.inserted));

  const auto after = oracle::brute_force_neighbors<2>(s.cloud.x, s.cloud.h);
  for (const auto& p : former) {
    const auto k = nearest(s.cloud, p);
    CHECK(static_cast<int>(after[k].size()) >= m_min);
  }
  for (std::size_t i = n0; i < s.cloud.size(); ++i) {
    CHECK(s.cloud.kind[i] == ParticleKind::interior);
    for (std::size_t j = 0; j < n0; ++j)
      CHECK((s.cloud.x[i] - s.cloud.x[j]).norm() > 0.45 * s.cloud.dx);
    // Inserted particles carry the interpolated local equilibrium.
    const auto m = field(s.cloud.x[i]);
    CHECK(s.cloud.rho[i] == doctest::Approx(m.rho).epsilon(1e-3));
    CHECK((s.cloud.U[i] - m.U).norm() < 1e-3 * std::sqrt(kR * m.T));
    CHECK(s.cloud.T[i] == doctest::Approx(m.T).epsilon(1e-3));
  }
  CHECK((s.cloud.x[nearest(s.cloud, hole_x)] - hole_x).norm() < s.cloud.dx);
}
