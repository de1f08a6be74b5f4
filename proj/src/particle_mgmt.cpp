#include "bgkale/particle_mgmt.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "bgkale/gfdm.hpp"
#include "bgkale/kinetic.hpp"

namespace bgkale {
namespace {

// Minimum distance to existing particles before a hole candidate is accepted.
constexpr double kHoleClearance = 0.45;
// Keeps lattice-coincident distances (exactly 0.45 dx up to rounding) out.
constexpr double kClearanceSlack = 1e-9;

template <int Dim>
ParticleCloud<Dim> empty_like(const ParticleCloud<Dim>& cloud) {
  ParticleCloud<Dim> out;
  out.L = cloud.L;
  out.dx = cloud.dx;
  out.h = cloud.h;
  out.f.resize(cloud.f.rows(), 0);
  return out;
}

// Interpolated particle at `target`, or nullopt when the stencil or the
// recovered state is degenerate.
template <int Dim>
std::optional<MacroState<Dim>> interpolate_particle(const ParticleCloud<Dim>& cloud,
                                                    const Vec<Dim>& target,
                                                    std::span<const int> neighbors,
                                                    const VelocityGrid& grid, double R,
                                                    Eigen::ArrayXd& column) {
  try {
    const auto st = build_interpolation<Dim>(std::span<const Vec<Dim>>(cloud.x), target,
                                             neighbors, cloud.h);
    column.setZero(cloud.f.rows());
    for (std::size_t j = 0; j < st.neighbors.size(); ++j)
      column += st.coeffs[static_cast<Eigen::Index>(j)] * cloud.f.col(st.neighbors[j]);
    column = column.max(0.0);
    return KineticModel<Dim>::moments(column, grid, R);
  } catch (const DeficientStencil&) {
    return std::nullopt;
  } catch (const DegenerateState&) {
    return std::nullopt;
  }
}

template <int Dim>
void push_particle(ParticleCloud<Dim>& extra, const Vec<Dim>& x, const MacroState<Dim>& m,
                   const Eigen::ArrayXd& column) {
  extra.x.push_back(x);
  extra.kind.push_back(ParticleKind::interior);
  extra.wall_id.push_back(-1);
  extra.rho.push_back(m.rho);
  extra.U.push_back(m.U);
  extra.T.push_back(m.T);
  extra.E.push_back(m.E);
  const auto n = extra.f.cols();
  extra.f.conservativeResize(Eigen::NoChange, n + 1);
  extra.f.col(n) = column;
}

}  // namespace

template <int Dim>
MergeReport merge_close_pairs(ParticleCloud<Dim>& cloud, const VoxelIndex<Dim>& idx,
                              const NeighborTable& table, const VelocityGrid& grid, double R,
                              double r_merge) {
  (void)idx;
  MergeReport report;
  const std::size_t n = cloud.size();
  const double r2 = r_merge * r_merge;

  std::vector<bool> taken(n, false);
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    if (taken[i] || cloud.is_boundary(i)) continue;
    for (int j : table.of(i)) {
      if (taken[j] || cloud.is_boundary(j)) continue;
      if ((cloud.x[j] - cloud.x[i]).squaredNorm() < r2) {
        taken[i] = taken[j] = true;
        pairs.emplace_back(static_cast<int>(i), j);
        break;
      }
    }
  }
  if (pairs.empty()) return report;

  std::vector<bool> remove(n, false);
  ParticleCloud<Dim> extra = empty_like(cloud);
  Eigen::ArrayXd column;
  for (auto [i, j] : pairs) {
    std::vector<int> support(table.of(i).begin(), table.of(i).end());
    support.insert(support.end(), table.of(j).begin(), table.of(j).end());
    support.push_back(i);
    support.push_back(j);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());

    const Vec<Dim> mid = 0.5 * (cloud.x[i] + cloud.x[j]);
    const auto m = interpolate_particle<Dim>(cloud, mid, support, grid, R, column);
    if (!m) {
      ++report.skipped;
      continue;
    }
    const double pair_rho = 0.5 * (cloud.rho[i] + cloud.rho[j]);
    report.max_density_change =
        std::max(report.max_density_change, std::abs(m->rho - pair_rho) / pair_rho);
    remove[i] = remove[j] = true;
    push_particle(extra, mid, *m, column);
    ++report.merged;
  }
  if (report.merged > 0) cloud.compact_and_append(remove, extra);
  return report;
}

template <int Dim>
FillReport fill_holes(ParticleCloud<Dim>& cloud, const VoxelIndex<Dim>& idx,
                      const NeighborTable& table, const VelocityGrid& grid, double R, int m_min) {
  FillReport report;
  const std::span<const Vec<Dim>> positions(cloud.x);
  const double clearance = kHoleClearance * cloud.dx * (1.0 + kClearanceSlack);
  const double margin = 1e-3 * cloud.dx;

  ParticleCloud<Dim> extra = empty_like(cloud);
  Eigen::ArrayXd column;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.is_boundary(i) || table.count(i) >= static_cast<std::size_t>(m_min)) continue;
    for (int a = 0; a < Dim; ++a) {
      for (double sign : {-1.0, 1.0}) {
        Vec<Dim> cand = cloud.x[i];
        cand[a] += sign * 0.5 * cloud.h;
        if ((cand.array() <= margin).any() || (cand.array() >= cloud.L - margin).any()) continue;
        if (!idx.ball(positions, cand, clearance).empty()) continue;
        const bool crowded = std::any_of(extra.x.begin(), extra.x.end(), [&](const Vec<Dim>& p) {
          return (p - cand).norm() <= clearance;
        });
        if (crowded) continue;

        const auto support = idx.ball(positions, cand, cloud.h);
        const auto m = interpolate_particle<Dim>(cloud, cand, support, grid, R, column);
        if (!m) {
          ++report.skipped;
          continue;
        }
        push_particle(extra, cand, *m, column);
        ++report.inserted;
      }
    }
  }
  if (report.inserted > 0) cloud.compact_and_append(std::vector<bool>(cloud.size(), false), extra);
  return report;
}

template MergeReport merge_close_pairs<2>(ParticleCloud<2>&, const VoxelIndex<2>&,
                                          const NeighborTable&, const VelocityGrid&, double,
                                          double);
template MergeReport merge_close_pairs<3>(ParticleCloud<3>&, const VoxelIndex<3>&,
                                          const NeighborTable&, const VelocityGrid&, double,
                                          double);
template FillReport fill_holes<2>(ParticleCloud<2>&, const VoxelIndex<2>&, const NeighborTable&,
                                  const VelocityGrid&, double, int);
template FillReport fill_holes<3>(ParticleCloud<3>&, const VoxelIndex<3>&, const NeighborTable&,
                                  const VelocityGrid&, double, int);

}  // namespace bgkale
