#include "bgkale/neighbor_search.hpp"

#include <algorithm>
#include <cmath>

namespace bgkale {

template <int Dim>
typename VoxelIndex<Dim>::Coord VoxelIndex<Dim>::coord_of(const Vec<Dim>& x) const {
  Coord c;
  for (int a = 0; a < Dim; ++a) {
    const int k = static_cast<int>(std::floor(x[a] / cell_size_));
    c[a] = std::clamp(k, 0, dims_[a] - 1);
  }
  return c;
}

template <int Dim>
int VoxelIndex<Dim>::flat(const Coord& c) const {
  int v = 0;
  for (int a = Dim - 1; a >= 0; --a) v = v * dims_[a] + c[a];
  return v;
}

template <int Dim>
typename VoxelIndex<Dim>::Coord VoxelIndex<Dim>::unflat(int voxel) const {
  Coord c;
  for (int a = 0; a < Dim; ++a) {
    c[a] = voxel % dims_[a];
    voxel /= dims_[a];
  }
  return c;
}

template <int Dim>
std::vector<int> VoxelIndex<Dim>::ball(std::span<const Vec<Dim>> positions,
                                       const Vec<Dim>& center, double radius,
                                       int exclude) const {
  if (radius > cell_size_ * (1.0 + 1e-12))
    throw InvalidArgument("ball radius exceeds the voxel edge");
  const double r2 = radius * radius;
  const Coord c = coord_of(center);

  std::vector<int> out;
  Coord lo, hi;
  for (int a = 0; a < Dim; ++a) {
    lo[a] = std::max(c[a] - 1, 0);
    hi[a] = std::min(c[a] + 1, dims_[a] - 1);
  }
  Coord k = lo;
  while (true) {
    for (int j : cell(flat(k)))
      if (j != exclude && (positions[j] - center).squaredNorm() <= r2) out.push_back(j);
    int a = 0;
    while (a < Dim && ++k[a] > hi[a]) {
      k[a] = lo[a];
      ++a;
    }
    if (a == Dim) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <int Dim>
VoxelIndex<Dim> build_voxel_index(const ParticleCloud<Dim>& cloud, const Executor& exec) {
  if (!(cloud.h > 0.0) || !(cloud.L > 0.0)) throw InvalidArgument("cloud has no geometry");

  VoxelIndex<Dim> idx;
  idx.cell_size_ = cloud.h;
  idx.radius_ = cloud.h;
  const int per_axis = std::max(1, static_cast<int>(std::floor(cloud.L / cloud.h)));
  idx.dims_.fill(per_axis);
  int total = 1;
  for (int a = 0; a < Dim; ++a) total *= per_axis;

  const std::size_t n = cloud.size();
  const double tol = 1e-12 * cloud.L;
  idx.particle_voxel_.assign(n, 0);
  par_map_particles(exec, n, [&](std::size_t i) {
    const auto& p = cloud.x[i];
    for (int a = 0; a < Dim; ++a)
      if (!(p[a] >= -tol && p[a] <= cloud.L + tol)) throw OutOfDomain(i);
    idx.particle_voxel_[i] = idx.flat(idx.coord_of(p));
  });

  // Counting sort keeps ascending particle order inside every voxel.
  idx.cell_start_.assign(static_cast<std::size_t>(total) + 1, 0);
  for (int v : idx.particle_voxel_) ++idx.cell_start_[v + 1];
  for (int v = 0; v < total; ++v) idx.cell_start_[v + 1] += idx.cell_start_[v];
  idx.cell_particles_.resize(n);
  std::vector<int> fill(idx.cell_start_.begin(), idx.cell_start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i)
    idx.cell_particles_[fill[idx.particle_voxel_[i]]++] = static_cast<int>(i);
  return idx;
}

template <int Dim>
std::vector<int> query_neighbors(const VoxelIndex<Dim>& idx, const ParticleCloud<Dim>& cloud,
                                 std::size_t i) {
  return idx.ball(std::span<const Vec<Dim>>(cloud.x), cloud.x[i], idx.radius(),
                  static_cast<int>(i));
}

template <int Dim>
NeighborTable build_neighbor_table(const VoxelIndex<Dim>& idx, const ParticleCloud<Dim>& cloud,
                                   const Executor& exec) {
  const std::size_t n = cloud.size();
  std::vector<std::vector<int>> lists(n);
  par_map_particles(exec, n, [&](std::size_t i) { lists[i] = query_neighbors(idx, cloud, i); });

  NeighborTable t;
  t.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) t.offsets[i + 1] = t.offsets[i] + lists[i].size();
  t.indices.resize(t.offsets[n]);
  par_map_particles(exec, n, [&](std::size_t i) {
    std::copy(lists[i].begin(), lists[i].end(), t.indices.begin() + t.offsets[i]);
  });
  return t;
}

template class VoxelIndex<2>;
template class VoxelIndex<3>;
template VoxelIndex<2> build_voxel_index<2>(const ParticleCloud<2>&, const Executor&);
template VoxelIndex<3> build_voxel_index<3>(const ParticleCloud<3>&, const Executor&);
template std::vector<int> query_neighbors<2>(const VoxelIndex<2>&, const ParticleCloud<2>&,
                                             std::size_t);
template std::vector<int> query_neighbors<3>(const VoxelIndex<3>&, const ParticleCloud<3>&,
                                             std::size_t);
template NeighborTable build_neighbor_table<2>(const VoxelIndex<2>&, const ParticleCloud<2>&,
                                               const Executor&);
template NeighborTable build_neighbor_table<3>(const VoxelIndex<3>&, const ParticleCloud<3>&,
                                               const Executor&);

}  // namespace bgkale
