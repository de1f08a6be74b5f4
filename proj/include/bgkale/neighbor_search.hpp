#pragma once

#include <array>
#include <span>
#include <vector>

#include "bgkale/parallel.hpp"
#include "bgkale/phase_space.hpp"

namespace bgkale {

/// Uniform voxel hash over [0,L]^Dim with voxel edge h.
///
/// There are max(1, floor(L/h)) voxels per axis; positions beyond the last
/// full voxel fall into the last one, so that voxel may be up to 2h wide and
/// every point within h of a particle lies in the 3^Dim block around its voxel.
/// Particles inside a voxel are listed in ascending index.
template <int Dim>
class VoxelIndex {
 public:
  using Coord = std::array<int, Dim>;

  double cell_size() const noexcept { return cell_size_; }
  double radius() const noexcept { return radius_; }
  const Coord& grid_dims() const noexcept { return dims_; }
  int voxel_count() const noexcept { return static_cast<int>(cell_start_.size()) - 1; }

  std::span<const int> cell(int voxel) const {
    return {cell_particles_.data() + cell_start_[voxel],
            static_cast<std::size_t>(cell_start_[voxel + 1] - cell_start_[voxel])};
  }
  int particle_voxel(std::size_t i) const { return particle_voxel_[i]; }
  std::size_t particle_count() const noexcept { return particle_voxel_.size(); }

  Coord coord_of(const Vec<Dim>& x) const;
  int flat(const Coord& c) const;
  Coord unflat(int voxel) const;

  /// Ascending indices j with |x_j - center| <= radius (radius <= cell_size),
  /// skipping `exclude`.
  std::vector<int> ball(std::span<const Vec<Dim>> positions, const Vec<Dim>& center,
                        double radius, int exclude = -1) const;

 private:
  template <int D>
  friend VoxelIndex<D> build_voxel_index(const ParticleCloud<D>& cloud, const Executor& exec);

  double cell_size_ = 0.0;
  double radius_ = 0.0;
  Coord dims_{};
  std::vector<int> cell_start_;
  std::vector<int> cell_particles_;
  std::vector<int> particle_voxel_;
};

/// Throws OutOfDomain when a particle lies outside [0,L]^Dim.
template <int Dim>
VoxelIndex<Dim> build_voxel_index(const ParticleCloud<Dim>& cloud,
                                  const Executor& exec = Executor(1));

/// All j != i with |x_j - x_i| <= h, ascending.
template <int Dim>
std::vector<int> query_neighbors(const VoxelIndex<Dim>& idx, const ParticleCloud<Dim>& cloud,
                                 std::size_t i);

/// Compressed neighbor lists for every particle.
struct NeighborTable {
  std::vector<std::size_t> offsets{0};
  std::vector<int> indices;

  std::size_t size() const noexcept { return offsets.size() - 1; }
  std::span<const int> of(std::size_t i) const {
    return {indices.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  std::size_t count(std::size_t i) const { return offsets[i + 1] - offsets[i]; }
};

template <int Dim>
NeighborTable build_neighbor_table(const VoxelIndex<Dim>& idx, const ParticleCloud<Dim>& cloud,
                                   const Executor& exec = Executor(1));

}  // namespace bgkale
