#pragma once

#include "bgkale/neighbor_search.hpp"
#include "bgkale/phase_space.hpp"

namespace bgkale {

struct MergeReport {
  int merged = 0;   // pairs replaced by a midpoint particle
  int skipped = 0;  // close pairs left alone because interpolation failed
  /// Largest |rho_new - mean(rho_pair)| / mean(rho_pair) over merged pairs.
  double max_density_change = 0.0;
};

struct FillReport {
  int inserted = 0;
  int skipped = 0;  // accepted positions whose interpolation failed
};

/// Greedy ascending-index pass: the first unprocessed interior partner closer
/// than r_merge replaces both particles by one at their midpoint. The new
/// distribution is the least-squares interpolant over the pair and their
/// neighbors; its macro state is the moments of that distribution.
/// Index and table must describe the cloud as passed in.
template <int Dim>
MergeReport merge_close_pairs(ParticleCloud<Dim>& cloud, const VoxelIndex<Dim>& idx,
                              const NeighborTable& table, const VelocityGrid& grid, double R,
                              double r_merge);

/// Interior particles with fewer than m_min neighbors propose positions at
/// x +/- h/2 along each axis; a position farther than 0.45 dx from every
/// particle is filled with an interpolated particle.
template <int Dim>
FillReport fill_holes(ParticleCloud<Dim>& cloud, const VoxelIndex<Dim>& idx,
                      const NeighborTable& table, const VelocityGrid& grid, double R, int m_min);

}  // namespace bgkale
