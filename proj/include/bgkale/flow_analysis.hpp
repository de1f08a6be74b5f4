#pragma once

#include <span>
#include <vector>

#include "bgkale/phase_space.hpp"

namespace bgkale {

/// Velocity field sampled at fixed probe points by least-squares
/// interpolation of the particle velocities within h of each probe.
template <int Dim>
std::vector<Vec<Dim>> sample_velocity(const ParticleCloud<Dim>& cloud,
                                      std::span<const Vec<Dim>> probes);

/// Regular probe lattice over the plane spanned by axes (a, b) at
/// `offset` along the remaining axis, spanning [margin, L - margin]^2.
template <int Dim>
std::vector<Vec<Dim>> probe_plane(double L, int per_axis, double margin, int a = 0, int b = 1,
                                  double offset = 0.0);

/// Closed square loop centered at `center` with half-width `half`,
/// traversed counter-clockwise in the (a, b) plane, `per_side` points per side.
template <int Dim>
std::vector<Vec<Dim>> probe_loop(const Vec<Dim>& center, double half, int per_side, int a = 0,
                                 int b = 1);

/// Number of turns of the in-plane velocity direction along a closed loop of
/// samples: the wrapped angle increments summed and divided by 2 pi.
template <int Dim>
double winding_number(std::span<const Vec<Dim>> velocity, int a = 0, int b = 1);

/// ||u1 - u0|| / ||u1|| over matching samples.
template <int Dim>
double relative_change(std::span<const Vec<Dim>> u0, std::span<const Vec<Dim>> u1);

}  // namespace bgkale
