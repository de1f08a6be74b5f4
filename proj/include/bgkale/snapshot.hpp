#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include "bgkale/phase_space.hpp"

namespace bgkale {

/// Header `x,y[,z],kind,rho,u,v[,w],T`, then one row per particle in index
/// order. Numbers use the shortest representation that round-trips exactly.
template <int Dim>
void write_csv(const ParticleCloud<Dim>& cloud, std::ostream& os);

/// Legacy ASCII VTK polydata: one vertex per particle, scalars rho, T and
/// kind (0 interior, 1 boundary), vector field U. 2D points get z = 0.
template <int Dim>
void write_vtk(const ParticleCloud<Dim>& cloud, std::ostream& os, std::string_view title = "bgkale");

/// Writes `cloud` to `path` in `format` ("csv" or "vtk"); throws IoError.
template <int Dim>
void write_snapshot(const ParticleCloud<Dim>& cloud, const std::filesystem::path& path,
                    std::string_view format);

/// snapshot_000050.csv
std::string snapshot_name(int step, std::string_view format);

std::string format_number(double v);

}  // namespace bgkale
