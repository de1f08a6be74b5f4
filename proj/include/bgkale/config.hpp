#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bgkale/solver.hpp"

namespace bgkale {

/// Parses sectioned `key = value` text into a validated RunConfig.
///
///   [run]       dims, steps, dt, workers, equilibrium, check_stable_dt
///   [domain]    L, n_per_axis, h_factor
///   [velocity]  n_v, v_max
///   [gas]       R, diameter, k_boltzmann
///   [initial]   rho, T, velocity
///   [management] enabled, r_merge, m_min
///   [output]    snapshot_every, format
///   [wall.<face>] velocity, temperature   (face: xmin xmax ymin ymax zmin zmax)
///
/// Vectors are comma separated. Unknown sections or keys, malformed values and
/// missing required keys raise ConfigError with the key and, where known, the line.
RunConfig parse_config(std::string_view text);

/// Throws IoError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& config);

std::string face_name(int face);
int face_from_name(std::string_view name);

}  // namespace bgkale
