#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bgkale/solver.hpp"

namespace bgkale {

/// Calls fn(std::integral_constant<int, Dim>{}) for config.dims.
template <typename Fn>
decltype(auto) dispatch_dims(int dims, Fn&& fn) {
  if (dims == 2) return fn(std::integral_constant<int, 2>{});
  if (dims == 3) return fn(std::integral_constant<int, 3>{});
  throw ConfigError("run.dims: must be 2 or 3", "run.dims");
}

struct RunSummary {
  int steps = 0;
  int snapshots = 0;
  double seconds = 0.0;
  StepDiagnostics first;
  StepDiagnostics last;
};

/// Runs `config`, writing snapshots and diagnostics.csv into `out_dir`
/// (created if missing); progress goes to `log` at the snapshot cadence.
RunSummary run_to_directory(const RunConfig& config, const std::filesystem::path& out_dir,
                            std::ostream& log);

void write_diagnostics_csv(std::span<const StepDiagnostics> rows, int dims, std::ostream& os);

struct BenchRow {
  int n_per_axis = 0;
  std::size_t particles = 0;
  std::vector<double> seconds;         // per worker count
  std::vector<double> advect_seconds;  // spatial-derivative phase, per worker count
  std::size_t buffer_bytes = 0;        // one distribution buffer set
  std::size_t peak_bytes = 0;          // distribution buffers plus LS operators, estimated
};

struct BenchTable {
  std::vector<int> workers;
  int steps = 0;
  std::vector<BenchRow> rows;

  /// Wall time relative to the 1-worker column (or the first column if absent).
  double speedup(const BenchRow& row, std::size_t column) const;
  double advect_speedup(const BenchRow& row, std::size_t column) const;
  std::string text() const;
  std::string csv() const;
};

/// Times config.n_steps steps for every resolution and worker count.
/// An empty `resolutions` uses config.n_per_axis. The time step is scaled with
/// the point spacing so every resolution runs at the configured CFL number.
BenchTable bench(const RunConfig& config, std::span<const int> workers,
                 std::span<const int> resolutions = {});

struct ProfileEntry {
  std::string label;
  double seconds = 0.0;
  double percent = 0.0;
};

struct ProfileReport {
  int steps = 0;
  double total_seconds = 0.0;
  std::vector<ProfileEntry> entries;  // phase labels in step order, then "Other"
  std::string dominant;

  std::string text() const;
  std::string csv() const;
};

/// Percentages of the summed step wall time; the remainder not covered by a
/// phase is reported as "Other". Zero steps give an empty report.
ProfileReport summarize_profile(const PhaseTimer& timer, double total_seconds, int steps);

ProfileReport profile(const RunConfig& config);

}  // namespace bgkale
