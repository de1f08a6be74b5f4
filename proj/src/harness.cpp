#include "bgkale/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bgkale/snapshot.hpp"

namespace bgkale {
namespace {

std::string fixed(double v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string megabytes(std::size_t bytes) { return fixed(bytes / (1024.0 * 1024.0), 1); }

// Aligned text table; the first column is left aligned, the rest right aligned.
std::string align(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      if (c == 0)
        os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      else
        os << std::right << std::setw(static_cast<int>(width[c])) << row[c];
    }
    os << '\n';
  }
  return os.str();
}

std::size_t baseline_column(const std::vector<int>& workers) {
  const auto it = std::find(workers.begin(), workers.end(), 1);
  return it == workers.end() ? 0 : static_cast<std::size_t>(it - workers.begin());
}

}  // namespace

void write_diagnostics_csv(std::span<const StepDiagnostics> rows, int dims, std::ostream& os) {
  static constexpr const char* axis[] = {"px", "py", "pz"};
  os << "step,time,particles,mass,";
  for (int a = 0; a < dims; ++a) os << axis[a] << ",";
  os << "min_f,stable_dt,max_wall_flux,deficient,clamped,boundary_fallbacks,merged,inserted,"
        "management_skipped,seconds\n";
  for (const auto& d : rows) {
    os << d.step << ',' << format_number(d.time) << ',' << d.particles << ','
       << format_number(d.mass) << ',';
    for (int a = 0; a < dims; ++a)
      os << format_number(a < static_cast<int>(d.momentum.size()) ? d.momentum[a] : 0.0) << ',';
    os << format_number(d.min_f) << ',' << format_number(d.stable_dt) << ','
       << format_number(d.max_wall_flux) << ',' << d.deficient << ',' << d.clamped << ','
       << d.boundary_fallbacks << ',' << d.merged << ',' << d.inserted << ','
       << d.management_skipped << ',' << format_number(d.seconds) << '\n';
  }
}

RunSummary run_to_directory(const RunConfig& config, const std::filesystem::path& out_dir,
                            std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), ec.message());

  return dispatch_dims(config.dims, [&](auto dim) {
    constexpr int Dim = decltype(dim)::value;
    RunSummary summary;
    const auto start = std::chrono::steady_clock::now();
    const auto artifacts = run<Dim>(config, [&](const Simulation<Dim>& sim) {
      const auto path = out_dir / snapshot_name(sim.step_index(), config.snapshot_format);
      write_snapshot(sim.cloud(), path, config.snapshot_format);
      const auto& d = sim.history().back();
      log << "step " << d.step << "  particles " << d.particles << "  mass "
          << format_number(d.mass) << "  min_f " << format_number(d.min_f) << "  stable_dt "
          << format_number(d.stable_dt) << "  -> " << path.filename().string() << '\n';
    });
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    const auto diag_path = out_dir / "diagnostics.csv";
    std::ofstream diag(diag_path);
    if (!diag) throw IoError(diag_path.string(), "cannot open for writing");
    write_diagnostics_csv(artifacts.diagnostics, Dim, diag);
    if (!diag) throw IoError(diag_path.string(), "write failed");

    summary.steps = static_cast<int>(artifacts.diagnostics.size()) - 1;
    summary.snapshots = artifacts.snapshots;
    summary.seconds = elapsed.count();
    summary.first = artifacts.diagnostics.front();
    summary.last = artifacts.diagnostics.back();
    return summary;
  });
}

double BenchTable::speedup(const BenchRow& row, std::size_t column) const {
  const double base = row.seconds[baseline_column(workers)];
  return row.seconds[column] > 0.0 ? base / row.seconds[column] : 0.0;
}

double BenchTable::advect_speedup(const BenchRow& row, std::size_t column) const {
  const double base = row.advect_seconds[baseline_column(workers)];
  return row.advect_seconds[column] > 0.0 ? base / row.advect_seconds[column] : 0.0;
}

std::string BenchTable::text() const {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head = {"resolution", "particles"};
  for (int w : workers) head.push_back("t[s] w=" + std::to_string(w));
  for (int w : workers) head.push_back("speedup w=" + std::to_string(w));
  head.push_back("buffer[MB]");
  head.push_back("peak[MB]");
  cells.push_back(head);
  for (const auto& r : rows) {
    std::vector<std::string> row = {std::to_string(r.n_per_axis) + "^d",
                                    std::to_string(r.particles)};
    for (double s : r.seconds) row.push_back(fixed(s, 3));
    for (std::size_t c = 0; c < workers.size(); ++c) row.push_back(fixed(speedup(r, c), 2));
    row.push_back(megabytes(r.buffer_bytes));
    row.push_back(megabytes(r.peak_bytes));
    cells.push_back(row);
  }
  return align(cells);
}

std::string BenchTable::csv() const {
  std::ostringstream os;
  os << "n_per_axis,particles,workers,steps,seconds,advect_seconds,speedup,advect_speedup,"
        "buffer_bytes,peak_bytes\n";
  for (const auto& r : rows)
    for (std::size_t c = 0; c < workers.size(); ++c)
      os << r.n_per_axis << ',' << r.particles << ',' << workers[c] << ',' << steps << ','
         << format_number(r.seconds[c]) << ',' << format_number(r.advect_seconds[c]) << ','
         << format_number(speedup(r, c)) << ',' << format_number(advect_speedup(r, c)) << ','
         << r.buffer_bytes << ',' << r.peak_bytes << '\n';
  return os.str();
}

BenchTable bench(const RunConfig& config, std::span<const int> workers,
                 std::span<const int> resolutions) {
  BenchTable table;
  table.workers.assign(workers.begin(), workers.end());
  table.steps = config.n_steps;
  std::vector<int> res(resolutions.begin(), resolutions.end());
  if (res.empty()) res.push_back(config.n_per_axis);

  for (int n : res) {
    BenchRow row;
    row.n_per_axis = n;
    for (int w : workers) {
      RunConfig c = config;
      c.n_per_axis = n;
      c.dt = config.dt * (config.n_per_axis - 1) / (n - 1);
      c.workers = w;
      dispatch_dims(c.dims, [&](auto dim) {
        constexpr int Dim = decltype(dim)::value;
        Simulation<Dim> sim(c);
        const auto start = std::chrono::steady_clock::now();
        for (int s = 0; s < c.n_steps; ++s) sim.step();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        row.seconds.push_back(elapsed.count());
        row.advect_seconds.push_back(sim.timer().cumulative_total(phase::spatial_derivative));
        row.particles = sim.cloud().size();
        row.buffer_bytes = sim.distribution_bytes();
        // Operators hold offsets, derivative and rotated coefficients, a frame,
        // a weight and an index per neighbor entry.
        const std::size_t per_neighbor = (3 * Dim + Dim * Dim + 1) * sizeof(double) + 2 * sizeof(int);
        row.peak_bytes = 2 * row.buffer_bytes + sim.neighbors().indices.size() * per_neighbor;
      });
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ProfileReport summarize_profile(const PhaseTimer& timer, double total_seconds, int steps) {
  ProfileReport r;
  r.steps = steps;
  r.total_seconds = total_seconds;
  if (steps <= 0 || !(total_seconds > 0.0)) return r;

  double covered = 0.0;
  for (const auto& [label, seconds] : timer.cumulative()) {
    r.entries.push_back({label, seconds, 100.0 * seconds / total_seconds});
    covered += seconds;
  }
  const double other = std::max(0.0, total_seconds - covered);
  r.entries.push_back({"Other", other, 100.0 * other / total_seconds});
  const auto top = std::max_element(r.entries.begin(), r.entries.end(),
                                    [](const auto& a, const auto& b) { return a.seconds < b.seconds; });
  r.dominant = top->label;
  return r;
}

std::string ProfileReport::text() const {
  std::vector<std::vector<std::string>> cells = {{"phase", "time[s]", "share[%]", ""}};
  for (const auto& e : entries)
    cells.push_back({e.label, fixed(e.seconds, 4), fixed(e.percent, 1),
                     e.label == dominant ? "<- dominant" : ""});
  std::ostringstream os;
  os << steps << " steps, " << fixed(total_seconds, 3) << " s\n" << align(cells);
  return os.str();
}

std::string ProfileReport::csv() const {
  std::ostringstream os;
  os << "phase,seconds,percent,dominant\n";
  for (const auto& e : entries)
    os << '"' << e.label << "\"," << format_number(e.seconds) << ',' << format_number(e.percent)
       << ',' << (e.label == dominant ? 1 : 0) << '\n';
  return os.str();
}

ProfileReport profile(const RunConfig& config) {
  return dispatch_dims(config.dims, [&](auto dim) {
    constexpr int Dim = decltype(dim)::value;
    Simulation<Dim> sim(config);
    double total = 0.0;
    for (int s = 0; s < config.n_steps; ++s) total += sim.step().seconds;
    return summarize_profile(sim.timer(), total, config.n_steps);
  });
}

}  // namespace bgkale
