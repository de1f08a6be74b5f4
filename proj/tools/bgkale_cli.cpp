#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "bgkale/config.hpp"
#include "bgkale/harness.hpp"
#include "bgkale/snapshot.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3, kIo = 4 };

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<int> snapshot_every;
  std::optional<int> steps;
  std::optional<int> workers;
  std::vector<int> bench_workers{1};
  std::vector<int> resolutions;
  std::uint64_t seed = 0;
};

bgkale::RunConfig load(const Options& o) {
  auto c = bgkale::load_config(o.config_path);
  if (o.steps) c.n_steps = *o.steps;
  if (o.snapshot_every) c.snapshot_every = *o.snapshot_every;
  if (o.workers) c.workers = *o.workers;
  c.validate();
  return c;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw bgkale::IoError(path.string(), "cannot open for writing");
  out << text;
  if (!out) throw bgkale::IoError(path.string(), "write failed");
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw bgkale::IoError(dir.string(), ec.message());
}

int cmd_run(const Options& o) {
  const auto c = load(o);
  std::cout << "mode " << c.mode_name() << ", " << c.n_per_axis << " points per axis, N_v "
            << c.n_v << ", " << c.n_steps << " steps\n";
  const auto s = bgkale::run_to_directory(c, o.out_dir, std::cout);
  const double drift = (s.last.mass - s.first.mass) / s.first.mass;
  std::cout << "done: " << s.steps << " steps in " << s.seconds << " s, " << s.snapshots
            << " snapshots, mass drift " << drift << ", max wall flux " << s.last.max_wall_flux
            << '\n';
  return kOk;
}

int cmd_bench(const Options& o) {
  const auto c = load(o);
  const auto table = bgkale::bench(c, o.bench_workers, o.resolutions);
  std::cout << table.text();
  prepare_dir(o.out_dir);
  write_file(std::filesystem::path(o.out_dir) / "bench.csv", table.csv());
  return kOk;
}

int cmd_profile(const Options& o) {
  const auto c = load(o);
  const auto report = bgkale::profile(c);
  std::cout << report.text();
  prepare_dir(o.out_dir);
  write_file(std::filesystem::path(o.out_dir) / "profile.csv", report.csv());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meshfree ALE solver for the BGK model: driven cavity runs, benchmarks, profiles"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("config", o.config_path, "Configuration file")->required();
    sub->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--snapshot-every", o.snapshot_every, "Snapshot cadence in steps (0: none)");
    sub->add_option("--steps", o.steps, "Override run.steps");
    sub->add_option("--threads", o.workers, "Override run.workers");
    sub->add_option("--seed", o.seed, "Reserved; the method is deterministic");
  };
  auto* run = app.add_subcommand("run", "Run a configuration and write snapshots");
  add_common(run);
  auto* bench = app.add_subcommand("bench", "Wall time and speedup per worker count");
  add_common(bench);
  bench->add_option("--workers", o.bench_workers, "Worker counts")->delimiter(',');
  bench->add_option("--resolutions", o.resolutions, "Points per axis")->delimiter(',');
  auto* profile = app.add_subcommand("profile", "Per-phase share of the step time");
  add_common(profile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(o);
    if (bench->parsed()) return cmd_bench(o);
    if (profile->parsed()) return cmd_profile(o);
  } catch (const bgkale::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const bgkale::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const bgkale::NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kNumerical;
  } catch (const bgkale::DegenerateState& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kNumerical;
  } catch (const bgkale::OutOfDomain& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
