#include <doctest.h>

#include <filesystem>
#include <numeric>
#include <sstream>

#include "bgkale/harness.hpp"
#include "bgkale/snapshot.hpp"
#include "csv.hpp"

using namespace bgkale;

TEST_CASE("bench: a single worker column has speedup 1") {
  auto cfg = cavity_config(2, 8, 10);
  cfg.n_steps = 2;
  const std::vector<int> workers{1};
  const auto table = bench(cfg, workers);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].particles == 64);
  CHECK(table.speedup(table.rows[0], 0) == 1.0);
  CHECK(table.advect_speedup(table.rows[0], 0) == 1.0);
  const auto parsed = csv::parse(table.csv());
  REQUIRE(parsed.rows.size() == 1);
  CHECK(parsed.number(0, "speedup") == 1.0);
  CHECK(table.text().find("speedup w=1") != std::string::npos);
}

TEST_CASE("bench: the baseline is the one-worker column") {
  BenchTable t;
  t.workers = {4, 1, 2};
  BenchRow r;
  r.seconds = {1.0, 3.0, 2.0};
  r.advect_seconds = {0.5, 2.0, 1.0};
  t.rows.push_back(r);
  CHECK(t.speedup(r, 0) == 3.0);
  CHECK(t.speedup(r, 1) == 1.0);
  CHECK(t.advect_speedup(r, 2) == 2.0);
}

TEST_CASE("bench: memory column against the analytic buffer estimate") {
  // Reduced mode, 200^2 particles, N_v = 20: 2 (N_v+1)^2 doubles per particle.
  auto cfg = cavity_config(2, 200, 20);
  Simulation<2> sim(cfg);
  const double analytic = 2.0 * 21 * 21 * 8 * 200 * 200;
  CHECK(sim.distribution_bytes() == doctest::Approx(analytic));
  CHECK(analytic == doctest::Approx(0.3e9).epsilon(0.5));
}

TEST_CASE("profile: percentages sum to 100 and the zero-step report is empty") {
  auto cfg = cavity_config(2, 10, 10);
  cfg.n_steps = 3;
  const auto report = profile(cfg);
  double sum = 0.0;
  for (const auto& e : report.entries) sum += e.percent;
  CHECK(sum == doctest::Approx(100.0).epsilon(0.01));
  CHECK(report.entries.back().label == "Other");
  CHECK(report.entries.front().label == "Neighbor Search");
  CHECK(!report.dominant.empty());
  CHECK(csv::parse(report.csv()).rows.size() == report.entries.size());

  cfg.n_steps = 0;
  const auto empty = profile(cfg);
  CHECK(empty.entries.empty());
  CHECK(empty.steps == 0);
}

TEST_CASE("profile: remainder is reported as Other") {
  PhaseTimer t;
  t.add("A", 3.0);
  t.add("B", 5.0);
  const auto r = summarize_profile(t, 10.0, 1);
  REQUIRE(r.entries.size() == 3);
  CHECK(r.entries[0].percent == doctest::Approx(30.0));
  CHECK(r.entries[2].label == "Other");
  CHECK(r.entries[2].seconds == doctest::Approx(2.0));
  CHECK(r.dominant == "B");
}

TEST_CASE("run_to_directory writes snapshots and diagnostics") {
  auto cfg = cavity_config(2, 8, 10);
  cfg.n_steps = 4;
  cfg.snapshot_every = 2;
  const auto dir = std::filesystem::temp_directory_path() / "bgkale_test_run";
  std::filesystem::remove_all(dir);
  std::ostringstream log;
  const auto s = run_to_directory(cfg, dir, log);
  CHECK(s.steps == 4);
  CHECK(s.snapshots == 3);
  for (int k : {0, 2, 4}) CHECK(std::filesystem::exists(dir / snapshot_name(k, "csv")));
  const auto diag = csv::read((dir / "diagnostics.csv").string());
  CHECK(diag.rows.size() == 5);
  CHECK(diag.number(4, "step") == 4);
  CHECK(std::abs(s.last.mass - s.first.mass) / s.first.mass < 1e-6);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dimension dispatch") {
  CHECK(dispatch_dims(3, [](auto d) { return decltype(d)::value; }) == 3);
  CHECK_THROWS_AS(dispatch_dims(1, [](auto d) { return decltype(d)::value; }), ConfigError);
}
