#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "bgkale/config.hpp"

using namespace bgkale;

namespace {

const std::string kReference = R"(; driven cavity, reference parameters
[run]
dims = 2
steps = 400
dt = 1e-11

[domain]
L = 1e-6
n_per_axis = 50

[velocity]
n_v = 20

[gas]
R = 208
diameter = 0.368e-9

[initial]
rho = 1
T = 270

[wall.ymax]
velocity = 1, 0
temperature = 270
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

ConfigError error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("no ConfigError for:\n" << text);
  return ConfigError("");
}

}  // namespace

TEST_CASE("reference cavity file") {
  const auto c = parse_config(kReference);
  CHECK(c.dims == 2);
  CHECK(c.n_steps == 400);
  CHECK(c.dt == 1e-11);
  CHECK(c.L == 1e-6);
  CHECK(c.n_per_axis == 50);
  CHECK(c.n_v == 20);
  CHECK(c.gas.R == 208.0);
  CHECK(c.gas.diameter == 0.368e-9);
  CHECK(c.gas.k_boltzmann == 1.3806e-23);
  CHECK(c.rho0 == 1.0);
  CHECK(c.T0 == 270.0);
  const auto walls = c.resolved_walls();
  REQUIRE(walls.size() == 4);
  CHECK(walls[3].U_wall == std::vector<double>{1.0, 0.0});
  CHECK(walls[0].U_wall == std::vector<double>{0.0, 0.0});
  CHECK(walls[0].T_wall == 270.0);
  CHECK(c.equilibrium == EquilibriumModel::conservative);
}

TEST_CASE("shipped configuration files parse") {
  const std::filesystem::path dir = BGKALE_SOURCE_DIR "/configs";
  const auto c2 = load_config(dir / "cavity2d.ini");
  CHECK(c2.dims == 2);
  CHECK(c2.n_per_axis == 50);
  CHECK(c2.n_v == 10);
  const auto c3 = load_config(dir / "cavity3d.ini");
  CHECK(c3.dims == 3);
  CHECK(c3.resolved_walls()[5].U_wall == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("missing dt names the key") {
  const auto e = error_of(replace(kReference, "dt = 1e-11\n", ""));
  CHECK(e.key() == "run.dt");
  CHECK(std::string(e.what()).find("run.dt") != std::string::npos);
}

TEST_CASE("invariant violations") {
  const auto nv = error_of(replace(kReference, "n_v = 20", "n_v = -1"));
  CHECK(nv.key() == "velocity.n_v");
  CHECK(nv.line() == 12);
  CHECK(error_of(replace(kReference, "n_v = 20", "n_v = 7")).key() == "velocity.n_v");
  CHECK(error_of(replace(kReference, "T = 270", "T = 0")).key() == "initial.T");
  CHECK(error_of(replace(kReference, "dims = 2", "dims = 4")).key() == "run.dims");
  CHECK(error_of(replace(kReference, "velocity = 1, 0", "velocity = 0, 1")).key() ==
        "wall.ymax.velocity");
}

TEST_CASE("malformed and unknown entries report their line") {
  const auto unknown = error_of(replace(kReference, "n_per_axis = 50", "n_per_axis = 50\nspeed = 3"));
  CHECK(unknown.line() == 10);
  CHECK(unknown.key() == "domain.speed");
  const auto bad = error_of(replace(kReference, "dt = 1e-11", "dt = 1e-11s"));
  CHECK(bad.line() == 5);
  CHECK(std::string(bad.what()).find("1e-11s") != std::string::npos);
  const auto sec = error_of(replace(kReference, "[gas]", "[gass]"));
  CHECK(sec.line() == 14);
  CHECK(error_of(replace(kReference, "[wall.ymax]", "[wall.top]")).line() == 22);
  CHECK(error_of(kReference + "\n[wall.zmax]\ntemperature = 300\n").key() == "wall.zmax");
  CHECK(error_of(replace(kReference, "[run]", "[run\n")).line() > 0);
}

TEST_CASE("serialize and parse round trip exactly") {
  auto c = parse_config(kReference);
  c.v_max = 1234.56789;
  c.U0 = {0.1, -0.3};
  c.h_factor = 3.3;
  c.gas.diameter = 0.1 + 0.2;
  c.management.enabled = false;
  c.management.m_min = 6;
  c.equilibrium = EquilibriumModel::plain;
  c.snapshot_format = "vtk";
  c.workers = 3;
  const auto text = serialize_config(c);
  const auto back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(back.v_max == c.v_max);
  CHECK(back.gas.diameter == c.gas.diameter);
  CHECK(back.U0 == c.U0);
  CHECK(back.management.enabled == false);
  CHECK(back.management.m_min == 6);
  CHECK(back.equilibrium == EquilibriumModel::plain);
  CHECK(back.snapshot_format == "vtk");
  CHECK(back.resolved_walls()[3].U_wall == c.resolved_walls()[3].U_wall);
}

TEST_CASE("unreadable file is an IO error") {
  CHECK_THROWS_AS(load_config("/nonexistent/dir/cavity.ini"), IoError);
}

TEST_CASE("face names") {
  CHECK(face_name(3) == "ymax");
  CHECK(face_from_name("zmin") == 4);
  CHECK_THROWS_AS(face_name(6), InvalidArgument);
}
