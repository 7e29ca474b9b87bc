#include <doctest.h>

#include <filesystem>
#include <numbers>

#include "mks/config.hpp"
#include "mks/errors.hpp"
#include "mks/io.hpp"

using namespace mks;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "mks_unit";
  fs::create_directories(dir);
  return dir / name;
}

std::string config_error_path(const char* text) {
  try {
    config::canonicalize(config::parse_text(text));
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("sha256 known answers") {
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9})
    CHECK(std::stod(io::format_double(v)) == v);
}

TEST_CASE("trajectory container round trip") {
  io::TrajectoryFile t;
  t.n = 3;
  t.dt = 0.01;
  t.seed = 42;
  t.snapshots = {{0.0, {{1, 2}, {3, 4}, {5, 6}}}, {0.5, {{-1, 0.25}, {1e-300, 7}, {8, 9}}}};
  const fs::path p = scratch("t.mks");
  io::write_trajectory(p, t);
  const io::TrajectoryFile r = io::read_trajectory(p);
  CHECK(r.n == 3);
  CHECK(r.dt == 0.01);
  CHECK(r.seed == 42);
  REQUIRE(r.snapshots.size() == 2);
  CHECK(r.snapshots[1].t == 0.5);
  CHECK(r.snapshots[1].positions == t.snapshots[1].positions);
  io::write_text(p, "MKS2 not a trajectory");
  CHECK_THROWS(io::read_trajectory(p));
}

TEST_CASE("field container round trip") {
  const GridSpec g{3.0, 16};
  const Field f = sample(g, [](Vec2 x) { return x.x - 2.0 * x.y; });
  const fs::path p = scratch("f.mkf");
  io::write_field(p, f);
  const Field r = io::read_field(p);
  CHECK(r.grid == g);
  CHECK(r.values == f.values);
  io::write_field_csv(scratch("f.csv"), f);
  CHECK(io::read_text(scratch("f.csv")).rfind("x,y,value\n", 0) == 0);
}

TEST_CASE("JUnit output escapes text") {
  const std::vector<io::JUnitCase> cases{{"a<b", "suite", false, 1.5, "x & \"y\""}, {"ok", "suite", true, 0.1, ""}};
  const std::string xml = io::junit_xml("s", cases);
  CHECK(xml.find("a&lt;b") != std::string::npos);
  CHECK(xml.find("x &amp; &quot;y&quot;") != std::string::npos);
  CHECK(xml.find("failures=\"1\"") != std::string::npos);
  CHECK(xml.find("tests=\"2\"") != std::string::npos);
}

TEST_CASE("config defaults are materialized") {
  const auto c = config::canonicalize(config::parse_text("{}"));
  CHECK(c.at("mollifier").at("alpha") == 0.15);
  CHECK(c.at("particles").at("observers") == nlohmann::json::array({0.0, 1.0}));
  CHECK(c.at("particles").at("write_csv") == true);
  CHECK(c.at("pde").at("observers").size() == 5);
  CHECK(c.at("cutoff").at("A").is_null());
  CHECK(config::cutoff_is_auto(c));
}

TEST_CASE("YAML and JSON spellings share a digest") {
  const auto a = config::canonicalize(config::parse_text("particles:\n  n: 200\n  dt: 0.005\nseed: 7\n"));
  const auto b = config::canonicalize(config::parse_text(R"({"seed": 7, "particles": {"dt": 0.005, "n": 200}})"));
  CHECK(config::canonical_text(a) == config::canonical_text(b));
  CHECK(config::digest(a) == config::digest(b));
  CHECK(config::digest(a) == io::sha256_hex(config::canonical_text(a)));
  const auto c = config::canonicalize(config::parse_text("seed: 8\n"));
  CHECK(config::digest(a) != config::digest(c));
}

TEST_CASE("config errors name the field") {
  CHECK(config_error_path("particles:\n  nn: 3\n") == "particles.nn");
  CHECK(config_error_path("mollifier:\n  alpha: 0.3\n") == "mollifier.alpha");
  CHECK(config_error_path("analysis:\n  gamma: 1.6\n") == "analysis.gamma");
  CHECK(config_error_path("mollifier:\n  profile: box\n") == "mollifier.profile");
  CHECK(config_error_path("particles:\n  n: \"12\"\n") == "particles.n");
  CHECK(config_error_path("grid:\n  n: 100\n") == "grid.n");
  CHECK(config_error_path("verify:\n  only: [13]\n") == "verify.only[0]");
  CHECK(config_error_path("density:\n  kind: gaussian\n  mass: 3.0\n") == "<accepted>");
}

TEST_CASE("alpha message states the scaling condition") {
  try {
    config::canonicalize(config::parse_text("mollifier:\n  alpha: 0.3\n"));
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("0 < alpha < 1/(2 + 2 beta)") != std::string::npos);
  }
}

TEST_CASE("supercritical mass warns") {
  const auto c = config::canonicalize(config::parse_text("density:\n  mass: 30.0\n"));
  const auto w = config::warnings(c);
  REQUIRE_FALSE(w.empty());
  CHECK(w[0].find("8 pi") != std::string::npos);
  CHECK(config::warnings(config::canonicalize(config::parse_text("{}"))).empty());
}

TEST_CASE("config accessors") {
  const auto c = config::canonicalize(config::parse_text(
      "seed: 5\nparticles:\n  n: 64\n  t_end: 0.5\ncutoff:\n  A: 2.0\ngrid:\n  half_extent: 6\n  n: 64\n"));
  CHECK(config::seed(c) == 5);
  const SimParams p = config::sim_params(c);
  CHECK(p.n_particles() == 64);
  CHECK(p.cutoff.A == 2.0);
  CHECK(config::grid(c) == GridSpec{6.0, 64});
  CHECK(config::pde_config(c, 0.3).t_end == 0.3);
  CHECK(config::density(c).total_mass == doctest::Approx(4.0 * std::numbers::pi));
}
