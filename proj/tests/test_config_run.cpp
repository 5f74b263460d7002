#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dkh/config.hpp"
#include "dkh/run.hpp"
#include "dkh/scenario.hpp"

using namespace dkh;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dkh_test_" + name);
  fs::remove_all(p);
  return p;
}

SimConfig small(Method m, const std::string& out) {
  SimConfig c;
  c.method = m;
  c.scenario = "1d_void";
  c.steps = 30;
  c.ensemble = 6;
  c.seed = 3;
  c.regrid.threshold = 5;
  c.output_every = 10;
  c.snapshot_every = 15;
  c.out = out;
  return c;
}

}  // namespace

TEST_CASE("config parsing and echo round-trip") {
  const SimConfig c = parse_config(R"(
    # comment
    method = hybrid
    dim = 2
    cells = 64, 32
    bc = neumann
    dt = 1.5e-5
    steps = 40
    ensemble = 3
    seed = 99
    theta = 5
    buffer = 2
    efficiency = 0.8
    regrid_interval = 4
    region = 1:3,2:5;10:12,0:0
    scenario = 2d_ellipses
    scenario.inner_ppc = 12
    out = somewhere
  )");
  CHECK(c.method == Method::Hybrid);
  CHECK(c.cells == std::array<int, 3>{64, 32, 1});
  CHECK(c.bc[1] == Boundary::HomogeneousNeumann);
  CHECK(*c.dt == 1.5e-5);
  CHECK(c.regrid.buffer == 2);
  CHECK(parse_boxes(c.region).size() == 2);
  CHECK(c.scenario_params.at("inner_ppc") == "12");
  const SimConfig back = parse_config(to_config_text(c));
  CHECK(to_config_text(back) == to_config_text(c));

  CHECK_THROWS(parse_config("nonsense = 1"));
  CHECK_THROWS(parse_config("steps = -3"));
  CHECK_THROWS(parse_config("method = lattice"));
  CHECK_THROWS(parse_config("just text"));
  SimConfig bad;
  bad.ensemble = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("auto time step and t_end snapping") {
  SimConfig c;
  CHECK(c.resolved_dt() == doctest::Approx(0.25e-4));
  c.t_end = 0.0010001;
  CHECK(c.resolved_steps() == 40);
}

TEST_CASE("scenarios") {
  const KeyedRng rng(1);
  const GridSpec g = GridSpec::unit_1d(100);
  const InitialState v = build_scenario("1d_void", {}, g, rng, true);
  CHECK(total_mass(v.field) == doctest::Approx(1000.0));
  CHECK(v.particles.size() == 1000);
  CHECK(v.field[25] == 0.0);
  CHECK(v.field[74] == 0.0);
  CHECK(v.field[24] == 2000.0);

  const InitialState u = build_scenario("uniform", {{"particles_per_cell", "5"}}, g, rng, true);
  CHECK(u.particles.size() == 500);
  CHECK(bin_counts(u.particles, g) == ScalarField(g, 500.0));
  const InitialState iid = build_scenario("uniform", {{"particles_per_cell", "5"}, {"placement", "iid"}},
                                          g, rng, true);
  CHECK(iid.particles.size() == 500);

  const GridSpec g2 = GridSpec::unit(2, 64);
  const InitialState e = build_scenario("2d_ellipses", {}, g2, rng, false);
  CHECK(count_negative(e.field) == 0);
  CHECK(min_value(e.field) == 0.0);
  const InitialState flat =
      build_scenario("2d_ellipses", {{"inner", "0.1,0.07"}, {"outer", "0.1,0.07"}}, g2, rng, false);
  CHECK(min_value(flat.field) * g2.cell_volume() == doctest::Approx(15.0));

  CHECK_THROWS(build_scenario("vortex", {}, g, rng, false));
  CHECK_THROWS(build_scenario("2d_ellipses", {}, g, rng, false));
  CHECK_THROWS(build_scenario("2d_ellipses", {{"outer", "0.6,0.2"}}, g2, rng, false));
  CHECK_THROWS(build_scenario("uniform", {{"colour", "red"}}, g, rng, false));
  CHECK_THROWS(build_scenario("1d_void", {{"void_hi", "1.5"}}, g, rng, false));
}

TEST_CASE("zero steps reproduce the initial field") {
  SimConfig c = small(Method::FiniteVolume, scratch("zero").string());
  c.steps = 0;
  c.ensemble = 1;
  c.snapshot_every = 1;
  const RunResult r = simulate(c);
  REQUIRE(r.snapshots.count(0) == 1);
  const InitialState init = build_scenario(c.scenario, c.scenario_params, c.grid(), KeyedRng(0), false);
  CHECK(r.snapshots.at(0) == init.field);
}

TEST_CASE("hybrid with theta 0 matches fv bitwise") {
  SimConfig h = small(Method::Hybrid, scratch("h0").string());
  h.regrid.threshold = 0;
  h.regrid.interval = 5;
  SimConfig f = small(Method::FiniteVolume, scratch("f0").string());
  const RunResult rh = simulate(h), rf = simulate(f);
  CHECK(rh.snapshots == rf.snapshots);
  for (std::size_t s = 0; s < rh.mass.size(); ++s) CHECK(rh.mass[s].sum == rf.mass[s].sum);
  write_outputs(h, rh);
  write_outputs(f, rf);
  auto body = [](const std::string& t) { return t.substr(t.find("\nstep")); };
  CHECK(body(slurp(fs::path(h.out) / "stats.csv")) == body(slurp(fs::path(f.out) / "stats.csv")));
}

TEST_CASE("runs are deterministic and independent of the thread count") {
  SimConfig a = small(Method::Hybrid, scratch("a").string());
  a.regrid.interval = 5;
  SimConfig b = a;
  b.out = scratch("b").string();
  SimConfig t = a;
  t.out = scratch("t").string();
  t.threads = 3;
  REQUIRE(run(a) == 0);
  REQUIRE(run(b) == 0);
  REQUIRE(run(t) == 0);
  for (const char* name : {"stats.csv", "pdf.csv", "mass.csv", "regions.csv", "snapshot_15.csv"}) {
    CHECK(slurp(fs::path(a.out) / name) == slurp(fs::path(b.out) / name));
    CHECK(slurp(fs::path(a.out) / name) == slurp(fs::path(t.out) / name));
  }
  // The echoed configuration reproduces the run.
  SimConfig echo = load_config((fs::path(a.out) / "config.txt").string());
  echo.out = scratch("echo").string();
  REQUIRE(run(echo) == 0);
  CHECK(slurp(fs::path(a.out) / "stats.csv") == slurp(fs::path(echo.out) / "stats.csv"));
}

TEST_CASE("output tables carry headers and metadata") {
  SimConfig c = small(Method::Hybrid, scratch("meta").string());
  REQUIRE(run(c) == 0);
  const std::vector<std::pair<std::string, std::string>> tables{
      {"stats.csv", "step,i,j,k,mean,variance,skewness,kurtosis"},
      {"pdf.csv", "bin_center_particles,probability,method"},
      {"mass.csv", "step,total_mass,negative_cell_count,min_value"},
      {"regions.csv", "step,box_id,lo_i,lo_j,lo_k,hi_i,hi_j,hi_k"},
      {"snapshot_0.csv", "i,j,k,q"}};
  for (const auto& [name, header] : tables) {
    const std::string text = slurp(fs::path(c.out) / name);
    CHECK(text.rfind("# dkh ", 0) == 0);
    CHECK(text.find("seed=3") != std::string::npos);
    CHECK(text.find("dt=") != std::string::npos);
    CHECK(text.find("method=hybrid") != std::string::npos);
    CHECK(text.find("\n" + header) != std::string::npos);
  }
}

TEST_CASE("invalid configuration returns non-zero") {
  SimConfig c;
  c.scenario = "nowhere";
  c.out = scratch("bad").string();
  CHECK(run(c) != 0);
  c.scenario = "uniform";
  c.threads = 0;
  CHECK(run(c) != 0);
}
