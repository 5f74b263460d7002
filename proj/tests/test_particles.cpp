#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dkh/particles.hpp"
#include "oracles.hpp"

using namespace dkh;

namespace {

ParticleSet line_of_particles(const GridSpec& g, int n, double x0 = 0.5) {
  ParticleSet p;
  for (int i = 0; i < n; ++i) p.push_back({static_cast<std::uint64_t>(i), {x0, 0.5, 0.5}});
  (void)g;
  return p;
}

}  // namespace

TEST_CASE("rw_step is keyed by particle id and step") {
  const GridSpec g = GridSpec::unit(2, 32);
  const KeyedRng rng(8);
  ParticleSet p;
  for (std::uint64_t i = 0; i < 50; ++i) p.push_back({i * 3 + 1, {0.01 * i, 0.02 * i, 0.5}});
  ParticleSet reversed(p.rbegin(), p.rend());
  const double dt = 0.25 * 1.0 / (2.0 * 32 * 32);
  ParticleSet a = rw_step(p, g, dt, rng, 3), b = rw_step(reversed, g, dt, rng, 3);
  std::reverse(b.begin(), b.end());
  CHECK(a == b);
  CHECK(rw_step(p, g, dt, rng, 4) != a);
  CHECK_THROWS(rw_step(p, g, 0.0, rng, 0));
}

TEST_CASE("tiny dt leaves positions in place") {
  const GridSpec g = GridSpec::unit_1d(100);
  const ParticleSet p = line_of_particles(g, 10, 0.123);
  const ParticleSet q = rw_step(p, g, 1e-30, KeyedRng(1), 0);
  for (const auto& x : q) CHECK(x.position[0] == doctest::Approx(0.123).epsilon(1e-12));
}

TEST_CASE("displacements follow the clamped normal") {
  const GridSpec g = GridSpec::unit_1d(100);
  const double dx = g.spacing(0);
  const KeyedRng rng(21);
  for (double dt : {dx * dx / 16.0, dx * dx}) {
    const int n = 200000;
    double s = 0, s2 = 0, biggest = 0;
    for (int i = 0; i < n; ++i) {
      const double d = rw_displacement(i, 0, dt, g, rng)[0];
      s += d;
      s2 += d * d;
      biggest = std::max(biggest, std::abs(d));
    }
    const double var = s2 / n - (s / n) * (s / n);
    CHECK(var == doctest::Approx(oracle::clamped_normal_variance(std::sqrt(dt), dx)).epsilon(0.01));
    CHECK(biggest <= dx);
  }
}

TEST_CASE("wrap and reflect keep particles inside and conserve count") {
  for (Boundary bc : {Boundary::Periodic, Boundary::HomogeneousNeumann}) {
    const GridSpec g(1, {1.0, 1.0, 1.0}, {10, 1, 1}, {bc, bc, bc});
    ParticleSet p;
    for (std::uint64_t i = 0; i < 1000; ++i) p.push_back({i, {(i % 2) ? 0.001 : 0.999, 0.5, 0.5}});
    const KeyedRng rng(2);
    for (std::uint64_t s = 0; s < 50; ++s) p = rw_step(p, g, 0.005, rng, s);
    CHECK(p.size() == 1000);
    for (const auto& x : p) {
      CHECK(x.position[0] >= 0.0);
      CHECK(x.position[0] <= 1.0);
    }
    CHECK(total_mass(bin_counts(p, g)) == doctest::Approx(1000.0).epsilon(1e-13));
  }
}

TEST_CASE("binning") {
  const GridSpec g = GridSpec::unit_1d(100);
  ParticleSet p;
  for (std::uint64_t i = 0; i < 20; ++i) p.push_back({i, {0.555, 0.5, 0.5}});
  const ScalarField f = bin_counts(p, g);
  CHECK(f[55] == doctest::Approx(2000.0));
  CHECK(total_mass(f) == doctest::Approx(20.0));
  CHECK(bin_counts({}, g) == ScalarField(g));
  CHECK(cell_counts(p, g)[55] == 20);
}

TEST_CASE("crossing records") {
  const GridSpec g1 = GridSpec::unit_1d(10);
  ParticleSet before{{1, {0.15, 0.5, 0.5}}, {2, {0.55, 0.5, 0.5}}};
  CHECK(record_crossings(before, before, g1, {}).empty());

  ParticleSet after = before;
  after[0].position[0] = 0.25;
  const CrossingRecord r = record_crossings(before, after, g1, {});
  CHECK(r.net(1, 2) == 1);
  CHECK(r.net(2, 1) == -1);
  CHECK(r.size() == 1);

  after[1].id = 99;
  CHECK_THROWS(record_crossings(before, after, g1, {}));
  CHECK_THROWS(record_crossings(before, ParticleSet{}, g1, {}));

  const GridSpec g2 = GridSpec::unit(2, 10);
  ParticleSet b2{{7, {0.15, 0.15, 0.5}}}, a2{{7, {0.25, 0.25, 0.5}}};
  const CrossingRecord d = record_crossings(b2, a2, g2, {});
  CHECK(d.size() == 1);
  CHECK(d.net(g2.linear({1, 1, 0}), g2.linear({2, 2, 0})) == 1);

  // Unwatched start cells are not recorded.
  std::vector<std::uint8_t> watched(g2.num_cells(), 0);
  CHECK(record_crossings(b2, a2, g2, watched).empty());
}
