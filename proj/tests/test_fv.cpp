#include <doctest.h>

#include <cmath>

#include "dkh/fv_solver.hpp"
#include "dkh/gaussian_solver.hpp"
#include "oracles.hpp"

using namespace dkh;

TEST_CASE("averaging operator") {
  CHECK(averaging(4, 0) == 1.0);
  CHECK(averaging(9, 9) == doctest::Approx(3.0));
  CHECK(averaging(-3, 4) == 1.0);
}

TEST_CASE("deterministic flux") {
  const GridSpec g3(1, {3.0, 1.0, 1.0}, {3, 1, 1}, {});
  ScalarField f(g3, std::vector<double>{0, 1, 0});
  CHECK(deterministic_flux(f, {{0, 0, 0}, 0}) == 0.5);

  const GridSpec g = GridSpec::unit_1d(100);
  ScalarField step(g, 0.0);
  step[10] = 2000.0;
  CHECK(deterministic_flux(step, {{10, 0, 0}, 0}) == doctest::Approx(-100000.0));
  ScalarField flat(g, 7.0);
  for (int i = 0; i < 100; ++i) CHECK(deterministic_flux(flat, {{i, 0, 0}, 0}) == 0.0);

  const GridSpec n = GridSpec::unit_1d(100, Boundary::HomogeneousNeumann);
  ScalarField s(n, 0.0);
  s[99] = 50.0;
  CHECK(deterministic_flux(s, {{99, 0, 0}, 0}) == 0.0);
}

TEST_CASE("stochastic flux") {
  CHECK(stochastic_flux(0, 0, 1.7, 0.1, 0.01) == 0.0);
  CHECK(stochastic_flux(4, 4, 1.0, 1.0, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS(stochastic_flux(4, 4, 1.0, 0.0, 1.0));

  // Variance over keyed normal draws against q/(dt*Vc).
  const KeyedRng rng(11);
  const double q = 500.0, dt = 1e-4, vc = 0.01;
  const int n = 400000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n / 2; ++i)
    for (double z : rng.normals(Stream::FaceNoise, 0, i)) {
      const double f = stochastic_flux(q, q, z, dt, vc);
      s += f;
      s2 += f * f;
    }
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(var == doctest::Approx(q / (dt * vc)).epsilon(0.01));
}

TEST_CASE("em_step stencil") {
  const GridSpec g(1, {3.0, 1.0, 1.0}, {3, 1, 1}, {});
  ScalarField f(g, std::vector<double>{0, 1, 0});
  const ScalarField out = em_step(f, FaceNoise::zeros(g), 0.1);
  CHECK(out[0] == doctest::Approx(oracle::heat_update(0, 0, 1, 0.1, 1.0)));
  CHECK(out[1] == doctest::Approx(oracle::heat_update(0, 1, 0, 0.1, 1.0)));
  CHECK(out[2] == doctest::Approx(oracle::heat_update(1, 0, 0, 0.1, 1.0)));
  CHECK(out[0] == doctest::Approx(0.05));
  CHECK(out[1] == doctest::Approx(0.9));

  const GridSpec u = GridSpec::unit_1d(100);
  const KeyedRng rng(1);
  CHECK(em_step(ScalarField(u), FaceNoise::generate(u, rng, 0), 2.5e-5) == ScalarField(u));
  CHECK(em_step(ScalarField(u, 300.0), FaceNoise::zeros(u), 2.5e-5) == ScalarField(u, 300.0));
}

TEST_CASE("stability limit") {
  CHECK(stability_max_dt(GridSpec::unit_1d(100)) == doctest::Approx(1e-4));
  CHECK(stability_max_dt(GridSpec::unit(2, 10)) == doctest::Approx(0.01 / 2));
  CHECK(stability_max_dt(GridSpec::unit(3, 10)) == doctest::Approx(0.01 / 3));
}

TEST_CASE("em_step conserves mass and keeps faces antisymmetric") {
  for (Boundary bc : {Boundary::Periodic, Boundary::HomogeneousNeumann}) {
    const GridSpec g(2, {1.0, 1.0, 1.0}, {16, 12, 1}, {bc, bc, bc});
    const KeyedRng rng(4);
    ScalarField f(g);
    for (std::size_t c = 0; c < f.size(); ++c) f[c] = 100.0 + 50.0 * std::sin(0.3 * c);
    const double m0 = total_mass(f);
    const double dt = 0.25 * stability_max_dt(g);
    for (std::uint64_t s = 0; s < 200; ++s) f = em_step(f, FaceNoise::generate(g, rng, s), dt);
    CHECK(std::abs(total_mass(f) - m0) <= 1e-12 * m0 * 200);
  }
}

TEST_CASE("ensemble mean of em_step is the deterministic step") {
  const GridSpec g = GridSpec::unit_1d(10);
  ScalarField f(g);
  for (int i = 0; i < 10; ++i) f[i] = 500.0 + 300.0 * std::cos(0.6 * i);
  const double dt = 0.25 * stability_max_dt(g);
  const ScalarField det = em_step(f, FaceNoise::zeros(g), dt);
  const int members = 10000;
  std::vector<double> s(10, 0.0), s2(10, 0.0);
  for (int m = 0; m < members; ++m) {
    const KeyedRng rng(member_seed(77, m));
    const ScalarField out = em_step(f, FaceNoise::generate(g, rng, 0), dt);
    for (int i = 0; i < 10; ++i) {
      s[i] += out[i];
      s2[i] += out[i] * out[i];
    }
  }
  for (int i = 0; i < 10; ++i) {
    const double mean = s[i] / members;
    const double se = std::sqrt((s2[i] / members - mean * mean) / members);
    CHECK(std::abs(mean - det[i]) < 4.0 * se);
  }
}

TEST_CASE("gaussian scheme") {
  const GridSpec g3(1, {3.0, 1.0, 1.0}, {3, 1, 1}, {});
  const ScalarField bump(g3, std::vector<double>{0, 1, 0});
  const ScalarField m = mean_step(bump, 0.1);
  CHECK(m[0] == doctest::Approx(0.05));
  CHECK(m[1] == doctest::Approx(0.9));
  CHECK(m[2] == doctest::Approx(0.05));

  const GridSpec u = GridSpec::unit_1d(50);
  CHECK(mean_step(ScalarField(u, 12.0), 1e-4) == ScalarField(u, 12.0));

  // Zero mean field: pure heat on the fluctuating field.
  const KeyedRng rng(5);
  ScalarField q(u);
  for (int i = 0; i < 50; ++i) q[i] = i % 7;
  const double dt = 0.25 * stability_max_dt(u);
  CHECK(gaussian_step(q, ScalarField(u), FaceNoise::generate(u, rng, 0), dt) ==
        em_step(q, FaceNoise::zeros(u), dt));

  // Lockstep advance conserves both fields.
  GaussianState st = GaussianState::from_initial(ScalarField(u, 100.0));
  for (std::uint64_t s = 0; s < 100; ++s) advance_gaussian(st, FaceNoise::generate(u, rng, s), dt);
  CHECK(total_mass(st.fluct) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(st.mean == ScalarField(u, 100.0));
}

TEST_CASE("gaussian one-step variance on two cells") {
  const GridSpec g(1, {1.0, 1.0, 1.0}, {2, 1, 1}, {});
  const double qbar = 100.0, dt = 0.01;
  const ScalarField mean(g, qbar);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int m = 0; m < n; ++m) {
    const KeyedRng rng(member_seed(3, m));
    const double d = gaussian_step(mean, mean, FaceNoise::generate(g, rng, 0), dt)[0] - qbar;
    s += d;
    s2 += d * d;
  }
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(var == doctest::Approx(oracle::two_cell_increment_variance(qbar, dt, 0.5, 0.5)).epsilon(0.02));
}
