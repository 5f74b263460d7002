#include <doctest.h>

#include <cmath>
#include <set>

#include "dkh/random.hpp"

using namespace dkh;

TEST_CASE("philox4x32-10 known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
        C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                             {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                             {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("keyed draws are pure functions of their address") {
  const KeyedRng a(42), b(42), c(43);
  CHECK(a.bits(Stream::ParticleStep, 7, 11) == b.bits(Stream::ParticleStep, 7, 11));
  CHECK(a.bits(Stream::ParticleStep, 7, 11) != c.bits(Stream::ParticleStep, 7, 11));
  CHECK(a.bits(Stream::ParticleStep, 7, 11) != a.bits(Stream::FaceNoise, 7, 11));
  CHECK(a.bits(Stream::ParticleStep, 7, 11) != a.bits(Stream::ParticleStep, 8, 11));
  CHECK(a.bits(Stream::ParticleStep, 7, 11) != a.bits(Stream::ParticleStep, 7, 11, 1));
  CHECK_THROWS(a.bits(Stream::ParticleStep, 0, 0, 4096));
  CHECK_THROWS(a.bits(Stream::ParticleStep, std::uint64_t{1} << 48, 0));
}

TEST_CASE("member seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 1000; ++m) seen.insert(member_seed(5, m));
  CHECK(seen.size() == 1000);
}

TEST_CASE("uniforms and normals have the right first moments") {
  const KeyedRng rng(3);
  const int n = 200000;
  double su = 0, su2 = 0, sz = 0, sz2 = 0, sz4 = 0;
  for (int i = 0; i < n / 2; ++i) {
    for (double u : rng.uniforms(Stream::GhostFill, 0, i)) {
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      su += u;
      su2 += u * u;
    }
    for (double z : rng.normals(Stream::FaceNoise, 0, i)) {
      sz += z;
      sz2 += z * z;
      sz4 += z * z * z * z;
    }
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / n - std::pow(su / n, 2) == doctest::Approx(1.0 / 12).epsilon(0.01));
  CHECK(std::abs(sz / n) < 4.0 / std::sqrt(n));
  CHECK(sz2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sz4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("keyed sequence continues across blocks") {
  const KeyedRng rng(9);
  KeyedSequence s1(rng, Stream::RegridFill, 2, 5), s2(rng, Stream::RegridFill, 2, 5);
  std::set<double> seen;
  for (int i = 0; i < 1000; ++i) {
    const double u = s1.uniform();
    CHECK(u == s2.uniform());
    seen.insert(u);
  }
  CHECK(seen.size() == 1000);
}
