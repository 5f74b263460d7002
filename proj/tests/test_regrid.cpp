#include <doctest.h>

#include <numeric>

#include "dkh/regrid.hpp"

using namespace dkh;

namespace {

// Brute-force check of a clustering: every tag covered exactly once, boxes
// disjoint and in range, efficiency met, no untagged boundary slab.
void check_clustering(const TagMask& mask, const std::vector<Box>& boxes, double eta) {
  const GridSpec& g = mask.grid;
  std::vector<int> cover(g.num_cells(), 0);
  for (const Box& b : boxes) {
    REQUIRE(g.in_range(b.lo));
    REQUIRE(g.in_range(b.hi));
    std::size_t tagged = 0;
    for (int k = b.lo[2]; k <= b.hi[2]; ++k)
      for (int j = b.lo[1]; j <= b.hi[1]; ++j)
        for (int i = b.lo[0]; i <= b.hi[0]; ++i) {
          const std::size_t c = g.linear({i, j, k});
          ++cover[c];
          tagged += mask.tags[c];
        }
    if (b.volume() > 1) CHECK(static_cast<double>(tagged) >= eta * static_cast<double>(b.volume()));
    for (int a = 0; a < g.dim(); ++a)
      for (int side : {b.lo[a], b.hi[a]}) {
        Box slab = b;
        slab.lo[a] = slab.hi[a] = side;
        std::size_t t = 0;
        for (int k = slab.lo[2]; k <= slab.hi[2]; ++k)
          for (int j = slab.lo[1]; j <= slab.hi[1]; ++j)
            for (int i = slab.lo[0]; i <= slab.hi[0]; ++i) t += mask.tags[g.linear({i, j, k})];
        CHECK(t > 0);
      }
  }
  for (std::size_t c = 0; c < cover.size(); ++c) {
    CHECK(cover[c] <= 1);
    if (mask.tags[c]) CHECK(cover[c] == 1);
  }
}

}  // namespace

TEST_CASE("tagging") {
  const GridSpec g = GridSpec::unit(2, 16);
  RegridPolicy p;
  p.threshold = 5;
  CHECK(tag_cells(ScalarField(g, 30.0 / g.cell_volume()), p).count() == 0);

  const GridSpec g1 = GridSpec::unit_1d(20);
  ScalarField f(g1, 30.0 / g1.cell_volume());
  f[7] = 0.0;
  const TagMask m = tag_cells(f, p);
  CHECK(m.count() == 3);
  CHECK(m.tags[6]);
  CHECK(m.tags[7]);
  CHECK(m.tags[8]);

  p.threshold = 0;
  CHECK(tag_cells(ScalarField(g1), p).count() == 0);

  // Periodic wrap of the buffer.
  p.threshold = 5;
  ScalarField e(g1, 30.0 / g1.cell_volume());
  e[0] = 0.0;
  const TagMask w = tag_cells(e, p);
  CHECK(w.tags[19]);
  CHECK(w.tags[1]);
  p.buffer = -1;
  CHECK_THROWS(tag_cells(e, p));
}

TEST_CASE("clustering") {
  const GridSpec g = GridSpec::unit(2, 32);
  TagMask empty(g);
  CHECK(cluster(empty, 0.7).empty());

  TagMask rect(g);
  for (int j = 3; j < 9; ++j)
    for (int i = 10; i < 20; ++i) rect.tags[g.linear({i, j, 0})] = 1;
  for (double eta : {0.1, 0.7, 1.0}) {
    const auto boxes = cluster(rect, eta);
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0] == Box{{10, 3, 0}, {19, 8, 0}});
  }

  TagMask two(g);
  for (int j = 2; j < 7; ++j)
    for (int i = 2; i < 6; ++i) two.tags[g.linear({i, j, 0})] = 1;
  for (int j = 20; j < 28; ++j)
    for (int i = 15; i < 30; ++i)
      if ((i + j) % 5 != 0) two.tags[g.linear({i, j, 0})] = 1;
  const auto boxes = cluster(two, 0.7);
  CHECK(boxes.size() == 2);
  check_clustering(two, boxes, 0.7);

  // A ring forces cuts without holes in every signature.
  TagMask ring(g);
  for (int j = 0; j < 32; ++j)
    for (int i = 0; i < 32; ++i) {
      const double r2 = (i - 15.5) * (i - 15.5) + (j - 15.5) * (j - 15.5);
      ring.tags[g.linear({i, j, 0})] = (r2 > 36 && r2 < 121) ? 1 : 0;
    }
  check_clustering(ring, cluster(ring, 0.7), 0.7);
  CHECK_THROWS(cluster(ring, 0.0));
}

TEST_CASE("apply_regrid") {
  const GridSpec g = GridSpec::unit_1d(40);
  const double vc = g.cell_volume();
  const KeyedRng rng(6);
  ScalarField f(g, 7.0 / vc);
  std::vector<std::size_t> all(g.num_cells());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::uint64_t next = 0;
  const ParticleSet p = sample_particles_from_field(f, all, rng, Stream::InitPlacement, 0, next).particles;
  const Box b0{{10, 0, 0}, {19, 0, 0}};
  HybridState s = initialize_hybrid(f, {b0}, p, next);
  const HybridState before = s;

  apply_regrid(s, {b0}, rng);
  CHECK(s.field == before.field);
  CHECK(s.region.owned == before.region.owned);

  // Grow by one cell holding exactly 7 particles.
  const RegridReport grow = apply_regrid(s, {Box{{10, 0, 0}, {20, 0, 0}}}, rng);
  CHECK(grow.cells_added == 1);
  CHECK(grow.particles_sampled == 7);
  CHECK(grow.mass_change == doctest::Approx(0.0).epsilon(1e-9));
  for (const auto& q : before.region.owned)
    CHECK(std::find(s.region.owned.begin(), s.region.owned.end(), q) != s.region.owned.end());

  // Shrink to nothing: field keeps the composite values.
  const ScalarField composite = s.field;
  const RegridReport gone = apply_regrid(s, {}, rng);
  CHECK(gone.cells_removed == 11);
  CHECK(s.region.empty());
  CHECK(s.region.owned.empty());
  CHECK(s.field == composite);
}

TEST_CASE("zero threshold ignores negative values") {
  const GridSpec g = GridSpec::unit_1d(10);
  RegridPolicy p;
  p.threshold = 0;
  CHECK(tag_cells(ScalarField(g, -5.0), p).count() == 0);
  p.threshold = 1;
  CHECK(tag_cells(ScalarField(g, -5.0), p).count() == 10);
}
