#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "dkh/grid.hpp"
#include "dkh/random.hpp"

namespace dkh {

struct Particle {
  std::uint64_t id;
  Position position;

  friend bool operator==(const Particle&, const Particle&) = default;
};

using ParticleSet = std::vector<Particle>;

/// Random-walk increment of particle `id` at `step`: Normal(0, dt) per used
/// coordinate, each clamped to [-dx_axis, +dx_axis].
Position rw_displacement(std::uint64_t id, std::uint64_t step, double dt, const GridSpec& grid,
                         const KeyedRng& rng);

/// Advances every particle by its keyed displacement and wraps (periodic) or
/// reflects (Neumann) at the domain boundary. Order-independent.
ParticleSet rw_step(const ParticleSet& particles, const GridSpec& grid, double dt,
                    const KeyedRng& rng, std::uint64_t step);

/// Number density of the particles: count per cell / Vc.
ScalarField bin_counts(const ParticleSet& particles, const GridSpec& grid);
std::vector<std::uint32_t> cell_counts(const ParticleSet& particles, const GridSpec& grid);

/// Net particle transfers between cell pairs during one step. Stored
/// canonically so that net(a, b) == -net(b, a) holds by construction.
class CrossingRecord {
public:
  void add(std::size_t from, std::size_t to, long count = 1);
  long net(std::size_t from, std::size_t to) const;
  bool empty() const { return transfers_.empty(); }
  std::size_t size() const { return transfers_.size(); }

  /// Visits every nonzero pair as (low cell, high cell, net low->high).
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [key, count] : transfers_)
      if (count != 0) fn(key.first, key.second, count);
  }

private:
  std::map<std::pair<std::size_t, std::size_t>, long> transfers_;
};

/// Records start->end transfers for particles whose start cell is flagged in
/// `watched` (the particle region and its halo). `before` and `after` must
/// list the same ids in the same order. An empty mask watches every cell.
CrossingRecord record_crossings(const ParticleSet& before, const ParticleSet& after,
                                const GridSpec& grid, const std::vector<std::uint8_t>& watched);

}  // namespace dkh
