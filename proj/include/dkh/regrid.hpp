#pragma once

#include <cstdint>
#include <vector>

#include "dkh/box.hpp"
#include "dkh/grid.hpp"
#include "dkh/hybrid.hpp"
#include "dkh/random.hpp"

namespace dkh {

struct TagMask {
  GridSpec grid;
  std::vector<std::uint8_t> tags;

  explicit TagMask(const GridSpec& g) : grid(g), tags(g.num_cells(), 0) {}
  std::size_t count() const;
};

struct RegridPolicy {
  double threshold = 10.0;  // particles per cell
  int buffer = 1;           // cells
  double efficiency = 0.7;
  int interval = 10;        // steps between regrids; 0 disables regridding

  /// Throws std::invalid_argument on an inconsistent policy.
  void validate() const;
};

/// Tags cells whose particle count max(q,0)*Vc is below the threshold, then
/// dilates the tags by `buffer` cells in the infinity norm. A zero threshold
/// never tags.
TagMask tag_cells(const ScalarField& f, const RegridPolicy& policy);

/// Infinity-norm dilation, wrapping on periodic axes.
TagMask dilate(const TagMask& mask, int buffer);

/// Berger-Rigoutsos clustering: disjoint boxes covering every tag, each with
/// tagged fraction >= efficiency unless it is a single cell.
std::vector<Box> cluster(const TagMask& mask, double efficiency);

struct RegridReport {
  std::size_t cells_added = 0;
  std::size_t cells_removed = 0;
  std::size_t particles_sampled = 0;
  /// Mass created by probabilistic rounding in newly covered cells.
  double mass_change = 0.0;
  double clipped_mass = 0.0;
};

/// Moves the particle region to `boxes`. Persisting cells keep their
/// particles, new cells are sampled from the field, leaving cells drop their
/// particles and keep the composite value.
RegridReport apply_regrid(HybridState& state, std::vector<Box> boxes, const KeyedRng& rng);

/// Tag, cluster and apply in one call.
RegridReport regrid(HybridState& state, const RegridPolicy& policy, const KeyedRng& rng);

/// Builds the composite state from an SPDE field and a particle description.
/// Only particles inside `boxes` are kept; the field on those cells is
/// replaced by their binned density. `mass_change` receives the resulting
/// change of total mass.
HybridState initialize_hybrid(const ScalarField& field, std::vector<Box> boxes,
                              const ParticleSet& particles, std::uint64_t next_id,
                              double* mass_change = nullptr);

}  // namespace dkh
