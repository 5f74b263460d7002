#pragma once

#include <cstdint>
#include <vector>

#include "dkh/box.hpp"
#include "dkh/fv_solver.hpp"
#include "dkh/grid.hpp"
#include "dkh/particles.hpp"
#include "dkh/random.hpp"

namespace dkh {

/// Cells where the particle description is active: a union of disjoint boxes,
/// plus the particles owned by those cells.
class ParticleRegion {
public:
  ParticleRegion() = default;
  /// Throws if a box leaves the grid or two boxes overlap.
  ParticleRegion(const GridSpec& grid, std::vector<Box> boxes);

  static ParticleRegion full(const GridSpec& grid) { return {grid, {whole_domain(grid)}}; }

  const GridSpec& grid() const { return grid_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  bool empty() const { return cells_.empty(); }
  bool contains(std::size_t cell) const { return !mask_.empty() && mask_[cell] != 0; }
  bool in_halo(std::size_t cell) const { return !halo_mask_.empty() && halo_mask_[cell] != 0; }

  /// Region cells and halo cells (non-region cells within Chebyshev distance
  /// one of a region cell), both sorted by linear index.
  const std::vector<std::size_t>& cells() const { return cells_; }
  const std::vector<std::size_t>& halo() const { return halo_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  /// Region-or-halo mask.
  const std::vector<std::uint8_t>& watched() const { return watched_; }

  ParticleSet owned;

private:
  GridSpec grid_;
  std::vector<Box> boxes_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint8_t> halo_mask_;
  std::vector<std::uint8_t> watched_;
  std::vector<std::size_t> cells_;
  std::vector<std::size_t> halo_;
};

/// Transfer of particle-equivalents from a particle cell into a halo cell.
struct RegisterEntry {
  std::size_t from;  // particle cell
  std::size_t to;    // halo cell
  double amount;
};

/// SPDE face transfers over S1 (faces shared by a particle cell and a halo
/// cell) and particle transfers over S2 (the Chebyshev neighborhood).
struct FluxRegister {
  std::vector<std::size_t> halo;
  std::vector<RegisterEntry> spde;
  std::vector<RegisterEntry> particles;
};

/// Composite state: the SPDE field everywhere, particles in the region.
struct HybridState {
  ScalarField field;
  ParticleRegion region;
  std::uint64_t step = 0;
  std::uint64_t next_id = 0;
};

struct SampleResult {
  ParticleSet particles;
  /// Sum over sampled cells of (particles placed - q*Vc).
  double mass_change = 0.0;
  /// Mass of negative field values treated as zero.
  double clipped_mass = 0.0;
};

/// Uniform position inside `cell`, drawn from `seq`.
Position uniform_in_cell(const CellIndex& cell, const GridSpec& grid, KeyedSequence& seq);

/// Conditional sampling: per cell with target count l + alpha, place l
/// particles plus one more with probability alpha, uniformly in the cell.
/// Draws are keyed by (stream, step, cell); ids are assigned sequentially
/// from `next_id` in the order of `cells`.
SampleResult sample_particles_from_field(const ScalarField& f, const std::vector<std::size_t>& cells,
                                         const KeyedRng& rng, Stream stream, std::uint64_t step,
                                         std::uint64_t& next_id);

/// Ghost particles for every halo cell of the region, sampled from `f`.
SampleResult fill_boundary_cells(const ScalarField& f, const ParticleRegion& region,
                                 const KeyedRng& rng, std::uint64_t step, std::uint64_t& next_id);

/// Particle-equivalents carried across a face by total flux F during dt,
/// counted from the low-index cell into the high-index cell. The reverse
/// direction is the negative.
double scaled_face_flux(double total_flux, double dt, double face_area);

/// S1 register entries for the region from the SPDE fluxes of this step.
std::vector<RegisterEntry> register_spde_fluxes(const FluxField& fluxes,
                                                const ParticleRegion& region, double dt);

/// S2 register entries (particle cell -> halo cell) from a crossing record.
std::vector<RegisterEntry> register_crossings(const CrossingRecord& crossings,
                                              const ParticleRegion& region);

/// Composite field: particle cells take `binned`; halo cells get
///   q* - (1/Vc) sum_S1 F(p->h) + (1/Vc) sum_S2 dN(p->h);
/// every other cell keeps q*. Throws on a register that does not match the
/// region.
ScalarField synchronize(const ScalarField& qstar, const ParticleRegion& region,
                        const ScalarField& binned, const FluxRegister& reg);

struct HybridStepReport {
  std::size_t ghosts = 0;
  std::size_t ghosts_absorbed = 0;
  std::size_t owned_discarded = 0;
};

/// One hybrid step: SPDE over the whole domain, particles with SPDE-fed
/// ghost cells, then synchronization.
HybridStepReport advance_hybrid_step(HybridState& state, double dt, const KeyedRng& rng);

}  // namespace dkh
