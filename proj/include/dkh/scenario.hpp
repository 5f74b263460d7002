#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dkh/grid.hpp"
#include "dkh/particles.hpp"
#include "dkh/random.hpp"

namespace dkh {

/// Initial condition of one ensemble member.
struct InitialState {
  ScalarField field;       // analytic density
  ParticleSet particles;   // empty unless requested
  std::uint64_t next_id = 0;
};

/// Builds a named initial condition:
///   uniform      constant density; `particles_per_cell` (default 5) or
///                `density`; `placement` = exact (per-cell counts) | iid
///   1d_void      `density` (2000) outside [`void_lo`, `void_hi`] (0.25, 0.75),
///                `void_density` (0) inside, judged at cell centers along x
///   2d_ellipses  inner ellipse / annular ellipse / background at
///                `inner_ppc` / `annulus_ppc` / `background_ppc` (15/0/30)
///                particles per cell; `center`, `inner` and `outer` radii
///   3d_spheres   same densities with spheres: `center`, `inner_radius`,
///                `outer_radius`
/// Particles, when requested, are placed uniformly inside each cell with the
/// cell's count (probabilistic rounding for fractional counts), keyed by
/// cell. Throws std::invalid_argument on an unknown scenario or parameter,
/// or geometry outside the domain.
InitialState build_scenario(const std::string& name, const std::map<std::string, std::string>& params,
                            const GridSpec& grid, const KeyedRng& rng, bool with_particles);

}  // namespace dkh
