#include "dkh/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dkh {

namespace {

// Visits every distinct cell within Chebyshev distance one of `cell`
// (excluding the cell itself), honoring periodic wrap and Neumann walls.
template <typename Fn>
void for_each_chebyshev_neighbor(const GridSpec& grid, const CellIndex& cell, Fn&& fn) {
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) {
    lo[a] = -1;
    hi[a] = 1;
  }
  for (int dk = lo[2]; dk <= hi[2]; ++dk)
    for (int dj = lo[1]; dj <= hi[1]; ++dj)
      for (int di = lo[0]; di <= hi[0]; ++di) {
        if (di == 0 && dj == 0 && dk == 0) continue;
        CellIndex n{cell[0] + di, cell[1] + dj, cell[2] + dk};
        bool valid = true;
        for (int a = 0; a < grid.dim(); ++a) {
          const int count = grid.cells(a);
          if (n[a] < 0 || n[a] >= count) {
            if (grid.bc(a) == Boundary::HomogeneousNeumann) {
              valid = false;
              break;
            }
            n[a] = (n[a] + count) % count;
          }
        }
        if (valid && n != cell) fn(n);
      }
}

double snapped_target(double q, double vc) {
  double target = std::max(q, 0.0) * vc;
  const double nearest = std::round(target);
  // q*Vc is an integer up to roundoff when the field came from binned counts.
  if (std::abs(target - nearest) <= 1e-9 * std::max(1.0, nearest)) target = nearest;
  return target;
}

}  // namespace

Position uniform_in_cell(const CellIndex& cell, const GridSpec& grid, KeyedSequence& seq) {
  Position x{0.5, 0.5, 0.5};
  for (int a = 0; a < grid.dim(); ++a) x[a] = (cell[a] + seq.uniform()) * grid.spacing(a);
  // Roundoff at a cell face can push a coordinate into the neighbor; binning
  // must see the particle in `cell`.
  const CellIndex got = cell_of_position(x, grid);
  for (int a = 0; a < grid.dim(); ++a)
    if (got[a] != cell[a]) x[a] = (cell[a] + 0.5) * grid.spacing(a);
  return x;
}

ParticleRegion::ParticleRegion(const GridSpec& grid, std::vector<Box> boxes)
    : grid_(grid), boxes_(std::move(boxes)) {
  const std::size_t n = grid.num_cells();
  mask_.assign(n, 0);
  halo_mask_.assign(n, 0);
  watched_.assign(n, 0);
  for (std::size_t b = 0; b < boxes_.size(); ++b) {
    const Box& box = boxes_[b];
    if (!grid.in_range(box.lo) || !grid.in_range(box.hi))
      throw std::invalid_argument("ParticleRegion: box outside the grid");
    for (int a = 0; a < 3; ++a)
      if (box.lo[a] > box.hi[a]) throw std::invalid_argument("ParticleRegion: inverted box");
    for (std::size_t o = 0; o < b; ++o)
      if (box.intersects(boxes_[o])) throw std::invalid_argument("ParticleRegion: overlapping boxes");
    for (int k = box.lo[2]; k <= box.hi[2]; ++k)
      for (int j = box.lo[1]; j <= box.hi[1]; ++j)
        for (int i = box.lo[0]; i <= box.hi[0]; ++i) mask_[grid.linear({i, j, k})] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (!mask_[c]) continue;
    cells_.push_back(c);
    for_each_chebyshev_neighbor(grid, grid.unlinear(c), [&](const CellIndex& nb) {
      const std::size_t l = grid.linear(nb);
      if (!mask_[l]) halo_mask_[l] = 1;
    });
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (halo_mask_[c]) halo_.push_back(c);
    watched_[c] = mask_[c] | halo_mask_[c];
  }
}

SampleResult sample_particles_from_field(const ScalarField& f, const std::vector<std::size_t>& cells,
                                         const KeyedRng& rng, Stream stream, std::uint64_t step,
                                         std::uint64_t& next_id) {
  const GridSpec& grid = f.grid();
  const double vc = grid.cell_volume();
  SampleResult out;
  for (std::size_t c : cells) {
    const double q = f[c];
    if (q < 0.0) out.clipped_mass += -q * vc;
    const double target = snapped_target(q, vc);
    const double whole = std::floor(target);
    const double frac = target - whole;
    KeyedSequence seq(rng, stream, step, c);
    auto count = static_cast<std::size_t>(whole);
    if (frac > 0.0 && seq.uniform() < frac) ++count;
    out.mass_change += static_cast<double>(count) - q * vc;

    const CellIndex cell = grid.unlinear(c);
    for (std::size_t p = 0; p < count; ++p) {
      out.particles.push_back({next_id++, uniform_in_cell(cell, grid, seq)});
    }
  }
  return out;
}

SampleResult fill_boundary_cells(const ScalarField& f, const ParticleRegion& region,
                                 const KeyedRng& rng, std::uint64_t step, std::uint64_t& next_id) {
  return sample_particles_from_field(f, region.halo(), rng, Stream::GhostFill, step, next_id);
}

double scaled_face_flux(double total_flux, double dt, double face_area) {
  // A positive flux on face i+1/2 moves mass from cell i+1 into cell i.
  return -dt * face_area * total_flux;
}

std::vector<RegisterEntry> register_spde_fluxes(const FluxField& fluxes,
                                                const ParticleRegion& region, double dt) {
  const GridSpec& grid = region.grid();
  std::vector<RegisterEntry> entries;
  for (std::size_t p : region.cells()) {
    const CellIndex cell = grid.unlinear(p);
    for (int a = 0; a < grid.dim(); ++a) {
      const double area = grid.face_area(a);
      if (const auto up = neighbor(cell, a, Direction::Plus, grid)) {
        const std::size_t h = grid.linear(*up);
        if (!region.contains(h))
          entries.push_back({p, h, scaled_face_flux(fluxes.total[a][p], dt, area)});
      }
      if (const auto down = neighbor(cell, a, Direction::Minus, grid)) {
        const std::size_t h = grid.linear(*down);
        if (!region.contains(h))
          entries.push_back({p, h, -scaled_face_flux(fluxes.total[a][h], dt, area)});
      }
    }
  }
  return entries;
}

std::vector<RegisterEntry> register_crossings(const CrossingRecord& crossings,
                                              const ParticleRegion& region) {
  std::vector<RegisterEntry> entries;
  crossings.for_each([&](std::size_t a, std::size_t b, long net_ab) {
    if (region.contains(a) && region.in_halo(b)) {
      entries.push_back({a, b, static_cast<double>(net_ab)});
    } else if (region.contains(b) && region.in_halo(a)) {
      entries.push_back({b, a, static_cast<double>(-net_ab)});
    }
  });
  return entries;
}

ScalarField synchronize(const ScalarField& qstar, const ParticleRegion& region,
                        const ScalarField& binned, const FluxRegister& reg) {
  if (!(qstar.grid() == region.grid()) || !(binned.grid() == region.grid()))
    throw std::invalid_argument("synchronize: grid mismatch");
  if (reg.halo != region.halo()) throw std::invalid_argument("synchronize: register/region mismatch");
  const double inv_vc = 1.0 / qstar.grid().cell_volume();

  ScalarField out = qstar;
  for (std::size_t p : region.cells()) out[p] = binned[p];

  auto check = [&](const RegisterEntry& e) {
    if (!region.contains(e.from) || !region.in_halo(e.to))
      throw std::invalid_argument("synchronize: register entry does not match the region");
  };
  for (const auto& e : reg.spde) {
    check(e);
    out[e.to] -= e.amount * inv_vc;
  }
  for (const auto& e : reg.particles) {
    check(e);
    out[e.to] += e.amount * inv_vc;
  }
  return out;
}

HybridStepReport advance_hybrid_step(HybridState& state, double dt, const KeyedRng& rng) {
  const GridSpec& grid = state.field.grid();
  const std::uint64_t step = state.step;
  HybridStepReport report;

  // (1) SPDE over the whole domain.
  const FaceNoise noise = FaceNoise::generate(grid, rng, step);
  const FluxField fluxes = compute_fluxes(state.field, state.field, noise, dt);
  ScalarField qstar = apply_fluxes(state.field, fluxes, dt);

  ParticleRegion& region = state.region;
  if (region.empty()) {
    state.field = std::move(qstar);
    ++state.step;
    return report;
  }

  FluxRegister reg;
  reg.halo = region.halo();
  reg.spde = register_spde_fluxes(fluxes, region, dt);

  // (2) Particles, with ghosts sampled from the start-of-step field.
  SampleResult ghosts = fill_boundary_cells(state.field, region, rng, step, state.next_id);
  report.ghosts = ghosts.particles.size();
  ParticleSet before = std::move(region.owned);
  const std::size_t owned_count = before.size();
  before.insert(before.end(), ghosts.particles.begin(), ghosts.particles.end());
  const ParticleSet after = rw_step(before, grid, dt, rng, step);
  reg.particles = register_crossings(record_crossings(before, after, grid, region.watched()), region);

  ParticleSet owned;
  owned.reserve(after.size());
  for (std::size_t p = 0; p < after.size(); ++p) {
    const std::size_t cell = grid.linear(cell_of_position(after[p].position, grid));
    if (region.contains(cell)) {
      owned.push_back(after[p]);
      if (p >= owned_count) ++report.ghosts_absorbed;
    } else if (p < owned_count) {
      ++report.owned_discarded;
    }
  }
  region.owned = std::move(owned);

  // (3) Synchronization.
  state.field = synchronize(qstar, region, bin_counts(region.owned, grid), reg);
  ++state.step;
  return report;
}

}  // namespace dkh
