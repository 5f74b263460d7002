#include "dkh/particles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dkh {

Position rw_displacement(std::uint64_t id, std::uint64_t step, double dt, const GridSpec& grid,
                         const KeyedRng& rng) {
  const double sigma = std::sqrt(dt);
  Position d{0.0, 0.0, 0.0};
  if (grid.dim() == 1) {
    d[0] = rng.normal(Stream::ParticleStep, step, id, 0);
  } else {
    const auto first = rng.normals(Stream::ParticleStep, step, id, 0);
    d[0] = first[0];
    d[1] = first[1];
  }
  if (grid.dim() > 2) d[2] = rng.normal(Stream::ParticleStep, step, id, 1);
  for (int a = 0; a < grid.dim(); ++a) {
    const double dx = grid.spacing(a);
    d[a] = std::clamp(sigma * d[a], -dx, dx);
  }
  return d;
}

ParticleSet rw_step(const ParticleSet& particles, const GridSpec& grid, double dt,
                    const KeyedRng& rng, std::uint64_t step) {
  if (!(dt > 0.0)) throw std::invalid_argument("rw_step: dt must be positive");
  ParticleSet out(particles.size());
  for (std::size_t p = 0; p < particles.size(); ++p) {
    const Particle& in = particles[p];
    const Position d = rw_displacement(in.id, step, dt, grid, rng);
    Position x = in.position;
    for (int a = 0; a < grid.dim(); ++a) x[a] += d[a];
    out[p] = {in.id, wrap_position(x, grid)};
  }
  return out;
}

std::vector<std::uint32_t> cell_counts(const ParticleSet& particles, const GridSpec& grid) {
  std::vector<std::uint32_t> counts(grid.num_cells(), 0);
  for (const Particle& p : particles) ++counts[grid.linear(cell_of_position(p.position, grid))];
  return counts;
}

ScalarField bin_counts(const ParticleSet& particles, const GridSpec& grid) {
  const auto counts = cell_counts(particles, grid);
  ScalarField f(grid);
  const double vc = grid.cell_volume();
  for (std::size_t c = 0; c < counts.size(); ++c) f[c] = counts[c] / vc;
  return f;
}

void CrossingRecord::add(std::size_t from, std::size_t to, long count) {
  if (from == to) return;
  if (from < to) {
    transfers_[{from, to}] += count;
  } else {
    transfers_[{to, from}] -= count;
  }
}

long CrossingRecord::net(std::size_t from, std::size_t to) const {
  if (from == to) return 0;
  const auto key = from < to ? std::pair{from, to} : std::pair{to, from};
  const auto it = transfers_.find(key);
  if (it == transfers_.end()) return 0;
  return from < to ? it->second : -it->second;
}

CrossingRecord record_crossings(const ParticleSet& before, const ParticleSet& after,
                                const GridSpec& grid, const std::vector<std::uint8_t>& watched) {
  if (before.size() != after.size())
    throw std::invalid_argument("record_crossings: particle count mismatch");
  if (!watched.empty() && watched.size() != grid.num_cells())
    throw std::invalid_argument("record_crossings: mask does not match grid");
  CrossingRecord record;
  for (std::size_t p = 0; p < before.size(); ++p) {
    if (before[p].id != after[p].id) throw std::invalid_argument("record_crossings: id mismatch");
    const std::size_t from = grid.linear(cell_of_position(before[p].position, grid));
    if (!watched.empty() && !watched[from]) continue;
    const std::size_t to = grid.linear(cell_of_position(after[p].position, grid));
    if (from != to) record.add(from, to);
  }
  return record;
}

}  // namespace dkh
