#include "dkh/fv_solver.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace dkh {

namespace {

std::size_t axis_stride(const GridSpec& grid, int axis) {
  std::size_t stride = 1;
  for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(grid.cells(a));
  return stride;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

}  // namespace

FaceNoise FaceNoise::zeros(const GridSpec& grid) {
  FaceNoise noise;
  noise.grid_ = grid;
  for (int a = 0; a < grid.dim(); ++a) noise.z_[a].assign(grid.num_cells(), 0.0);
  return noise;
}

FaceNoise FaceNoise::generate(const GridSpec& grid, const KeyedRng& rng, std::uint64_t step) {
  FaceNoise noise = zeros(grid);
  const std::size_t n = grid.num_cells();
  for (int a = 0; a < grid.dim(); ++a) {
    auto& z = noise.z_[a];
    const std::size_t base = static_cast<std::size_t>(a) * n;
    // One Philox block yields two normals: faces 2m and 2m+1 of the global
    // face numbering share a block.
    std::size_t f = 0;
    if (base % 2 == 1) {
      z[0] = rng.normals(Stream::FaceNoise, step, base / 2)[1];
      f = 1;
    }
    for (; f + 1 < n; f += 2) {
      const auto pair = rng.normals(Stream::FaceNoise, step, (base + f) / 2);
      z[f] = pair[0];
      z[f + 1] = pair[1];
    }
    if (f < n) z[f] = rng.normals(Stream::FaceNoise, step, (base + f) / 2)[0];
  }
  return noise;
}

double averaging(double q1, double q2) {
  return 0.5 * (std::sqrt(std::max(q1, 0.0)) + std::sqrt(std::max(q2, 0.0)));
}

double deterministic_flux(const ScalarField& f, const Face& face) {
  const GridSpec& grid = f.grid();
  const auto high = neighbor(face.low, face.axis, Direction::Plus, grid);
  if (!high) return 0.0;
  return 0.5 * (f.at(*high) - f.at(face.low)) / grid.spacing(face.axis);
}

double stochastic_flux(double q_low, double q_high, double z, double dt, double cell_volume) {
  if (!(dt > 0.0)) throw std::invalid_argument("stochastic_flux: dt must be positive");
  return averaging(q_low, q_high) * z / std::sqrt(dt * cell_volume);
}

double stochastic_flux(const ScalarField& f, const Face& face, double z, double dt) {
  const GridSpec& grid = f.grid();
  const auto high = neighbor(face.low, face.axis, Direction::Plus, grid);
  if (!high) return 0.0;
  return stochastic_flux(f.at(face.low), f.at(*high), z, dt, grid.cell_volume());
}

FluxField compute_fluxes(const ScalarField& q, const ScalarField& amplitude,
                         const FaceNoise& noise, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("compute_fluxes: dt must be positive");
  const GridSpec& grid = q.grid();
  require_same_grid(grid, amplitude.grid(), "compute_fluxes(amplitude)");
  require_same_grid(grid, noise.grid(), "compute_fluxes(noise)");

  FluxField out;
  out.grid = grid;
  const std::size_t n = grid.num_cells();
  const double noise_scale = 1.0 / std::sqrt(dt * grid.cell_volume());

  for (int a = 0; a < grid.dim(); ++a) {
    auto& det = out.deterministic[a];
    auto& sto = out.stochastic[a];
    auto& tot = out.total[a];
    det.assign(n, 0.0);
    sto.assign(n, 0.0);
    tot.assign(n, 0.0);

    const std::size_t stride = axis_stride(grid, a);
    const std::size_t count = static_cast<std::size_t>(grid.cells(a));
    const bool periodic = grid.bc(a) == Boundary::Periodic;
    const double half_inv_dx = 0.5 / grid.spacing(a);

    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t i = (c / stride) % count;
      std::size_t hi;
      if (i + 1 < count) {
        hi = c + stride;
      } else if (periodic) {
        hi = c - (count - 1) * stride;
      } else {
        continue;  // physical Neumann boundary: zero flux
      }
      det[c] = half_inv_dx * (q[hi] - q[c]);
      sto[c] = averaging(amplitude[c], amplitude[hi]) * noise(a, c) * noise_scale;
      tot[c] = det[c] + sto[c];
    }
  }
  return out;
}

ScalarField apply_fluxes(const ScalarField& q, const FluxField& fluxes, double dt) {
  const GridSpec& grid = q.grid();
  require_same_grid(grid, fluxes.grid, "apply_fluxes");
  ScalarField out = q;
  const std::size_t n = grid.num_cells();
  for (int a = 0; a < grid.dim(); ++a) {
    const auto& tot = fluxes.total[a];
    const std::size_t stride = axis_stride(grid, a);
    const std::size_t count = static_cast<std::size_t>(grid.cells(a));
    const bool periodic = grid.bc(a) == Boundary::Periodic;
    const double scale = dt / grid.spacing(a);
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t i = (c / stride) % count;
      double lower = 0.0;
      if (i > 0) {
        lower = tot[c - stride];
      } else if (periodic) {
        lower = tot[c + (count - 1) * stride];
      }
      out[c] += scale * (tot[c] - lower);
    }
  }
  return out;
}

ScalarField em_step(const ScalarField& q, const FaceNoise& noise, double dt) {
  static std::atomic<bool> warned{false};
  if (dt > stability_max_dt(q.grid()) && !warned.exchange(true)) {
    std::cerr << "warning: dt=" << dt << " exceeds the explicit stability limit "
              << stability_max_dt(q.grid()) << "\n";
  }
  return apply_fluxes(q, compute_fluxes(q, q, noise, dt), dt);
}

double stability_max_dt(const GridSpec& grid) {
  double sum = 0.0;
  for (int a = 0; a < grid.dim(); ++a) sum += 1.0 / (grid.spacing(a) * grid.spacing(a));
  return 1.0 / sum;
}

}  // namespace dkh
