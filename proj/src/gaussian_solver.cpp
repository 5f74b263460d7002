#include "dkh/gaussian_solver.hpp"

#include <stdexcept>

namespace dkh {

ScalarField mean_step(const ScalarField& mean, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("mean_step: dt must be positive");
  return apply_fluxes(mean, compute_fluxes(mean, mean, FaceNoise::zeros(mean.grid()), dt), dt);
}

ScalarField gaussian_step(const ScalarField& fluct, const ScalarField& mean,
                          const FaceNoise& noise, double dt) {
  if (!(fluct.grid() == mean.grid()))
    throw std::invalid_argument("gaussian_step: mean/fluctuation grid mismatch");
  return apply_fluxes(fluct, compute_fluxes(fluct, mean, noise, dt), dt);
}

void advance_gaussian(GaussianState& state, const FaceNoise& noise, double dt) {
  ScalarField next_fluct = gaussian_step(state.fluct, state.mean, noise, dt);
  state.mean = mean_step(state.mean, dt);
  state.fluct = std::move(next_fluct);
}

}  // namespace dkh
