#pragma once

#include "dkh/fv_solver.hpp"
#include "dkh/grid.hpp"

namespace dkh {

/// Deterministic heat update of the mean field (em_step with zero noise).
ScalarField mean_step(const ScalarField& mean, double dt);

/// Fluctuating-field update: deterministic stencil on `fluct`, stochastic
/// amplitudes from `mean` at the same time level.
ScalarField gaussian_step(const ScalarField& fluct, const ScalarField& mean,
                          const FaceNoise& noise, double dt);

/// Mean and fluctuating fields advanced in lockstep so both always refer to
/// the same time level.
struct GaussianState {
  ScalarField mean;
  ScalarField fluct;

  /// Both fields start from the same initial density.
  static GaussianState from_initial(const ScalarField& initial) { return {initial, initial}; }
};

void advance_gaussian(GaussianState& state, const FaceNoise& noise, double dt);

}  // namespace dkh
