#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dkh/grid.hpp"
#include "dkh/random.hpp"

namespace dkh {

/// Face between `low` and its Plus neighbor along `axis`. Every cell owns the
/// face on its upper side; on a Neumann axis the upper face of the last cell
/// is the physical boundary.
struct Face {
  CellIndex low;
  int axis;
};

/// Standard normal draw per face, stored per axis in the cell-owned layout.
class FaceNoise {
public:
  FaceNoise() = default;

  static FaceNoise zeros(const GridSpec& grid);
  /// Draws keyed by (step, axis, face index) on the FaceNoise stream.
  static FaceNoise generate(const GridSpec& grid, const KeyedRng& rng, std::uint64_t step);

  const GridSpec& grid() const { return grid_; }
  double operator()(int axis, std::size_t face) const { return z_[axis][face]; }
  double& operator()(int axis, std::size_t face) { return z_[axis][face]; }

private:
  GridSpec grid_;
  std::array<std::vector<double>, 3> z_;
};

/// Deterministic, stochastic and total face fluxes (particles per unit area
/// per unit time). A positive flux on face i+1/2 moves mass from cell i+1
/// into cell i.
struct FluxField {
  GridSpec grid;
  std::array<std::vector<double>, 3> deterministic;
  std::array<std::vector<double>, 3> stochastic;
  std::array<std::vector<double>, 3> total;
};

/// (sqrt(max(q1,0)) + sqrt(max(q2,0))) / 2
double averaging(double q1, double q2);

/// (q_high - q_low) / (2 dx); zero on a Neumann physical boundary.
double deterministic_flux(const ScalarField& f, const Face& face);

/// averaging(q_low, q_high) * z / sqrt(dt * Vc). Throws if dt <= 0.
double stochastic_flux(double q_low, double q_high, double z, double dt, double cell_volume);
double stochastic_flux(const ScalarField& f, const Face& face, double z, double dt);

/// Fluxes of `q` with stochastic amplitudes taken from `amplitude` (q itself
/// for the Dean-Kawasaki scheme, the mean field for the Gaussian scheme).
FluxField compute_fluxes(const ScalarField& q, const ScalarField& amplitude,
                         const FaceNoise& noise, double dt);

/// q + dt * sum_axes (F_{+1/2} - F_{-1/2}) / dx_axis.
ScalarField apply_fluxes(const ScalarField& q, const FluxField& fluxes, double dt);

/// One Euler-Maruyama step. Negative results are kept, not clipped. Emits a
/// one-time warning on stderr when dt exceeds stability_max_dt.
ScalarField em_step(const ScalarField& q, const FaceNoise& noise, double dt);

/// 1 / sum_axes(1/dx^2): the explicit limit of the heat update with
/// coefficient 1/2.
double stability_max_dt(const GridSpec& grid);

}  // namespace dkh
