#include "dkh/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dkh {

std::string to_string(Boundary bc) {
  return bc == Boundary::Periodic ? "periodic" : "neumann";
}

Boundary boundary_from_string(const std::string& name) {
  if (name == "periodic") return Boundary::Periodic;
  if (name == "neumann" || name == "homogeneous_neumann") return Boundary::HomogeneousNeumann;
  throw std::invalid_argument("unknown boundary condition '" + name + "'");
}

GridSpec::GridSpec(int dim, std::array<double, 3> extents, std::array<int, 3> cells,
                   std::array<Boundary, 3> bc)
    : dim_(dim), extents_(extents), cells_(cells), bc_(bc) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      extents_[a] = 1.0;
      cells_[a] = 1;
      bc_[a] = Boundary::Periodic;
    }
    if (!(extents_[a] > 0.0) || !std::isfinite(extents_[a]))
      throw std::invalid_argument("grid extents must be positive and finite");
    if (cells_[a] < 1) throw std::invalid_argument("grid cell counts must be positive");
    spacing_[a] = extents_[a] / cells_[a];
  }
}

GridSpec GridSpec::unit_1d(int cells, Boundary bc) {
  return GridSpec(1, {1.0, 1.0, 1.0}, {cells, 1, 1}, {bc, Boundary::Periodic, Boundary::Periodic});
}

GridSpec GridSpec::unit(int dim, int cells, Boundary bc) {
  return GridSpec(dim, {1.0, 1.0, 1.0}, {cells, cells, cells}, {bc, bc, bc});
}

bool GridSpec::in_range(const CellIndex& c) const {
  for (int a = 0; a < 3; ++a)
    if (c[a] < 0 || c[a] >= cells_[a]) return false;
  return true;
}

CellIndex GridSpec::unlinear(std::size_t idx) const {
  CellIndex c{};
  c[0] = static_cast<int>(idx % cells_[0]);
  idx /= cells_[0];
  c[1] = static_cast<int>(idx % cells_[1]);
  c[2] = static_cast<int>(idx / cells_[1]);
  return c;
}

Position GridSpec::cell_center(const CellIndex& c) const {
  return {(c[0] + 0.5) * spacing_[0], (c[1] + 0.5) * spacing_[1], (c[2] + 0.5) * spacing_[2]};
}

std::optional<CellIndex> neighbor(const CellIndex& cell, int axis, Direction dir,
                                  const GridSpec& grid) {
  if (!grid.in_range(cell)) throw std::out_of_range("neighbor: cell index out of range");
  CellIndex n = cell;
  const int count = grid.cells(axis);
  n[axis] += dir == Direction::Plus ? 1 : -1;
  if (n[axis] < 0 || n[axis] >= count) {
    if (grid.bc(axis) == Boundary::HomogeneousNeumann) return std::nullopt;
    n[axis] = (n[axis] + count) % count;
  }
  return n;
}

Position wrap_position(Position x, const GridSpec& grid) {
  for (int a = 0; a < grid.dim(); ++a) {
    const double len = grid.extent(a);
    if (grid.bc(a) == Boundary::Periodic) {
      if (x[a] < 0.0 || x[a] >= len) {
        x[a] -= len * std::floor(x[a] / len);
        if (x[a] >= len) x[a] = 0.0;
      }
    } else {
      if (x[a] < 0.0) x[a] = -x[a];
      if (x[a] > len) x[a] = 2.0 * len - x[a];
      x[a] = std::clamp(x[a], 0.0, len);
    }
  }
  return x;
}

CellIndex cell_of_position(const Position& x, const GridSpec& grid) {
  for (int a = 0; a < 3; ++a)
    if (std::isnan(x[a])) throw std::domain_error("cell_of_position: NaN coordinate");
  const Position w = wrap_position(x, grid);
  CellIndex c{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) {
    const int i = static_cast<int>(std::floor(w[a] / grid.spacing(a)));
    c[a] = std::clamp(i, 0, grid.cells(a) - 1);
  }
  return c;
}

ScalarField::ScalarField(const GridSpec& grid, double value)
    : grid_(grid), values_(grid.num_cells(), value) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.num_cells())
    throw std::invalid_argument("ScalarField: value count does not match grid");
}

void ScalarField::check_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) throw std::domain_error("ScalarField: non-finite value");
}

double total_mass(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

std::size_t count_negative(const ScalarField& f) {
  return static_cast<std::size_t>(
      std::count_if(f.values().begin(), f.values().end(), [](double v) { return v < 0.0; }));
}

double min_value(const ScalarField& f) {
  if (f.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(f.values().begin(), f.values().end());
}

}  // namespace dkh
