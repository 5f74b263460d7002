#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dkh {

enum class Boundary { Periodic, HomogeneousNeumann };
enum class Direction { Minus, Plus };

using CellIndex = std::array<int, 3>;
using Position = std::array<double, 3>;

std::string to_string(Boundary bc);
Boundary boundary_from_string(const std::string& name);

/// Uniform rectilinear mesh. Axes beyond `dim` are collapsed to one cell of
/// unit extent so that volumes and face areas stay well defined in 1D and 2D.
class GridSpec {
public:
  GridSpec() = default;
  GridSpec(int dim, std::array<double, 3> extents, std::array<int, 3> cells,
           std::array<Boundary, 3> bc);

  /// 1D periodic unit interval with `cells` cells.
  static GridSpec unit_1d(int cells, Boundary bc = Boundary::Periodic);
  /// Square/cube of unit extent with `cells` cells along every used axis.
  static GridSpec unit(int dim, int cells, Boundary bc = Boundary::Periodic);

  int dim() const { return dim_; }
  double extent(int axis) const { return extents_[axis]; }
  int cells(int axis) const { return cells_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  Boundary bc(int axis) const { return bc_[axis]; }
  const std::array<double, 3>& extents() const { return extents_; }
  const std::array<int, 3>& cell_counts() const { return cells_; }
  const std::array<Boundary, 3>& boundaries() const { return bc_; }

  double cell_volume() const { return spacing_[0] * spacing_[1] * spacing_[2]; }
  /// Area of a face normal to `axis`.
  double face_area(int axis) const { return cell_volume() / spacing_[axis]; }
  std::size_t num_cells() const {
    return static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2];
  }

  bool in_range(const CellIndex& c) const;
  std::size_t linear(const CellIndex& c) const {
    return static_cast<std::size_t>(c[0]) +
           static_cast<std::size_t>(cells_[0]) *
               (static_cast<std::size_t>(c[1]) + static_cast<std::size_t>(cells_[1]) * c[2]);
  }
  CellIndex unlinear(std::size_t idx) const;
  Position cell_center(const CellIndex& c) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
  int dim_ = 1;
  std::array<double, 3> extents_{1.0, 1.0, 1.0};
  std::array<int, 3> cells_{1, 1, 1};
  std::array<double, 3> spacing_{1.0, 1.0, 1.0};
  std::array<Boundary, 3> bc_{Boundary::Periodic, Boundary::Periodic, Boundary::Periodic};
};

/// Neighbor of `cell` along `axis`. Periodic axes wrap; a Neumann axis has no
/// neighbor beyond the physical boundary. Throws on an out-of-range cell.
std::optional<CellIndex> neighbor(const CellIndex& cell, int axis, Direction dir,
                                  const GridSpec& grid);

/// Maps a position onto its wrapped/reflected location inside the domain.
Position wrap_position(Position x, const GridSpec& grid);

/// Half-open cell lookup; a coordinate equal to the upper extent lands in the
/// last cell. Periodic coordinates are wrapped first. Throws on NaN.
CellIndex cell_of_position(const Position& x, const GridSpec& grid);

/// Cell-centered number density (particles per unit volume).
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double value = 0.0);
  ScalarField(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t idx) { return values_[idx]; }
  double operator[](std::size_t idx) const { return values_[idx]; }
  double& at(const CellIndex& c) { return values_[grid_.linear(c)]; }
  double at(const CellIndex& c) const { return values_[grid_.linear(c)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Throws std::domain_error if any value is NaN or infinite.
  void check_finite() const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Total particle count represented by the field: sum of q * Vc.
double total_mass(const ScalarField& f);

std::size_t count_negative(const ScalarField& f);
double min_value(const ScalarField& f);

}  // namespace dkh
