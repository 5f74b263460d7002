#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dkh/grid.hpp"

namespace dkh {

/// Population central moments. Skewness and kurtosis are undefined when the
/// variance is below the absolute floor `kVarianceFloor`. Kurtosis is the
/// non-excess m4/m2^2 (3 for a Gaussian).
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> skewness;
  std::optional<double> kurtosis;
};

inline constexpr double kVarianceFloor = 1e-14;

/// One-pass streaming central moments through order four (Welford/Pebay),
/// mergeable across shards.
class RunningMoments {
public:
  void add(double x);
  void merge(const RunningMoments& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Throws std::domain_error when fewer than two samples were seen.
  Moments finalize() const;

private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

/// Per-cell accumulators over field samples.
class MomentAccumulator {
public:
  MomentAccumulator() = default;
  explicit MomentAccumulator(const GridSpec& grid) : grid_(grid), cells_(grid.num_cells()) {}

  const GridSpec& grid() const { return grid_; }
  std::uint64_t count() const { return cells_.empty() ? 0 : cells_.front().count(); }

  /// Throws std::invalid_argument on a grid mismatch.
  void accumulate(const ScalarField& f);
  void merge(const MomentAccumulator& other);
  const RunningMoments& cell(std::size_t c) const { return cells_[c]; }

  std::vector<Moments> finalize() const;

private:
  GridSpec grid_;
  std::vector<RunningMoments> cells_;
};

/// Power sums of (x - shift) up to order four. Exact add/remove/merge, used
/// for leave-one-group-out estimates. `shift` should be close to the mean.
struct ShiftedPowerSums {
  double shift = 0.0;
  double n = 0.0;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;

  explicit ShiftedPowerSums(double shift_value = 0.0) : shift(shift_value) {}
  void add(double x);
  ShiftedPowerSums& operator+=(const ShiftedPowerSums& o);
  ShiftedPowerSums& operator-=(const ShiftedPowerSums& o);
  Moments moments() const;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;  // standard error
};

struct MomentEstimates {
  Estimate mean, variance, skewness, kurtosis;
};

/// Grouped (delete-one-group) jackknife over independent groups: point
/// estimates from the pooled sums and standard errors from the spread of the
/// leave-one-out estimates. Needs at least two groups.
MomentEstimates jackknife(const std::vector<ShiftedPowerSums>& groups);

/// Histogram with unit-particle bins [(k-1/2)/Vc, (k+1/2)/Vc) for
/// k = k_min..k_max, plus underflow and overflow counts.
class Histogram {
public:
  Histogram(double cell_volume, long k_min, long k_max);

  void add(double q);
  void merge(const Histogram& other);

  /// Bin index of density q: floor(q*Vc + 1/2).
  long bin_of(double q) const;
  double cell_volume() const { return vc_; }
  long k_min() const { return k_min_; }
  long k_max() const { return k_max_; }
  std::uint64_t count(long k) const;
  std::uint64_t underflow() const { return under_; }
  std::uint64_t overflow() const { return over_; }
  std::uint64_t total() const { return total_; }
  /// Normalized probability mass of bin k (0 when empty).
  double probability(long k) const;

private:
  double vc_;
  long k_min_, k_max_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t under_ = 0, over_ = 0, total_ = 0;
};

/// Histogram covering the full sample range (no under/overflow).
Histogram pdf_histogram(std::span<const double> samples, double cell_volume);

}  // namespace dkh
