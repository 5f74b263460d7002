#include "dkh/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dkh {

namespace {

Moments from_central(std::uint64_t n, double mean, double m2, double m3, double m4) {
  Moments out;
  out.count = n;
  out.mean = mean;
  out.variance = std::max(m2, 0.0);
  if (m2 >= kVarianceFloor) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
  }
  return out;
}

}  // namespace

void RunningMoments::add(double x) {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double dn = delta / n;
  const double dn2 = dn * dn;
  const double term1 = delta * dn * n1;
  mean_ += dn;
  m4_ += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_ - 4.0 * dn * m3_;
  m3_ += term1 * dn * (n - 2.0) - 3.0 * dn * m2_;
  m2_ += term1;
}

void RunningMoments::merge(const RunningMoments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  const double d2 = d * d, d3 = d2 * d, d4 = d2 * d2;
  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) +
                    3.0 * d * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * d * (na * o.m3_ - nb * m3_) / n;
  mean_ = (na * mean_ + nb * o.mean_) / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  n_ += o.n_;
}

Moments RunningMoments::finalize() const {
  if (n_ < 2) throw std::domain_error("finalize: at least two samples are required");
  const double n = static_cast<double>(n_);
  return from_central(n_, mean_, m2_ / n, m3_ / n, m4_ / n);
}

void MomentAccumulator::accumulate(const ScalarField& f) {
  if (!(f.grid() == grid_) || f.size() != cells_.size())
    throw std::invalid_argument("accumulate: field shape does not match the accumulator");
  for (std::size_t c = 0; c < cells_.size(); ++c) cells_[c].add(f[c]);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (cells_.empty()) {
    *this = other;
    return;
  }
  if (other.cells_.empty()) return;
  if (!(other.grid_ == grid_)) throw std::invalid_argument("merge: accumulator grids differ");
  for (std::size_t c = 0; c < cells_.size(); ++c) cells_[c].merge(other.cells_[c]);
}

std::vector<Moments> MomentAccumulator::finalize() const {
  std::vector<Moments> out;
  out.reserve(cells_.size());
  for (const auto& c : cells_) out.push_back(c.finalize());
  return out;
}

void ShiftedPowerSums::add(double x) {
  const double d = x - shift;
  const double d2 = d * d;
  n += 1.0;
  s1 += d;
  s2 += d2;
  s3 += d2 * d;
  s4 += d2 * d2;
}

ShiftedPowerSums& ShiftedPowerSums::operator+=(const ShiftedPowerSums& o) {
  if (o.shift != shift) throw std::invalid_argument("ShiftedPowerSums: shifts differ");
  n += o.n;
  s1 += o.s1;
  s2 += o.s2;
  s3 += o.s3;
  s4 += o.s4;
  return *this;
}

ShiftedPowerSums& ShiftedPowerSums::operator-=(const ShiftedPowerSums& o) {
  if (o.shift != shift) throw std::invalid_argument("ShiftedPowerSums: shifts differ");
  n -= o.n;
  s1 -= o.s1;
  s2 -= o.s2;
  s3 -= o.s3;
  s4 -= o.s4;
  return *this;
}

Moments ShiftedPowerSums::moments() const {
  if (n < 2.0) throw std::domain_error("moments: at least two samples are required");
  const double d = s1 / n;
  const double r2 = s2 / n, r3 = s3 / n, r4 = s4 / n;
  const double m2 = r2 - d * d;
  const double m3 = r3 - 3.0 * d * r2 + 2.0 * d * d * d;
  const double m4 = r4 - 4.0 * d * r3 + 6.0 * d * d * r2 - 3.0 * d * d * d * d;
  return from_central(static_cast<std::uint64_t>(n), shift + d, m2, m3, m4);
}

MomentEstimates jackknife(const std::vector<ShiftedPowerSums>& groups) {
  const std::size_t g = groups.size();
  if (g < 2) throw std::invalid_argument("jackknife: at least two groups are required");
  ShiftedPowerSums total = groups.front();
  for (std::size_t i = 1; i < g; ++i) total += groups[i];

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  auto pick = [&](const Moments& m) {
    return std::array<double, 4>{m.mean, m.variance, m.skewness.value_or(nan),
                                 m.kurtosis.value_or(nan)};
  };
  const auto full = pick(total.moments());

  std::vector<std::array<double, 4>> loo(g);
  std::array<double, 4> avg{0, 0, 0, 0};
  for (std::size_t i = 0; i < g; ++i) {
    ShiftedPowerSums rest = total;
    rest -= groups[i];
    loo[i] = pick(rest.moments());
    for (int m = 0; m < 4; ++m) avg[m] += loo[i][m] / static_cast<double>(g);
  }
  std::array<double, 4> se{0, 0, 0, 0};
  for (const auto& v : loo)
    for (int m = 0; m < 4; ++m) se[m] += (v[m] - avg[m]) * (v[m] - avg[m]);
  const double scale = static_cast<double>(g - 1) / static_cast<double>(g);
  MomentEstimates out;
  Estimate* fields[4] = {&out.mean, &out.variance, &out.skewness, &out.kurtosis};
  for (int m = 0; m < 4; ++m) *fields[m] = {full[m], std::sqrt(scale * se[m])};
  return out;
}

Histogram::Histogram(double cell_volume, long k_min, long k_max)
    : vc_(cell_volume), k_min_(k_min), k_max_(k_max) {
  if (!(cell_volume > 0.0)) throw std::invalid_argument("Histogram: cell volume must be positive");
  if (k_max < k_min) throw std::invalid_argument("Histogram: empty bin range");
  counts_.assign(static_cast<std::size_t>(k_max - k_min + 1), 0);
}

long Histogram::bin_of(double q) const { return static_cast<long>(std::floor(q * vc_ + 0.5)); }

void Histogram::add(double q) {
  ++total_;
  const long k = bin_of(q);
  if (k < k_min_)
    ++under_;
  else if (k > k_max_)
    ++over_;
  else
    ++counts_[static_cast<std::size_t>(k - k_min_)];
}

void Histogram::merge(const Histogram& o) {
  if (o.vc_ != vc_ || o.k_min_ != k_min_ || o.k_max_ != k_max_)
    throw std::invalid_argument("Histogram: incompatible bins");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
  under_ += o.under_;
  over_ += o.over_;
  total_ += o.total_;
}

std::uint64_t Histogram::count(long k) const {
  if (k < k_min_ || k > k_max_) return 0;
  return counts_[static_cast<std::size_t>(k - k_min_)];
}

double Histogram::probability(long k) const {
  return total_ == 0 ? 0.0 : static_cast<double>(count(k)) / static_cast<double>(total_);
}

Histogram pdf_histogram(std::span<const double> samples, double cell_volume) {
  if (!(cell_volume > 0.0)) throw std::invalid_argument("pdf_histogram: cell volume must be positive");
  long lo = 0, hi = 0;
  if (!samples.empty()) {
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    lo = static_cast<long>(std::floor(*mn * cell_volume + 0.5));
    hi = static_cast<long>(std::floor(*mx * cell_volume + 0.5));
  }
  Histogram h(cell_volume, lo, hi);
  for (double q : samples) h.add(q);
  return h;
}

}  // namespace dkh
