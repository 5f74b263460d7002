#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dkh/box.hpp"
#include "dkh/config.hpp"
#include "dkh/grid.hpp"
#include "dkh/hybrid.hpp"
#include "dkh/stats.hpp"

namespace dkh {

inline constexpr const char* kVersion = "dkh 0.1.0";

/// State of one ensemble member after `step` steps (step 0 is the initial
/// condition). `region` is null unless the method is hybrid.
struct MemberView {
  std::uint64_t member;
  std::uint64_t step;
  const ScalarField& field;
  const ParticleRegion* region;
  /// Cumulative mass created by probabilistic rounding (initialization and
  /// regrid sampling) in this realization.
  double rounding_mass;
};

using Observer = std::function<void(const MemberView&)>;

/// Runs one ensemble member, calling `observe` at every step including 0.
void simulate_member(const SimConfig& cfg, std::uint64_t member, const Observer& observe);

struct MassRow {
  double sum = 0.0;      // over members
  double sum_sq = 0.0;
  std::uint64_t negative_cells = 0;  // summed over members
  double min_value = 0.0;            // over members
  double rounding_sum = 0.0;
  std::uint64_t members = 0;
};

struct RegionRecord {
  std::uint64_t step;
  std::vector<Box> boxes;
};

/// Ensemble aggregates. Members are processed in fixed shards that are merged
/// in member order, so results do not depend on the thread count.
struct RunResult {
  std::vector<std::uint64_t> stats_steps;
  std::vector<MomentAccumulator> stats;        // parallel to stats_steps
  std::map<long, std::uint64_t> pdf_counts;    // pooled samples by bin
  RunningMoments pooled;                       // pooled samples
  std::vector<MassRow> mass;                   // one row per step
  std::vector<RegionRecord> regions;           // member 0, on change
  std::map<std::uint64_t, ScalarField> snapshots;  // member 0

  void merge(RunResult&& later);
};

RunResult simulate(const SimConfig& cfg);

/// Writes stats.csv, pdf.csv, mass.csv, regions.csv (hybrid), snapshots and
/// config.txt into cfg.out. Throws std::runtime_error on I/O failure.
void write_outputs(const SimConfig& cfg, const RunResult& result);

/// Validates, simulates and writes. Returns 0 on success and prints a
/// diagnostic and returns non-zero otherwise.
int run(const SimConfig& cfg);

}  // namespace dkh
