#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dkh/grid.hpp"
#include "dkh/regrid.hpp"

namespace dkh {

enum class Method { Particle, FiniteVolume, Gaussian, Hybrid };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// Run configuration. Read from a flat `key = value` file; '#' starts a
/// comment. Scenario parameters use the `scenario.` prefix.
struct SimConfig {
  Method method = Method::FiniteVolume;
  int dim = 1;
  std::array<int, 3> cells{100, 1, 1};
  std::array<double, 3> extents{1.0, 1.0, 1.0};
  std::array<Boundary, 3> bc{Boundary::Periodic, Boundary::Periodic, Boundary::Periodic};

  std::optional<double> dt;  // empty: dt_factor * stability_max_dt
  double dt_factor = 0.25;
  std::uint64_t steps = 0;
  std::optional<double> t_end;  // when set, overrides steps (nearest step)
  std::uint64_t ensemble = 1;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  RegridPolicy regrid;
  /// "auto" (tag and cluster), "none", "full", or boxes "i0:i1,j0:j1,k0:k1;..."
  std::string region = "auto";

  std::string scenario = "uniform";
  std::map<std::string, std::string> scenario_params;

  std::string out = "out";
  std::uint64_t output_every = 0;    // stats.csv cadence; 0 = final step only
  std::uint64_t snapshot_every = 0;  // 0 = no snapshots
  std::uint64_t sample_from = 0;     // first step pooled into pdf.csv
  std::uint64_t sample_every = 1;

  GridSpec grid() const;
  double resolved_dt() const;
  std::uint64_t resolved_steps() const;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Applies one `key=value` setting. Throws std::invalid_argument on an
/// unknown key or a malformed value.
void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value);

SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

/// Effective configuration in the file format; parsing it back yields the
/// same run.
std::string to_config_text(const SimConfig& cfg);

/// Parses "i0:i1,j0:j1,k0:k1;..." (inclusive bounds; missing axes are 0:0).
std::vector<Box> parse_boxes(const std::string& text);

}  // namespace dkh
