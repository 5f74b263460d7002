#include "dkh/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "dkh/fv_solver.hpp"
#include "dkh/gaussian_solver.hpp"
#include "dkh/particles.hpp"
#include "dkh/random.hpp"
#include "dkh/regrid.hpp"
#include "dkh/scenario.hpp"

namespace dkh {

namespace {

constexpr std::uint64_t kShardSize = 4;

std::vector<Box> initial_boxes(const SimConfig& cfg, const ScalarField& field) {
  if (cfg.region == "none") return {};
  if (cfg.region == "full") return {whole_domain(field.grid())};
  if (cfg.region == "auto") return cluster(tag_cells(field, cfg.regrid), cfg.regrid.efficiency);
  return parse_boxes(cfg.region);
}

bool is_stats_step(const SimConfig& cfg, std::uint64_t step, std::uint64_t steps) {
  return step == steps || (cfg.output_every > 0 && step % cfg.output_every == 0);
}

bool is_sample_step(const SimConfig& cfg, std::uint64_t step) {
  return step >= cfg.sample_from && (step - cfg.sample_from) % cfg.sample_every == 0;
}

RunResult empty_result(const SimConfig& cfg) {
  const GridSpec grid = cfg.grid();
  const std::uint64_t steps = cfg.resolved_steps();
  RunResult r;
  for (std::uint64_t s = 0; s <= steps; ++s)
    if (is_stats_step(cfg, s, steps)) {
      r.stats_steps.push_back(s);
      r.stats.emplace_back(grid);
    }
  r.mass.assign(steps + 1, MassRow{});
  for (auto& m : r.mass) m.min_value = std::numeric_limits<double>::infinity();
  return r;
}

void accumulate_member(const SimConfig& cfg, std::uint64_t member, RunResult& r) {
  const std::uint64_t steps = cfg.resolved_steps();
  const double vc = cfg.grid().cell_volume();
  std::size_t next_stats = 0;
  simulate_member(cfg, member, [&](const MemberView& v) {
    const ScalarField& f = v.field;
    MassRow& m = r.mass[v.step];
    const double mass = total_mass(f);
    m.sum += mass;
    m.sum_sq += mass * mass;
    m.negative_cells += count_negative(f);
    m.min_value = std::min(m.min_value, min_value(f));
    m.rounding_sum += v.rounding_mass;
    ++m.members;

    if (next_stats < r.stats_steps.size() && r.stats_steps[next_stats] == v.step)
      r.stats[next_stats++].accumulate(f);
    if (is_sample_step(cfg, v.step) && v.step <= steps) {
      for (double q : f.values()) {
        ++r.pdf_counts[static_cast<long>(std::floor(q * vc + 0.5))];
        r.pooled.add(q);
      }
    }
    if (member == 0) {
      if (v.region && (r.regions.empty() || r.regions.back().boxes != v.region->boxes()))
        r.regions.push_back({v.step, v.region->boxes()});
      if (cfg.snapshot_every > 0 && v.step % cfg.snapshot_every == 0) r.snapshots.emplace(v.step, f);
    }
  });
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_table(const SimConfig& cfg, const std::string& name, const std::string& header,
                         const std::vector<std::string>& notes = {}) {
  const auto path = std::filesystem::path(cfg.out) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "# " << kVersion << "\n";
  out << "# method=" << to_string(cfg.method) << " seed=" << cfg.seed << " dt=" << fmt(cfg.resolved_dt())
      << " steps=" << cfg.resolved_steps() << " ensemble=" << cfg.ensemble
      << " scenario=" << cfg.scenario << "\n";
  for (const auto& n : notes) out << "# " << n << "\n";
  out << header << "\n";
  return out;
}

void close_table(std::ofstream& out, const std::string& name) {
  out.close();
  if (!out) throw std::runtime_error("write failed for '" + name + "'");
}

}  // namespace

void simulate_member(const SimConfig& cfg, std::uint64_t member, const Observer& observe) {
  const GridSpec grid = cfg.grid();
  const double dt = cfg.resolved_dt();
  const std::uint64_t steps = cfg.resolved_steps();
  const KeyedRng rng(member_seed(cfg.seed, member));
  const bool with_particles = cfg.method == Method::Particle || cfg.method == Method::Hybrid;
  InitialState init = build_scenario(cfg.scenario, cfg.scenario_params, grid, rng, with_particles);

  switch (cfg.method) {
    case Method::Particle: {
      ParticleSet particles = std::move(init.particles);
      ScalarField field = bin_counts(particles, grid);
      observe({member, 0, field, nullptr, 0.0});
      for (std::uint64_t s = 0; s < steps; ++s) {
        particles = rw_step(particles, grid, dt, rng, s);
        field = bin_counts(particles, grid);
        observe({member, s + 1, field, nullptr, 0.0});
      }
      break;
    }
    case Method::FiniteVolume: {
      ScalarField field = std::move(init.field);
      observe({member, 0, field, nullptr, 0.0});
      for (std::uint64_t s = 0; s < steps; ++s) {
        field = em_step(field, FaceNoise::generate(grid, rng, s), dt);
        observe({member, s + 1, field, nullptr, 0.0});
      }
      break;
    }
    case Method::Gaussian: {
      GaussianState state = GaussianState::from_initial(init.field);
      observe({member, 0, state.fluct, nullptr, 0.0});
      for (std::uint64_t s = 0; s < steps; ++s) {
        advance_gaussian(state, FaceNoise::generate(grid, rng, s), dt);
        observe({member, s + 1, state.fluct, nullptr, 0.0});
      }
      break;
    }
    case Method::Hybrid: {
      double rounding = 0.0;
      HybridState state = initialize_hybrid(init.field, initial_boxes(cfg, init.field),
                                            init.particles, init.next_id, &rounding);
      init.particles.clear();
      init.particles.shrink_to_fit();
      observe({member, 0, state.field, &state.region, rounding});
      const int interval = cfg.regrid.interval;
      for (std::uint64_t s = 0; s < steps; ++s) {
        if (interval > 0 && s > 0 && s % static_cast<std::uint64_t>(interval) == 0)
          rounding += regrid(state, cfg.regrid, rng).mass_change;
        advance_hybrid_step(state, dt, rng);
        observe({member, s + 1, state.field, &state.region, rounding});
      }
      break;
    }
  }
}

void RunResult::merge(RunResult&& later) {
  for (std::size_t i = 0; i < stats.size(); ++i) stats[i].merge(later.stats[i]);
  for (const auto& [k, n] : later.pdf_counts) pdf_counts[k] += n;
  pooled.merge(later.pooled);
  for (std::size_t s = 0; s < mass.size(); ++s) {
    MassRow& a = mass[s];
    const MassRow& b = later.mass[s];
    a.sum += b.sum;
    a.sum_sq += b.sum_sq;
    a.negative_cells += b.negative_cells;
    a.min_value = std::min(a.min_value, b.min_value);
    a.rounding_sum += b.rounding_sum;
    a.members += b.members;
  }
  if (regions.empty()) regions = std::move(later.regions);
  if (snapshots.empty()) snapshots = std::move(later.snapshots);
}

RunResult simulate(const SimConfig& cfg) {
  cfg.validate();
  const std::uint64_t shards = (cfg.ensemble + kShardSize - 1) / kShardSize;
  RunResult total = empty_result(cfg);
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(cfg.threads, shards));

  for (std::uint64_t first = 0; first < shards; first += workers) {
    const std::uint64_t batch = std::min<std::uint64_t>(workers, shards - first);
    std::vector<RunResult> parts(batch);
    std::vector<std::exception_ptr> errors(batch);
    auto work = [&](std::uint64_t b) {
      try {
        parts[b] = empty_result(cfg);
        const std::uint64_t lo = (first + b) * kShardSize;
        const std::uint64_t hi = std::min(cfg.ensemble, lo + kShardSize);
        for (std::uint64_t m = lo; m < hi; ++m) accumulate_member(cfg, m, parts[b]);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    };
    if (batch == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (std::uint64_t b = 0; b < batch; ++b) pool.emplace_back(work, b);
      for (auto& t : pool) t.join();
    }
    for (std::uint64_t b = 0; b < batch; ++b) {
      if (errors[b]) std::rethrow_exception(errors[b]);
      total.merge(std::move(parts[b]));
    }
  }
  return total;
}

void write_outputs(const SimConfig& cfg, const RunResult& r) {
  std::filesystem::create_directories(cfg.out);
  const GridSpec grid = cfg.grid();
  const std::string moments_note =
      "moments: population central moments over ensemble members; kurtosis is non-excess "
      "m4/m2^2; skewness/kurtosis are nan where m2 < 1e-14";

  {
    std::ofstream out(std::filesystem::path(cfg.out) / "config.txt");
    out << "# " << kVersion << " effective configuration\n" << to_config_text(cfg);
    if (!out) throw std::runtime_error("cannot write config.txt");
  }

  {
    auto out = open_table(cfg, "stats.csv", "step,i,j,k,mean,variance,skewness,kurtosis", {moments_note});
    for (std::size_t i = 0; i < r.stats_steps.size(); ++i) {
      const MomentAccumulator& acc = r.stats[i];
      for (std::size_t c = 0; c < grid.num_cells(); ++c) {
        const CellIndex idx = grid.unlinear(c);
        const RunningMoments& rm = acc.cell(c);
        out << r.stats_steps[i] << ',' << idx[0] << ',' << idx[1] << ',' << idx[2] << ',';
        if (rm.count() < 2) {
          out << fmt(rm.mean()) << ",nan,nan,nan\n";
          continue;
        }
        const Moments m = rm.finalize();
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        out << fmt(m.mean) << ',' << fmt(m.variance) << ',' << fmt(m.skewness.value_or(nan)) << ','
            << fmt(m.kurtosis.value_or(nan)) << '\n';
      }
    }
    close_table(out, "stats.csv");
  }

  {
    std::vector<std::string> notes{
        "pdf: samples pooled over all cells and ensemble members at steps >= " +
            std::to_string(cfg.sample_from) + " every " + std::to_string(cfg.sample_every) +
            " steps; bin k covers [(k-1/2)/Vc, (k+1/2)/Vc)",
        moments_note};
    if (r.pooled.count() >= 2) {
      const Moments m = r.pooled.finalize();
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      notes.push_back("pooled: n=" + std::to_string(m.count) + " mean=" + fmt(m.mean) +
                      " variance=" + fmt(m.variance) + " skewness=" + fmt(m.skewness.value_or(nan)) +
                      " kurtosis=" + fmt(m.kurtosis.value_or(nan)));
    }
    auto out = open_table(cfg, "pdf.csv", "bin_center_particles,probability,method", notes);
    std::uint64_t total = 0;
    for (const auto& [k, n] : r.pdf_counts) total += n;
    for (const auto& [k, n] : r.pdf_counts)
      out << k << ',' << fmt(static_cast<double>(n) / static_cast<double>(total)) << ','
          << to_string(cfg.method) << '\n';
    close_table(out, "pdf.csv");
  }

  {
    auto out = open_table(
        cfg, "mass.csv",
        "step,total_mass,negative_cell_count,min_value,total_mass_stderr,rounding_mass_change",
        {"total_mass and rounding_mass_change are ensemble means; negative_cell_count is summed "
         "and min_value minimized over members",
         "rounding_mass_change: cumulative mass created by probabilistic rounding when particles "
         "are sampled from the field (initialization and regrid)"});
    for (std::size_t s = 0; s < r.mass.size(); ++s) {
      const MassRow& m = r.mass[s];
      if (m.members == 0) continue;
      const double n = static_cast<double>(m.members);
      const double mean = m.sum / n;
      const double var = std::max(m.sum_sq / n - mean * mean, 0.0);
      const double se = m.members > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      out << s << ',' << fmt(mean) << ',' << m.negative_cells << ',' << fmt(m.min_value) << ','
          << fmt(se) << ',' << fmt(m.rounding_sum / n) << '\n';
    }
    close_table(out, "mass.csv");
  }

  if (cfg.method == Method::Hybrid) {
    auto out = open_table(cfg, "regions.csv", "step,box_id,lo_i,lo_j,lo_k,hi_i,hi_j,hi_k",
                          {"particle region of member 0, written whenever it changes; inclusive "
                           "cell bounds; box_id -1 marks an empty region"});
    for (const auto& rec : r.regions) {
      if (rec.boxes.empty()) out << rec.step << ",-1,,,,,,\n";
      for (std::size_t b = 0; b < rec.boxes.size(); ++b) {
        const Box& box = rec.boxes[b];
        out << rec.step << ',' << b << ',' << box.lo[0] << ',' << box.lo[1] << ',' << box.lo[2] << ','
            << box.hi[0] << ',' << box.hi[1] << ',' << box.hi[2] << '\n';
      }
    }
    close_table(out, "regions.csv");
  }

  for (const auto& [step, field] : r.snapshots) {
    const std::string name = "snapshot_" + std::to_string(step) + ".csv";
    auto out = open_table(cfg, name, "i,j,k,q", {"member 0 at step " + std::to_string(step)});
    for (std::size_t c = 0; c < field.size(); ++c) {
      const CellIndex idx = grid.unlinear(c);
      out << idx[0] << ',' << idx[1] << ',' << idx[2] << ',' << fmt(field[c]) << '\n';
    }
    close_table(out, name);
  }
}

int run(const SimConfig& cfg) {
  try {
    cfg.validate();
    const double dt = cfg.resolved_dt();
    if (cfg.t_end) {
      const std::uint64_t steps = cfg.resolved_steps();
      std::cerr << "dkh: t_end " << fmt(*cfg.t_end) << " snapped to " << steps << " steps (t = "
                << fmt(static_cast<double>(steps) * dt) << ")\n";
    }
    const RunResult result = simulate(cfg);
    write_outputs(cfg, result);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "dkh: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dkh: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dkh
