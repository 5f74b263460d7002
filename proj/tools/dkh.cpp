// dkh: command-line driver.
//
//   dkh run --config FILE [--method M --cells I,J,K --dt X --steps N
//           --ensemble E --seed S --theta T --regrid-interval R --out DIR]

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "dkh/config.hpp"
#include "dkh/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dean-Kawasaki hybrid particle/SPDE simulator"};
  app.set_version_flag("--version", dkh::kVersion);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an ensemble and write output tables");
  std::string config_path;
  run->add_option("--config", config_path, "key = value configuration file")->required();

  // Overrides, applied after the file in this order.
  const std::vector<std::pair<std::string, std::string>> flags{
      {"method", "particle, fv, gaussian or hybrid"},
      {"cells", "cells per axis, e.g. 64,64"},
      {"dt", "time step or 'auto'"},
      {"steps", "number of steps"},
      {"ensemble", "ensemble size"},
      {"seed", "master seed"},
      {"theta", "tagging threshold in particles per cell"},
      {"regrid_interval", "steps between regrids (0 = fixed region)"},
      {"out", "output directory"},
      {"threads", "worker threads"},
  };
  std::vector<std::string> values(flags.size()), names(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    names[i] = "--" + flags[i].first;
    for (char& c : names[i])
      if (c == '_') c = '-';
    run->add_option(names[i], values[i], flags[i].second);
  }
  std::vector<std::string> sets;
  run->add_option("--set", sets, "extra key=value override (repeatable)");

  CLI11_PARSE(app, argc, argv);

  dkh::SimConfig cfg;
  try {
    cfg = dkh::load_config(config_path);
    for (std::size_t i = 0; i < flags.size(); ++i)
      if (run->count(names[i]) > 0) dkh::apply_setting(cfg, flags[i].first, values[i]);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      dkh::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "dkh: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dkh: " << e.what() << "\n";
    return 1;
  }
  return dkh::run(cfg);
}
