#include "dkh/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dkh/fv_solver.hpp"

namespace dkh {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

[[noreturn]] void bad(const std::string& key, const std::string& value) {
  throw std::invalid_argument("invalid value for '" + key + "': '" + value + "'");
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) bad(key, v);
    return x;
  } catch (const std::logic_error&) {
    bad(key, v);
  }
}

template <typename T>
T to_integer(const std::string& key, const std::string& v) {
  T x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad(key, v);
  return x;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T, typename F>
std::string join3(const std::array<T, 3>& a, int n, F&& f) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? "," : "") + f(a[i]);
  return s;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Particle: return "particle";
    case Method::FiniteVolume: return "fv";
    case Method::Gaussian: return "gaussian";
    case Method::Hybrid: return "hybrid";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "particle") return Method::Particle;
  if (name == "fv") return Method::FiniteVolume;
  if (name == "gaussian") return Method::Gaussian;
  if (name == "hybrid") return Method::Hybrid;
  throw std::invalid_argument("unknown method '" + name + "' (particle, fv, gaussian, hybrid)");
}

GridSpec SimConfig::grid() const { return GridSpec(dim, extents, cells, bc); }

double SimConfig::resolved_dt() const {
  if (dt) return *dt;
  return dt_factor * stability_max_dt(grid());
}

std::uint64_t SimConfig::resolved_steps() const {
  if (!t_end) return steps;
  return static_cast<std::uint64_t>(std::llround(*t_end / resolved_dt()));
}

void SimConfig::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (cells[a] < 1) throw std::invalid_argument("cells must be positive");
    if (!(extents[a] > 0.0)) throw std::invalid_argument("extents must be positive");
  }
  if (dt && !(*dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(dt_factor > 0.0)) throw std::invalid_argument("dt_factor must be positive");
  if (t_end && !(*t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
  if (ensemble < 1) throw std::invalid_argument("ensemble must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
  if (out.empty()) throw std::invalid_argument("out must not be empty");
  regrid.validate();
  if (region != "auto" && region != "none" && region != "full") parse_boxes(region);
}

std::vector<Box> parse_boxes(const std::string& text) {
  std::vector<Box> boxes;
  for (const std::string& spec : split(text, ';')) {
    if (spec.empty()) continue;
    const auto axes = split(spec, ',');
    if (axes.empty() || axes.size() > 3) bad("region", text);
    Box b;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto range = split(axes[a], ':');
      if (range.size() != 2) bad("region", text);
      b.lo[a] = to_integer<int>("region", range[0]);
      b.hi[a] = to_integer<int>("region", range[1]);
    }
    boxes.push_back(b);
  }
  return boxes;
}

void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key.rfind("scenario.", 0) == 0) {
    cfg.scenario_params[key.substr(9)] = v;
  } else if (key == "method") {
    cfg.method = method_from_string(v);
  } else if (key == "dim") {
    cfg.dim = to_integer<int>(key, v);
  } else if (key == "cells") {
    const auto parts = split(v, ',');
    if (parts.empty() || parts.size() > 3) bad(key, v);
    cfg.cells = {1, 1, 1};
    for (std::size_t a = 0; a < parts.size(); ++a) cfg.cells[a] = to_integer<int>(key, parts[a]);
  } else if (key == "extents") {
    const auto parts = split(v, ',');
    if (parts.empty() || parts.size() > 3) bad(key, v);
    cfg.extents = {1.0, 1.0, 1.0};
    for (std::size_t a = 0; a < parts.size(); ++a) cfg.extents[a] = to_double(key, parts[a]);
  } else if (key == "bc") {
    const auto parts = split(v, ',');
    if (parts.empty() || parts.size() > 3) bad(key, v);
    for (int a = 0; a < 3; ++a)
      cfg.bc[a] = boundary_from_string(parts[std::min<std::size_t>(a, parts.size() - 1)]);
  } else if (key == "dt") {
    if (v == "auto")
      cfg.dt.reset();
    else
      cfg.dt = to_double(key, v);
  } else if (key == "dt_factor") {
    cfg.dt_factor = to_double(key, v);
  } else if (key == "steps") {
    cfg.steps = to_integer<std::uint64_t>(key, v);
  } else if (key == "t_end") {
    if (v == "none")
      cfg.t_end.reset();
    else
      cfg.t_end = to_double(key, v);
  } else if (key == "ensemble") {
    cfg.ensemble = to_integer<std::uint64_t>(key, v);
  } else if (key == "seed") {
    cfg.seed = to_integer<std::uint64_t>(key, v);
  } else if (key == "threads") {
    cfg.threads = to_integer<unsigned>(key, v);
  } else if (key == "theta") {
    cfg.regrid.threshold = to_double(key, v);
  } else if (key == "buffer") {
    cfg.regrid.buffer = to_integer<int>(key, v);
  } else if (key == "efficiency") {
    cfg.regrid.efficiency = to_double(key, v);
  } else if (key == "regrid_interval") {
    cfg.regrid.interval = to_integer<int>(key, v);
  } else if (key == "region") {
    cfg.region = v;
  } else if (key == "scenario") {
    cfg.scenario = v;
  } else if (key == "out") {
    cfg.out = v;
  } else if (key == "output_every") {
    cfg.output_every = to_integer<std::uint64_t>(key, v);
  } else if (key == "snapshot_every") {
    cfg.snapshot_every = to_integer<std::uint64_t>(key, v);
  } else if (key == "sample_from") {
    cfg.sample_from = to_integer<std::uint64_t>(key, v);
  } else if (key == "sample_every") {
    cfg.sample_every = to_integer<std::uint64_t>(key, v);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_config_text(const SimConfig& c) {
  std::ostringstream o;
  o << "method = " << to_string(c.method) << "\n";
  o << "dim = " << c.dim << "\n";
  o << "cells = " << join3(c.cells, c.dim, [](int x) { return std::to_string(x); }) << "\n";
  o << "extents = " << join3(c.extents, c.dim, fmt) << "\n";
  o << "bc = " << join3(c.bc, c.dim, [](Boundary b) { return to_string(b); }) << "\n";
  o << "dt = " << (c.dt ? fmt(*c.dt) : "auto") << "\n";
  o << "dt_factor = " << fmt(c.dt_factor) << "\n";
  o << "steps = " << c.steps << "\n";
  o << "t_end = " << (c.t_end ? fmt(*c.t_end) : "none") << "\n";
  o << "ensemble = " << c.ensemble << "\n";
  o << "seed = " << c.seed << "\n";
  o << "threads = " << c.threads << "\n";
  o << "theta = " << fmt(c.regrid.threshold) << "\n";
  o << "buffer = " << c.regrid.buffer << "\n";
  o << "efficiency = " << fmt(c.regrid.efficiency) << "\n";
  o << "regrid_interval = " << c.regrid.interval << "\n";
  o << "region = " << c.region << "\n";
  o << "scenario = " << c.scenario << "\n";
  for (const auto& [k, v] : c.scenario_params) o << "scenario." << k << " = " << v << "\n";
  o << "out = " << c.out << "\n";
  o << "output_every = " << c.output_every << "\n";
  o << "snapshot_every = " << c.snapshot_every << "\n";
  o << "sample_from = " << c.sample_from << "\n";
  o << "sample_every = " << c.sample_every << "\n";
  return o.str();
}

}  // namespace dkh
