#include "dkh/scenario.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dkh/hybrid.hpp"

namespace dkh {

namespace {

class Params {
public:
  Params(const std::string& scenario, const std::map<std::string, std::string>& values,
         std::set<std::string> allowed)
      : scenario_(scenario), values_(values) {
    for (const auto& [k, v] : values_)
      if (!allowed.count(k))
        throw std::invalid_argument("scenario '" + scenario + "' has no parameter '" + k + "'");
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse(key, it->second);
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse(key, item));
    if (out.size() != fallback.size())
      throw std::invalid_argument("scenario parameter '" + key + "' needs " +
                                  std::to_string(fallback.size()) + " values");
    return out;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

private:
  double parse(const std::string& key, const std::string& v) const {
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      while (used < v.size() && std::isspace(static_cast<unsigned char>(v[used]))) ++used;
      if (used == v.size() && std::isfinite(x)) return x;
    } catch (const std::logic_error&) {
    }
    throw std::invalid_argument("scenario parameter '" + key + "': bad number '" + v + "'");
  }

  std::string scenario_;
  const std::map<std::string, std::string>& values_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Nested-shape field: inner / annulus / background particles per cell,
// judged by the normalized radius of the cell center.
ScalarField nested(const GridSpec& grid, const Params& p, int dim) {
  require(grid.dim() == dim, "scenario needs a " + std::to_string(dim) + "D grid");
  const double vc = grid.cell_volume();
  const double inner_ppc = p.number("inner_ppc", 15.0);
  const double annulus_ppc = p.number("annulus_ppc", 0.0);
  const double background_ppc = p.number("background_ppc", 30.0);
  require(inner_ppc >= 0 && annulus_ppc >= 0 && background_ppc >= 0, "densities must be >= 0");

  std::vector<double> center(dim), inner(dim), outer(dim);
  for (int a = 0; a < dim; ++a) center[a] = 0.5 * grid.extent(a);
  if (dim == 2) {
    center = p.numbers("center", center);
    inner = p.numbers("inner", {0.15 * grid.extent(0), 0.11 * grid.extent(1)});
    outer = p.numbers("outer", {0.35 * grid.extent(0), 0.26 * grid.extent(1)});
  } else {
    center = p.numbers("center", center);
    const double ri = p.number("inner_radius", 0.15 * grid.extent(0));
    const double ro = p.number("outer_radius", 0.35 * grid.extent(0));
    inner.assign(dim, ri);
    outer.assign(dim, ro);
  }
  for (int a = 0; a < dim; ++a) {
    require(inner[a] > 0.0, "radii must be positive");
    require(inner[a] <= outer[a], "inner shape must fit inside the outer shape");
    require(center[a] - outer[a] >= 0.0 && center[a] + outer[a] <= grid.extent(a),
            "outer shape leaves the domain");
  }

  ScalarField f(grid);
  for (std::size_t c = 0; c < f.size(); ++c) {
    const Position x = grid.cell_center(grid.unlinear(c));
    double ri = 0.0, ro = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = x[a] - center[a];
      ri += d * d / (inner[a] * inner[a]);
      ro += d * d / (outer[a] * outer[a]);
    }
    const double ppc = ri <= 1.0 ? inner_ppc : ro <= 1.0 ? annulus_ppc : background_ppc;
    f[c] = ppc / vc;
  }
  return f;
}

}  // namespace

InitialState build_scenario(const std::string& name, const std::map<std::string, std::string>& params,
                            const GridSpec& grid, const KeyedRng& rng, bool with_particles) {
  InitialState out;
  bool iid = false;
  const double vc = grid.cell_volume();

  if (name == "uniform") {
    Params p(name, params, {"particles_per_cell", "density", "placement"});
    require(!(p.has("particles_per_cell") && p.has("density")),
            "uniform: give particles_per_cell or density, not both");
    const double q = p.has("density") ? p.number("density", 0.0)
                                      : p.number("particles_per_cell", 5.0) / vc;
    require(q >= 0.0, "uniform: density must be >= 0");
    const std::string placement = p.text("placement", "exact");
    require(placement == "exact" || placement == "iid", "uniform: placement must be exact or iid");
    iid = placement == "iid";
    out.field = ScalarField(grid, q);
  } else if (name == "1d_void") {
    Params p(name, params, {"density", "void_density", "void_lo", "void_hi"});
    const double q = p.number("density", 2000.0);
    const double q_void = p.number("void_density", 0.0);
    const double lo = p.number("void_lo", 0.25 * grid.extent(0));
    const double hi = p.number("void_hi", 0.75 * grid.extent(0));
    require(q >= 0.0 && q_void >= 0.0, "1d_void: densities must be >= 0");
    require(0.0 <= lo && lo < hi && hi <= grid.extent(0), "1d_void: void interval leaves the domain");
    out.field = ScalarField(grid);
    for (std::size_t c = 0; c < out.field.size(); ++c) {
      const double x = grid.cell_center(grid.unlinear(c))[0];
      out.field[c] = (x >= lo && x <= hi) ? q_void : q;
    }
  } else if (name == "2d_ellipses") {
    Params p(name, params, {"inner_ppc", "annulus_ppc", "background_ppc", "center", "inner", "outer"});
    out.field = nested(grid, p, 2);
  } else if (name == "3d_spheres") {
    Params p(name, params,
             {"inner_ppc", "annulus_ppc", "background_ppc", "center", "inner_radius", "outer_radius"});
    out.field = nested(grid, p, 3);
  } else {
    throw std::invalid_argument("unknown scenario '" + name +
                                "' (uniform, 1d_void, 2d_ellipses, 3d_spheres)");
  }

  if (!with_particles) return out;
  if (iid) {
    // Independent uniform positions over the whole domain: multinomial counts.
    const auto n = static_cast<std::uint64_t>(std::llround(total_mass(out.field)));
    out.particles.reserve(n);
    for (std::uint64_t id = 0; id < n; ++id) {
      KeyedSequence seq(rng, Stream::InitPlacement, 1, id);
      Position x{0.5, 0.5, 0.5};
      for (int a = 0; a < grid.dim(); ++a) x[a] = seq.uniform() * grid.extent(a);
      out.particles.push_back({id, x});
    }
    out.next_id = n;
  } else {
    std::vector<std::size_t> all(grid.num_cells());
    std::iota(all.begin(), all.end(), std::size_t{0});
    out.particles = sample_particles_from_field(out.field, all, rng, Stream::InitPlacement, 0,
                                                out.next_id)
                        .particles;
  }
  return out;
}

}  // namespace dkh
