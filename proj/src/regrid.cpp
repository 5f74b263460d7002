#include "dkh/regrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace dkh {

std::size_t TagMask::count() const {
  return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), std::uint8_t{1}));
}

void RegridPolicy::validate() const {
  if (!(threshold >= 0.0)) throw std::invalid_argument("regrid threshold must be >= 0");
  if (buffer < 0) throw std::invalid_argument("regrid buffer must be >= 0");
  if (!(efficiency > 0.0 && efficiency <= 1.0))
    throw std::invalid_argument("regrid efficiency must lie in (0, 1]");
  if (interval < 0) throw std::invalid_argument("regrid interval must be >= 0");
}

TagMask tag_cells(const ScalarField& f, const RegridPolicy& policy) {
  policy.validate();
  TagMask mask(f.grid());
  const double vc = f.grid().cell_volume();
  for (std::size_t c = 0; c < f.size(); ++c) mask.tags[c] = std::max(f[c], 0.0) * vc < policy.threshold ? 1 : 0;
  return dilate(mask, policy.buffer);
}

TagMask dilate(const TagMask& mask, int buffer) {
  if (buffer <= 0) return mask;
  const GridSpec& grid = mask.grid;
  TagMask out(grid);
  std::array<int, 3> reach{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) reach[a] = std::min(buffer, grid.cells(a));
  for (std::size_t c = 0; c < mask.tags.size(); ++c) {
    if (!mask.tags[c]) continue;
    const CellIndex cell = grid.unlinear(c);
    for (int dk = -reach[2]; dk <= reach[2]; ++dk)
      for (int dj = -reach[1]; dj <= reach[1]; ++dj)
        for (int di = -reach[0]; di <= reach[0]; ++di) {
          CellIndex n{cell[0] + di, cell[1] + dj, cell[2] + dk};
          bool valid = true;
          for (int a = 0; a < grid.dim(); ++a) {
            const int count = grid.cells(a);
            if (n[a] < 0 || n[a] >= count) {
              if (grid.bc(a) == Boundary::HomogeneousNeumann) {
                valid = false;
                break;
              }
              n[a] = ((n[a] % count) + count) % count;
            }
          }
          if (valid) out.tags[grid.linear(n)] = 1;
        }
  }
  return out;
}

namespace {

class Clusterer {
public:
  Clusterer(const TagMask& mask, double efficiency) : mask_(mask), efficiency_(efficiency) {}

  std::vector<Box> run() {
    recurse(whole_domain(mask_.grid));
    return std::move(boxes_);
  }

private:
  bool tagged(int i, int j, int k) const { return mask_.tags[mask_.grid.linear({i, j, k})] != 0; }

  // Bounding box of the tags inside `box`; returns the tag count.
  std::size_t shrink(Box& box) const {
    Box bb{{box.hi[0], box.hi[1], box.hi[2]}, {box.lo[0], box.lo[1], box.lo[2]}};
    std::size_t count = 0;
    for (int k = box.lo[2]; k <= box.hi[2]; ++k)
      for (int j = box.lo[1]; j <= box.hi[1]; ++j)
        for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
          if (!tagged(i, j, k)) continue;
          ++count;
          const CellIndex c{i, j, k};
          for (int a = 0; a < 3; ++a) {
            bb.lo[a] = std::min(bb.lo[a], c[a]);
            bb.hi[a] = std::max(bb.hi[a], c[a]);
          }
        }
    if (count > 0) box = bb;
    return count;
  }

  std::vector<long> signature(const Box& box, int axis) const {
    std::vector<long> sig(static_cast<std::size_t>(box.length(axis)), 0);
    for (int k = box.lo[2]; k <= box.hi[2]; ++k)
      for (int j = box.lo[1]; j <= box.hi[1]; ++j)
        for (int i = box.lo[0]; i <= box.hi[0]; ++i)
          if (tagged(i, j, k)) {
            const CellIndex c{i, j, k};
            ++sig[static_cast<std::size_t>(c[axis] - box.lo[axis])];
          }
    return sig;
  }

  struct Cut {
    int axis = -1;
    int left_hi = 0;   // last index (box-relative) of the left part
    int right_lo = 0;  // first index (box-relative) of the right part
    double score = 0.0;
    double center_distance = 0.0;
  };

  static bool better(const Cut& c, const Cut& best) {
    if (best.axis < 0) return true;
    if (c.score != best.score) return c.score > best.score;
    return c.center_distance < best.center_distance;
  }

  void recurse(Box box) {
    const std::size_t count = shrink(box);
    if (count == 0) return;
    if (box.volume() == 1 ||
        static_cast<double>(count) >= efficiency_ * static_cast<double>(box.volume())) {
      boxes_.push_back(box);
      return;
    }

    const int dim = mask_.grid.dim();
    std::array<std::vector<long>, 3> sigs;
    for (int a = 0; a < dim; ++a) sigs[a] = signature(box, a);

    // 1. Holes in a signature: the hole closest to the box center.
    Cut best;
    for (int a = 0; a < dim; ++a) {
      const int len = box.length(a);
      const double mid = 0.5 * (len - 1);
      for (int i = 1; i + 1 < len; ++i) {
        if (sigs[a][i] != 0) continue;
        Cut c{a, i - 1, i + 1, 0.0, std::abs(i - mid)};
        if (better(c, best)) best = c;
      }
    }

    // 2. Strongest zero crossing of the signature's second difference.
    if (best.axis < 0) {
      for (int a = 0; a < dim; ++a) {
        const int len = box.length(a);
        if (len < 4) continue;
        const auto& s = sigs[a];
        std::vector<long> lap(static_cast<std::size_t>(len), 0);
        for (int i = 1; i + 1 < len; ++i) lap[i] = s[i - 1] - 2 * s[i] + s[i + 1];
        const double mid = 0.5 * (len - 1);
        for (int i = 1; i + 2 < len; ++i) {
          if (!((lap[i] < 0 && lap[i + 1] > 0) || (lap[i] > 0 && lap[i + 1] < 0))) continue;
          Cut c{a, i, i + 1, static_cast<double>(std::labs(lap[i + 1] - lap[i])),
                std::abs(i + 0.5 - mid)};
          if (better(c, best)) best = c;
        }
      }
    }

    // 3. Bisect the longest axis.
    if (best.axis < 0) {
      int axis = 0;
      for (int a = 1; a < dim; ++a)
        if (box.length(a) > box.length(axis)) axis = a;
      const int half = box.length(axis) / 2;
      best = Cut{axis, half - 1, half, 0.0, 0.0};
    }

    Box left = box, right = box;
    left.hi[best.axis] = box.lo[best.axis] + best.left_hi;
    right.lo[best.axis] = box.lo[best.axis] + best.right_lo;
    recurse(left);
    recurse(right);
  }

  const TagMask& mask_;
  double efficiency_;
  std::vector<Box> boxes_;
};

}  // namespace

std::vector<Box> cluster(const TagMask& mask, double efficiency) {
  if (!(efficiency > 0.0 && efficiency <= 1.0))
    throw std::invalid_argument("cluster: efficiency must lie in (0, 1]");
  if (mask.tags.size() != mask.grid.num_cells())
    throw std::invalid_argument("cluster: mask does not match grid");
  return Clusterer(mask, efficiency).run();
}

RegridReport apply_regrid(HybridState& state, std::vector<Box> boxes, const KeyedRng& rng) {
  const GridSpec& grid = state.field.grid();
  ParticleRegion next(grid, std::move(boxes));
  const ParticleRegion& prev = state.region;
  RegridReport report;

  std::vector<std::size_t> added;
  for (std::size_t c : next.cells())
    if (!prev.contains(c)) added.push_back(c);
  for (std::size_t c : prev.cells())
    if (!next.contains(c)) ++report.cells_removed;
  report.cells_added = added.size();

  ParticleSet owned;
  owned.reserve(prev.owned.size());
  for (const Particle& p : prev.owned)
    if (next.contains(grid.linear(cell_of_position(p.position, grid)))) owned.push_back(p);

  SampleResult sampled = sample_particles_from_field(state.field, added, rng, Stream::RegridFill,
                                                     state.step, state.next_id);
  report.particles_sampled = sampled.particles.size();
  report.mass_change = sampled.mass_change;
  report.clipped_mass = sampled.clipped_mass;

  const double vc = grid.cell_volume();
  const auto counts = cell_counts(sampled.particles, grid);
  for (std::size_t c : added) state.field[c] = counts[c] / vc;
  owned.insert(owned.end(), sampled.particles.begin(), sampled.particles.end());

  next.owned = std::move(owned);
  state.region = std::move(next);
  return report;
}

RegridReport regrid(HybridState& state, const RegridPolicy& policy, const KeyedRng& rng) {
  return apply_regrid(state, cluster(tag_cells(state.field, policy), policy.efficiency), rng);
}

HybridState initialize_hybrid(const ScalarField& field, std::vector<Box> boxes,
                              const ParticleSet& particles, std::uint64_t next_id,
                              double* mass_change) {
  const GridSpec& grid = field.grid();
  HybridState state;
  state.field = field;
  state.region = ParticleRegion(grid, std::move(boxes));
  state.next_id = next_id;

  for (const Particle& p : particles) {
    if (state.region.contains(grid.linear(cell_of_position(p.position, grid))))
      state.region.owned.push_back(p);
    if (p.id >= state.next_id) state.next_id = p.id + 1;
  }
  const ScalarField binned = bin_counts(state.region.owned, grid);
  const double vc = grid.cell_volume();
  double change = 0.0;
  for (std::size_t c : state.region.cells()) {
    change += (binned[c] - state.field[c]) * vc;
    state.field[c] = binned[c];
  }
  if (mass_change) *mass_change = change;
  return state;
}

}  // namespace dkh
