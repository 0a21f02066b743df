#include "foam/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "foam/errors.hpp"

namespace foam {

namespace {

double uniform53(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

struct Box {
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{0, 0, 0};
  bool contains(const std::array<double, 3>& p, int rank) const {
    for (int a = 0; a < rank; ++a)
      if (p[a] < lo[a] || p[a] > hi[a]) return false;
    return true;
  }
};

Box inner_box(const Grid& g, double fraction) {
  Box b;
  for (int a = 0; a < g.rank; ++a) {
    const double len = g.dims[a] * g.spacing[a];
    const double lo_edge = g.origin[a] - g.spacing[a] / 2;
    b.lo[a] = lo_edge + len * (1.0 - fraction) / 2.0;
    b.hi[a] = lo_edge + len * (1.0 + fraction) / 2.0;
  }
  return b;
}

double dist2(const std::array<double, 3>& p, const std::array<double, 3>& q,
             int rank) {
  double s = 0.0;
  for (int a = 0; a < rank; ++a) s += (p[a] - q[a]) * (p[a] - q[a]);
  return s;
}

}  // namespace

void SeedSpec::validate(const Grid& g) const {
  if (n_bubbles < 1) throw ParamError("n_bubbles must be >= 1");
  if (!(inner_fraction > 0.0) || !(inner_fraction < 1.0))
    throw ParamError("inner box fraction must lie strictly inside (0,1)");
  if (volumes.n_phases() != n_bubbles + 1)
    throw ParamError("seed volumes must list every bubble plus complement");
  volumes.validate(g.cell_count());
  double bubble_vol = 0.0;
  for (int p = 0; p < n_bubbles; ++p)
    bubble_vol += double(volumes.counts[size_t(p)]) * g.cell_volume();
  double box_vol = 1.0;
  for (int a = 0; a < g.rank; ++a)
    box_vol *= g.dims[a] * g.spacing[a] * inner_fraction;
  if (bubble_vol > box_vol)
    throw ParamError("inner box cannot contain the requested bubble volume");
}

LabelField random_voronoi_init(const Grid& g, const SeedSpec& spec,
                               const GaussianKernel& kernel,
                               const AuctionParams& auction) {
  g.validate();
  spec.validate(g);
  if (!(kernel.grid() == g))
    throw ConfigError("seeding kernel grid does not match");

  const int n = spec.n_bubbles;
  const Box box = inner_box(g, spec.inner_fraction);

  std::mt19937_64 rng(spec.rng_seed);
  std::vector<std::array<double, 3>> sites(size_t(n), {0, 0, 0});
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < g.rank; ++a)
      sites[size_t(s)][a] = box.lo[a] + (box.hi[a] - box.lo[a]) * uniform53(rng);

  // Voronoi regions inside the inner box; everything else is complement.
  const std::int64_t n_cells = g.cell_count();
  std::vector<std::uint16_t> region(static_cast<size_t>(n_cells), std::uint16_t(n));
  std::vector<std::int64_t> region_cells(size_t(n) + 1, 0);
  for (std::int64_t x = 0; x < n_cells; ++x) {
    const auto c = g.cell_center(x);
    if (box.contains(c, g.rank)) {
      int best = 0;
      double bd = dist2(c, sites[0], g.rank);
      for (int s = 1; s < n; ++s) {
        double d = dist2(c, sites[size_t(s)], g.rank);
        if (d < bd) {
          bd = d;
          best = s;
        }
      }
      region[size_t(x)] = std::uint16_t(best);
    }
    ++region_cells[region[size_t(x)]];
  }
  for (int s = 0; s <= n; ++s)
    if (region_cells[size_t(s)] == 0)
      throw ParamError(
          "degenerate Voronoi seeding (empty region); use another seed");

  // Relaxed memberships u_p = 1 / region volume, which equalizes the mass
  // each phase carries into the diffusion step.
  SoftField soft = MultiField::zeros(g, n + 1);
  std::vector<double> inv_vol(size_t(n) + 1);
  for (int s = 0; s <= n; ++s)
    inv_vol[size_t(s)] =
        1.0 / (double(region_cells[size_t(s)]) * g.cell_volume());
  for (std::int64_t x = 0; x < n_cells; ++x)
    soft.data[size_t(region[size_t(x)]) * n_cells + x] =
        inv_vol[region[size_t(x)]];

  ScoreField scores = MultiField::zeros(g, n + 1);
  convolve_phases(kernel, soft, scores);
  auto result = assign(scores, spec.volumes, auction);
  return std::move(result.labels);
}

LabelField insert_bubble(const LabelField& labels,
                         std::array<double, 3> position, std::int64_t v_cells,
                         InsertMode where) {
  labels.validate();
  if (v_cells < 1) throw ParamError("inserted bubble needs v >= 1 cells");
  const Grid& g = labels.geom;
  const std::int64_t n_cells = g.cell_count();
  const std::uint16_t comp = std::uint16_t(labels.complement());

  if (where == InsertMode::ClusterBoundary) {
    // Snap to the complement cell adjacent to a bubble that is nearest to
    // the requested position.
    double best = std::numeric_limits<double>::infinity();
    std::int64_t best_cell = -1;
    for (std::int64_t x = 0; x < n_cells; ++x) {
      if (labels.labels[size_t(x)] != comp) continue;
      const auto c = g.coords(x);
      bool touches = false;
      for (int a = 0; a < g.rank && !touches; ++a) {
        for (int s = -1; s <= 1 && !touches; s += 2) {
          auto q = c;
          q[a] = (q[a] + s + g.dims[a]) % g.dims[a];
          touches = labels.labels[size_t(g.index(q[0], q[1], q[2]))] != comp;
        }
      }
      if (!touches) continue;
      double d = dist2(g.cell_center(x), position, g.rank);
      if (d < best) {
        best = d;
        best_cell = x;
      }
    }
    if (best_cell < 0)
      throw ParamError("no complement cell adjacent to the cluster");
    position = g.cell_center(best_cell);
  }

  std::vector<std::pair<double, std::int64_t>> candidates;
  for (std::int64_t x = 0; x < n_cells; ++x)
    if (labels.labels[size_t(x)] == comp)
      candidates.emplace_back(dist2(g.cell_center(x), position, g.rank), x);
  if (std::int64_t(candidates.size()) < v_cells)
    throw ParamError("not enough complement cells for the inserted bubble");
  std::sort(candidates.begin(), candidates.end());

  // Reject insertions whose nearest-v ball had to reach far beyond the
  // nominal bubble radius (no room near the requested position).
  const double d = double(g.rank);
  const double nominal_r =
      std::pow(double(v_cells) * g.cell_volume(), 1.0 / d);
  const double max_r = std::sqrt(candidates[size_t(v_cells) - 1].first);
  if (max_r > 3.0 * nominal_r + 4.0 * g.spacing[0])
    throw ParamError("not enough complement cells near the insertion point");

  LabelField out = labels;
  out.n_phases = labels.n_phases + 1;
  const std::uint16_t new_bubble = comp;        // takes the old slot
  const std::uint16_t new_comp = comp + 1;      // complement stays last
  for (auto& l : out.labels)
    if (l == comp) l = new_comp;
  for (std::int64_t k = 0; k < v_cells; ++k)
    out.labels[size_t(candidates[size_t(k)].second)] = new_bubble;
  return out;
}

}  // namespace foam
