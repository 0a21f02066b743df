#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <queue>

#include "foam/errors.hpp"
#include "foam/seeding.hpp"
#include "helpers.hpp"

using namespace foam;
using namespace foamtest;

namespace {

SeedSpec make_spec(const Grid& g, int n, std::uint64_t seed,
                   std::int64_t cells_per_bubble, double frac = 0.6) {
  SeedSpec s;
  s.n_bubbles = n;
  s.inner_fraction = frac;
  s.rng_seed = seed;
  s.volumes.counts.assign(size_t(n), cells_per_bubble);
  s.volumes.counts.push_back(g.cell_count() - n * cells_per_bubble);
  return s;
}

bool connected_phase(const LabelField& f, int phase) {
  const Grid& g = f.geom;
  std::int64_t start = -1, total = 0;
  for (std::int64_t x = 0; x < g.cell_count(); ++x)
    if (f.labels[size_t(x)] == phase) {
      if (start < 0) start = x;
      ++total;
    }
  if (total == 0) return false;
  std::vector<char> seen(size_t(g.cell_count()), 0);
  std::queue<std::int64_t> q;
  q.push(start);
  seen[size_t(start)] = 1;
  std::int64_t hit = 0;
  while (!q.empty()) {
    auto x = q.front();
    q.pop();
    ++hit;
    auto c = g.coords(x);
    for (int a = 0; a < g.rank; ++a)
      for (int s = -1; s <= 1; s += 2) {
        auto cc = c;
        cc[a] = (cc[a] + s + g.dims[a]) % g.dims[a];
        auto y = g.index(cc[0], cc[1], cc[2]);
        if (!seen[size_t(y)] && f.labels[size_t(y)] == phase) {
          seen[size_t(y)] = 1;
          q.push(y);
        }
      }
  }
  return hit == total;
}

double boundary_clearance(const LabelField& f) {
  // min distance from any bubble cell to the domain boundary
  const Grid& g = f.geom;
  double best = 1e300;
  for (std::int64_t x = 0; x < g.cell_count(); ++x) {
    if (f.labels[size_t(x)] == f.complement()) continue;
    auto p = g.cell_center(x);
    for (int a = 0; a < g.rank; ++a) {
      double lo = g.origin[a] - g.spacing[a] / 2;
      double hi = lo + g.dims[a] * g.spacing[a];
      best = std::min({best, p[a] - lo, hi - p[a]});
    }
  }
  return best;
}

}  // namespace

TEST_CASE("single bubble: connected blob of the exact size in the box") {
  Grid g = Grid::square(96, 4.0);
  GaussianKernel k(g, 0.02);
  auto spec = make_spec(g, 1, 42, 600);
  auto f = random_voronoi_init(g, spec, k, AuctionParams{});
  CHECK(f.phase_counts() == spec.volumes.counts);
  CHECK(connected_phase(f, 0));
  // contained in a neighborhood of the inner box
  const double margin = (1.0 - 0.6) / 2 * 4.0 - 2 * std::sqrt(0.02);
  CHECK(boundary_clearance(f) > margin);
}

TEST_CASE("fixed seed reproduces the field, fresh seed changes it") {
  Grid g = Grid::square(64, 4.0);
  GaussianKernel k(g, 0.02);
  auto spec = make_spec(g, 5, 7, 120);
  auto a = random_voronoi_init(g, spec, k, AuctionParams{});
  auto b = random_voronoi_init(g, spec, k, AuctionParams{});
  CHECK(a.labels == b.labels);
  spec.rng_seed = 8;
  auto c = random_voronoi_init(g, spec, k, AuctionParams{});
  CHECK(a.labels != c.labels);
}

TEST_CASE("twelve equal bubbles: exact integer tallies") {
  Grid g = Grid::square(128, 4.0);
  GaussianKernel k(g, 0.0625);
  auto spec = make_spec(g, 12, 2024, 250);
  auto f = random_voronoi_init(g, spec, k, AuctionParams{});
  auto counts = f.phase_counts();
  for (int p = 0; p < 12; ++p) CHECK(counts[size_t(p)] == 250);
  CHECK(counts[12] == g.cell_count() - 12 * 250);
}

TEST_CASE("confinement: bubbles clear the boundary by 4 sqrt(tau)") {
  const double tau = 0.015625;  // 4 sqrt(tau) = 0.5
  Grid g = Grid::square(128, 4.0);
  GaussianKernel k(g, tau);
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    auto spec = make_spec(g, 6, seed, 200, 0.5);  // inner margin = 1.0
    auto f = random_voronoi_init(g, spec, k, AuctionParams{});
    CHECK(boundary_clearance(f) >= 4 * std::sqrt(tau));
  }
}

TEST_CASE("degenerate seeding is reported, not silently accepted") {
  Grid g = Grid::square(64, 4.0);
  GaussianKernel k(g, 0.02);
  // inner box smaller than one cell: every second region is empty
  auto spec = make_spec(g, 2, 5, 10, 0.01);
  spec.volumes.counts = {10, 10, g.cell_count() - 20};
  CHECK_THROWS_AS(random_voronoi_init(g, spec, k, AuctionParams{}),
                  ParamError);
}

TEST_CASE("infeasible volumes are rejected") {
  Grid g = Grid::square(64, 4.0);
  GaussianKernel k(g, 0.02);
  auto spec = make_spec(g, 2, 5, 1200, 0.3);  // inner box area ~ 1.44 < 2400 h^2
  CHECK_THROWS_AS(random_voronoi_init(g, spec, k, AuctionParams{}),
                  ParamError);
}

TEST_CASE("insert_bubble carves the nearest complement cells") {
  Grid g = Grid::square(96, 4.0);
  GaussianKernel k(g, 0.02);
  auto spec = make_spec(g, 1, 9, 500);
  auto f = random_voronoi_init(g, spec, k, AuctionParams{});

  auto out = insert_bubble(f, {0.6, 0.6, 0.0}, 25, InsertMode::Explicit);
  CHECK(out.n_phases == 3);
  auto counts = out.phase_counts();
  CHECK(counts[0] == 500);  // original untouched
  CHECK(counts[1] == 25);
  CHECK(counts[2] == g.cell_count() - 525);
  CHECK(connected_phase(out, 1));

  // quasi-disc: all carved cells within ~2 nominal radii of the corner
  const double r_nom = std::sqrt(25 * g.cell_volume() / M_PI);
  for (std::int64_t x = 0; x < g.cell_count(); ++x)
    if (out.labels[size_t(x)] == 1) {
      auto p = g.cell_center(x);
      CHECK(std::hypot(p[0] - 0.6, p[1] - 0.6) < 2.5 * r_nom);
    }
}

TEST_CASE("cluster-boundary insertion touches the cluster") {
  Grid g = Grid::square(96, 4.0);
  GaussianKernel k(g, 0.02);
  auto spec = make_spec(g, 1, 9, 500);
  auto f = random_voronoi_init(g, spec, k, AuctionParams{});
  auto out =
      insert_bubble(f, {2.0, 2.0, 0.0}, 30, InsertMode::ClusterBoundary);
  // the new bubble must share an edge with the old bubble
  bool touches = false;
  for (int r = 0; r < 96 && !touches; ++r)
    for (int c = 0; c < 96 && !touches; ++c) {
      if (out.labels[size_t(g.index(r, c))] != 1) continue;
      for (auto [dr, dc] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        int rr = (r + dr + 96) % 96, cc = (c + dc + 96) % 96;
        if (out.labels[size_t(g.index(rr, cc))] == 0) touches = true;
      }
    }
  CHECK(touches);
}

TEST_CASE("insertion without room nearby fails loudly") {
  Grid g = Grid::square(64, 4.0);
  GaussianKernel k(g, 0.02);
  auto spec = make_spec(g, 1, 3, 800);
  auto f = random_voronoi_init(g, spec, k, AuctionParams{});
  // center of the bubble: nearest complement cells are far away
  std::array<double, 3> inside{0, 0, 0};
  std::int64_t n_in = 0;
  for (std::int64_t x = 0; x < g.cell_count(); ++x)
    if (f.labels[size_t(x)] == 0) {
      auto p = g.cell_center(x);
      for (int a = 0; a < 2; ++a) inside[a] += p[a];
      ++n_in;
    }
  for (int a = 0; a < 2; ++a) inside[a] /= double(n_in);
  CHECK_THROWS_AS(insert_bubble(f, inside, 4, InsertMode::Explicit),
                  ParamError);
  CHECK_THROWS_AS(insert_bubble(f, inside, std::int64_t(g.cell_count()),
                                InsertMode::Explicit),
                  ParamError);
}
