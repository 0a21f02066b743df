#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "foam/auction.hpp"
#include "foam/engine.hpp"
#include "foam/fields.hpp"

namespace foamtest {

using namespace foam;

// ---- constructed fields -------------------------------------------------

/// Two phases split by a vertical line at column fraction `frac` (phase 0
/// left of it). One interface chain only: the wrap seam is skipped by the
/// extractor and the left/right edges coincide there.
inline LabelField half_split(const Grid& g, double frac = 0.5) {
  LabelField f = LabelField::uniform(g, 2, 0);
  const int cut = int(std::lround(g.dims[1] * frac));
  for (int r = 0; r < g.dims[0]; ++r)
    for (int c = 0; c < g.dims[1]; ++c)
      f.labels[size_t(g.index(r, c))] = c < cut ? 0 : 1;
  return f;
}

/// Disc of radius `rad` centered at `cx, cy` (phase 0), complement phase 1.
inline LabelField disc_field(const Grid& g, double cx, double cy, double rad) {
  LabelField f = LabelField::uniform(g, 2, 1);
  for (int r = 0; r < g.dims[0]; ++r)
    for (int c = 0; c < g.dims[1]; ++c) {
      double x = g.origin[0] + r * g.spacing[0] - cx;
      double y = g.origin[1] + c * g.spacing[1] - cy;
      if (x * x + y * y <= rad * rad) f.labels[size_t(g.index(r, c))] = 0;
    }
  return f;
}

/// Ball of radius `rad` (phase 0) in 3D, complement phase 1.
inline LabelField ball_field(const Grid& g, std::array<double, 3> c0,
                             double rad) {
  LabelField f = LabelField::uniform(g, 2, 1);
  for (std::int64_t x = 0; x < g.cell_count(); ++x) {
    auto p = g.cell_center(x);
    double d2 = 0;
    for (int a = 0; a < 3; ++a) d2 += (p[a] - c0[a]) * (p[a] - c0[a]);
    if (d2 <= rad * rad) f.labels[size_t(x)] = 0;
  }
  return f;
}

inline VolumeTargets targets_of(const LabelField& f) {
  return VolumeTargets{f.phase_counts()};
}

// ---- oracles ------------------------------------------------------------

/// 1D Gaussian smoothing of a step: (G_tau * 1_{x<0})(d) = erfc(d/2√tau)/2.
inline double erf_profile(double signed_distance, double tau) {
  return 0.5 * std::erfc(signed_distance / (2.0 * std::sqrt(tau)));
}

/// Closed-form standard double bubble (2D, equal areas A per bubble):
/// two 240-degree arcs of radius R plus a straight chord of length sqrt(3)R,
/// where A = R^2 (2 pi / 3 + sqrt(3)/4).
inline double double_bubble_radius(double area) {
  return std::sqrt(area / (2.0 * M_PI / 3.0 + std::sqrt(3.0) / 4.0));
}
inline double double_bubble_perimeter(double area) {
  return double_bubble_radius(area) * (8.0 * M_PI / 3.0 + std::sqrt(3.0));
}

/// Independent check of the closed form: build the analytic shape as a
/// polygon and measure it (shoelace area, polyline length).
inline void double_bubble_polygon_measure(double R, double& area_out,
                                          double& perimeter_out) {
  // right lobe: circle center (R/2, 0), arc from -120 to 120 degrees
  const int K = 20000;
  std::vector<std::array<double, 2>> poly;
  for (int k = 0; k <= K; ++k) {
    double th = -2.0 * M_PI / 3.0 + (4.0 * M_PI / 3.0) * k / K;
    poly.push_back({R / 2 + R * std::cos(th), R * std::sin(th)});
  }
  // close along the chord x=0 from (0, sqrt(3)R/2) to (0, -sqrt(3)R/2)
  double area2 = 0, per = 0, chord = 0;
  for (size_t i = 0; i + 1 < poly.size(); ++i) {
    area2 += poly[i][0] * poly[i + 1][1] - poly[i + 1][0] * poly[i][1];
    per += std::hypot(poly[i + 1][0] - poly[i][0], poly[i + 1][1] - poly[i][1]);
  }
  auto& last = poly.back();
  auto& first = poly.front();
  area2 += last[0] * first[1] - first[0] * last[1];
  chord = std::hypot(first[0] - last[0], first[1] - last[1]);
  area_out = std::abs(area2) / 2;
  // full bubble pair: two arcs plus one shared chord
  perimeter_out = 2 * per + chord;
}

/// Brute-force feasible-assignment optimum: maximizes sum of chosen scores
/// over every labeling meeting the targets exactly. Scores are cell-major.
inline double brute_force_best(const std::vector<double>& scores_cell_major,
                               int n_phases,
                               const std::vector<std::int64_t>& targets) {
  const int n = int(scores_cell_major.size()) / n_phases;
  std::vector<std::int64_t> left = targets;
  double best = -1e300;
  std::vector<int> lab(size_t(n), -1);
  auto rec = [&](auto&& self, int cell, double acc) -> void {
    if (cell == n) {
      best = std::max(best, acc);
      return;
    }
    for (int p = 0; p < n_phases; ++p) {
      if (left[size_t(p)] == 0) continue;
      --left[size_t(p)];
      self(self, cell + 1, acc + scores_cell_major[size_t(cell) * n_phases + p]);
      ++left[size_t(p)];
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

inline ScoreField scores_from_cell_major(const Grid& g, int n_phases,
                                         const std::vector<double>& cm) {
  ScoreField s = MultiField::zeros(g, n_phases);
  const std::int64_t n = g.cell_count();
  for (int p = 0; p < n_phases; ++p)
    for (std::int64_t x = 0; x < n; ++x)
      s.phase(p)[size_t(x)] = cm[size_t(x) * n_phases + p];
  return s;
}

/// Grid that carries auction instances of n cells (geometry is irrelevant
/// to the solver, only the cell count matters).
inline Grid row_grid(int n) {
  Grid g;
  g.rank = 2;
  g.dims = {n, 4, 1};
  g.spacing = {1.0, 1.0, 1.0};
  g.origin = {0.5, 0.5, 0.0};
  return g;
}

// ---- checked evolve -----------------------------------------------------

struct CheckedEvolve {
  EvolveResult result;
  double max_energy_uptick = 0.0;  // relative
  bool volumes_exact = true;
};

/// evolve() plus the two engine invariants: exact volume conservation at
/// every record and non-increasing energy (1e-9 relative slack).
inline CheckedEvolve evolve_checked(LabelField labels,
                                    const GaussianKernel& kernel,
                                    const VolumeTargets& targets,
                                    const SimParams& params) {
  CheckedEvolve out;
  out.result = evolve(std::move(labels), kernel, targets, params);
  const auto& recs = out.result.trace.records;
  const size_t first = out.result.trace.initial_feasible ? 0 : 1;
  for (size_t i = first; i < recs.size(); ++i) {
    for (int p = 0; p < int(targets.counts.size()); ++p)
      if (recs[i].volumes[size_t(p)] != targets.counts[size_t(p)])
        out.volumes_exact = false;
    if (i > first) {
      double prev = recs[i - 1].energy;
      double up = (recs[i].energy - prev) / std::max(1.0, std::abs(prev));
      out.max_energy_uptick = std::max(out.max_energy_uptick, up);
    }
  }
  return out;
}

}  // namespace foamtest
