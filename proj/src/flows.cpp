#include "foam/flows.hpp"

#include <algorithm>
#include <cmath>

#include "foam/errors.hpp"
#include "foam/par.hpp"

namespace foam {

void FlowSchedule::validate() const {
  if (dv_cells < 1) throw ParamError("ramp dv must be >= 1 cell");
  if (v_start_cells < 1 || v_end_cells < 1)
    throw ParamError("ramp volumes must be >= 1 cell");
  if (target_phase < 0) throw ParamError("ramp target phase must be a bubble");
}

namespace {

// One relaxation after a quota change. The first step adapts the labels to
// the new targets, so the engine's feasibility precheck is waived.
RampRecord relax_leg(LabelField& labels, const VolumeTargets& targets,
                     const GaussianKernel& kernel, const SimParams& params,
                     int leg, int phase) {
  SimParams leg_params = params;
  leg_params.require_initial_feasible = false;
  auto ev = evolve(std::move(labels), kernel, targets, leg_params);
  labels = std::move(ev.labels);

  RampRecord rec;
  rec.leg = leg;
  rec.target_phase = phase;
  rec.volume_cells = targets.counts[size_t(phase)];
  rec.energy = ev.trace.records.back().energy;
  rec.iterations = ev.iterations;
  rec.converged = ev.converged;
  for (const auto& r : ev.trace.records) rec.cells_moved += r.cells_changed;
  return rec;
}

}  // namespace

RampResult quasi_static_ramp(LabelField labels, VolumeTargets targets,
                             const FlowSchedule& schedule,
                             const GaussianKernel& kernel,
                             const SimParams& params, RampSink sink) {
  schedule.validate();
  params.validate();
  labels.validate();
  const int comp = labels.complement();
  if (schedule.target_phase >= comp)
    throw ParamError("ramp target must be a bubble phase");

  RampResult out;
  int leg = 0;
  int phase = schedule.target_phase;
  std::int64_t ramp_from = schedule.v_start_cells;
  size_t next_insertion = 0;

  auto retarget = [&](std::int64_t v) {
    const int c = labels.complement();
    std::int64_t delta = v - targets.counts[size_t(phase)];
    if (targets.counts[size_t(c)] - delta < 0)
      throw ParamError("ramp infeasible: complement exhausted");
    targets.counts[size_t(phase)] = v;
    targets.counts[size_t(c)] -= delta;
  };

  auto run_leg = [&](std::int64_t v) {
    retarget(v);
    auto rec = relax_leg(labels, targets, kernel, params, leg++, phase);
    if (!rec.converged && schedule.abort_on_stall)
      throw ConvergenceError("ramp leg failed to reach stationarity");
    out.records.push_back(rec);
    if (sink) sink(out.records.back(), labels, targets);
  };

  auto sweep = [&](std::int64_t from, std::int64_t to) {
    if (from == to) return;
    const std::int64_t step = to > from ? schedule.dv_cells : -schedule.dv_cells;
    std::int64_t v = from;
    while (v != to) {
      v = step > 0 ? std::min(v + step, to) : std::max(v + step, to);
      run_leg(v);
    }
  };

  // Establish the starting volume for the ramped bubble.
  if (targets.counts[size_t(phase)] != schedule.v_start_cells)
    run_leg(schedule.v_start_cells);

  for (;;) {
    switch (schedule.direction) {
      case FlowSchedule::Direction::Up:
      case FlowSchedule::Direction::Down:
        sweep(ramp_from, schedule.v_end_cells);
        break;
      case FlowSchedule::Direction::UpDown:
        sweep(ramp_from, schedule.v_end_cells);
        sweep(schedule.v_end_cells, ramp_from);
        break;
    }
    if (next_insertion >= schedule.insertions.size()) break;
    const auto& ev = schedule.insertions[next_insertion++];
    labels = insert_bubble(labels, ev.position, ev.v_cells, ev.where);
    // the fresh bubble becomes the ramp target at its inserted volume;
    // the complement supplied its cells
    phase = labels.complement() - 1;
    ramp_from = ev.v_cells;
    VolumeTargets grown;
    grown.counts = targets.counts;
    grown.counts.back() -= ev.v_cells;
    grown.counts.insert(grown.counts.end() - 1, ev.v_cells);
    targets = std::move(grown);
    auto rec = relax_leg(labels, targets, kernel, params, leg++, phase);
    out.records.push_back(rec);
    if (sink) sink(out.records.back(), labels, targets);
  }

  detect_transitions(out.records);
  out.labels = std::move(labels);
  out.targets = std::move(targets);
  return out;
}

void detect_transitions(std::vector<RampRecord>& records) {
  const int n = int(records.size());
  if (n < 3) return;
  const int w = 5;
  for (int i = 0; i < n; ++i) {
    // neighborhood medians excluding leg i
    std::vector<double> moved, slopes;
    for (int j = std::max(0, i - w); j < std::min(n, i + w + 1); ++j) {
      if (j == i) continue;
      moved.push_back(double(records[size_t(j)].cells_moved));
      if (j > 0)
        slopes.push_back(std::abs(records[size_t(j)].energy -
                                  records[size_t(j) - 1].energy));
    }
    auto median = [](std::vector<double> v) {
      if (v.empty()) return 0.0;
      std::sort(v.begin(), v.end());
      return v[v.size() / 2];
    };
    const double med_moved = median(moved);
    const double med_slope = median(slopes);
    bool flag = false;
    if (med_moved > 0 &&
        double(records[size_t(i)].cells_moved) > 5.0 * med_moved)
      flag = true;
    if (i > 0) {
      double jump =
          std::abs(records[size_t(i)].energy - records[size_t(i) - 1].energy);
      if (med_slope > 0 && jump > 10.0 * med_slope) flag = true;
    }
    records[size_t(i)].transition = flag;
  }
}

namespace {

struct FoamFrame {
  std::array<double, 3> centroid{0, 0, 0};
  double principal_angle = 0.0;  // 2D second-moment axis
  std::int64_t bubble_cells = 0;
};

FoamFrame foam_frame(const LabelField& f) {
  const int comp = f.complement();
  FoamFrame fr;
  const std::int64_t total = f.cell_count();
  for (std::int64_t x = 0; x < total; ++x) {
    if (f.labels[size_t(x)] == comp) continue;
    auto p = f.geom.coords(x);
    for (int a = 0; a < 3; ++a) fr.centroid[a] += p[a];
    ++fr.bubble_cells;
  }
  if (fr.bubble_cells == 0) return fr;
  for (int a = 0; a < 3; ++a) fr.centroid[a] /= double(fr.bubble_cells);
  if (f.geom.rank == 2) {
    double mxx = 0, mxy = 0, myy = 0;
    for (std::int64_t x = 0; x < total; ++x) {
      if (f.labels[size_t(x)] == comp) continue;
      auto p = f.geom.coords(x);
      double dx = p[0] - fr.centroid[0], dy = p[1] - fr.centroid[1];
      mxx += dx * dx;
      mxy += dx * dy;
      myy += dy * dy;
    }
    fr.principal_angle = 0.5 * std::atan2(2 * mxy, mxx - myy);
  }
  return fr;
}

/// Overlap of bubble labels under one rigid candidate map from a's frame
/// into b's, followed by the best bubble permutation (solved with the
/// auction on the overlap matrix).
double overlap_under_map(const LabelField& a, const LabelField& b,
                         const FoamFrame& fa, const FoamFrame& fb,
                         double dtheta, bool mirror) {
  const Grid& g = a.geom;
  const int nb = a.n_phases - 1;
  const int comp = a.complement();
  const double c = std::cos(dtheta), s = std::sin(dtheta);

  std::vector<double> overlap(size_t(nb) * nb, 0.0);
  const std::int64_t total = g.cell_count();
  for (std::int64_t x = 0; x < total; ++x) {
    const int la = a.labels[size_t(x)];
    if (la == comp) continue;
    auto p = g.coords(x);
    double u0 = p[0] - fa.centroid[0];
    double u1 = p[1] - fa.centroid[1];
    if (mirror) u1 = -u1;
    double q0 = fb.centroid[0] + c * u0 - s * u1;
    double q1 = fb.centroid[1] + s * u0 + c * u1;
    double q2 = g.rank == 3 ? p[2] - fa.centroid[2] + fb.centroid[2] : 0.0;
    std::array<int, 3> q{int(std::lround(q0)), int(std::lround(q1)),
                         int(std::lround(q2))};
    bool inside = true;
    for (int ax = 0; ax < g.rank; ++ax)
      if (q[ax] < 0 || q[ax] >= g.dims[ax]) inside = false;
    if (!inside) continue;
    const int lb = b.labels[size_t(g.index(q[0], q[1], q[2]))];
    if (lb == comp) continue;
    overlap[size_t(la) * nb + lb] += 1.0;
  }

  double mx = 0.0;
  for (double v : overlap) mx = std::max(mx, v);
  if (mx == 0.0) return 0.0;
  if (nb == 1) return overlap[0] / double(fa.bubble_cells);

  Grid tiny;
  tiny.rank = 2;
  tiny.dims = {nb, 1, 1};
  tiny.spacing = {1, 1, 1};
  ScoreField sc;
  sc.geom = tiny;
  sc.n_phases = nb;
  sc.data.assign(size_t(nb) * nb, 0.0);
  for (int pa = 0; pa < nb; ++pa)
    for (int pb = 0; pb < nb; ++pb)
      sc.data[size_t(pa) * nb + pb] = overlap[size_t(pa) * nb + pb] / mx;
  AuctionParams ap;
  ap.eps_min = 1e-9;
  VolumeTargets ones;
  ones.counts.assign(size_t(nb), 1);
  auto res = assign(sc, ones, ap);

  double matched = 0.0;
  for (int pb = 0; pb < nb; ++pb) {
    int pa = res.labels.labels[size_t(pb)];
    matched += overlap[size_t(pa) * nb + pb];
  }
  return matched / double(fa.bubble_cells);
}

}  // namespace

double configuration_overlap(const LabelField& a, const LabelField& b) {
  if (!(a.geom == b.geom) || a.n_phases != b.n_phases) return 0.0;
  auto fa = foam_frame(a);
  auto fb = foam_frame(b);
  if (fa.bubble_cells == 0 && fb.bubble_cells == 0) return 1.0;
  if (fa.bubble_cells == 0 || fb.bubble_cells == 0) return 0.0;

  // Stationary foams recur in arbitrary orientation; congruent states must
  // dedupe, so the search covers rotations and reflections: the principal-
  // axis alignments plus a coarse sweep for isotropic configurations.
  std::vector<std::pair<double, bool>> candidates;
  if (a.geom.rank == 2) {
    const double base = fb.principal_angle - fa.principal_angle;
    for (double extra : {0.0, M_PI})
      for (bool mirror : {false, true})
        candidates.push_back({base + extra, mirror});
    for (int k = 0; k < 12; ++k)
      for (bool mirror : {false, true})
        candidates.push_back({k * M_PI / 6.0, mirror});
  } else {
    // 3D states are compared around the vertical axis only; the dedup
    // energy gate carries the rest (configurable thresholds).
    for (int k = 0; k < 12; ++k)
      for (bool mirror : {false, true})
        candidates.push_back({k * M_PI / 6.0, mirror});
  }

  double best = 0.0;
  for (auto [dtheta, mirror] : candidates)
    best = std::max(best, overlap_under_map(a, b, fa, fb, dtheta, mirror));
  return best;
}

SearchResult multi_restart_search(const Grid& g, int n_bubbles,
                                  const VolumeTargets& volumes,
                                  std::span<const std::uint64_t> seeds,
                                  const GaussianKernel& kernel,
                                  const SimParams& params,
                                  double inner_fraction,
                                  const DedupParams& dedup) {
  if (seeds.empty()) throw ParamError("multi_restart_search needs seeds");

  struct Slot {
    bool converged = false;
    double energy = 0.0;
    LabelField labels;
  };
  std::vector<Slot> slots(seeds.size());

  const int n_restarts = int(seeds.size());
#pragma omp parallel for schedule(dynamic) num_threads(par::thread_count())
  for (int r = 0; r < n_restarts; ++r) {
    try {
      SeedSpec spec;
      spec.n_bubbles = n_bubbles;
      spec.inner_fraction = inner_fraction;
      spec.rng_seed = seeds[size_t(r)];
      spec.volumes = volumes;
      auto init = random_voronoi_init(g, spec, kernel, params.auction);
      auto ev = evolve(std::move(init), kernel, volumes, params);
      slots[size_t(r)].converged = ev.converged;
      if (ev.converged) {
        slots[size_t(r)].energy = ev.trace.records.back().energy;
        slots[size_t(r)].labels = std::move(ev.labels);
      }
    } catch (const Error&) {
      // degenerate seed; counted as non-converged
    }
  }

  std::vector<int> order;
  SearchResult out;
  for (int r = 0; r < n_restarts; ++r) {
    if (slots[size_t(r)].converged)
      order.push_back(r);
    else
      ++out.non_converged;
  }
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (slots[size_t(x)].energy != slots[size_t(y)].energy)
      return slots[size_t(x)].energy < slots[size_t(y)].energy;
    return x < y;
  });

  for (int r : order) {
    auto& s = slots[size_t(r)];
    bool merged = false;
    for (auto& cand : out.candidates) {
      const double rel = std::abs(cand.energy - s.energy) /
                         std::max(std::abs(cand.energy), std::abs(s.energy));
      if (rel < dedup.energy_rtol &&
          configuration_overlap(cand.labels, s.labels) > dedup.overlap_min) {
        ++cand.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged)
      out.candidates.push_back({std::move(s.labels), s.energy, 1, r});
  }
  return out;
}

}  // namespace foam
