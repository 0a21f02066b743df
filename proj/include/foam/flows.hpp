#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "foam/engine.hpp"
#include "foam/seeding.hpp"

namespace foam {

struct InsertionEvent {
  std::array<double, 3> position{0, 0, 0};
  std::int64_t v_cells = 0;
  InsertMode where = InsertMode::ClusterBoundary;
};

/// Quasi-stationary ramp: the target bubble's quota moves by dv_cells per
/// leg (the complement absorbs the difference) and the foam relaxes to
/// stationarity after every increment. When an up-ramp reaches v_end the
/// next insertion event (if any) adds a fresh bubble which becomes the new
/// ramp target.
struct FlowSchedule {
  enum class Direction { Up, Down, UpDown };
  int target_phase = 0;  // bubble index
  std::int64_t dv_cells = 1;
  std::int64_t v_start_cells = 1;
  std::int64_t v_end_cells = 1;
  Direction direction = Direction::Up;
  std::vector<InsertionEvent> insertions;
  /// Abort on a non-converged leg instead of flagging and continuing.
  bool abort_on_stall = false;

  void validate() const;
};

struct RampRecord {
  int leg = 0;
  int target_phase = 0;
  std::int64_t volume_cells = 0;
  double energy = 0.0;
  int iterations = 0;
  bool converged = true;
  bool transition = false;
  std::int64_t cells_moved = 0;  // total membership changes during the leg
};

struct RampResult {
  std::vector<RampRecord> records;
  LabelField labels;
  VolumeTargets targets;
};

/// Optional per-leg observer; receives the stationary state of each leg.
using RampSink =
    std::function<void(const RampRecord&, const LabelField&, const VolumeTargets&)>;

RampResult quasi_static_ramp(LabelField labels, VolumeTargets targets,
                             const FlowSchedule& schedule,
                             const GaussianKernel& kernel,
                             const SimParams& params, RampSink sink = {});

/// Marks legs whose relaxation moved > 5x the neighborhood median of cell
/// changes or whose stationary energy jumps > 10x the local slope.
void detect_transitions(std::vector<RampRecord>& records);

struct DedupParams {
  double energy_rtol = 1e-3;
  double overlap_min = 0.95;
};

struct SearchCandidate {
  LabelField labels;
  double energy = 0.0;
  int multiplicity = 0;    // restarts that landed on this configuration
  int first_restart = 0;   // index of the first seed that found it
};

struct SearchResult {
  std::vector<SearchCandidate> candidates;  // ascending energy
  int non_converged = 0;
};

/// Evolves one random initialization per seed and deduplicates the
/// stationary states by energy gap plus best-permutation label overlap
/// after centroid alignment. Restarts are independent and run in parallel.
SearchResult multi_restart_search(const Grid& g, int n_bubbles,
                                  const VolumeTargets& volumes,
                                  std::span<const std::uint64_t> seeds,
                                  const GaussianKernel& kernel,
                                  const SimParams& params,
                                  double inner_fraction = 0.6,
                                  const DedupParams& dedup = {});

/// Fraction of bubble cells of `a` matching `b` under the best bubble
/// permutation after aligning foam centroids (whole-cell shifts).
double configuration_overlap(const LabelField& a, const LabelField& b);

}  // namespace foam
