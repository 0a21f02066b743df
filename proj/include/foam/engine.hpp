#pragma once

#include <string>
#include <vector>

#include "foam/auction.hpp"
#include "foam/convolution.hpp"
#include "foam/energy.hpp"
#include "foam/fields.hpp"

namespace foam {

struct SimParams {
  double tau = 0.0625;
  AuctionParams auction;
  int max_iters = 5000;
  /// Consecutive zero-change steps required to declare stationarity.
  int stationary_window = 1;
  /// Ramp drivers retarget volumes between legs; the first step then
  /// adapts the labels to the new quotas.
  bool require_initial_feasible = true;

  void validate() const;
};

struct TraceRecord {
  int iter = 0;
  double energy = 0.0;
  std::int64_t cells_changed = 0;
  std::vector<std::int64_t> volumes;
};

struct EnergyTrace {
  std::vector<TraceRecord> records;
  bool initial_feasible = true;
  std::vector<std::string> warnings;
};

struct StepResult {
  LabelField labels;
  std::int64_t cells_changed = 0;
  std::vector<double> lambda;
};

/// One threshold-dynamics iteration: diffuse every phase indicator, then
/// solve the volume-constrained thresholding by auction. Output volumes
/// meet the targets exactly; the kernel energy never increases.
StepResult mbo_step(const LabelField& labels, const GaussianKernel& kernel,
                    const VolumeTargets& targets, const SimParams& params);

struct EvolveResult {
  LabelField labels;
  EnergyTrace trace;
  bool converged = false;
  int iterations = 0;
};

/// Iterates mbo_step until no cell changes membership (stationarity), a
/// period-2 cycle is detected, or max_iters is hit. The trace carries one
/// record per state including the initial one.
EvolveResult evolve(LabelField labels, const GaussianKernel& kernel,
                    const VolumeTargets& targets, const SimParams& params);

}  // namespace foam
