#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "foam/fields.hpp"

namespace foam {

/// Membership-auction controls. eps_bar = eps_min / (cell count) is the
/// stopping level; the bidding increment is divided by alpha per round.
struct AuctionParams {
  double eps0 = 0.25;
  double alpha = 4.0;
  double eps_min = 1e-6;

  /// After an eviction the phase price is the minimum stored bid. The
  /// pseudocode leaves open whether the evicted bid is removed before the
  /// min is taken; default removes it (PostEviction). PreEviction uses the
  /// evicted cell's bid itself.
  enum class LambdaUpdate { PostEviction, PreEviction };
  LambdaUpdate lambda_update = LambdaUpdate::PostEviction;

  /// Bids allowed per epsilon round; 0 picks max(1e6, 500 * cells).
  std::uint64_t bid_round_cap = 0;

  void validate() const;
  double eps_bar(std::int64_t n_cells) const { return eps_min / double(n_cells); }
};

/// Exact integer cell quota per phase; the complement (last phase) absorbs
/// whatever the bubbles do not claim.
struct VolumeTargets {
  std::vector<std::int64_t> counts;

  /// Largest-remainder conversion of real bubble volumes to cell counts.
  static VolumeTargets from_volumes(const Grid& g,
                                    std::span<const double> bubble_volumes);

  int n_phases() const { return int(counts.size()); }
  std::int64_t total() const;
  /// Throws ParamError unless all counts >= 0 and they sum to n_cells.
  void validate(std::int64_t n_cells) const;
};

struct AuctionResult {
  LabelField labels;
  std::vector<double> lambda;
  double eps_final = 0.0;
  std::uint64_t total_bids = 0;
  int rounds = 0;
};

/// Strictly decreasing geometric sequence eps0, eps0/alpha, ... ending at
/// the first value below eps_bar; the auction runs one round per entry.
std::vector<double> epsilon_schedule(const AuctionParams& params,
                                     std::int64_t n_cells);

/// Volume-constrained thresholding: assigns every cell to a phase so that
/// each phase meets its quota exactly and, at the final epsilon, every cell
/// satisfies  Phi_i(x) - lambda_i >= Phi_j(x) - lambda_j - eps  for its
/// assigned i and all j. Deterministic: cells are processed in row-major
/// order (evictions re-queued at the tail), argmax ties break to the lowest
/// phase index, eviction ties to the lowest cell index.
AuctionResult assign(const ScoreField& scores, const VolumeTargets& targets,
                     const AuctionParams& params);

}  // namespace foam
