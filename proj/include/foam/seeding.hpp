#pragma once

#include <array>
#include <cstdint>

#include "foam/auction.hpp"
#include "foam/convolution.hpp"
#include "foam/fields.hpp"

namespace foam {

/// Random volume-feasible initial partition: a random n-Voronoi tessellation
/// of an inner sub-box, mass-equalized relaxed memberships (1 / region
/// volume), then one diffusion + auction pass onto the exact targets.
/// PRNG is mt19937_64 with explicit 53-bit uniforms; identical seeds give
/// identical fields on any platform.
struct SeedSpec {
  int n_bubbles = 1;
  /// Linear fraction of the domain covered by the centered inner box.
  double inner_fraction = 0.6;
  std::uint64_t rng_seed = 0;
  VolumeTargets volumes;

  void validate(const Grid& g) const;
};

LabelField random_voronoi_init(const Grid& g, const SeedSpec& spec,
                               const GaussianKernel& kernel,
                               const AuctionParams& auction);

enum class InsertMode {
  Explicit,          // carve around the given position
  ClusterBoundary,   // snap to the nearest complement cell touching a bubble
};

/// Adds a new bubble phase of exactly v_cells carved from the complement
/// (the v nearest complement cells, ties by cell index). All existing
/// phase volumes are untouched; the new bubble becomes the last bubble
/// index and the complement stays last.
LabelField insert_bubble(const LabelField& labels,
                         std::array<double, 3> position, std::int64_t v_cells,
                         InsertMode where = InsertMode::Explicit);

}  // namespace foam
