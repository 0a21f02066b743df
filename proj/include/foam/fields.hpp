#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "foam/grid.hpp"

namespace foam {

/// Integer phase partition: one label per cell, labels in [0, n_phases),
/// the complement phase last. Encodes u_i(x) in {0,1} with sum_i u_i = 1.
struct LabelField {
  Grid geom;
  int n_phases = 0;
  std::vector<std::uint16_t> labels;

  static LabelField uniform(const Grid& g, int n_phases, std::uint16_t fill = 0);

  int complement() const { return n_phases - 1; }
  std::int64_t cell_count() const { return geom.cell_count(); }

  /// Integer cell tally per phase (exact volumes, in cells).
  std::vector<std::int64_t> phase_counts() const;

  /// Throws ConfigError when labels are out of range or sizes disagree.
  void validate() const;

  bool operator==(const LabelField&) const = default;
};

/// One real value per cell per phase, phase-major (each phase contiguous).
/// Serves both the relaxed memberships (SoftField) and the diffusion
/// coefficients Phi_i (ScoreField).
struct MultiField {
  Grid geom;
  int n_phases = 0;
  std::vector<double> data;

  static MultiField zeros(const Grid& g, int n_phases);

  std::span<double> phase(int p) {
    auto n = geom.cell_count();
    return {data.data() + p * n, size_t(n)};
  }
  std::span<const double> phase(int p) const {
    auto n = geom.cell_count();
    return {data.data() + p * n, size_t(n)};
  }
};

using ScoreField = MultiField;
using SoftField = MultiField;

/// 1.0 on cells labeled `phase`, 0.0 elsewhere. Phase index is 0-based;
/// out of range throws ParamError.
std::vector<double> phase_indicator(const LabelField& f, int phase);

/// Max per-cell deviation of sum_i values from 1 (partition-of-unity check
/// for fields claiming membership in the relaxed constraint set).
double partition_defect(const MultiField& f);

}  // namespace foam
