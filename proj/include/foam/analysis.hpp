#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "foam/fields.hpp"

namespace foam {

struct AnalysisParams {
  /// Smoothing time for sub-cell interface location; 0 picks (2h)^2.
  double tau_smooth = 0.0;
  /// Points per chain end used to fit the junction tangent.
  int tangent_window = 8;
  /// Chain points closer than this to a junction are excluded from the
  /// tangent fits; the stationary geometry is rounded off at the diffusion
  /// scale there, so angles come from the extrapolated clean curve.
  /// 0 picks 6 * sqrt(tau_smooth). Set to ~1.5 * sqrt(simulation tau) when
  /// analyzing states produced at a coarser tau.
  double junction_guard = 0.0;

  double resolve_tau(const Grid& g) const;
  double resolve_guard(const Grid& g) const;
};

/// A polyline along the (a,b) interface, sub-cell accurate. Open chains
/// carry the ids of the junctions they terminate at (-1 for a free end at
/// the domain border).
struct Chain {
  int phase_a = 0, phase_b = 0;  // a < b
  std::vector<std::array<double, 2>> points;
  bool closed = false;
  int junction_start = -1, junction_end = -1;
  double length = 0.0;

  // Fitted geometry: a circle (center, radius) or a line through
  // line_point along line_dir; residual is the RMS point distance.
  bool is_line = false;
  std::array<double, 2> circle_center{0, 0};
  double circle_radius = 0.0;
  std::array<double, 2> line_point{0, 0};
  std::array<double, 2> line_dir{1, 0};
  double fit_residual = 0.0;
};

struct Junction2D {
  std::array<double, 2> position{0, 0};
  std::vector<int> phases;      // distinct incident phases
  std::vector<int> chain_ends;  // encoded chain_id * 2 + (end ? 1 : 0)
};

struct InterfaceSet {
  Grid geom;
  std::vector<Chain> chains;
  std::vector<Junction2D> junctions;
  double total_length = 0.0;
};

InterfaceSet extract_interfaces_2d(const LabelField& labels,
                                   const AnalysisParams& params = {});

struct JunctionAngles {
  int junction_id = 0;
  std::array<double, 2> position{0, 0};
  std::vector<int> phases;
  std::vector<double> angles_deg;  // gaps between adjacent tangents
  bool flagged_multi = false;      // more than 3 incident phases
};

struct JunctionReport {
  std::vector<JunctionAngles> junctions;
};

JunctionReport junction_angles_2d(const InterfaceSet& interfaces,
                                  const AnalysisParams& params = {});

struct PerimeterReport {
  double total = 0.0;
  std::map<std::pair<int, int>, double> per_pair;
};

PerimeterReport geometric_perimeter(const LabelField& labels,
                                    const AnalysisParams& params = {});

double geometric_area(const LabelField& labels, int phase);

struct IsoperimetricResult {
  double ratio = 0.0;
  bool connected = true;
};

/// Perimeter^2 / Area of one phase from the geometric estimators (4*pi for
/// a disc). Disconnected phases are flagged, not rejected.
IsoperimetricResult isoperimetric_ratio(const LabelField& labels, int phase,
                                        const AnalysisParams& params = {});

/// Bubbles sharing no face with the complement phase.
int interior_bubble_count(const LabelField& labels);

struct PlateauStats3D {
  int triple_samples = 0;
  std::vector<double> dihedral_angles_deg;
  double dihedral_mean = 0.0, dihedral_median = 0.0, dihedral_stddev = 0.0;
  int quad_vertices = 0;
  std::vector<double> tetra_angles_deg;
  double tetra_mean = 0.0, tetra_median = 0.0;
  bool flagged_insufficient = false;
};

/// Samples triple lines (cells whose 3^3 neighborhood holds exactly three
/// phases), estimates the three sheet normals from smoothed-indicator
/// gradients, and reports the pairwise angle statistics; near four-phase
/// vertices it also reports the border-tangent angles.
PlateauStats3D plateau_border_angles_3d(const LabelField& labels,
                                        const AnalysisParams& params = {});

}  // namespace foam
