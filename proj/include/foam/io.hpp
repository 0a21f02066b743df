#pragma once

#include <filesystem>
#include <string>

#include "foam/engine.hpp"
#include "foam/fields.hpp"
#include "foam/flows.hpp"

namespace foam {

enum class ExportFormat {
  P2,   // 2D plain-text graymap, gray level = 1-based phase id
  Vtk,  // 3D legacy ASCII structured points, one phase id per voxel
  Raw,  // self-describing binary snapshot, round-trips exactly
};

ExportFormat parse_format(const std::string& name);

void export_labels(const LabelField& labels, const std::filesystem::path& path,
                   ExportFormat fmt);

/// Reads a Raw snapshot (magic "FOAMLBL1").
LabelField import_labels(const std::filesystem::path& path);

/// trace CSV schema: iter,energy,cells_changed,vol_1..vol_{n+1}
void write_trace_csv(const std::filesystem::path& path, const EnergyTrace& t);

/// ramp CSV schema: leg,volume_cells,energy,iters,transition_flag
void write_ramp_csv(const std::filesystem::path& path,
                    const std::vector<RampRecord>& records);

}  // namespace foam
