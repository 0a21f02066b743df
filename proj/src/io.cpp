#include "foam/io.hpp"

#include <cstring>
#include <fstream>

#include "foam/errors.hpp"

namespace foam {

namespace {

constexpr char kMagic[9] = "FOAMLBL1";

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

void export_p2(const LabelField& f, const std::filesystem::path& path) {
  if (f.geom.rank != 2) throw IoError("P2 export needs a 2D field");
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  const int h = f.geom.dims[0], w = f.geom.dims[1];
  os << "P2\n" << w << " " << h << "\n" << f.n_phases << "\n";
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (c) os << " ";
      os << int(f.labels[size_t(f.geom.index(r, c))]) + 1;
    }
    os << "\n";
  }
  if (!os) throw IoError("write failed: " + path.string());
}

void export_vtk(const LabelField& f, const std::filesystem::path& path) {
  if (f.geom.rank != 3) throw IoError("VTK export needs a 3D field");
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  const auto& g = f.geom;
  // axis 2 varies fastest in our storage, so it maps to VTK's x axis
  os << "# vtk DataFile Version 3.0\n";
  os << "foamlab phase labels\n";
  os << "ASCII\n";
  os << "DATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << g.dims[2] << " " << g.dims[1] << " " << g.dims[0]
     << "\n";
  os << "ORIGIN " << g.origin[2] << " " << g.origin[1] << " " << g.origin[0]
     << "\n";
  os << "SPACING " << g.spacing[2] << " " << g.spacing[1] << " "
     << g.spacing[0] << "\n";
  os << "POINT_DATA " << g.cell_count() << "\n";
  os << "SCALARS phase int 1\n";
  os << "LOOKUP_TABLE default\n";
  for (auto l : f.labels) os << int(l) + 1 << "\n";
  if (!os) throw IoError("write failed: " + path.string());
}

void export_raw(const LabelField& f, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os.write(kMagic, 8);
  put<std::uint32_t>(os, std::uint32_t(f.geom.rank));
  for (int a = 0; a < f.geom.rank; ++a)
    put<std::uint32_t>(os, std::uint32_t(f.geom.dims[a]));
  for (int a = 0; a < f.geom.rank; ++a) put<double>(os, f.geom.spacing[a]);
  put<std::uint32_t>(os, std::uint32_t(f.n_phases));
  for (auto l : f.labels) put<std::uint16_t>(os, std::uint16_t(l + 1));
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace

ExportFormat parse_format(const std::string& name) {
  if (name == "p2") return ExportFormat::P2;
  if (name == "vtk") return ExportFormat::Vtk;
  if (name == "raw") return ExportFormat::Raw;
  throw ParamError("unknown export format: " + name);
}

void export_labels(const LabelField& labels, const std::filesystem::path& path,
                   ExportFormat fmt) {
  // sizes and ranges only: exports of sub-simulation grids are legal
  if (std::int64_t(labels.labels.size()) != labels.geom.cell_count())
    throw ConfigError("label array size does not match grid");
  for (auto l : labels.labels)
    if (l >= labels.n_phases) throw ConfigError("label out of range");
  switch (fmt) {
    case ExportFormat::P2:
      export_p2(labels, path);
      break;
    case ExportFormat::Vtk:
      export_vtk(labels, path);
      break;
    case ExportFormat::Raw:
      export_raw(labels, path);
      break;
  }
}

LabelField import_labels(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("not a foamlab snapshot: " + path.string());
  LabelField f;
  f.geom.rank = int(get<std::uint32_t>(is));
  if (f.geom.rank != 2 && f.geom.rank != 3)
    throw IoError("snapshot has invalid rank");
  f.geom.dims = {1, 1, 1};
  for (int a = 0; a < f.geom.rank; ++a)
    f.geom.dims[a] = int(get<std::uint32_t>(is));
  f.geom.spacing = {1.0, 1.0, 1.0};
  for (int a = 0; a < f.geom.rank; ++a) f.geom.spacing[a] = get<double>(is);
  for (int a = 0; a < f.geom.rank; ++a)
    f.geom.origin[a] = f.geom.spacing[a] / 2;
  f.geom.origin[2] = f.geom.rank == 2 ? 0.0 : f.geom.origin[2];
  f.n_phases = int(get<std::uint32_t>(is));
  f.labels.resize(size_t(f.geom.cell_count()));
  for (auto& l : f.labels) {
    std::uint16_t v = get<std::uint16_t>(is);
    if (v < 1) throw IoError("snapshot phase id out of range");
    l = std::uint16_t(v - 1);
  }
  if (!is) throw IoError("snapshot truncated: " + path.string());
  for (auto l : f.labels)
    if (l >= f.n_phases) throw IoError("snapshot phase id out of range");
  return f;
}

void write_trace_csv(const std::filesystem::path& path, const EnergyTrace& t) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "iter,energy,cells_changed";
  const size_t np = t.records.empty() ? 0 : t.records.front().volumes.size();
  for (size_t p = 1; p <= np; ++p) os << ",vol_" << p;
  os << "\n";
  os.precision(17);
  for (const auto& r : t.records) {
    os << r.iter << "," << r.energy << "," << r.cells_changed;
    for (auto v : r.volumes) os << "," << v;
    os << "\n";
  }
  if (!os) throw IoError("write failed: " + path.string());
}

void write_ramp_csv(const std::filesystem::path& path,
                    const std::vector<RampRecord>& records) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "leg,volume_cells,energy,iters,transition_flag\n";
  os.precision(17);
  for (const auto& r : records)
    os << r.leg << "," << r.volume_cells << "," << r.energy << ","
       << r.iterations << "," << (r.transition ? 1 : 0) << "\n";
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace foam
