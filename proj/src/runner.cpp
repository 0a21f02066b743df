#include "foam/runner.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "foam/analysis.hpp"
#include "foam/errors.hpp"
#include "foam/io.hpp"
#include "foam/seeding.hpp"

namespace foam {

namespace {

namespace fs = std::filesystem;

std::string ext_for(const std::string& format) {
  if (format == "p2") return ".pgm";
  if (format == "vtk") return ".vtk";
  return ".foam";
}

void write_resolved_config(const RunConfig& cfg, const fs::path& dir) {
  std::ofstream os(dir / "config.json");
  if (!os) throw IoError("cannot write " + (dir / "config.json").string());
  os << serialize_config(cfg);
}

fs::path prepare_out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output dir " + dir.string());
  write_resolved_config(cfg, dir);
  return dir;
}

void export_both(const LabelField& f, const fs::path& dir,
                 const std::string& stem, const RunConfig& cfg) {
  export_labels(f, dir / (stem + ".foam"), ExportFormat::Raw);
  if (cfg.format != "raw")
    export_labels(f, dir / (stem + ext_for(cfg.format)),
                  parse_format(cfg.format));
}

LabelField seeded_init(const RunConfig& cfg, const GaussianKernel& kernel) {
  SeedSpec spec;
  spec.n_bubbles = int(cfg.volumes.size());
  spec.inner_fraction = cfg.inner_fraction;
  spec.rng_seed = cfg.seed;
  spec.volumes = cfg.targets();
  return random_voronoi_init(cfg.grid(), spec, kernel, cfg.auction);
}

}  // namespace

int cmd_evolve(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const fs::path dir = prepare_out_dir(cfg);
  const Grid g = cfg.grid();
  GaussianKernel kernel(g, cfg.tau);
  auto targets = cfg.targets();

  auto init = seeded_init(cfg, kernel);
  export_both(init, dir, "initial", cfg);

  auto params = cfg.sim_params();
  auto res = evolve(init, kernel, targets, params);
  for (const auto& w : res.trace.warnings) log << "warning: " << w << "\n";

  write_trace_csv(dir / "trace.csv", res.trace);
  if (cfg.snapshot_every > 0) {
    // re-run recording intermediate states at the requested cadence
    LabelField state = init;
    for (int it = 1; it <= res.iterations; ++it) {
      auto step = mbo_step(state, kernel, targets, params);
      state = std::move(step.labels);
      if (it % cfg.snapshot_every == 0) {
        std::ostringstream stem;
        stem << "snap_" << std::setw(5) << std::setfill('0') << it;
        export_both(state, dir, stem.str(), cfg);
      }
      if (step.cells_changed == 0) break;
    }
  }
  export_both(res.labels, dir, "final", cfg);

  log << "evolve: " << (res.converged ? "stationary" : "NOT stationary")
      << " after " << res.iterations << " iterations, energy "
      << res.trace.records.back().energy << "\n";
  return res.converged ? 0 : 3;
}

int cmd_search(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const fs::path dir = prepare_out_dir(cfg);
  const Grid g = cfg.grid();
  GaussianKernel kernel(g, cfg.tau);
  auto targets = cfg.targets();
  auto params = cfg.sim_params();

  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < cfg.restarts; ++r) seeds.push_back(cfg.seed + r);

  auto res = multi_restart_search(g, int(cfg.volumes.size()), targets, seeds,
                                  kernel, params, cfg.inner_fraction);

  std::ofstream os(dir / "candidates.csv");
  if (!os) throw IoError("cannot write candidates.csv");
  os << "rank,energy,multiplicity,first_restart,interior_bubbles\n";
  os.precision(17);
  for (size_t k = 0; k < res.candidates.size(); ++k) {
    const auto& c = res.candidates[k];
    os << k << "," << c.energy << "," << c.multiplicity << ","
       << c.first_restart << "," << interior_bubble_count(c.labels) << "\n";
    std::ostringstream stem;
    stem << "candidate_" << k;
    export_both(c.labels, dir, stem.str(), cfg);
  }
  log << "search: " << res.candidates.size() << " distinct stationary states, "
      << res.non_converged << " non-converged restarts\n";
  return res.candidates.empty() ? 3 : 0;
}

int cmd_ramp(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (!cfg.ramp) throw ConfigError("ramp command needs a ramp section");
  const fs::path dir = prepare_out_dir(cfg);
  const Grid g = cfg.grid();
  GaussianKernel kernel(g, cfg.tau);
  auto targets = cfg.targets();
  auto params = cfg.sim_params();
  auto schedule = cfg.flow_schedule();

  auto init = seeded_init(cfg, kernel);
  auto settle = evolve(init, kernel, targets, params);
  if (!settle.converged) {
    log << "ramp: initial relaxation did not reach stationarity\n";
    return 3;
  }
  export_both(settle.labels, dir, "initial", cfg);

  RampSink sink;
  if (cfg.snapshot_every > 0) {
    sink = [&](const RampRecord& rec, const LabelField& f,
               const VolumeTargets&) {
      if (rec.leg % cfg.snapshot_every == 0) {
        std::ostringstream stem;
        stem << "leg_" << std::setw(5) << std::setfill('0') << rec.leg;
        export_both(f, dir, stem.str(), cfg);
      }
    };
  }

  auto res = quasi_static_ramp(std::move(settle.labels), targets, schedule,
                               kernel, params, sink);
  write_ramp_csv(dir / "ramp.csv", res.records);
  export_both(res.labels, dir, "final", cfg);

  int stalled = 0, transitions = 0;
  for (const auto& r : res.records) {
    stalled += !r.converged;
    transitions += r.transition;
  }
  log << "ramp: " << res.records.size() << " legs, " << transitions
      << " transitions, " << stalled << " stalled legs\n";
  return stalled == 0 ? 0 : 3;
}

int cmd_analyze(const RunConfig& cfg, const std::filesystem::path& snapshot,
                std::ostream& log) {
  auto labels = import_labels(snapshot);
  GaussianKernel kernel(labels.geom, cfg.tau);
  auto energy = total_energy(labels, kernel);

  nlohmann::json rep;
  rep["snapshot"] = snapshot.string();
  rep["n_phases"] = labels.n_phases;
  rep["tau"] = cfg.tau;
  rep["energy_total"] = energy.total;
  rep["interior_bubbles"] = interior_bubble_count(labels);
  auto counts = labels.phase_counts();
  rep["phase_cells"] = counts;
  std::vector<double> areas;
  for (int p = 0; p < labels.n_phases; ++p)
    areas.push_back(double(counts[size_t(p)]) * labels.geom.cell_volume());
  rep["phase_volumes"] = areas;

  if (labels.geom.rank == 2) {
    AnalysisParams ap;
    auto per = geometric_perimeter(labels, ap);
    rep["geometric_perimeter"] = per.total;
    nlohmann::json pairs = nlohmann::json::array();
    for (auto& [pq, len] : per.per_pair)
      pairs.push_back({{"a", pq.first + 1}, {"b", pq.second + 1}, {"length", len}});
    rep["interfaces"] = pairs;
    auto set = extract_interfaces_2d(labels, ap);
    auto junctions = junction_angles_2d(set, ap);
    nlohmann::json js = nlohmann::json::array();
    for (auto& j : junctions.junctions) {
      nlohmann::json o;
      o["position"] = j.position;
      o["angles_deg"] = j.angles_deg;
      o["n_phases"] = j.phases.size();
      o["flagged_multi"] = j.flagged_multi;
      js.push_back(o);
    }
    rep["junctions"] = js;
    nlohmann::json iso = nlohmann::json::array();
    for (int p = 0; p + 1 < labels.n_phases; ++p) {
      auto r = isoperimetric_ratio(labels, p, ap);
      iso.push_back({{"phase", p + 1},
                     {"ratio", r.ratio},
                     {"connected", r.connected}});
    }
    rep["isoperimetric"] = iso;
  } else {
    auto stats = plateau_border_angles_3d(labels);
    rep["plateau"] = {{"triple_samples", stats.triple_samples},
                      {"dihedral_mean", stats.dihedral_mean},
                      {"dihedral_median", stats.dihedral_median},
                      {"dihedral_stddev", stats.dihedral_stddev},
                      {"quad_vertices", stats.quad_vertices},
                      {"tetra_median", stats.tetra_median},
                      {"insufficient", stats.flagged_insufficient}};
  }

  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output dir " + dir.string());
  std::ofstream os(dir / "report.json");
  if (!os) throw IoError("cannot write report.json");
  os << rep.dump(2) << "\n";
  log << rep.dump(2) << "\n";
  return 0;
}

int cmd_export(const std::filesystem::path& snapshot,
               const std::filesystem::path& out, const std::string& format,
               std::ostream& log) {
  auto labels = import_labels(snapshot);
  export_labels(labels, out, parse_format(format));
  log << "exported " << snapshot << " -> " << out << "\n";
  return 0;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return 2;
  } catch (const ParamError&) {
    return 2;
  } catch (const ConvergenceError&) {
    return 3;
  } catch (const IoError&) {
    return 4;
  } catch (...) {
    return 1;
  }
}

}  // namespace foam
