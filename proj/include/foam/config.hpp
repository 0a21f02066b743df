#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "foam/auction.hpp"
#include "foam/engine.hpp"
#include "foam/flows.hpp"
#include "foam/grid.hpp"

namespace foam {

/// Fully-resolved run description. Serialization always writes every field
/// (defaults expanded), so parse -> serialize -> parse is the identity and
/// outputs are reproducible from the stored copy alone.
struct RunConfig {
  int version = 1;

  int rank = 2;
  int resolution = 256;           // cells per axis
  double domain_length = 4.0;     // box edge length
  double tau = 0.0625;

  AuctionParams auction;
  int max_iters = 5000;
  int stationary_window = 1;

  std::uint64_t seed = 1;
  double inner_fraction = 0.6;
  std::vector<double> volumes;    // bubble volumes, domain units

  // ramp description (cmd_ramp); volumes in domain units
  struct Ramp {
    int target_phase = 0;
    double dv = 0.0;
    double v_start = 0.0;
    double v_end = 0.0;
    std::string direction = "up";  // up | down | up-down
    struct Insertion {
      std::vector<double> position;  // empty => cluster boundary near center
      double v = 0.0;
    };
    std::vector<Insertion> insertions;
  };
  std::optional<Ramp> ramp;

  int restarts = 1;
  std::string out_dir = "out";
  std::string format = "raw";       // p2 | vtk | raw
  int snapshot_every = 0;           // 0: initial + final only
  std::string rng_algorithm = "mt19937_64";

  Grid grid() const;
  SimParams sim_params() const;
  VolumeTargets targets() const;
  FlowSchedule flow_schedule() const;

  void validate() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

/// Ready-made experiment setups with the paper's stated parameters.
std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

}  // namespace foam
