#include "foam/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "foam/errors.hpp"

namespace foam {

using nlohmann::json;

Grid RunConfig::grid() const {
  return rank == 2 ? Grid::square(resolution, domain_length)
                   : Grid::cube(resolution, domain_length);
}

SimParams RunConfig::sim_params() const {
  SimParams p;
  p.tau = tau;
  p.auction = auction;
  p.max_iters = max_iters;
  p.stationary_window = stationary_window;
  return p;
}

VolumeTargets RunConfig::targets() const {
  return VolumeTargets::from_volumes(grid(), volumes);
}

FlowSchedule RunConfig::flow_schedule() const {
  if (!ramp) throw ConfigError("config has no ramp section");
  const Grid g = grid();
  const double hv = g.cell_volume();
  FlowSchedule fs;
  fs.target_phase = ramp->target_phase;
  fs.dv_cells = std::max<std::int64_t>(1, std::llround(ramp->dv / hv));
  fs.v_start_cells = std::max<std::int64_t>(1, std::llround(ramp->v_start / hv));
  fs.v_end_cells = std::max<std::int64_t>(1, std::llround(ramp->v_end / hv));
  if (ramp->direction == "up")
    fs.direction = FlowSchedule::Direction::Up;
  else if (ramp->direction == "down")
    fs.direction = FlowSchedule::Direction::Down;
  else if (ramp->direction == "up-down")
    fs.direction = FlowSchedule::Direction::UpDown;
  else
    throw ConfigError("ramp direction must be up, down or up-down");
  for (const auto& ins : ramp->insertions) {
    InsertionEvent ev;
    ev.v_cells = std::max<std::int64_t>(1, std::llround(ins.v / hv));
    if (ins.position.empty()) {
      const double c = domain_length / 2;
      ev.position = {c, c, c};
      ev.where = InsertMode::ClusterBoundary;
    } else {
      for (size_t a = 0; a < ins.position.size() && a < 3; ++a)
        ev.position[a] = ins.position[a];
      ev.where = InsertMode::Explicit;
    }
    fs.insertions.push_back(ev);
  }
  return fs;
}

void RunConfig::validate() const {
  if (version != 1) throw ConfigError("unsupported config version");
  if (rank != 2 && rank != 3) throw ConfigError("rank must be 2 or 3");
  if (resolution < 4) throw ConfigError("resolution must be >= 4");
  if (!(domain_length > 0)) throw ConfigError("domain_length must be > 0");
  if (!(tau > 0)) throw ConfigError("tau must be > 0");
  if (volumes.empty()) throw ConfigError("volume list must not be empty");
  for (double v : volumes)
    if (!(v > 0)) throw ConfigError("volumes must be > 0");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (format != "p2" && format != "vtk" && format != "raw")
    throw ConfigError("format must be p2, vtk or raw");
  auction.validate();
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
}

namespace {

json to_json(const RunConfig& c) {
  json j;
  j["version"] = c.version;
  j["grid"] = {{"rank", c.rank},
               {"resolution", c.resolution},
               {"domain_length", c.domain_length}};
  j["tau"] = c.tau;
  j["auction"] = {
      {"eps0", c.auction.eps0},
      {"alpha", c.auction.alpha},
      {"eps_min", c.auction.eps_min},
      {"lambda_update",
       c.auction.lambda_update == AuctionParams::LambdaUpdate::PostEviction
           ? "post-eviction"
           : "pre-eviction"},
      {"bid_round_cap", c.auction.bid_round_cap}};
  j["engine"] = {{"max_iters", c.max_iters},
                 {"stationary_window", c.stationary_window}};
  j["seed"] = c.seed;
  j["rng_algorithm"] = c.rng_algorithm;
  j["inner_fraction"] = c.inner_fraction;
  j["volumes"] = c.volumes;
  if (c.ramp) {
    json r;
    r["target_phase"] = c.ramp->target_phase;
    r["dv"] = c.ramp->dv;
    r["v_start"] = c.ramp->v_start;
    r["v_end"] = c.ramp->v_end;
    r["direction"] = c.ramp->direction;
    r["insertions"] = json::array();
    for (const auto& ins : c.ramp->insertions)
      r["insertions"].push_back(
          {{"position", ins.position}, {"v", ins.v}});
    j["ramp"] = r;
  } else {
    j["ramp"] = nullptr;
  }
  j["restarts"] = c.restarts;
  j["output"] = {{"dir", c.out_dir},
                 {"format", c.format},
                 {"snapshot_every", c.snapshot_every}};
  return j;
}

RunConfig from_json(const json& j) {
  RunConfig c;
  try {
    c.version = j.at("version").get<int>();
    const auto& g = j.at("grid");
    c.rank = g.at("rank").get<int>();
    c.resolution = g.at("resolution").get<int>();
    c.domain_length = g.at("domain_length").get<double>();
    c.tau = j.at("tau").get<double>();
    if (j.contains("auction")) {
      const auto& a = j.at("auction");
      if (a.contains("eps0")) c.auction.eps0 = a.at("eps0").get<double>();
      if (a.contains("alpha")) c.auction.alpha = a.at("alpha").get<double>();
      if (a.contains("eps_min"))
        c.auction.eps_min = a.at("eps_min").get<double>();
      if (a.contains("lambda_update")) {
        auto s = a.at("lambda_update").get<std::string>();
        if (s == "post-eviction")
          c.auction.lambda_update = AuctionParams::LambdaUpdate::PostEviction;
        else if (s == "pre-eviction")
          c.auction.lambda_update = AuctionParams::LambdaUpdate::PreEviction;
        else
          throw ConfigError("lambda_update must be post-eviction or pre-eviction");
      }
      if (a.contains("bid_round_cap"))
        c.auction.bid_round_cap = a.at("bid_round_cap").get<std::uint64_t>();
    }
    if (j.contains("engine")) {
      const auto& e = j.at("engine");
      if (e.contains("max_iters")) c.max_iters = e.at("max_iters").get<int>();
      if (e.contains("stationary_window"))
        c.stationary_window = e.at("stationary_window").get<int>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("rng_algorithm"))
      c.rng_algorithm = j.at("rng_algorithm").get<std::string>();
    if (j.contains("inner_fraction"))
      c.inner_fraction = j.at("inner_fraction").get<double>();
    c.volumes = j.at("volumes").get<std::vector<double>>();
    if (j.contains("ramp") && !j.at("ramp").is_null()) {
      const auto& r = j.at("ramp");
      RunConfig::Ramp ramp;
      ramp.target_phase = r.at("target_phase").get<int>();
      ramp.dv = r.at("dv").get<double>();
      ramp.v_start = r.at("v_start").get<double>();
      ramp.v_end = r.at("v_end").get<double>();
      ramp.direction = r.at("direction").get<std::string>();
      if (r.contains("insertions"))
        for (const auto& ins : r.at("insertions")) {
          RunConfig::Ramp::Insertion i;
          if (ins.contains("position"))
            i.position = ins.at("position").get<std::vector<double>>();
          i.v = ins.at("v").get<double>();
          ramp.insertions.push_back(std::move(i));
        }
      c.ramp = std::move(ramp);
    }
    if (j.contains("restarts")) c.restarts = j.at("restarts").get<int>();
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (o.contains("dir")) c.out_dir = o.at("dir").get<std::string>();
      if (o.contains("format")) c.format = o.at("format").get<std::string>();
      if (o.contains("snapshot_every"))
        c.snapshot_every = o.at("snapshot_every").get<int>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  return to_json(cfg).dump(2) + "\n";
}

namespace {

RunConfig base_2d() {
  RunConfig c;
  c.rank = 2;
  c.resolution = 256;
  c.domain_length = 4.0;
  c.tau = 0.0625;
  return c;
}

RunConfig base_3d() {
  RunConfig c;
  c.rank = 3;
  c.resolution = 96;
  c.domain_length = 4.0;
  c.tau = 0.0625;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"relax-2d-n12",  "search-2d-family", "search-2d-n16",  "relax-3d-n8",
          "ramp-insert-grow", "hysteresis-6plus1", "ramp-grow-one-of-7"};
}

RunConfig preset(const std::string& name) {
  if (name == "relax-2d-n12") {
    // random 12-foam relaxing to stationarity
    RunConfig c = base_2d();
    c.volumes.assign(12, 0.4);
    return c;
  }
  if (name == "search-2d-family") {
    // equal-area stationary search; adjust `volumes` count per n
    RunConfig c = base_2d();
    c.volumes.assign(8, 0.4);
    c.restarts = 20;
    return c;
  }
  if (name == "search-2d-n16") {
    RunConfig c = base_2d();
    c.volumes.assign(16, 0.3);
    c.restarts = 50;
    return c;
  }
  if (name == "relax-3d-n8") {
    RunConfig c = base_3d();
    c.volumes.assign(8, 1.0);
    return c;
  }
  if (name == "ramp-insert-grow") {
    // grow one small bubble to V, then insert another and repeat
    RunConfig c = base_2d();
    c.volumes = {0.4, 0.4, 0.016};
    RunConfig::Ramp r;
    r.target_phase = 2;
    r.dv = 0.004;
    r.v_start = 0.016;
    r.v_end = 0.4;
    r.direction = "up";
    r.insertions.push_back({{}, 0.016});
    c.ramp = r;
    return c;
  }
  if (name == "hysteresis-6plus1") {
    // six bubbles at V plus one small bubble ramped to 1.5V and back
    RunConfig c = base_2d();
    const double V = 0.677;
    c.volumes = {V, V, V, V, V, V, 0.0201};
    RunConfig::Ramp r;
    r.target_phase = 6;
    r.dv = 0.00496;
    r.v_start = 0.0201;
    r.v_end = 1.5 * V;
    r.direction = "up-down";
    c.ramp = r;
    return c;
  }
  if (name == "ramp-grow-one-of-7") {
    // grow one bubble of the 7-foam to 12V; pick target_phase per run
    RunConfig c = base_2d();
    const double V = 0.1474;
    c.volumes.assign(7, V);
    RunConfig::Ramp r;
    r.target_phase = 0;
    r.dv = 0.02;
    r.v_start = V;
    r.v_end = 12 * V;
    r.direction = "up";
    c.ramp = r;
    return c;
  }
  throw ConfigError("unknown preset: " + name);
}

}  // namespace foam
