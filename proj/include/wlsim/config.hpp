#pragma once
// Experiment configuration: a self-describing JSON file that pins everything
// a run needs (topology, node classes, noise, reward schedule, seed), so that
// re-running a saved config reproduces the run byte for byte.
//
// Config files and exports use the paper-style 1-based node labels; the
// loader converts to the library's 0-based ids.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlsim/clocksync.hpp"
#include "wlsim/consensus_sim.hpp"

namespace wlsim::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { consensus, clock, sweep };
const char* kind_name(Kind k);

struct OutputSpec {
  std::string dir;            // empty: resolved by the runner
  std::string format = "csv"; // "csv" | "json"
};

struct SweepSpec {
  sim::SimConfig base;
  std::vector<int> ifn_nodes;  // 0-based internally
  std::vector<double> fault_probs;
  int replicas = 1;
  double threshold = 5.0;
};

struct ExperimentConfig {
  Kind kind = Kind::consensus;
  std::string description;
  uint64_t seed = 1;
  OutputSpec output;
  sim::SimConfig consensus;  // valid when kind == consensus
  clocks::ClockConfig clock; // valid when kind == clock
  SweepSpec sweep;           // valid when kind == sweep
  std::vector<std::string> warnings;  // soft findings from validation
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

// Canonical serialization used for the manifest's config digest.
std::string canonical_dump(const ExperimentConfig& cfg);

}  // namespace wlsim::harness
