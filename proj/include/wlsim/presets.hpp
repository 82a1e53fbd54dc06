#pragma once
// Shipped experiment presets and the runner that executes a config, writes
// its exports, and finishes with the run manifest.

#include <optional>
#include <string>
#include <vector>

#include "wlsim/config.hpp"
#include "wlsim/export.hpp"

namespace wlsim::harness {

// fig2-pfn, fig2-ifn, fig2-mixed, fig3-sweep, fig4-stochastic,
// table1-weights, clock-fig6-nowla, clock-fig7-wla, stress-1000
std::vector<std::string> preset_names();

// Resolves <name>.json against WLSIM_PRESET_DIR, ./presets, the directory of
// the running executable, and the source tree the binary was built from.
std::string find_preset_path(const std::string& name);

struct RunOptions {
  std::optional<uint64_t> seed;
  std::string out_dir;  // empty: $WLSIM_OUT or ./wlsim-out, plus the run name
  std::optional<std::string> format;  // "csv" | "json"
  int jobs = 1;
  std::optional<std::vector<int64_t>> snapshot_steps;
};

io::Manifest run_experiment(ExperimentConfig cfg, const RunOptions& opt,
                            const std::string& run_name);
io::Manifest run_preset(const std::string& name, const RunOptions& opt);

const char* version();

}  // namespace wlsim::harness
