// wlsim command line: run experiment configs, shipped presets, and
// fault-probability sweeps.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wlsim/kernels.hpp"
#include "wlsim/presets.hpp"

namespace {

struct CommonFlags {
  std::optional<uint64_t> seed;
  std::string out;
  std::string format;
  int jobs = 1;
  std::vector<int64_t> snapshot_steps;
  bool have_snapshots = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Override the config's master seed");
  cmd->add_option("--out", f.out, "Output directory (default $WLSIM_OUT or ./wlsim-out)");
  cmd->add_option("--format", f.format, "Export format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--jobs", f.jobs, "Worker threads for sweep replicas")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--snapshot-steps", f.snapshot_steps,
                  "Steps at which to export weight matrices")
      ->delimiter(',');
}

wlsim::harness::RunOptions to_options(const CommonFlags& f, CLI::App* cmd) {
  wlsim::harness::RunOptions opt;
  opt.seed = f.seed;
  opt.out_dir = f.out;
  if (!f.format.empty()) opt.format = f.format;
  opt.jobs = f.jobs;
  if (cmd->count("--snapshot-steps") > 0) opt.snapshot_steps = f.snapshot_steps;
  return opt;
}

void report(const wlsim::io::Manifest& m, const std::string& dir_hint) {
  for (const auto& w : m.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("run complete (%s, seed %llu, %lld ms, kernels %s)\n",
              m.kind.c_str(), static_cast<unsigned long long>(m.seed),
              static_cast<long long>(m.duration_ms), m.kernel_backend.c_str());
  for (const auto& f : m.outputs)
    std::printf("  %s  %llu bytes  fnv1a64:%s\n", f.path.c_str(),
                static_cast<unsigned long long>(f.bytes), f.digest.c_str());
  if (!dir_hint.empty()) std::printf("  in %s\n", dir_hint.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wlsim: resilient consensus via weight learning (simulator)"};
  app.set_version_flag("--version", wlsim::harness::version());
  app.fallthrough();  // accept global flags after a subcommand name

  std::string kernels_flag = "auto";
  app.add_option("--kernels", kernels_flag,
                 "Kernel backend: auto, scalar, or avx2 (also WLSIM_KERNELS)")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config file");
  std::string run_path;
  run_cmd->add_option("config", run_path, "Path to a config JSON file")
      ->required();
  CommonFlags run_flags;
  add_common(run_cmd, run_flags);

  auto* preset_cmd = app.add_subcommand("preset", "Run a shipped preset");
  std::string preset_name;
  preset_cmd->add_option("name", preset_name, "Preset name");
  bool list_presets = false;
  preset_cmd->add_flag("--list", list_presets, "List available presets");
  CommonFlags preset_flags;
  add_common(preset_cmd, preset_flags);

  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run a fault-probability sweep config");
  std::string sweep_path;
  sweep_cmd->add_option("config", sweep_path, "Path to a sweep config JSON")
      ->required();
  CommonFlags sweep_flags;
  add_common(sweep_cmd, sweep_flags);

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  try {
    if (kernels_flag == "scalar") {
      wlsim::kernels::set_backend(wlsim::kernels::Backend::scalar);
    } else if (kernels_flag == "avx2") {
      if (!wlsim::kernels::set_backend(wlsim::kernels::Backend::avx2)) {
        std::fprintf(stderr, "error: AVX2 kernels are not supported on this CPU\n");
        return 1;
      }
    }

    if (run_cmd->parsed()) {
      auto cfg = wlsim::harness::load_config(run_path);
      const auto name =
          std::filesystem::path(run_path).stem().string();
      report(wlsim::harness::run_experiment(std::move(cfg),
                                            to_options(run_flags, run_cmd),
                                            name),
             run_flags.out);
    } else if (preset_cmd->parsed()) {
      if (list_presets) {
        for (const auto& n : wlsim::harness::preset_names())
          std::printf("%s\n", n.c_str());
        return 0;
      }
      if (preset_name.empty()) {
        std::fprintf(stderr, "error: preset name required (or --list)\n");
        return 1;
      }
      report(wlsim::harness::run_preset(preset_name,
                                        to_options(preset_flags, preset_cmd)),
             preset_flags.out);
    } else if (sweep_cmd->parsed()) {
      auto cfg = wlsim::harness::load_config(sweep_path);
      if (cfg.kind != wlsim::harness::Kind::sweep) {
        std::fprintf(stderr, "error: %s is not a sweep config\n",
                     sweep_path.c_str());
        return 1;
      }
      const auto name = std::filesystem::path(sweep_path).stem().string();
      report(wlsim::harness::run_experiment(std::move(cfg),
                                            to_options(sweep_flags, sweep_cmd),
                                            name),
             sweep_flags.out);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
