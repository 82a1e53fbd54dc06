#include "wlsim/presets.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "wlsim/kernels.hpp"

namespace wlsim::harness {

namespace fs = std::filesystem;

const char* version() { return WLSIM_VERSION; }

std::vector<std::string> preset_names() {
  return {"fig2-pfn",        "fig2-ifn",        "fig2-mixed",
          "fig3-sweep",      "fig4-stochastic", "table1-weights",
          "clock-fig6-nowla", "clock-fig7-wla",  "stress-1000"};
}

std::string find_preset_path(const std::string& name) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ConfigError("unknown preset: " + name);
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("WLSIM_PRESET_DIR")) dirs.emplace_back(env);
  dirs.emplace_back("presets");
  std::error_code ec;
  const fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    dirs.push_back(exe.parent_path() / "presets");
    dirs.push_back(exe.parent_path().parent_path() / "presets");
  }
  dirs.emplace_back(WLSIM_SOURCE_PRESETS);
  for (const auto& d : dirs) {
    const fs::path p = d / (name + ".json");
    if (fs::exists(p, ec)) return p.string();
  }
  throw ConfigError("preset file not found: " + name + ".json");
}

namespace {

std::string resolve_out_dir(const RunOptions& opt, const std::string& run_name) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  std::string base = "wlsim-out";
  if (const char* env = std::getenv("WLSIM_OUT")) base = env;
  return (fs::path(base) / run_name).string();
}

struct Exporter {
  fs::path dir;
  std::string format;
  std::vector<io::OutputFile> files;

  std::string ext() const { return format == "json" ? ".json" : ".csv"; }

  void finish(const std::string& rel) {
    const fs::path p = dir / rel;
    files.push_back({rel, static_cast<uint64_t>(fs::file_size(p)),
                     io::hex64(io::fnv1a64_file(p))});
  }

  void write_weights(const std::string& stem,
                     std::span<const std::pair<int64_t, std::vector<double>>>
                         snapshots,
                     int n) {
    const std::vector<std::string> cols = {"k", "i", "j", "a_ij"};
    const std::string rel = stem + ext();
    io::TableWriter w(dir / rel, format, cols);
    std::vector<std::string> cells(4);
    for (const auto& [k, dense] : snapshots) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          cells[0] = io::fmt(k);
          cells[1] = io::fmt(static_cast<int64_t>(i) + 1);
          cells[2] = io::fmt(static_cast<int64_t>(j) + 1);
          cells[3] = io::fmt(dense[static_cast<size_t>(i) *
                                       static_cast<size_t>(n) +
                                   static_cast<size_t>(j)]);
          w.row(cells);
        }
    }
    w.close();
    finish(rel);
  }
};

void export_consensus(Exporter& ex, const sim::SimTrace& trace) {
  std::vector<std::string> cols = {"k", "V"};
  for (int i = 0; i < trace.n; ++i)
    cols.push_back("x_" + std::to_string(i + 1));
  const std::string rel = std::string("trace") + ex.ext();
  {
    io::TableWriter w(ex.dir / rel, ex.format, cols);
    std::vector<std::string> cells(cols.size());
    for (size_t k = 0; k < trace.states.size(); ++k) {
      cells[0] = io::fmt(static_cast<int64_t>(k));
      cells[1] = io::fmt(trace.disagreement[k]);
      for (int i = 0; i < trace.n; ++i)
        cells[static_cast<size_t>(i) + 2] =
            io::fmt(trace.states[k][static_cast<size_t>(i)]);
      w.row(cells);
    }
  }
  ex.finish(rel);
  if (!trace.weight_snapshots.empty())
    ex.write_weights("weights", trace.weight_snapshots, trace.n);
  if (!trace.topology_log.empty()) {
    const std::vector<std::string> tcols = {"k", "from", "to"};
    const std::string trel = std::string("topology") + ex.ext();
    io::TableWriter w(ex.dir / trel, ex.format, tcols);
    std::vector<std::string> cells(3);
    for (size_t k = 0; k < trace.topology_log.size(); ++k)
      for (const auto& [from, to] : trace.topology_log[k]) {
        cells[0] = io::fmt(static_cast<int64_t>(k));
        cells[1] = io::fmt(static_cast<int64_t>(from) + 1);
        cells[2] = io::fmt(static_cast<int64_t>(to) + 1);
        w.row(cells);
      }
    w.close();
    ex.finish(trel);
  }
}

void export_sweep(Exporter& ex, std::span<const sim::SweepPoint> points) {
  const std::vector<std::string> cols = {"fault_prob", "mean_count",
                                         "rep_count"};
  const std::string rel = std::string("sweep") + ex.ext();
  {
    io::TableWriter w(ex.dir / rel, ex.format, cols);
    std::vector<std::string> cells(3);
    for (const auto& p : points) {
      cells[0] = io::fmt(p.fault_prob);
      cells[1] = io::fmt(p.mean_count);
      cells[2] = io::fmt(static_cast<int64_t>(p.reps));
      w.row(cells);
    }
  }
  ex.finish(rel);
}

void export_clock(Exporter& ex, const clocks::ClockTrace& trace) {
  {
    const std::vector<std::string> cols = {"k",       "i",        "alpha",
                                           "beta",    "x_prime",  "x_dprime",
                                           "tau"};
    const std::string rel = std::string("clock_trace") + ex.ext();
    io::TableWriter w(ex.dir / rel, ex.format, cols);
    std::vector<std::string> cells(7);
    for (size_t k = 0; k < trace.alpha.size(); ++k)
      for (int i = 0; i < trace.n; ++i) {
        const auto ui = static_cast<size_t>(i);
        cells[0] = io::fmt(static_cast<int64_t>(k));
        cells[1] = io::fmt(static_cast<int64_t>(i) + 1);
        cells[2] = io::fmt(trace.alpha[k][ui]);
        cells[3] = io::fmt(trace.beta[k][ui]);
        cells[4] = io::fmt(trace.x_prime[k][ui]);
        cells[5] = io::fmt(trace.x_dprime[k][ui]);
        cells[6] = io::fmt(trace.tau[k][ui]);
        w.row(cells);
      }
    w.close();
    ex.finish(rel);
  }
  {
    const std::vector<std::string> cols = {"k", "dx_prime", "dx_dprime",
                                           "dtau"};
    const std::string rel = std::string("clock_disagreement") + ex.ext();
    io::TableWriter w(ex.dir / rel, ex.format, cols);
    std::vector<std::string> cells(4);
    for (size_t k = 0; k < trace.disagreement.size(); ++k) {
      cells[0] = io::fmt(static_cast<int64_t>(k));
      for (int c = 0; c < 3; ++c)
        cells[static_cast<size_t>(c) + 1] =
            io::fmt(trace.disagreement[k][static_cast<size_t>(c)]);
      w.row(cells);
    }
    w.close();
    ex.finish(rel);
  }
  if (!trace.skew_snapshots.empty())
    ex.write_weights("skew_weights", trace.skew_snapshots, trace.n);
  if (!trace.offset_snapshots.empty())
    ex.write_weights("offset_weights", trace.offset_snapshots, trace.n);
}

}  // namespace

io::Manifest run_experiment(ExperimentConfig cfg, const RunOptions& opt,
                            const std::string& run_name) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opt.seed) {
    cfg.seed = *opt.seed;
    cfg.consensus.seed = *opt.seed;
    cfg.clock.seed = *opt.seed;
    cfg.sweep.base.seed = *opt.seed;
  }
  if (opt.format) cfg.output.format = *opt.format;
  if (opt.snapshot_steps) {
    cfg.consensus.snapshot_steps = *opt.snapshot_steps;
    cfg.clock.snapshot_steps = *opt.snapshot_steps;
  }

  Exporter ex;
  ex.dir = resolve_out_dir(opt, run_name);
  ex.format = cfg.output.format;
  fs::create_directories(ex.dir);

  io::Manifest m;
  m.kind = kind_name(cfg.kind);
  m.preset = run_name;
  m.seed = cfg.seed;
  m.version = version();
  m.kernel_backend = kernels::backend_name(kernels::active());
  m.config_digest = io::hex64(io::fnv1a64_bytes(canonical_dump(cfg)));
  m.warnings = cfg.warnings;

  {
    std::ofstream out(ex.dir / "config.json", std::ios::binary);
    out << to_json(cfg).dump(2) << '\n';
  }
  ex.finish("config.json");

  switch (cfg.kind) {
    case Kind::consensus: {
      const sim::SimTrace trace = sim::run(cfg.consensus);
      m.rooted_fraction = trace.rooted_fraction;
      for (const auto& w : trace.warnings) m.warnings.push_back(w);
      export_consensus(ex, trace);
      break;
    }
    case Kind::sweep: {
      const auto points = sim::sweep_fault_probability(
          cfg.sweep.base, cfg.sweep.ifn_nodes, cfg.sweep.fault_probs,
          cfg.sweep.replicas, cfg.sweep.threshold, opt.jobs);
      export_sweep(ex, points);
      break;
    }
    case Kind::clock: {
      const clocks::ClockTrace trace = clocks::run_clock(cfg.clock);
      for (const auto& w : trace.warnings) m.warnings.push_back(w);
      export_clock(ex, trace);
      break;
    }
  }

  m.outputs = std::move(ex.files);
  m.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  io::write_manifest_atomic(ex.dir / "manifest.json", m);
  return m;
}

io::Manifest run_preset(const std::string& name, const RunOptions& opt) {
  ExperimentConfig cfg = load_config(find_preset_path(name));
  return run_experiment(std::move(cfg), opt, name);
}

}  // namespace wlsim::harness
