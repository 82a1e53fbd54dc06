#pragma once
// Result serialization: CSV and self-describing JSON tables, content digests,
// and the run manifest. All exported numbers use the shortest round-trip
// decimal representation (std::to_chars), so golden files are stable across
// runs and platforms.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace wlsim::io {

std::string fmt(double v);
std::string fmt(int64_t v);

// Streams rows of pre-formatted cells to either format.
class TableWriter {
 public:
  TableWriter(const std::filesystem::path& path, const std::string& format,
              std::span<const std::string> columns);
  ~TableWriter();
  void row(std::span<const std::string> cells);
  void close();

 private:
  std::ofstream out_;
  bool json_ = false;
  bool first_row_ = true;
  bool closed_ = false;
};

uint64_t fnv1a64_bytes(std::span<const char> bytes);
uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(uint64_t v);

struct OutputFile {
  std::string path;  // relative to the run directory
  uint64_t bytes = 0;
  std::string digest;  // fnv1a64 of the file contents
};

struct Manifest {
  std::string kind;
  std::string preset;  // empty for ad-hoc configs
  uint64_t seed = 0;
  std::string version;
  std::string generator = "philox4x32-10";
  std::string kernel_backend;
  std::string config_digest;
  int64_t duration_ms = 0;
  std::vector<OutputFile> outputs;
  std::vector<std::string> warnings;
  double rooted_fraction = -1.0;  // stochastic runs that tracked it
};

// Written to a temporary file and renamed into place after a successful run.
void write_manifest_atomic(const std::filesystem::path& path,
                           const Manifest& m);

}  // namespace wlsim::io
