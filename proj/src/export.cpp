#include "wlsim/export.hpp"

#include <charconv>
#include <stdexcept>

#include <json.hpp>

namespace wlsim::io {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(int64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

TableWriter::TableWriter(const std::filesystem::path& path,
                         const std::string& format,
                         std::span<const std::string> columns)
    : out_(path, std::ios::binary), json_(format == "json") {
  if (!out_) throw std::runtime_error("cannot open output file: " + path.string());
  if (json_) {
    out_ << "{\"columns\":[";
    for (size_t i = 0; i < columns.size(); ++i)
      out_ << (i ? ",\"" : "\"") << columns[i] << '"';
    out_ << "],\"rows\":[";
  } else {
    for (size_t i = 0; i < columns.size(); ++i)
      out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }
}

void TableWriter::row(std::span<const std::string> cells) {
  if (json_) {
    out_ << (first_row_ ? "\n[" : ",\n[");
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << ']';
  } else {
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  first_row_ = false;
}

void TableWriter::close() {
  if (closed_) return;
  if (json_) out_ << "\n]}\n";
  out_.close();
  closed_ = true;
}

TableWriter::~TableWriter() { close(); }

uint64_t fnv1a64_bytes(std::span<const char> bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path.string());
  uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const auto got = static_cast<size_t>(in.gcount());
    for (size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

void write_manifest_atomic(const std::filesystem::path& path,
                           const Manifest& m) {
  nlohmann::json j;
  j["schema"] = "wlsim-manifest/1";
  j["kind"] = m.kind;
  if (!m.preset.empty()) j["preset"] = m.preset;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["generator"] = m.generator;
  j["kernel_backend"] = m.kernel_backend;
  j["config_digest"] = m.config_digest;
  j["duration_ms"] = m.duration_ms;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : m.outputs)
    files.push_back(
        {{"path", f.path}, {"bytes", f.bytes}, {"digest", f.digest}});
  j["outputs"] = std::move(files);
  if (!m.warnings.empty()) j["warnings"] = m.warnings;
  if (m.rooted_fraction >= 0.0) j["rooted_fraction"] = m.rooted_fraction;

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write manifest: " + tmp.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace wlsim::io
