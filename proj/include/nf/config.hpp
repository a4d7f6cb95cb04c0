#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nf/dynamics.hpp"

namespace nf {

// Run configuration: named sections of `key = value` lines, '#' comments.
// Canonical form (sections and keys sorted) backs both the byte-stable
// round-trip and the config fingerprint.
class ConfigFile {
 public:
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");
  static ConfigFile parse_file(const std::filesystem::path& path);

  bool has(const std::string& sec, const std::string& key) const;
  std::vector<std::string> section_names() const;
  const std::map<std::string, std::string>* section(const std::string& sec) const;

  std::string get_str(const std::string& sec, const std::string& key) const;
  std::string get_str(const std::string& sec, const std::string& key,
                      const std::string& fallback) const;
  double get_num(const std::string& sec, const std::string& key) const;
  double get_num(const std::string& sec, const std::string& key, double fallback) const;
  int get_int(const std::string& sec, const std::string& key) const;
  int get_int(const std::string& sec, const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& sec, const std::string& key,
                        std::uint64_t fallback) const;
  bool get_bool(const std::string& sec, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& sec, const std::string& key) const;

  void set(const std::string& sec, const std::string& key, const std::string& value);

  std::string canonical() const;
  std::string fingerprint() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::string origin_;
};

// Fully resolved run inputs shared by the CLI subcommands.
struct ResolvedRun {
  GridPtr grid;
  KernelModel kernel;
  ModelSpec model;
  NoiseSpec noise;
  SolverConfig solver;
  std::filesystem::path out_dir;
  std::string fingerprint;
};

GridPtr resolve_grid(const ConfigFile& cfg);
KernelModel resolve_kernel(const ConfigFile& cfg, const GridPtr& grid,
                           const std::filesystem::path& base_dir);
NoiseSpec resolve_noise(const ConfigFile& cfg, const GridPtr& grid,
                        const std::filesystem::path& base_dir);
ModelSpec resolve_model(const ConfigFile& cfg, KernelModel kernel,
                        const std::filesystem::path& base_dir);
SolverConfig resolve_solver(const ConfigFile& cfg);

// base_dir anchors relative file references; the output directory defaults to
// the NFSIM_OUTPUT_DIR environment variable, then "./out".
ResolvedRun resolve_run(const ConfigFile& cfg, const std::filesystem::path& base_dir);

}  // namespace nf
