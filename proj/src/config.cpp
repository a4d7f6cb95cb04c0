#include "nf/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nf/field_io.hpp"
#include "nf/fingerprint.hpp"
#include "nf/noise.hpp"

namespace nf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      require(line.back() == ']', errc::bad_config, where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      require(!section.empty(), errc::bad_config, where + ": empty section name");
      cfg.sections_[section];  // sections may be empty
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, errc::bad_config, where + ": expected key = value");
    require(!section.empty(), errc::bad_config, where + ": key outside any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), errc::bad_config, where + ": empty key");
    require(!cfg.sections_[section].count(key), errc::bad_config,
            where + ": duplicate key '" + key + "' in [" + section + "]");
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  require(is.good(), errc::io_failure, "cannot open config: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_string(ss.str(), path.string());
}

bool ConfigFile::has(const std::string& sec, const std::string& key) const {
  const auto it = sections_.find(sec);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::vector<std::string> ConfigFile::section_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : sections_) out.push_back(name);
  return out;
}

const std::map<std::string, std::string>* ConfigFile::section(const std::string& sec) const {
  const auto it = sections_.find(sec);
  return it == sections_.end() ? nullptr : &it->second;
}

std::string ConfigFile::get_str(const std::string& sec, const std::string& key) const {
  require(has(sec, key), errc::bad_config,
          origin_ + ": missing required key [" + sec + "] " + key);
  return sections_.at(sec).at(key);
}

std::string ConfigFile::get_str(const std::string& sec, const std::string& key,
                                const std::string& fallback) const {
  return has(sec, key) ? sections_.at(sec).at(key) : fallback;
}

double ConfigFile::get_num(const std::string& sec, const std::string& key) const {
  const std::string raw = get_str(sec, key);
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    require(trim(raw.substr(used)).empty(), errc::bad_config, "trailing garbage");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(errc::bad_config, origin_ + ": [" + sec + "] " + key + " = '" + raw +
                               "' is not a number");
  }
}

double ConfigFile::get_num(const std::string& sec, const std::string& key,
                           double fallback) const {
  return has(sec, key) ? get_num(sec, key) : fallback;
}

int ConfigFile::get_int(const std::string& sec, const std::string& key) const {
  const double v = get_num(sec, key);
  const int i = static_cast<int>(v);
  require(v == i, errc::bad_config, origin_ + ": [" + sec + "] " + key + " must be an integer");
  return i;
}

int ConfigFile::get_int(const std::string& sec, const std::string& key, int fallback) const {
  return has(sec, key) ? get_int(sec, key) : fallback;
}

std::uint64_t ConfigFile::get_u64(const std::string& sec, const std::string& key,
                                  std::uint64_t fallback) const {
  if (!has(sec, key)) return fallback;
  const std::string raw = get_str(sec, key);
  try {
    return std::stoull(raw);
  } catch (...) {
    fail(errc::bad_config, origin_ + ": [" + sec + "] " + key + " = '" + raw +
                               "' is not an unsigned integer");
  }
}

bool ConfigFile::get_bool(const std::string& sec, const std::string& key, bool fallback) const {
  if (!has(sec, key)) return fallback;
  const std::string raw = get_str(sec, key);
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  fail(errc::bad_config, origin_ + ": [" + sec + "] " + key + " must be boolean");
}

std::vector<double> ConfigFile::get_list(const std::string& sec, const std::string& key) const {
  const std::string raw = get_str(sec, key);
  std::vector<double> out;
  std::string item;
  std::istringstream is(raw);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      fail(errc::bad_config, origin_ + ": [" + sec + "] " + key + ": bad list entry '" +
                                 item + "'");
    }
  }
  require(!out.empty(), errc::bad_config, origin_ + ": [" + sec + "] " + key + " is empty");
  return out;
}

void ConfigFile::set(const std::string& sec, const std::string& key, const std::string& value) {
  sections_[sec][key] = value;
}

std::string ConfigFile::canonical() const {
  std::string out;
  for (const auto& [sec, kv] : sections_) {
    out += "[" + sec + "]\n";
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  }
  return out;
}

std::string ConfigFile::fingerprint() const {
  Fingerprint fp;
  fp.add(canonical());
  return fp.hex();
}

GridPtr resolve_grid(const ConfigFile& cfg) {
  GridSpec spec;
  spec.dim = cfg.get_int("grid", "dim", 1);
  spec.half_width = cfg.get_num("grid", "half_width");
  spec.points_per_dim = cfg.get_int("grid", "points_per_dim");
  return Grid::make(spec);
}

namespace {

std::filesystem::path anchored(const std::string& raw, const std::filesystem::path& base) {
  std::filesystem::path p(raw);
  return p.is_relative() ? base / p : p;
}

}  // namespace

KernelModel resolve_kernel(const ConfigFile& cfg, const GridPtr& grid,
                           const std::filesystem::path& base_dir) {
  const std::string type = cfg.get_str("kernel", "type");
  if (type == "profile_file") {
    const auto ff = read_field(anchored(cfg.get_str("kernel", "path"), base_dir));
    require(ff.field.grid->spec() == grid->spec(), errc::grid_mismatch,
            "kernel profile file grid does not match [grid]");
    return KernelModel::homogeneous(ff.field);
  }
  if (type == "matrix_file") {
    std::size_t rows = 0, cols = 0;
    std::vector<double> m;
    read_matrix(anchored(cfg.get_str("kernel", "path"), base_dir), rows, cols, m);
    require(rows == grid->size() && cols == grid->size(), errc::bad_config,
            "kernel matrix shape does not match the grid");
    return KernelModel::general(grid, std::move(m));
  }
  const KernelBuiltin b =
      parse_builtin(type, cfg.get_num("kernel", "a1", 1.0), cfg.get_num("kernel", "s1", 1.0),
                    cfg.get_num("kernel", "a2", 0.0), cfg.get_num("kernel", "s2", 1.0));
  return KernelModel::from_builtin(grid, b);
}

NoiseSpec resolve_noise(const ConfigFile& cfg, const GridPtr& grid,
                        const std::filesystem::path& base_dir) {
  const std::string mode = cfg.get_str("noise", "mode", "smoothed_white");
  const std::string phi_kind = cfg.get_str("noise", "phi", "delta");
  Field phi;
  if (phi_kind == "delta")
    phi = phi_delta(grid);
  else if (phi_kind == "indicator")
    phi = phi_indicator(grid, cfg.get_num("noise", "phi_h", 0.5));
  else if (phi_kind == "gaussian")
    phi = phi_gaussian(grid, cfg.get_num("noise", "phi_s", 1.0));
  else if (phi_kind == "file") {
    const auto ff = read_field(anchored(cfg.get_str("noise", "phi_path"), base_dir));
    require(ff.field.grid->spec() == grid->spec(), errc::grid_mismatch,
            "noise profile file grid does not match [grid]");
    phi = ff.field;
  } else {
    fail(errc::bad_config, "unknown noise profile: " + phi_kind);
  }
  const std::uint64_t seed = cfg.get_u64("noise", "seed", 0);

  if (mode == "smoothed_white") return make_smoothed_white(std::move(phi), seed);
  require(mode == "q_wiener", errc::bad_config, "unknown noise mode: " + mode);

  std::vector<SpectrumMode> spectrum;
  if (cfg.has("noise", "spectrum_file")) {
    for (const auto& entry :
         read_spectrum_list(anchored(cfg.get_str("noise", "spectrum_file"), base_dir))) {
      SpectrumMode m;
      m.lambda = entry.lambda;
      const auto ff = read_field(entry.field_path);
      require(ff.field.grid->spec() == grid->spec(), errc::grid_mismatch,
              "spectrum mode grid does not match [grid]: " + entry.field_path.string());
      m.e = ff.field;
      spectrum.push_back(std::move(m));
    }
  } else if (cfg.has("noise", "spectrum_pairs")) {
    // Fourier modes matched to the covariance of a named profile.
    const std::string cov_kind = cfg.get_str("noise", "spectrum_cov_phi", "indicator");
    Field cov_phi;
    if (cov_kind == "indicator")
      cov_phi = phi_indicator(grid, cfg.get_num("noise", "spectrum_cov_h", 0.5));
    else if (cov_kind == "gaussian")
      cov_phi = phi_gaussian(grid, cfg.get_num("noise", "spectrum_cov_s", 1.0));
    else
      fail(errc::bad_config, "unknown spectrum_cov_phi: " + cov_kind);
    spectrum = fourier_modes_for_covariance(analytic_covariance(cov_phi),
                                            cfg.get_int("noise", "spectrum_pairs"));
  } else {
    fail(errc::bad_config, "[noise] q_wiener needs spectrum_file or spectrum_pairs");
  }
  return make_q_wiener(std::move(phi), std::move(spectrum), seed);
}

ModelSpec resolve_model(const ConfigFile& cfg, KernelModel kernel,
                        const std::filesystem::path& base_dir) {
  ModelSpec model{std::move(kernel), {}, {}, {}};

  const std::string gain = cfg.get_str("model", "gain", "sigmoid");
  if (gain == "sigmoid")
    model.gain = {GainType::sigmoid, cfg.get_num("model", "gain_param", 1.0)};
  else if (gain == "heaviside_smooth")
    model.gain = {GainType::heaviside_smooth, cfg.get_num("model", "gain_param", 1.0)};
  else if (gain == "constant")
    model.gain = {GainType::constant, cfg.get_num("model", "gain_param", 0.0)};
  else
    fail(errc::bad_config, "unknown gain: " + gain);

  const std::string diff = cfg.get_str("model", "diffusion", "constant");
  model.diffusion.s0 = cfg.get_num("model", "diffusion_s0", 1.0);
  model.diffusion.s1 = cfg.get_num("model", "diffusion_s1", 0.0);
  if (diff == "constant")
    model.diffusion.type = DiffusionType::constant;
  else if (diff == "affine")
    model.diffusion.type = DiffusionType::affine;
  else if (diff == "bounded_smooth")
    model.diffusion.type = DiffusionType::bounded_smooth;
  else
    fail(errc::bad_config, "unknown diffusion: " + diff);

  const std::string init = cfg.get_str("model", "initial", "zero");
  if (init == "zero")
    model.initial.type = InitialType::zero;
  else if (init == "constant") {
    model.initial.type = InitialType::constant;
    model.initial.a = cfg.get_num("model", "initial_a", 0.0);
  } else if (init == "gaussian_bump") {
    model.initial.type = InitialType::gaussian_bump;
    model.initial.a = cfg.get_num("model", "initial_a", 1.0);
    model.initial.s = cfg.get_num("model", "initial_s", 1.0);
  } else if (init == "file") {
    model.initial.type = InitialType::from_field;
    model.initial.field =
        read_field(anchored(cfg.get_str("model", "initial_path"), base_dir)).field;
  } else {
    fail(errc::bad_config, "unknown initial: " + init);
  }
  validate_model(model);
  return model;
}

SolverConfig resolve_solver(const ConfigFile& cfg) {
  SolverConfig sc;
  sc.dt = cfg.get_num("solver", "dt");
  sc.t_end = cfg.get_num("solver", "t_end");
  sc.scheme = parse_scheme(cfg.get_str("solver", "scheme", "exponential_euler"));
  sc.record_every = cfg.get_int("solver", "record_every", 1);
  sc.n_paths = cfg.get_int("solver", "n_paths", 1);
  sc.steps();  // validate
  return sc;
}

ResolvedRun resolve_run(const ConfigFile& cfg, const std::filesystem::path& base_dir) {
  ResolvedRun run;
  run.grid = resolve_grid(cfg);
  run.kernel = resolve_kernel(cfg, run.grid, base_dir);
  run.model = resolve_model(cfg, run.kernel, base_dir);
  run.noise = resolve_noise(cfg, run.grid, base_dir);
  run.solver = resolve_solver(cfg);
  std::string out = cfg.get_str("output", "directory", "");
  if (out.empty()) {
    const char* env = std::getenv("NFSIM_OUTPUT_DIR");
    out = env && *env ? env : "out";
  }
  run.out_dir = anchored(out, base_dir);
  run.fingerprint = cfg.fingerprint();
  return run;
}

}  // namespace nf
