#include "nf/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "nf/error.hpp"
#include "nf/field_io.hpp"

namespace nf {
namespace {

namespace fs = std::filesystem;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string path_dir_name(std::size_t p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "path_%04zu", p);
  return buf;
}

std::string state_file_name(std::size_t record_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%06zu.f64", record_index);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), errc::io_failure, "cannot open for writing: " + path.string());
  return out;
}

// Pooled and sup-over-x second/fourth moments per recorded time, averaged
// over paths in index order so the file is identical for any thread count.
void write_moments_csv(const fs::path& path, const Ensemble& ens) {
  std::ofstream out = open_out(path);
  out << "t,m2_mean,m2_sup,m4_mean,m4_sup\n";
  const auto& times = ens.times();
  const std::size_t nx = ens.grid->size();
  const double inv_paths = 1.0 / static_cast<double>(ens.paths.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    double m2_mean = 0.0, m2_sup = 0.0, m4_mean = 0.0, m4_sup = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      double s2 = 0.0, s4 = 0.0;
      for (const auto& p : ens.paths) {
        const double v = p.states[k][i];
        s2 += v * v;
        s4 += v * v * v * v;
      }
      s2 *= inv_paths;
      s4 *= inv_paths;
      m2_mean += s2;
      m4_mean += s4;
      m2_sup = std::max(m2_sup, s2);
      m4_sup = std::max(m4_sup, s4);
    }
    m2_mean /= static_cast<double>(nx);
    m4_mean /= static_cast<double>(nx);
    out << g17(times[k]) << ',' << g17(m2_mean) << ',' << g17(m2_sup) << ','
        << g17(m4_mean) << ',' << g17(m4_sup) << '\n';
  }
  require(out.good(), errc::io_failure, "write failed: " + path.string());
}

}  // namespace

void parallel_for(int n, int threads, const std::function<void(int)>& work) {
  require(n >= 0, errc::bad_argument, "parallel_for: negative count");
  require(threads >= 1, errc::bad_argument, "parallel_for: need at least one thread");
  if (threads == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::min(threads, n);
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

Ensemble run_ensemble(const ModelSpec& model, const NoiseSpec& noise, const SolverConfig& cfg,
                      int threads, bool hilbert) {
  cfg.steps();  // validate the time mesh before spawning workers
  Ensemble ens;
  ens.paths.resize(static_cast<std::size_t>(cfg.n_paths));
  parallel_for(cfg.n_paths, threads, [&](int p) {
    const auto idx = static_cast<std::uint64_t>(p);
    ens.paths[static_cast<std::size_t>(p)] =
        hilbert ? solve_hilbert_path(model, noise, cfg, idx)
                : solve_path(model, noise, cfg, idx);
  });
  ens.grid = ens.paths.front().grid;
  ens.linear_model =
      model.gain.is_zero() && model.diffusion.type == DiffusionType::constant;
  ens.sigma_const = model.diffusion.s0;
  ens.phi = noise.phi;
  ens.dt = cfg.dt;
  return ens;
}

void write_run_outputs(const fs::path& dir, const Ensemble& ens,
                       const std::string& config_fingerprint,
                       const std::string& config_canonical) {
  require(!ens.paths.empty(), errc::bad_argument, "write_run_outputs: empty ensemble");
  fs::create_directories(dir);

  const Trajectory& first = ens.paths.front();
  nlohmann::json m;
  m["format"] = "nfsim-run-v1";
  m["config_fingerprint"] = config_fingerprint;
  m["config_canonical"] = config_canonical;
  m["model_fingerprint"] = first.model_fingerprint;
  m["n_paths"] = ens.paths.size();
  m["dt"] = ens.dt;
  m["scheme"] = scheme_name(first.scheme);
  m["seed"] = first.seed;
  m["times"] = ens.times();
  m["linear_model"] = ens.linear_model;
  m["sigma_const"] = ens.sigma_const;
  m["grid"] = {{"dim", ens.grid->dim()},
               {"half_width", ens.grid->half_width()},
               {"points_per_dim", ens.grid->n()}};
  {
    std::ofstream out = open_out(dir / "manifest.json");
    out << m.dump(2) << '\n';
    require(out.good(), errc::io_failure, "write failed: manifest.json");
  }

  write_field(dir / "phi.f64", ens.phi, "phi");

  for (std::size_t p = 0; p < ens.paths.size(); ++p) {
    const Trajectory& tr = ens.paths[p];
    const fs::path pd = dir / path_dir_name(p);
    fs::create_directories(pd);
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      write_field(pd / state_file_name(k), tr.states[k], "state t=" + g17(tr.times[k]));
    }
  }

  write_moments_csv(dir / "ensemble_moments.csv", ens);
}

Ensemble load_run_outputs(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  require(in.good(), errc::io_failure, "cannot open " + (dir / "manifest.json").string());
  nlohmann::json m;
  try {
    in >> m;
  } catch (const std::exception& e) {
    fail(errc::io_failure, std::string("bad manifest.json: ") + e.what());
  }
  require(m.value("format", std::string{}) == "nfsim-run-v1", errc::io_failure,
          "unrecognized run manifest format");

  GridSpec gs;
  gs.dim = m.at("grid").at("dim").get<int>();
  gs.half_width = m.at("grid").at("half_width").get<double>();
  gs.points_per_dim = m.at("grid").at("points_per_dim").get<int>();
  const GridPtr g = Grid::make(gs);

  Ensemble ens;
  ens.grid = g;
  ens.dt = m.at("dt").get<double>();
  ens.linear_model = m.at("linear_model").get<bool>();
  ens.sigma_const = m.at("sigma_const").get<double>();

  ens.phi = read_field(dir / "phi.f64").field;
  require(ens.phi.grid->spec() == gs, errc::grid_mismatch, "phi.f64 grid != manifest grid");
  ens.phi.grid = g;

  const auto times = m.at("times").get<std::vector<double>>();
  const auto n_paths = m.at("n_paths").get<std::size_t>();
  require(n_paths >= 1 && !times.empty(), errc::io_failure, "empty run manifest");
  const Scheme scheme = parse_scheme(m.at("scheme").get<std::string>());
  const auto seed = m.at("seed").get<std::uint64_t>();
  const auto model_fp = m.at("model_fingerprint").get<std::string>();

  ens.paths.reserve(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    Trajectory tr;
    tr.grid = g;
    tr.times = times;
    tr.dt = ens.dt;
    tr.scheme = scheme;
    tr.seed = seed;
    tr.path_index = p;
    tr.model_fingerprint = model_fp;
    tr.states.reserve(times.size());
    const fs::path pd = dir / path_dir_name(p);
    for (std::size_t k = 0; k < times.size(); ++k) {
      Field st = read_field(pd / state_file_name(k)).field;
      require(st.grid->spec() == gs, errc::grid_mismatch,
              "state grid != manifest grid in " + pd.string());
      st.grid = g;
      tr.states.push_back(std::move(st));
    }
    ens.paths.push_back(std::move(tr));
  }
  return ens;
}

void write_covariance_csv(const fs::path& path, const CovarianceReport& rep) {
  std::ofstream out = open_out(path);
  out << "# t = " << g17(rep.t) << '\n';
  out << "lag_requested,lag_used,empirical,analytic,mc_sigma,z\n";
  for (std::size_t i = 0; i < rep.lags_requested.size(); ++i) {
    out << g17(rep.lags_requested[i]) << ',' << g17(rep.lags_used[i]) << ','
        << g17(rep.empirical[i]) << ',';
    if (rep.analytic_available) out << g17(rep.analytic[i]);
    out << ',' << g17(rep.mc_sigma[i]) << ',';
    if (rep.analytic_available) out << g17(rep.z[i]);
    out << '\n';
  }
  require(out.good(), errc::io_failure, "write failed: " + path.string());
}

void write_exponent_csv(const fs::path& path, const ExponentEstimate& est) {
  std::ofstream out = open_out(path);
  out << "# direction = " << (est.direction == IncrementDirection::time ? "time" : "space")
      << '\n';
  out << "# q = " << g17(est.q) << '\n';
  out << "# eta_hat = " << g17(est.eta_hat) << '\n';
  out << "# fit_r2 = " << g17(est.fit_r2) << '\n';
  out << "# saturated = " << (est.saturated ? 1 : 0) << '\n';
  out << "scale,moment\n";
  for (std::size_t i = 0; i < est.scales.size(); ++i)
    out << g17(est.scales[i]) << ',' << g17(est.moments[i]) << '\n';
  require(out.good(), errc::io_failure, "write failed: " + path.string());
}

void write_picard_csv(const fs::path& path, const PicardDiagnostics& diag) {
  std::ofstream out = open_out(path);
  out << "# k_const = " << g17(diag.k_const) << '\n';
  out << "# c_w = " << g17(diag.c_w) << '\n';
  out << "# phi_l2_sq = " << g17(diag.phi_l2_sq) << '\n';
  out << "# t_end = " << g17(diag.t_end) << '\n';
  out << "# n_paths = " << diag.n_paths << '\n';
  out << "n,H\n";
  for (std::size_t k = 0; k < diag.H.size(); ++k)
    out << (k + 1) << ',' << g17(diag.H[k]) << '\n';
  require(out.good(), errc::io_failure, "write failed: " + path.string());
}

}  // namespace nf
