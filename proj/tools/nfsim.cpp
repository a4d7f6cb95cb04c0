// nfsim: batch front-end for the stochastic neural-field toolkit.
// Subcommands: simulate | check-kernel | solve-rho | picard | verify | accept.
// Exit codes: 0 success/pass, 1 validation or usage error, 2 failed checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "nf/acceptance.hpp"
#include "nf/config.hpp"
#include "nf/error.hpp"
#include "nf/field_io.hpp"
#include "nf/runner.hpp"

namespace fs = std::filesystem;
using namespace nf;

namespace {

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

fs::path default_output_dir() {
  if (const char* env = std::getenv("NFSIM_OUTPUT_DIR"); env && *env) return fs::path(env);
  return fs::path("out");
}

int do_simulate(const fs::path& config_path, int threads, const std::string& output_override) {
  const ConfigFile cfg = ConfigFile::parse_file(config_path);
  ResolvedRun run = resolve_run(cfg, config_path.parent_path());
  if (!output_override.empty()) run.out_dir = output_override;

  std::printf("simulate: %d path(s), %d step(s), dt = %g, scheme = %s, %d thread(s)\n",
              run.solver.n_paths, run.solver.steps(), run.solver.dt,
              scheme_name(run.solver.scheme).c_str(), threads);
  const Ensemble ens = run_ensemble(run.model, run.noise, run.solver, threads);
  write_run_outputs(run.out_dir, ens, run.fingerprint, cfg.canonical());
  std::printf("simulate: wrote %zu path(s), %zu recorded time(s) -> %s\n", ens.paths.size(),
              ens.times().size(), run.out_dir.string().c_str());
  return 0;
}

int do_check_kernel(const fs::path& config_path, const std::string& which, double alpha) {
  const ConfigFile cfg = ConfigFile::parse_file(config_path);
  const GridPtr grid = resolve_grid(cfg);
  const KernelModel kernel = resolve_kernel(cfg, grid, config_path.parent_path());

  std::vector<Condition> conds;
  if (which == "all")
    conds = {Condition::c1, Condition::c2, Condition::c2prime, Condition::c3prime};
  else
    conds = {parse_condition(which)};

  std::printf("%-10s %-14s %-14s %-8s %-24s %s\n", "condition", "value[L]", "value[2L]",
              "ratio", "verdict", "constant");
  for (Condition c : conds) {
    const ConditionReport r = check_condition(kernel, c, alpha);
    std::string extra;
    if (r.constant) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g", *r.constant);
      extra = buf;
      if (r.alpha) {
        std::snprintf(buf, sizeof buf, " (alpha = %g)", *r.alpha);
        extra += buf;
      }
    }
    std::printf("%-10s %-14.6g %-14.6g %-8.4g %-24s %s\n", condition_name(c).c_str(),
                r.value_at_box, r.value_at_double_box, r.ratio,
                r.verdict == ConditionVerdict::holds ? "Holds" : "DivergesUnderRefinement",
                extra.c_str());
  }
  return 0;
}

int do_solve_rho(const fs::path& config_path, const std::string& output_override) {
  const ConfigFile cfg = ConfigFile::parse_file(config_path);
  const GridPtr grid = resolve_grid(cfg);
  const KernelModel kernel = resolve_kernel(cfg, grid, config_path.parent_path());

  const EigenResult pw = solve_rho_power(kernel);
  const double defect_pw = verify_c1prime(kernel, pw.rho, pw.lambda);
  std::printf("%-22s lambda = %.12g  residual = %.3e  iterations = %d  defect = %.3e\n",
              "power_iteration", pw.lambda, pw.residual, pw.iterations, defect_pw);

  if (kernel.kind() == KernelKind::homogeneous) {
    const EigenResult fo = solve_rho_fourier(kernel);
    const double defect_fo = verify_c1prime(kernel, fo.rho, fo.lambda);
    std::printf("%-22s lambda = %.12g  residual = %.3e  iterations = %d  defect = %.3e\n",
                "fourier_construction", fo.lambda, fo.residual, fo.iterations, defect_fo);
    double sup_gap = 0.0;
    for (std::size_t i = 0; i < pw.rho.size(); ++i)
      sup_gap = std::max(sup_gap, std::abs(pw.rho[i] - fo.rho[i]));
    std::printf("sup |rho_power - rho_fourier| = %.3e (unit-mass densities)\n", sup_gap);
    if (!output_override.empty()) {
      fs::create_directories(output_override);
      write_field(fs::path(output_override) / "rho_power.f64", pw.rho, "rho");
      write_field(fs::path(output_override) / "rho_fourier.f64", fo.rho, "rho");
      std::printf("wrote rho_power.f64, rho_fourier.f64 -> %s\n", output_override.c_str());
    }
  } else {
    std::printf("fourier_construction: skipped (kernel is not translation-invariant)\n");
    if (!output_override.empty()) {
      fs::create_directories(output_override);
      write_field(fs::path(output_override) / "rho_power.f64", pw.rho, "rho");
      std::printf("wrote rho_power.f64 -> %s\n", output_override.c_str());
    }
  }
  return 0;
}

int do_picard(const fs::path& config_path, int iterations, int paths,
              const std::string& output_override) {
  const ConfigFile cfg = ConfigFile::parse_file(config_path);
  ResolvedRun run = resolve_run(cfg, config_path.parent_path());
  if (!output_override.empty()) run.out_dir = output_override;

  const PicardDiagnostics diag = picard_solve(run.model, run.noise, run.solver, iterations, paths);
  const PicardRateReport rep = picard_rate_check(diag);

  std::printf("%-4s %s\n", "n", "H_n = sup_x mean |Y^n - Y^{n-1}|^2 at T");
  for (std::size_t k = 0; k < diag.H.size(); ++k)
    std::printf("%-4zu %.6e\n", k + 1, diag.H[k]);
  std::printf("constants: K = %.6g, C_w = %.6g, ||phi||^2 = %.6g, T = %g, paths = %d\n",
              diag.k_const, diag.c_w, diag.phi_l2_sq, diag.t_end, diag.n_paths);
  std::printf("rate check: %s (xi*T fit = %.4g, max fit residual = %.3g, monotone = %s, "
              "ratios %0.3g -> %0.3g)%s%s\n",
              rep.verdict == Verdict::pass ? "PASS" : "FAIL", rep.xi_t_fit,
              rep.max_fit_residual, rep.monotone ? "yes" : "no", rep.ratio_first,
              rep.ratio_last, rep.reason.empty() ? "" : "; ", rep.reason.c_str());

  fs::create_directories(run.out_dir);
  write_picard_csv(run.out_dir / "picard_contraction.csv", diag);
  std::printf("wrote picard_contraction.csv -> %s\n", run.out_dir.string().c_str());
  return rep.verdict == Verdict::pass ? 0 : 2;
}

int do_verify(fs::path run_dir, bool do_cov, bool do_exp, bool do_mom,
              std::vector<double> lags, double t_opt) {
  if (!(do_cov || do_exp || do_mom)) do_cov = do_exp = do_mom = true;
  const Ensemble ens = load_run_outputs(run_dir);
  const fs::path vdir = run_dir / "verify";
  fs::create_directories(vdir);

  nlohmann::json verdict;
  bool any_checked_failed = false;

  if (do_cov) {
    const double t = t_opt >= 0.0 ? t_opt : ens.times().back();
    if (lags.empty()) lags = {0.0, 0.25, 0.5, 0.75, 1.0};
    const CovarianceReport rep = empirical_covariance(ens, t, lags);
    for (std::size_t i = 0; i < rep.lags_requested.size(); ++i)
      if (std::abs(rep.lags_requested[i] - rep.lags_used[i]) > 1e-12)
        std::printf("note: lag %g is off-grid, evaluated at nearest grid lag %g\n",
                    rep.lags_requested[i], rep.lags_used[i]);
    write_covariance_csv(vdir / "covariance.csv", rep);
    if (rep.analytic_available && !rep.degenerate) {
      const bool ok = rep.max_z < 4.0;
      any_checked_failed = any_checked_failed || !ok;
      std::printf("covariance @ t = %g: %s (max |z| = %.2f, threshold 4)\n", t,
                  ok ? "PASS" : "FAIL", rep.max_z);
      verdict["covariance"] = {{"pass", ok}, {"max_z", rep.max_z}, {"t", t}};
    } else {
      std::printf("covariance @ t = %g: reported only (%s)\n", t,
                  rep.degenerate ? "degenerate ensemble spread"
                                 : "no analytic reference for this model");
      verdict["covariance"] = {{"pass", nullptr}, {"t", t}};
    }
  }

  if (do_exp) {
    for (IncrementDirection dir : {IncrementDirection::time, IncrementDirection::space}) {
      const char* label = dir == IncrementDirection::time ? "time" : "space";
      try {
        const ExponentEstimate est = holder_exponent(ens, dir, 2.0, 4);
        write_exponent_csv(vdir / (std::string("exponent_") + label + ".csv"), est);
        std::printf("%s-increment exponent: eta = %.3f (r^2 = %.3f%s)\n", label, est.eta_hat,
                    est.fit_r2, est.saturated ? ", saturated" : "");
        verdict[std::string("exponent_") + label] = {{"eta_hat", est.eta_hat},
                                                     {"fit_r2", est.fit_r2},
                                                     {"saturated", est.saturated}};
      } catch (const Error& e) {
        std::printf("%s-increment exponent: skipped (%s)\n", label, e.what());
      }
    }
  }

  if (do_mom) {
    const MomentReport m2 = moment_supremum(ens, 2);
    const MomentReport m4 = moment_supremum(ens, 4);
    std::printf("sup_(t,x) mean |Y|^2 = %.6g (t = %g), mean |Y|^4 = %.6g (t = %g)\n", m2.value,
                m2.t_at, m4.value, m4.t_at);
    verdict["moments"] = {{"p2", m2.value}, {"p4", m4.value}};
    if (ens.linear_model) {
      const double c0 = analytic_covariance(ens.phi)[ens.grid->origin()];
      const double T = ens.times().back();
      const double v = ens.sigma_const * ens.sigma_const * c0 * (1.0 - std::exp(-2.0 * T)) / 2.0;
      const double z2 = m2.mc_sigma > 0.0 ? std::abs(m2.value - v) / m2.mc_sigma : HUGE_VAL;
      const double z4 =
          m4.mc_sigma > 0.0 ? std::abs(m4.value - 3.0 * v * v) / m4.mc_sigma : HUGE_VAL;
      const bool ok = z2 < 4.0 && z4 < 4.0;
      any_checked_failed = any_checked_failed || !ok;
      std::printf("moment check vs damped-field limit %.6g: %s (|z| = %.2f, %.2f)\n", v,
                  ok ? "PASS" : "FAIL", z2, z4);
      verdict["moments"]["pass"] = ok;
      verdict["moments"]["reference_p2"] = v;
    }
  }

  verdict["overall_pass"] = !any_checked_failed;
  std::ofstream out(vdir / "verdict.json", std::ios::trunc);
  require(out.good(), errc::io_failure, "cannot write verdict.json");
  out << verdict.dump(2) << '\n';
  std::printf("wrote verification artifacts -> %s\n", vdir.string().c_str());
  return any_checked_failed ? 2 : 0;
}

int do_accept(int threads, fs::path scratch, fs::path verdict_path) {
  if (scratch.empty()) scratch = default_output_dir() / "acceptance";
  if (verdict_path.empty()) verdict_path = scratch / "verdict.json";
  const auto results = run_acceptance(threads, scratch, std::cout);
  fs::create_directories(verdict_path.parent_path());
  write_verdict_json(verdict_path, results);
  const bool ok = all_pass(results);
  std::printf("acceptance: %s (%zu criteria), verdict -> %s\n", ok ? "PASS" : "FAIL",
              results.size(), verdict_path.string().c_str());
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic neural-field simulator and verification toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = default_threads();
  std::string output_override;

  auto* sim = app.add_subcommand("simulate", "Integrate a path ensemble and store it on disk");
  sim->add_option("--config", config_path, "run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--threads", threads, "worker threads (never changes the outputs)");
  sim->add_option("--output", output_override, "override the configured output directory");

  std::string which_condition = "all";
  double alpha = 0.5;
  auto* chk = app.add_subcommand("check-kernel",
                                 "Certify kernel integrability conditions by box doubling");
  chk->add_option("--config", config_path, "configuration with [grid] and [kernel]")
      ->required()
      ->check(CLI::ExistingFile);
  chk->add_option("--condition", which_condition, "c1 | c2 | c2_prime | c3_prime | all");
  chk->add_option("--alpha", alpha, "translation-regularity exponent in (0, 1]")
      ->check(CLI::Range(1e-9, 1.0));

  auto* rho = app.add_subcommand("solve-rho",
                                 "Leading nonnegative eigenpair of the |kernel| operator");
  rho->add_option("--config", config_path, "configuration with [grid] and [kernel]")
      ->required()
      ->check(CLI::ExistingFile);
  rho->add_option("--output", output_override, "directory for the density fields");

  int picard_iterations = 8;
  int picard_paths = 100;
  auto* pic = app.add_subcommand("picard",
                                 "Successive-substitution contraction diagnostics");
  pic->add_option("--config", config_path, "full run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  pic->add_option("--iterations", picard_iterations, "number of iterates")->check(CLI::Range(2, 64));
  pic->add_option("--paths", picard_paths, "frozen-noise sample paths")->check(CLI::Range(1, 100000));
  pic->add_option("--output", output_override, "override the configured output directory");

  std::string run_dir;
  bool flag_cov = false, flag_exp = false, flag_mom = false;
  std::vector<double> lags;
  double t_at = -1.0;
  auto* ver = app.add_subcommand("verify", "Statistical checks on a stored ensemble");
  ver->add_option("--run", run_dir, "run directory written by `simulate`");
  ver->add_option("--config", config_path, "locate the run directory via this configuration")
      ->check(CLI::ExistingFile);
  ver->add_flag("--covariance", flag_cov, "equal-time covariance against the analytic form");
  ver->add_flag("--exponents", flag_exp, "time/space increment-scaling exponents");
  ver->add_flag("--moments", flag_mom, "moment suprema (verdict for zero-gain models)");
  ver->add_option("--lags", lags, "covariance lags")->delimiter(',');
  ver->add_option("--t", t_at, "time at which to evaluate the covariance");

  fs::path scratch_dir, verdict_path;
  auto* acc = app.add_subcommand("accept", "Run the full release acceptance suite");
  acc->add_option("--threads", threads, "worker threads (never changes the results)");
  acc->add_option("--scratch", scratch_dir, "scratch/artifact directory");
  acc->add_option("--verdict", verdict_path, "verdict JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return do_simulate(config_path, threads, output_override);
    if (chk->parsed()) return do_check_kernel(config_path, which_condition, alpha);
    if (rho->parsed()) return do_solve_rho(config_path, output_override);
    if (pic->parsed())
      return do_picard(config_path, picard_iterations, picard_paths, output_override);
    if (ver->parsed()) {
      fs::path dir;
      if (!run_dir.empty()) {
        dir = run_dir;
      } else if (!config_path.empty()) {
        const ConfigFile cfg = ConfigFile::parse_file(config_path);
        dir = resolve_run(cfg, fs::path(config_path).parent_path()).out_dir;
      } else {
        dir = default_output_dir();
      }
      return do_verify(dir, flag_cov, flag_exp, flag_mom, lags, t_at);
    }
    if (acc->parsed()) return do_accept(threads, scratch_dir, verdict_path);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
