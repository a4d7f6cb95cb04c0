#pragma once

#include <filesystem>
#include <functional>

#include "nf/verify.hpp"

namespace nf {

// Runs `work(p)` for p in [0, n) on `threads` workers. Exceptions propagate
// after all workers join.
void parallel_for(int n, int threads, const std::function<void(int)>& work);

// Integrates cfg.n_paths trajectories (path indices 0..n_paths-1). The
// counter-based noise streams make the result identical for every thread
// count and schedule.
Ensemble run_ensemble(const ModelSpec& model, const NoiseSpec& noise, const SolverConfig& cfg,
                      int threads, bool hilbert = false);

// Run directory layout:
//   manifest.json                       times, scheme, seeds, fingerprints
//   phi.f64 (+ .json sidecar)           noise smoothing profile
//   path_NNNN/state_TTTTTTTTTTTT.f64    one field file per recorded time
//   ensemble_moments.csv                pooled/sup second and fourth moments
// Writing is single-threaded in path order, so outputs are byte-stable.
// config_canonical is echoed into the manifest so a stored run reparses to
// the configuration that produced it (fingerprint round-trip).
void write_run_outputs(const std::filesystem::path& dir, const Ensemble& ens,
                       const std::string& config_fingerprint,
                       const std::string& config_canonical = {});
Ensemble load_run_outputs(const std::filesystem::path& dir);

void write_covariance_csv(const std::filesystem::path& path, const CovarianceReport& rep);
void write_exponent_csv(const std::filesystem::path& path, const ExponentEstimate& est);
void write_picard_csv(const std::filesystem::path& path, const PicardDiagnostics& diag);

}  // namespace nf
