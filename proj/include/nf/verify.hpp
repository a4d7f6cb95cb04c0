#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nf/dynamics.hpp"

namespace nf {

// Monte-Carlo ensemble with the metadata needed for analytic cross-checks.
// All trajectories share the grid and the recorded time stencil.
struct Ensemble {
  GridPtr grid;
  std::vector<Trajectory> paths;
  bool linear_model = false;  // zero gain + constant diffusion
  double sigma_const = 1.0;   // diffusion level when linear
  Field phi;                  // noise smoothing profile
  double dt = 0.0;

  const std::vector<double>& times() const;
  std::size_t time_index(double t) const;  // exact match within 1e-9, else throws
};

// Damped-field equal-time covariance for the zero-gain, unit-sigma model:
// c(lag) * (1 - e^{-2t}) / 2 with c from analytic_covariance(phi). Off-grid
// lags are rounded to the nearest cell; the lag actually used is reported
// through used_lag.
double ou_covariance(const Field& phi, double t, double lag, double* used_lag = nullptr);

struct CovarianceReport {
  double t = 0.0;
  std::vector<double> lags_requested;
  std::vector<double> lags_used;
  std::vector<double> empirical;
  std::vector<double> analytic;  // empty unless the model is linear
  std::vector<double> mc_sigma;
  std::vector<double> z;
  bool analytic_available = false;
  bool degenerate = false;  // zero spread across paths (e.g. sigma = 0)
  double max_z = 0.0;
};

// Ensemble-mean-centered covariance pooled over x, one product average per
// path; mc_sigma is the across-path standard error of that average.
CovarianceReport empirical_covariance(const Ensemble& ens, double t,
                                      const std::vector<double>& lags);

enum class IncrementDirection { time, space };

struct ExponentEstimate {
  IncrementDirection direction = IncrementDirection::time;
  double q = 2.0;
  double eta_hat = 0.0;   // capped at 0.999; see `saturated`
  double fit_r2 = 0.0;
  bool saturated = false; // raw slope/q >= 0.95 (smooth regime)
  std::vector<double> scales;
  std::vector<double> moments;
};

// log-log regression of E|increment|^q over >= 4 dyadic scales; time uses
// consecutive recorded times (uniform spacing required), space uses cell
// shifts at the final recorded time; eta_hat = slope / q.
ExponentEstimate holder_exponent(const Ensemble& ens, IncrementDirection dir, double q,
                                 int n_scales = 4);

struct MomentReport {
  double value = 0.0;     // sup over recorded (t, x) of mean |Y|^p
  double mc_sigma = 0.0;  // standard error at the argmax
  double t_at = 0.0;
  std::size_t x_at = 0;
};

MomentReport moment_supremum(const Ensemble& ens, int p);                 // p in {2,4,8}
MomentReport moment_supremum_at(const Ensemble& ens, int p, double t);    // one recorded time

// sup over shared recorded times and points of |A - B|.
double pathwise_compare(const Trajectory& a, const Trajectory& b);

enum class Verdict { pass, fail };

struct PicardRateReport {
  Verdict verdict = Verdict::fail;
  double xi_t_fit = 0.0;        // fitted xi*T of the factorial envelope
  double max_fit_residual = 0.0;
  bool monotone = false;        // H non-increasing from the second entry on
  double ratio_first = 0.0;     // H[1]/H[0]
  double ratio_last = 0.0;      // H[last]/H[last-1]
  std::string reason;
};

// Pass requires, for H with >= 5 entries:
//   (a) log H_n + log n! - n log(xi T) bounded above by ln(10) around the
//       least-squares envelope fit,
//   (b) H non-increasing from the second difference on (1% slack),
//   (c) ratio contraction: last ratio <= max(first ratio / 2, 5e-3),
// which accepts factorial decay and rejects stalled sequences.
PicardRateReport picard_rate_check(const PicardDiagnostics& diag);

}  // namespace nf
