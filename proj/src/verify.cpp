#include "nf/verify.hpp"

#include <algorithm>
#include <cmath>

namespace nf {

const std::vector<double>& Ensemble::times() const {
  require(!paths.empty(), errc::bad_argument, "ensemble has no paths");
  return paths.front().times;
}

std::size_t Ensemble::time_index(double t) const {
  const auto& ts = times();
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (std::abs(ts[i] - t) <= 1e-9) return i;
  fail(errc::bad_argument, "time " + std::to_string(t) + " is not among the recorded times");
}

double ou_covariance(const Field& phi, double t, double lag, double* used_lag) {
  require(t >= 0.0, errc::bad_argument, "ou_covariance: negative time");
  require(lag >= 0.0, errc::bad_argument, "ou_covariance: negative lag");
  const auto& g = phi.grid;
  require(static_cast<bool>(g), errc::bad_profile, "profile has no grid");
  const Field c = analytic_covariance(phi);
  const long cells = std::lround(lag / g->dx());
  require(cells <= g->n() / 2, errc::bad_argument, "ou_covariance: lag exceeds half the box");
  if (used_lag) *used_lag = cells * g->dx();
  const std::size_t idx = g->shift(g->origin(), 0, static_cast<int>(cells));
  return c.values[idx] * (1.0 - std::exp(-2.0 * t)) / 2.0;
}

CovarianceReport empirical_covariance(const Ensemble& ens, double t,
                                      const std::vector<double>& lags) {
  require(ens.paths.size() >= 100, errc::bad_argument,
          "empirical covariance needs at least 100 paths");
  require(!lags.empty(), errc::bad_argument, "no lags requested");
  const std::size_t ti = ens.time_index(t);
  const auto& g = ens.grid;
  const std::size_t nn = g->size();
  const std::size_t n_paths = ens.paths.size();

  Field mean = make_field(g);
  for (const auto& p : ens.paths)
    for (std::size_t i = 0; i < nn; ++i) mean.values[i] += p.states[ti].values[i];
  for (double& v : mean.values) v /= static_cast<double>(n_paths);

  CovarianceReport rep;
  rep.t = t;
  rep.analytic_available = ens.linear_model;
  double max_z = 0.0;
  bool any_degenerate = false;
  for (double lag : lags) {
    require(lag >= 0.0, errc::bad_argument, "negative lag");
    const long cells = std::lround(lag / g->dx());
    require(cells <= g->n() / 2, errc::bad_argument, "lag exceeds half the box");
    const double used = cells * g->dx();

    double sum = 0.0, sum_sq = 0.0;
    for (const auto& p : ens.paths) {
      const auto& y = p.states[ti].values;
      double acc = 0.0;
      for (std::size_t i = 0; i < nn; ++i) {
        const std::size_t j = g->shift(i, 0, static_cast<int>(cells));
        acc += (y[i] - mean.values[i]) * (y[j] - mean.values[j]);
      }
      acc /= static_cast<double>(nn);
      sum += acc;
      sum_sq += acc * acc;
    }
    const double emp = sum / static_cast<double>(n_paths);
    const double var_hat =
        std::max(0.0, (sum_sq - sum * sum / static_cast<double>(n_paths)) /
                          (static_cast<double>(n_paths) - 1.0));
    const double mc_sigma = std::sqrt(var_hat / static_cast<double>(n_paths));

    rep.lags_requested.push_back(lag);
    rep.lags_used.push_back(used);
    rep.empirical.push_back(emp);
    rep.mc_sigma.push_back(mc_sigma);
    if (ens.linear_model) {
      const double ana =
          ens.sigma_const * ens.sigma_const * ou_covariance(ens.phi, t, lag, nullptr);
      rep.analytic.push_back(ana);
      if (mc_sigma > 0.0) {
        const double z = std::abs(emp - ana) / mc_sigma;
        rep.z.push_back(z);
        max_z = std::max(max_z, z);
      } else {
        any_degenerate = true;
        rep.z.push_back(0.0);
      }
    }
    if (mc_sigma == 0.0) any_degenerate = true;
  }
  rep.degenerate = any_degenerate;
  rep.max_z = max_z;
  return rep;
}

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  LineFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = f.intercept + f.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace

ExponentEstimate holder_exponent(const Ensemble& ens, IncrementDirection dir, double q,
                                 int n_scales) {
  require(q == 2.0 || q == 4.0, errc::bad_argument, "holder exponent supports q in {2, 4}");
  require(n_scales >= 4, errc::bad_argument, "need at least 4 dyadic scales");
  require(!ens.paths.empty(), errc::bad_argument, "empty ensemble");
  const auto& g = ens.grid;
  const std::size_t nn = g->size();

  std::vector<double> scales, moments;
  if (dir == IncrementDirection::time) {
    const auto& ts = ens.times();
    require(ts.size() >= 2, errc::bad_argument, "need recorded time pairs");
    const double delta = ts[1] - ts[0];
    for (std::size_t i = 1; i + 1 < ts.size(); ++i)
      require(std::abs(ts[i + 1] - ts[i] - delta) <= 1e-9, errc::bad_argument,
              "time-direction estimate needs uniformly recorded times");
    const int max_off = 1 << (n_scales - 1);
    require(static_cast<std::size_t>(max_off) < ts.size(), errc::bad_argument,
            "not enough recorded steps for the requested dyadic scales");
    for (int j = 0; j < n_scales; ++j) {
      const int off = 1 << j;
      double acc = 0.0;
      std::size_t count = 0;
      for (const auto& p : ens.paths) {
        for (std::size_t a = 0; a + off < ts.size(); ++a) {
          const auto& y0 = p.states[a].values;
          const auto& y1 = p.states[a + off].values;
          for (std::size_t i = 0; i < nn; ++i) {
            const double d = y1[i] - y0[i];
            acc += q == 2.0 ? d * d : d * d * d * d;
          }
          count += nn;
        }
      }
      scales.push_back(off * delta);
      moments.push_back(acc / static_cast<double>(count));
    }
  } else {
    const std::size_t ti = ens.times().size() - 1;
    const int max_off = 1 << (n_scales - 1);
    require(max_off < g->n() / 2, errc::bad_argument, "grid too small for the dyadic shifts");
    for (int j = 0; j < n_scales; ++j) {
      const int off = 1 << j;
      double acc = 0.0;
      std::size_t count = 0;
      for (const auto& p : ens.paths) {
        const auto& y = p.states[ti].values;
        for (int axis = 0; axis < g->dim(); ++axis) {
          for (std::size_t i = 0; i < nn; ++i) {
            const double d = y[g->shift(i, axis, off)] - y[i];
            acc += q == 2.0 ? d * d : d * d * d * d;
          }
          count += nn;
        }
      }
      scales.push_back(off * g->dx());
      moments.push_back(acc / static_cast<double>(count));
    }
  }

  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < scales.size(); ++j) {
    require(moments[j] > 0.0, errc::bad_argument,
            "degenerate increments: zero moment at some scale");
    lx.push_back(std::log(scales[j]));
    ly.push_back(std::log(moments[j]));
  }
  const LineFit f = fit_line(lx, ly);

  ExponentEstimate est;
  est.direction = dir;
  est.q = q;
  est.fit_r2 = f.r2;
  est.scales = std::move(scales);
  est.moments = std::move(moments);
  const double raw = f.slope / q;
  est.saturated = raw >= 0.95;
  est.eta_hat = std::min(raw, 0.999);
  require(est.eta_hat > 0.0, errc::bad_argument,
          "increment moments do not scale with a positive exponent");
  return est;
}

namespace {

MomentReport moment_at_index(const Ensemble& ens, int p, std::size_t ti) {
  const std::size_t nn = ens.grid->size();
  const double np = static_cast<double>(ens.paths.size());
  MomentReport rep;
  for (std::size_t i = 0; i < nn; ++i) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& path : ens.paths) {
      const double a = std::abs(path.states[ti].values[i]);
      double m = 1.0;
      for (int k = 0; k < p; ++k) m *= a;
      sum += m;
      sum_sq += m * m;
    }
    const double mean = sum / np;
    if (mean > rep.value) {
      const double var_hat = std::max(0.0, (sum_sq - sum * sum / np) / (np - 1.0));
      rep.value = mean;
      rep.mc_sigma = std::sqrt(var_hat / np);
      rep.t_at = ens.times()[ti];
      rep.x_at = i;
    }
  }
  return rep;
}

}  // namespace

MomentReport moment_supremum(const Ensemble& ens, int p) {
  require(p == 2 || p == 4 || p == 8, errc::bad_argument, "moment order must be 2, 4, or 8");
  require(!ens.paths.empty(), errc::bad_argument, "empty ensemble");
  MomentReport best;
  for (std::size_t ti = 0; ti < ens.times().size(); ++ti) {
    const MomentReport r = moment_at_index(ens, p, ti);
    if (r.value > best.value) best = r;
  }
  return best;
}

MomentReport moment_supremum_at(const Ensemble& ens, int p, double t) {
  require(p == 2 || p == 4 || p == 8, errc::bad_argument, "moment order must be 2, 4, or 8");
  return moment_at_index(ens, p, ens.time_index(t));
}

double pathwise_compare(const Trajectory& a, const Trajectory& b) {
  require(a.grid && b.grid && a.grid->spec() == b.grid->spec(), errc::grid_mismatch,
          "pathwise_compare: different grids");
  require(a.times.size() == b.times.size(), errc::bad_argument,
          "pathwise_compare: different recorded time counts");
  for (std::size_t i = 0; i < a.times.size(); ++i)
    require(std::abs(a.times[i] - b.times[i]) <= 1e-9, errc::bad_argument,
            "pathwise_compare: recorded times differ");
  double sup = 0.0;
  for (std::size_t s = 0; s < a.states.size(); ++s)
    for (std::size_t i = 0; i < a.states[s].values.size(); ++i)
      sup = std::max(sup, std::abs(a.states[s].values[i] - b.states[s].values[i]));
  return sup;
}

PicardRateReport picard_rate_check(const PicardDiagnostics& diag) {
  const auto& H = diag.H;
  require(H.size() >= 5, errc::bad_argument, "picard_rate_check needs at least 5 entries");
  for (double h : H)
    require(std::isfinite(h) && h >= 0.0, errc::bad_argument, "H entries must be nonnegative");

  PicardRateReport rep;
  bool all_zero = true;
  for (double h : H) all_zero = all_zero && h == 0.0;
  if (all_zero) {
    rep.verdict = Verdict::pass;
    rep.monotone = true;
    rep.reason = "iteration already converged (all differences vanish)";
    return rep;
  }

  // Zero entries mean the iteration converged exactly; floor them so the
  // log-domain fit stays finite while keeping the contraction evidence.
  std::vector<double> h(H.begin(), H.end());
  const double floor_val = 1e-300;
  for (double& v : h) v = std::max(v, floor_val);

  rep.monotone = true;
  for (std::size_t k = 1; k + 1 < h.size(); ++k)
    if (h[k + 1] > h[k] * 1.01) rep.monotone = false;

  rep.ratio_first = h[1] / h[0];
  rep.ratio_last = h[h.size() - 1] / h[h.size() - 2];
  // Constant-diffusion models inflate H[0] with the stochastic term that
  // cancels from every later difference, making ratio_first unrepresentative;
  // the absolute fallback accepts any per-pass contraction below 5e-3.
  const bool contracting = rep.ratio_last <= std::max(0.5 * rep.ratio_first, 5e-3);

  // Envelope fit: log H_n + log n! against n (H[k] is the n = k+1 difference).
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < h.size(); ++k) {
    xs.push_back(static_cast<double>(k + 1));
    ys.push_back(std::log(h[k]) + std::lgamma(static_cast<double>(k + 2)));
  }
  const LineFit f = fit_line(xs, ys);
  rep.xi_t_fit = std::exp(f.slope);
  double max_res = -HUGE_VAL;
  for (std::size_t k = 0; k < xs.size(); ++k)
    max_res = std::max(max_res, ys[k] - (f.intercept + f.slope * xs[k]));
  rep.max_fit_residual = max_res;
  const bool enveloped = max_res <= std::log(10.0);

  if (!rep.monotone)
    rep.reason = "differences are not non-increasing";
  else if (!contracting)
    rep.reason = "difference ratios do not contract";
  else if (!enveloped)
    rep.reason = "sequence escapes the factorial envelope";
  else
    rep.reason = "factorial contraction observed";
  rep.verdict = rep.monotone && contracting && enveloped ? Verdict::pass : Verdict::fail;
  return rep;
}

}  // namespace nf
