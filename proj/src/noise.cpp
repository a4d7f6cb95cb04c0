#include "nf/noise.hpp"

#include <algorithm>
#include <cmath>

namespace nf {

NoiseSpec make_smoothed_white(Field phi, std::uint64_t seed) {
  require(static_cast<bool>(phi.grid), errc::bad_profile, "noise profile has no grid");
  check_finite(phi, "noise profile");
  Field sq = phi;
  for (double& v : sq.values) v *= v;
  require(integrate(sq) > 0.0, errc::bad_profile, "noise profile must have positive L2 mass");
  NoiseSpec s;
  s.mode = NoiseMode::smoothed_white;
  s.phi = std::move(phi);
  s.seed = seed;
  return s;
}

NoiseSpec make_q_wiener(Field phi, std::vector<SpectrumMode> spectrum, std::uint64_t seed) {
  require(static_cast<bool>(phi.grid), errc::bad_profile, "noise profile has no grid");
  check_finite(phi, "noise profile");
  require(!spectrum.empty(), errc::bad_spectrum, "q_wiener spectrum is empty");
  for (const auto& m : spectrum) {
    require(std::isfinite(m.lambda) && m.lambda >= 0.0, errc::bad_spectrum,
            "spectrum eigenvalue must be finite and nonnegative");
    require(m.e.grid && m.e.grid->spec() == phi.grid->spec(), errc::grid_mismatch,
            "spectrum mode on a different grid");
    check_finite(m.e, "spectrum mode");
  }
  for (std::size_t a = 0; a < spectrum.size(); ++a) {
    for (std::size_t b = a; b < spectrum.size(); ++b) {
      const double ip = integrate(spectrum[a].e, spectrum[b].e);
      const double want = a == b ? 1.0 : 0.0;
      require(std::abs(ip - want) <= 1e-8, errc::bad_spectrum,
              "spectrum modes are not orthonormal (modes " + std::to_string(a) + "," +
                  std::to_string(b) + ")");
    }
  }
  NoiseSpec s;
  s.mode = NoiseMode::q_wiener;
  s.phi = std::move(phi);
  s.spectrum = std::move(spectrum);
  s.seed = seed;
  return s;
}

Field phi_delta(const GridPtr& g) {
  Field f = make_field(g);
  f.values[g->origin()] = 1.0 / g->cell_volume();
  return f;
}

Field phi_indicator(const GridPtr& g, double h) {
  require(h > 0.0, errc::bad_profile, "indicator half-width must be positive");
  if (g->dim() == 1) return sample(g, [h](double x) { return std::abs(x) <= h ? 1.0 : 0.0; });
  return sample(g, [h](double x0, double x1) {
    return std::abs(x0) <= h && std::abs(x1) <= h ? 1.0 : 0.0;
  });
}

Field phi_gaussian(const GridPtr& g, double s) {
  require(s > 0.0, errc::bad_profile, "gaussian profile scale must be positive");
  if (g->dim() == 1) return sample(g, [s](double x) { return std::exp(-x * x / (s * s)); });
  return sample(g, [s](double x0, double x1) {
    return std::exp(-(x0 * x0 + x1 * x1) / (s * s));
  });
}

Field white_increment(const GridPtr& g, double dt, const RngStream& rng) {
  require(dt > 0.0, errc::bad_argument, "white_increment: dt must be positive");
  Field f = make_field(g);
  const double scale = std::sqrt(dt / g->cell_volume());
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = scale * rng.normal(i);
  return f;
}

Field smoothed_increment(const NoiseSpec& spec, double dt, const RngStream& rng,
                         Convolver* scratch) {
  require(spec.mode == NoiseMode::smoothed_white, errc::bad_argument,
          "smoothed_increment needs smoothed_white mode");
  Field w = white_increment(spec.phi.grid, dt, rng);
  if (scratch) {
    require(scratch->has_profile(), errc::bad_argument, "scratch convolver has no profile");
    return scratch->apply(w);
  }
  return convolve(spec.phi, w);
}

Field qwiener_increment(const NoiseSpec& spec, double dt, const RngStream& rng) {
  require(spec.mode == NoiseMode::q_wiener, errc::bad_argument,
          "qwiener_increment needs q_wiener mode");
  require(dt > 0.0, errc::bad_argument, "qwiener_increment: dt must be positive");
  Field f = make_field(spec.phi.grid);
  for (std::size_t k = 0; k < spec.spectrum.size(); ++k) {
    const auto& mode = spec.spectrum[k];
    if (mode.lambda == 0.0) continue;
    const double coef = std::sqrt(mode.lambda * dt) * rng.normal(k);
    for (std::size_t i = 0; i < f.size(); ++i) f.values[i] += coef * mode.e.values[i];
  }
  return f;
}

Field analytic_covariance(const Field& phi) {
  require(static_cast<bool>(phi.grid), errc::bad_profile, "profile has no grid");
  return convolve(phi, reflect(phi));
}

double nikolskii_constant(const Field& phi, double alpha) {
  require(static_cast<bool>(phi.grid), errc::bad_profile, "profile has no grid");
  require(alpha > 0.0 && alpha <= 1.0, errc::bad_argument, "alpha must be in (0, 1]");
  const auto& g = *phi.grid;
  double worst = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    for (int m : {1, 2, 4, 8}) {
      double ss = 0.0;
      for (std::size_t i = 0; i < phi.size(); ++i)
        ss += (phi.values[g.shift(i, axis, m)] - phi.values[i]) *
              (phi.values[g.shift(i, axis, m)] - phi.values[i]);
      const double l2 = std::sqrt(g.cell_volume() * ss);
      worst = std::max(worst, l2 / std::pow(m * g.dx(), alpha));
    }
  }
  return worst;
}

std::vector<SpectrumMode> fourier_modes_for_covariance(const Field& cov, int max_pairs) {
  require(cov.grid && cov.grid->dim() == 1, errc::bad_argument,
          "fourier mode builder supports 1-D grids");
  const auto& g = cov.grid;
  const int n = g->n();
  require(max_pairs >= 0 && max_pairs <= n / 2 - 1, errc::bad_argument,
          "max_pairs must be in [0, n/2 - 1]");
  Convolver conv(g);
  const auto c_hat = conv.dft(cov, /*center_origin=*/true);
  const double L = g->half_width();
  const double dx = g->dx();

  std::vector<SpectrumMode> out;
  out.reserve(1 + 2 * max_pairs);
  {
    SpectrumMode m0;
    m0.lambda = std::max(0.0, dx * c_hat[0].real());
    m0.e = make_field(g, 1.0 / std::sqrt(2.0 * L));
    out.push_back(std::move(m0));
  }
  const double pi = 3.14159265358979323846;
  for (int k = 1; k <= max_pairs; ++k) {
    const double lambda = std::max(0.0, dx * c_hat[k].real());
    SpectrumMode mc, ms;
    mc.lambda = lambda;
    ms.lambda = lambda;
    mc.e = sample(g, [&](double x) { return std::cos(pi * k * x / L) / std::sqrt(L); });
    ms.e = sample(g, [&](double x) { return std::sin(pi * k * x / L) / std::sqrt(L); });
    out.push_back(std::move(mc));
    out.push_back(std::move(ms));
  }
  return out;
}

}  // namespace nf
