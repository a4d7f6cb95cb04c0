#include "nf/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "nf/fingerprint.hpp"

namespace nf {

double GainSpec::operator()(double a) const {
  switch (type) {
    case GainType::sigmoid: return 1.0 / (1.0 + std::exp(-param * a));
    case GainType::heaviside_smooth: return 0.5 * (1.0 + std::tanh(param * a));
    case GainType::constant: return param;
  }
  return 0.0;
}

double GainSpec::bound() const {
  switch (type) {
    case GainType::sigmoid:
    case GainType::heaviside_smooth: return 1.0;
    case GainType::constant: return std::abs(param);
  }
  return 0.0;
}

double GainSpec::lipschitz() const {
  switch (type) {
    case GainType::sigmoid: return param / 4.0;
    case GainType::heaviside_smooth: return param / 2.0;
    case GainType::constant: return 0.0;
  }
  return 0.0;
}

double GainSpec::c_g() const { return std::max(bound(), lipschitz()); }

double DiffusionSpec::operator()(double a) const {
  switch (type) {
    case DiffusionType::constant: return s0;
    case DiffusionType::affine: return s0 + s1 * a;
    case DiffusionType::bounded_smooth: return s0 * std::tanh(a);
  }
  return 0.0;
}

double DiffusionSpec::lipschitz() const {
  switch (type) {
    case DiffusionType::constant: return 0.0;
    case DiffusionType::affine: return std::abs(s1);
    case DiffusionType::bounded_smooth: return std::abs(s0);
  }
  return 0.0;
}

double DiffusionSpec::c_sigma() const {
  return std::max(std::abs((*this)(0.0)), lipschitz());
}

Field InitialSpec::realize(const GridPtr& g) const {
  switch (type) {
    case InitialType::zero:
      return make_field(g, 0.0);
    case InitialType::constant:
      return make_field(g, a);
    case InitialType::gaussian_bump: {
      require(s > 0.0, errc::bad_config, "initial bump scale must be positive");
      const double amp = a, sc = s;
      if (g->dim() == 1)
        return sample(g, [amp, sc](double x) { return amp * std::exp(-x * x / (sc * sc)); });
      return sample(g, [amp, sc](double x0, double x1) {
        return amp * std::exp(-(x0 * x0 + x1 * x1) / (sc * sc));
      });
    }
    case InitialType::from_field:
      require(field.grid && field.grid->spec() == g->spec(), errc::grid_mismatch,
              "initial field on a different grid");
      check_finite(field, "initial field");
      return field;
  }
  fail(errc::bad_config, "bad initial spec");
}

void validate_model(const ModelSpec& model) {
  require(static_cast<bool>(model.kernel.grid()), errc::bad_argument, "model kernel has no grid");
  if (model.gain.type != GainType::constant)
    require(model.gain.param > 0.0, errc::bad_config, "gain slope must be positive");
  // Linear-growth envelope |sigma(a)| <= c_sigma (1 + |a|), probed on a lattice.
  const double c = model.diffusion.c_sigma();
  for (int i = -40; i <= 40; ++i) {
    const double a = 0.5 * i;
    require(std::abs(model.diffusion(a)) <= c * (1.0 + std::abs(a)) + 1e-12, errc::bad_config,
            "diffusion violates the linear growth envelope");
  }
  model.initial.realize(model.kernel.grid());  // validates grid/finiteness
}

double kernel_row_l1_sup(const KernelModel& k) {
  if (k.kind() == KernelKind::homogeneous) {
    double s = 0.0;
    for (double v : k.profile().values) s += std::abs(v);
    return s * k.grid()->cell_volume();
  }
  const auto& m = k.matrix();
  const std::size_t nn = k.grid()->size();
  double worst = 0.0;
  for (std::size_t i = 0; i < nn; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < nn; ++j) row += std::abs(m[i * nn + j]);
    worst = std::max(worst, row);
  }
  return worst * k.grid()->cell_volume();
}

Scheme parse_scheme(const std::string& name) {
  if (name == "exponential_euler") return Scheme::exponential_euler;
  if (name == "euler_maruyama") return Scheme::euler_maruyama;
  fail(errc::bad_config, "unknown scheme: " + name);
}

std::string scheme_name(Scheme s) {
  return s == Scheme::exponential_euler ? "exponential_euler" : "euler_maruyama";
}

int SolverConfig::steps() const {
  require(dt > 0.0, errc::bad_config, "dt must be positive");
  require(t_end >= dt, errc::bad_config, "t_end must be at least dt");
  const double raw = t_end / dt;
  const int s = static_cast<int>(std::llround(raw));
  require(std::abs(s * dt - t_end) <= 1e-9 * std::max(1.0, t_end), errc::bad_config,
          "t_end must be an integer multiple of dt");
  require(record_every >= 1, errc::bad_config, "record_every must be >= 1");
  require(n_paths >= 1, errc::bad_config, "n_paths must be >= 1");
  return s;
}

Field drift_F(const ModelSpec& model, const Field& y) {
  Field gy = y;
  for (double& v : gy.values) v = model.gain(v);
  return apply_kernel(model.kernel, gy);
}

namespace {

void guard_blow_up(const Field& y, std::uint64_t path, int step_no, double t) {
  for (double v : y.values) {
    if (!(std::abs(v) <= 1e12))
      fail(errc::blow_up, "trajectory blow-up: |Y| > 1e12 at path " + std::to_string(path) +
                              ", step " + std::to_string(step_no) + ", t = " + std::to_string(t));
  }
}

Field step_with_drift(const ModelSpec& model, const Field& y, const Field& f,
                      const Field& dw_phi, double dt, Scheme scheme) {
  Field out = make_field(y.grid);
  if (scheme == Scheme::exponential_euler) {
    const double decay = std::exp(-dt);
    const double lift = 1.0 - decay;
    const double nu = std::sqrt((1.0 - std::exp(-2.0 * dt)) / (2.0 * dt));
    for (std::size_t i = 0; i < y.size(); ++i)
      out.values[i] = decay * y.values[i] + lift * f.values[i] +
                      nu * model.diffusion(y.values[i]) * dw_phi.values[i];
  } else {
    for (std::size_t i = 0; i < y.size(); ++i)
      out.values[i] = y.values[i] + dt * (-y.values[i] + f.values[i]) +
                      model.diffusion(y.values[i]) * dw_phi.values[i];
  }
  return out;
}

// Per-path integrator holding persistent FFT plans.
class PathEngine {
 public:
  PathEngine(const ModelSpec& model, const NoiseSpec& noise, const SolverConfig& cfg,
             bool hilbert)
      : model_(model),
        noise_(noise),
        cfg_(cfg),
        hilbert_(hilbert),
        grid_(model.kernel.grid()),
        noise_conv_(grid_) {
    validate_model(model_);
    require(noise_.phi.grid && noise_.phi.grid->spec() == grid_->spec(), errc::grid_mismatch,
            "noise profile on a different grid");
    if (hilbert_)
      require(noise_.mode == NoiseMode::q_wiener, errc::bad_argument,
              "solve_hilbert_path needs q_wiener noise");
    else
      require(noise_.mode == NoiseMode::smoothed_white, errc::bad_argument,
              "solve_path needs smoothed_white noise");
    noise_conv_.set_profile(noise_.phi);
    if (model_.kernel.kind() == KernelKind::homogeneous && !model_.gain.is_zero()) {
      kernel_conv_.emplace(grid_);
      kernel_conv_->set_profile(model_.kernel.profile());
    }
  }

  Field drift(const Field& y) {
    if (model_.gain.is_zero()) return make_field(grid_, 0.0);
    Field gy = y;
    for (double& v : gy.values) v = model_.gain(v);
    if (kernel_conv_) return kernel_conv_->apply(gy);
    return apply_kernel(model_.kernel, gy);
  }

  Field noise_increment(std::uint64_t path_index, int step_no) {
    const RngStream rng{noise_.seed, path_index, static_cast<std::uint64_t>(step_no)};
    if (hilbert_) return noise_conv_.apply(qwiener_increment(noise_, cfg_.dt, rng));
    return noise_conv_.apply(white_increment(grid_, cfg_.dt, rng));
  }

  Trajectory run(std::uint64_t path_index) {
    const int s_total = cfg_.steps();
    Trajectory traj;
    traj.grid = grid_;
    traj.dt = cfg_.dt;
    traj.scheme = cfg_.scheme;
    traj.seed = noise_.seed;
    traj.path_index = path_index;
    traj.model_fingerprint = model_run_fingerprint(model_, noise_, cfg_);

    Field y = model_.initial.realize(grid_);
    traj.times.push_back(0.0);
    traj.states.push_back(y);
    for (int s = 0; s < s_total; ++s) {
      const Field dw = noise_increment(path_index, s + 1);
      const Field f = drift(y);
      y = step_with_drift(model_, y, f, dw, cfg_.dt, cfg_.scheme);
      guard_blow_up(y, path_index, s + 1, (s + 1) * cfg_.dt);
      if ((s + 1) % cfg_.record_every == 0 || s + 1 == s_total) {
        traj.times.push_back((s + 1) * cfg_.dt);
        traj.states.push_back(y);
      }
    }
    return traj;
  }

 private:
  const ModelSpec& model_;
  const NoiseSpec& noise_;
  SolverConfig cfg_;
  bool hilbert_;
  GridPtr grid_;
  Convolver noise_conv_;
  std::optional<Convolver> kernel_conv_;
};

}  // namespace

Field step(const ModelSpec& model, const Field& y, const Field& dw_phi, double dt,
           Scheme scheme) {
  require(dt > 0.0, errc::bad_argument, "step: dt must be positive");
  require(same_grid(y, dw_phi), errc::grid_mismatch, "step: fields on different grids");
  check_finite(y, "state");
  check_finite(dw_phi, "noise increment");
  Field f = drift_F(model, y);
  Field out = step_with_drift(model, y, f, dw_phi, dt, scheme);
  guard_blow_up(out, 0, 0, dt);
  return out;
}

std::string model_run_fingerprint(const ModelSpec& model, const NoiseSpec& noise,
                                  const SolverConfig& cfg) {
  Fingerprint fp;
  const auto& g = *model.kernel.grid();
  fp.add(g.dim());
  fp.add(g.half_width());
  fp.add(g.n());
  fp.add(model.kernel.kind() == KernelKind::homogeneous ? std::string("homogeneous")
                                                        : std::string("general"));
  if (model.kernel.kind() == KernelKind::homogeneous)
    fp.add(model.kernel.profile().values);
  else
    fp.add(model.kernel.matrix());
  fp.add(static_cast<int>(model.gain.type));
  fp.add(model.gain.param);
  fp.add(static_cast<int>(model.diffusion.type));
  fp.add(model.diffusion.s0);
  fp.add(model.diffusion.s1);
  fp.add(static_cast<int>(model.initial.type));
  fp.add(model.initial.a);
  fp.add(model.initial.s);
  if (model.initial.type == InitialType::from_field) fp.add(model.initial.field.values);
  fp.add(noise.mode == NoiseMode::smoothed_white ? std::string("smoothed_white")
                                                 : std::string("q_wiener"));
  fp.add(noise.phi.values);
  for (const auto& m : noise.spectrum) {
    fp.add(m.lambda);
    fp.add(m.e.values);
  }
  fp.add(noise.seed);
  fp.add(cfg.dt);
  fp.add(cfg.t_end);
  fp.add(scheme_name(cfg.scheme));
  fp.add(cfg.record_every);
  return fp.hex();
}

Trajectory solve_path(const ModelSpec& model, const NoiseSpec& noise, const SolverConfig& cfg,
                      std::uint64_t path_index) {
  PathEngine engine(model, noise, cfg, /*hilbert=*/false);
  return engine.run(path_index);
}

Trajectory solve_hilbert_path(const ModelSpec& model, const NoiseSpec& noise,
                              const SolverConfig& cfg, std::uint64_t path_index) {
  PathEngine engine(model, noise, cfg, /*hilbert=*/true);
  return engine.run(path_index);
}

std::vector<Field> picard_iterates_at_end(const ModelSpec& model,
                                          const std::vector<Field>& dw_phi, double dt,
                                          int n_iter) {
  require(dt > 0.0, errc::bad_argument, "picard: dt must be positive");
  require(n_iter >= 1, errc::bad_argument, "picard: n_iter must be >= 1");
  require(!dw_phi.empty(), errc::bad_argument, "picard: no noise increments");
  validate_model(model);
  const GridPtr& g = model.kernel.grid();
  for (const auto& w : dw_phi)
    require(w.grid && w.grid->spec() == g->spec(), errc::grid_mismatch,
            "picard: increment on a different grid");
  const int s_total = static_cast<int>(dw_phi.size());
  const double decay = std::exp(-dt);

  std::optional<Convolver> kconv;
  if (model.kernel.kind() == KernelKind::homogeneous && !model.gain.is_zero()) {
    kconv.emplace(g);
    kconv->set_profile(model.kernel.profile());
  }
  auto drift = [&](const Field& y) -> Field {
    if (model.gain.is_zero()) return make_field(g, 0.0);
    Field gy = y;
    for (double& v : gy.values) v = model.gain(v);
    return kconv ? kconv->apply(gy) : apply_kernel(model.kernel, gy);
  };

  const Field y0 = model.initial.realize(g);
  std::vector<Field> prev(s_total + 1, y0);  // iterate 0: constant in time
  std::vector<Field> ends;
  ends.push_back(y0);
  for (int k = 1; k <= n_iter; ++k) {
    std::vector<Field> cur(s_total + 1, make_field(g));
    cur[0] = y0;
    for (int m = 0; m < s_total; ++m) {
      const Field f = drift(prev[m]);
      Field& next = cur[m + 1];
      for (std::size_t i = 0; i < next.size(); ++i)
        next.values[i] = decay * (cur[m].values[i] + dt * f.values[i] +
                                  model.diffusion(prev[m].values[i]) * dw_phi[m].values[i]);
      guard_blow_up(next, 0, m + 1, (m + 1) * dt);
    }
    ends.push_back(cur[s_total]);
    prev = std::move(cur);
  }
  return ends;
}

PicardDiagnostics picard_solve(const ModelSpec& model, const NoiseSpec& noise,
                               const SolverConfig& cfg, int n_iter, int n_paths) {
  require(noise.mode == NoiseMode::smoothed_white, errc::bad_argument,
          "picard_solve freezes smoothed white noise");
  require(n_iter >= 1 && n_paths >= 1, errc::bad_argument, "picard: bad iteration counts");
  const int s_total = cfg.steps();
  const GridPtr& g = model.kernel.grid();
  require(noise.phi.grid && noise.phi.grid->spec() == g->spec(), errc::grid_mismatch,
          "noise profile on a different grid");

  Convolver phi_conv(g);
  phi_conv.set_profile(noise.phi);

  std::vector<std::vector<double>> sum_sq(static_cast<std::size_t>(n_iter),
                                          std::vector<double>(g->size(), 0.0));
  for (int p = 0; p < n_paths; ++p) {
    std::vector<Field> dw;
    dw.reserve(s_total);
    for (int s = 0; s < s_total; ++s) {
      const RngStream rng{noise.seed, static_cast<std::uint64_t>(p),
                          static_cast<std::uint64_t>(s + 1)};
      dw.push_back(phi_conv.apply(white_increment(g, cfg.dt, rng)));
    }
    const auto ends = picard_iterates_at_end(model, dw, cfg.dt, n_iter);
    for (int k = 0; k < n_iter; ++k)
      for (std::size_t i = 0; i < g->size(); ++i) {
        const double d = ends[k + 1].values[i] - ends[k].values[i];
        sum_sq[k][i] += d * d;
      }
  }

  PicardDiagnostics diag;
  diag.n_iter = n_iter;
  diag.n_paths = n_paths;
  diag.t_end = cfg.t_end;
  diag.H.resize(n_iter);
  for (int k = 0; k < n_iter; ++k) {
    double sup = 0.0;
    for (double s : sum_sq[k]) sup = std::max(sup, s / n_paths);
    diag.H[k] = sup;
  }
  const double cs = model.diffusion.c_sigma();
  const double cg = model.gain.c_g();
  diag.k_const = 2.0 * std::max(cs * cs, cg * cg);
  diag.c_w = kernel_row_l1_sup(model.kernel);
  Field phi_sq = noise.phi;
  for (double& v : phi_sq.values) v *= v;
  diag.phi_l2_sq = integrate(phi_sq);
  return diag;
}

}  // namespace nf
