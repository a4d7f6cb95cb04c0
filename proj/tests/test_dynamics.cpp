#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "nf/dynamics.hpp"
#include "oracles.hpp"

using namespace nf;

#define CHECK_FAILS_WITH(expr, expected_code)                \
  do {                                                       \
    try {                                                    \
      (void)(expr);                                          \
      FAIL_CHECK("expected an error from " #expr);           \
    } catch (const nf::Error& e) {                           \
      CHECK(e.code() == nf::errc::expected_code);            \
    }                                                        \
  } while (0)

namespace {

ModelSpec linear_model(const GridPtr& g, double sigma = 1.0) {
  ModelSpec m;
  m.kernel = KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::gaussian});
  m.gain = GainSpec{GainType::constant, 0.0};
  m.diffusion = DiffusionSpec{DiffusionType::constant, sigma, 0.0};
  m.initial = InitialSpec{};
  return m;
}

ModelSpec nonlinear_model(const GridPtr& g) {
  ModelSpec m;
  m.kernel = KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::gaussian});
  m.gain = GainSpec{GainType::sigmoid, 1.5};
  m.diffusion = DiffusionSpec{DiffusionType::affine, 0.2, 0.1};
  m.initial = InitialSpec{InitialType::gaussian_bump, 1.0, 2.0, {}};
  return m;
}

}  // namespace

TEST_CASE("gain functions: values, bounds, slopes") {
  const GainSpec sig{GainType::sigmoid, 2.0};
  CHECK(sig(0.0) == doctest::Approx(0.5));
  CHECK(sig(1.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  CHECK(sig.bound() == doctest::Approx(1.0));
  CHECK(sig.lipschitz() == doctest::Approx(0.5));  // beta / 4

  // the stated slope really bounds the numerical derivative
  double steepest = 0.0;
  for (double a = -6.0; a <= 6.0; a += 0.01)
    steepest = std::max(steepest, std::abs(sig(a + 1e-6) - sig(a - 1e-6)) / 2e-6);
  CHECK(steepest <= sig.lipschitz() * (1.0 + 1e-6));

  const GainSpec heavi{GainType::heaviside_smooth, 3.0};
  CHECK(heavi(0.0) == doctest::Approx(0.5));
  CHECK(heavi(10.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(heavi.lipschitz() == doctest::Approx(1.5));  // k / 2

  const GainSpec zero{GainType::constant, 0.0};
  CHECK(zero.is_zero());
  CHECK(zero(3.0) == 0.0);
  CHECK(!GainSpec{GainType::constant, 0.5}.is_zero());
}

TEST_CASE("diffusion functions: values and envelope constants") {
  const DiffusionSpec aff{DiffusionType::affine, 0.3, -0.2};
  CHECK(aff(2.0) == doctest::Approx(0.3 - 0.4));
  CHECK(aff.lipschitz() == doctest::Approx(0.2));
  CHECK(aff.c_sigma() == doctest::Approx(0.3));  // max(|sigma(0)|, lip)

  const DiffusionSpec con{DiffusionType::constant, 0.7, 0.0};
  CHECK(con(123.0) == 0.7);
  CHECK(con.lipschitz() == 0.0);

  const DiffusionSpec tanh_s{DiffusionType::bounded_smooth, 0.5, 0.0};
  CHECK(tanh_s(100.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tanh_s(0.4) == doctest::Approx(0.5 * std::tanh(0.4)));
  // |sigma(a)| <= c_sigma (1 + |a|) across a sample lattice
  for (double a = -20.0; a <= 20.0; a += 0.5)
    CHECK(std::abs(tanh_s(a)) <= tanh_s.c_sigma() * (1.0 + std::abs(a)) + 1e-12);
}

TEST_CASE("initial states realize on the grid") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  CHECK(integrate(InitialSpec{}.realize(g)) == 0.0);
  const Field c = InitialSpec{InitialType::constant, 2.5, 1.0, {}}.realize(g);
  CHECK(c[7] == 2.5);
  const Field b = InitialSpec{InitialType::gaussian_bump, 2.0, 3.0, {}}.realize(g);
  CHECK(b[g->origin()] == doctest::Approx(2.0));
  CHECK(b[g->shift(g->origin(), 0, 8)] ==
        doctest::Approx(2.0 * std::exp(-4.0 / 9.0)));

  Field seed_field = make_field(g, 1.0);
  const InitialSpec from{InitialType::from_field, 0, 1, seed_field};
  CHECK(from.realize(g)[0] == 1.0);
  const GridPtr other = Grid::make({1, 4.0, 64});
  CHECK_FAILS_WITH((InitialSpec{InitialType::from_field, 0, 1, seed_field}.realize(other)),
                   grid_mismatch);
}

TEST_CASE("model validation rejects inconsistent pieces") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  ModelSpec m = nonlinear_model(g);
  CHECK_NOTHROW(validate_model(m));

  m.gain.param = -1.0;
  CHECK_THROWS_AS(validate_model(m), Error);
  m = nonlinear_model(g);

  m.initial = InitialSpec{InitialType::from_field, 0, 1, make_field(Grid::make({1, 2.0, 32}))};
  CHECK_THROWS_AS(validate_model(m), Error);
}

TEST_CASE("solver mesh validation") {
  SolverConfig cfg{0.01, 1.0, Scheme::exponential_euler, 1, 1};
  CHECK(cfg.steps() == 100);
  cfg.dt = 0.015;  // 1.0 is not an integer multiple
  CHECK_FAILS_WITH(cfg.steps(), bad_config);
  cfg.dt = -0.01;
  CHECK_FAILS_WITH(cfg.steps(), bad_config);
  cfg = SolverConfig{0.5, 0.25, Scheme::exponential_euler, 1, 1};  // ends before one step
  CHECK_FAILS_WITH(cfg.steps(), bad_config);
  cfg = SolverConfig{0.25, 1.0, Scheme::exponential_euler, 0, 1};
  CHECK_FAILS_WITH(cfg.steps(), bad_config);
  cfg = SolverConfig{0.25, 1.0, Scheme::exponential_euler, 1, 0};
  CHECK_FAILS_WITH(cfg.steps(), bad_config);
}

TEST_CASE("scheme names round-trip") {
  CHECK(parse_scheme(scheme_name(Scheme::exponential_euler)) == Scheme::exponential_euler);
  CHECK(parse_scheme(scheme_name(Scheme::euler_maruyama)) == Scheme::euler_maruyama);
  CHECK_THROWS_AS(parse_scheme("leapfrog"), Error);
}

TEST_CASE("drift is the kernel applied to the gained state") {
  const GridPtr g = Grid::make({1, 5.0, 64});
  const ModelSpec m = nonlinear_model(g);
  const Field y = sample(g, [](double x) { return std::cos(x) * std::exp(-0.2 * x * x); });
  Field gained = y;
  for (double& v : gained.values) v = m.gain(v);
  const Field ref = oracle::convolve_direct(m.kernel.profile(), gained);
  const Field out = drift_F(m, y);
  for (std::size_t i = 0; i < out.size(); ++i)
    CHECK(std::abs(out[i] - ref[i]) <= 1e-12);
}

TEST_CASE("one exponential step has exact linear algebra") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  const ModelSpec m = linear_model(g);
  const double dt = 0.01;

  Field y = make_field(g, 3.0);
  const Field zero_dw = make_field(g, 0.0);
  const Field decayed = step(m, y, zero_dw, dt, Scheme::exponential_euler);
  CHECK(decayed[5] == doctest::Approx(3.0 * std::exp(-dt)).epsilon(1e-15));

  Field w = make_field(g, 0.0);
  w[9] = 1.25;
  const Field kicked = step(m, make_field(g, 0.0), w, dt, Scheme::exponential_euler);
  const double nu = std::sqrt((1.0 - std::exp(-2.0 * dt)) / (2.0 * dt));
  CHECK(kicked[9] == doctest::Approx(nu * 1.25).epsilon(1e-14));
  CHECK(kicked[10] == 0.0);
}

TEST_CASE("one explicit step matches its formula") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  ModelSpec m = linear_model(g, 0.5);
  const double dt = 0.02;
  Field y = make_field(g, 2.0);
  Field w = make_field(g, 0.3);
  const Field out = step(m, y, w, dt, Scheme::euler_maruyama);
  // y + dt (-y + 0) + sigma w
  CHECK(out[0] == doctest::Approx(2.0 - dt * 2.0 + 0.5 * 0.3).epsilon(1e-14));
}

TEST_CASE("states beyond the guard magnitude abort the step") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  const ModelSpec m = linear_model(g);
  const Field y = make_field(g, 2.0e12);
  const Field dw = make_field(g, 0.0);
  CHECK_FAILS_WITH(step(m, y, dw, 0.01, Scheme::exponential_euler), blow_up);
}

TEST_CASE("paths record the initial, periodic, and final states") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  ModelSpec m = nonlinear_model(g);
  const NoiseSpec noise = make_smoothed_white(phi_indicator(g, 0.5), 11);
  const SolverConfig cfg{0.1, 1.0, Scheme::exponential_euler, 3, 1};
  const Trajectory tr = solve_path(m, noise, cfg, 0);
  const std::vector<double> expect = {0.0, 0.3, 0.6, 0.9, 1.0};
  REQUIRE(tr.times.size() == expect.size());
  for (std::size_t k = 0; k < expect.size(); ++k)
    CHECK(tr.times[k] == doctest::Approx(expect[k]).epsilon(1e-12));
  CHECK(tr.states.size() == expect.size());
  CHECK(integrate(tr.states[0]) == doctest::Approx(integrate(m.initial.realize(g))));
}

TEST_CASE("repeated paths are identical, different paths are not") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  ModelSpec m = nonlinear_model(g);
  const NoiseSpec noise = make_smoothed_white(phi_indicator(g, 0.5), 12);
  const SolverConfig cfg{0.05, 0.5, Scheme::exponential_euler, 2, 1};
  const Trajectory a = solve_path(m, noise, cfg, 3);
  const Trajectory b = solve_path(m, noise, cfg, 3);
  const Trajectory c = solve_path(m, noise, cfg, 4);
  double same = 0.0, different = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k)
    for (std::size_t i = 0; i < a.states[k].size(); ++i) {
      same = std::max(same, std::abs(a.states[k][i] - b.states[k][i]));
      different = std::max(different, std::abs(a.states[k][i] - c.states[k][i]));
    }
  CHECK(same == 0.0);
  CHECK(different > 0.0);
}

TEST_CASE("the damped stochastic integral has the exact one-step variance") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  const ModelSpec m = linear_model(g);
  const Field phi = phi_indicator(g, 0.5);
  const NoiseSpec noise = make_smoothed_white(phi, 77);
  const double dt = 0.25;
  const double c0 = analytic_covariance(phi)[g->origin()];
  Convolver conv(g);
  conv.set_profile(phi);

  const int n_draws = 4000;
  std::vector<double> sq(n_draws);
  const Field zero = make_field(g, 0.0);
  for (int d = 0; d < n_draws; ++d) {
    const Field dw =
        smoothed_increment(noise, dt, RngStream{noise.seed, static_cast<std::uint64_t>(d), 1}, &conv);
    const Field y1 = step(m, zero, dw, dt, Scheme::exponential_euler);
    double s = 0.0;
    for (std::size_t i = 0; i < y1.size(); ++i) s += y1[i] * y1[i];
    sq[d] = s / static_cast<double>(y1.size());
  }
  const auto v = oracle::mean_se(sq);
  const double exact = c0 * (1.0 - std::exp(-2.0 * dt)) / 2.0;
  CHECK(std::abs(v.mean - exact) <= 4.0 * v.se);
}

TEST_CASE("ensemble variance of the zero-gain model approaches the damped limit") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  const ModelSpec m = linear_model(g);
  const Field phi = phi_indicator(g, 0.5);
  const NoiseSpec noise = make_smoothed_white(phi, 78);
  const SolverConfig cfg{0.05, 1.0, Scheme::exponential_euler, 20, 1};
  const double c0 = analytic_covariance(phi)[g->origin()];
  const double exact = c0 * (1.0 - std::exp(-2.0)) / 2.0;

  const int n_paths = 2000;
  std::vector<double> sq(n_paths);
  for (int p = 0; p < n_paths; ++p) {
    const Trajectory tr = solve_path(m, noise, cfg, static_cast<std::uint64_t>(p));
    const Field& yT = tr.states.back();
    double s = 0.0;
    for (std::size_t i = 0; i < yT.size(); ++i) s += yT[i] * yT[i];
    sq[p] = s / static_cast<double>(yT.size());
  }
  const auto v = oracle::mean_se(sq);
  CHECK(std::abs(v.mean - exact) <= 4.0 * v.se);
}

TEST_CASE("expansion-driven paths with a vanishing spectrum are deterministic") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  ModelSpec m = nonlinear_model(g);
  std::vector<SpectrumMode> silent(1);
  silent[0].lambda = 0.0;
  silent[0].e = make_field(g, 1.0 / std::sqrt(8.0));
  const SolverConfig cfg{0.05, 0.5, Scheme::exponential_euler, 10, 1};
  const Trajectory a =
      solve_hilbert_path(m, make_q_wiener(phi_delta(g), silent, 1), cfg, 0);
  const Trajectory b =
      solve_hilbert_path(m, make_q_wiener(phi_delta(g), silent, 2), cfg, 5);
  double d = 0.0;
  for (std::size_t i = 0; i < a.states.back().size(); ++i)
    d = std::max(d, std::abs(a.states.back()[i] - b.states.back()[i]));
  CHECK(d == 0.0);  // different seeds and path indices cannot matter
}

TEST_CASE("successive substitution is exact after one pass on the linear model") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  const ModelSpec m = linear_model(g, 0.8);
  const NoiseSpec noise = make_smoothed_white(phi_indicator(g, 0.5), 21);
  const SolverConfig cfg{0.05, 0.5, Scheme::exponential_euler, 1, 1};
  const PicardDiagnostics diag = picard_solve(m, noise, cfg, 4, 20);
  REQUIRE(diag.H.size() == 4);
  CHECK(diag.H[0] > 0.0);  // the first pass picks up the stochastic term
  for (std::size_t k = 1; k < diag.H.size(); ++k) CHECK(diag.H[k] <= 1e-28);
  CHECK(diag.k_const == doctest::Approx(2.0 * 0.8 * 0.8));
  CHECK(diag.phi_l2_sq ==
        doctest::Approx(integrate(phi_indicator(g, 0.5), phi_indicator(g, 0.5))));
}

TEST_CASE("run fingerprints track every ingredient") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  const ModelSpec m = nonlinear_model(g);
  const NoiseSpec noise = make_smoothed_white(phi_indicator(g, 0.5), 5);
  const SolverConfig cfg{0.05, 0.5, Scheme::exponential_euler, 1, 2};
  const std::string base = model_run_fingerprint(m, noise, cfg);
  CHECK(base == model_run_fingerprint(m, noise, cfg));

  NoiseSpec other_seed = noise;
  other_seed.seed = 6;
  CHECK(model_run_fingerprint(m, other_seed, cfg) != base);

  SolverConfig other_dt = cfg;
  other_dt.dt = 0.025;
  CHECK(model_run_fingerprint(m, noise, other_dt) != base);

  ModelSpec other_gain = m;
  other_gain.gain.param = 2.0;
  CHECK(model_run_fingerprint(other_gain, noise, cfg) != base);
}
