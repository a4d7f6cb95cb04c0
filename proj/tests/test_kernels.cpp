#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "nf/convolve.hpp"
#include "nf/kernels.hpp"
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

double sup_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Field bump(const GridPtr& g) {
  return sample(g, [](double x) { return std::exp(-0.5 * x * x) * (1.0 + 0.3 * x); });
}

}  // namespace

TEST_CASE("convolution with a unit-mass spike is the identity") {
  const GridPtr g = Grid::make({1, 5.0, 64});
  Field delta = make_field(g);
  delta[g->origin()] = 1.0 / g->dx();
  const Field u = bump(g);
  CHECK(sup_diff(convolve(delta, u), u) <= 1e-12);
}

TEST_CASE("convolution with a flat profile returns the box integral everywhere") {
  const GridPtr g = Grid::make({1, 5.0, 64});
  const Field ones = make_field(g, 1.0);
  const Field u = bump(g);
  const double mass = integrate(u);
  const Field out = convolve(ones, u);
  for (std::size_t i = 0; i < out.size(); ++i)
    CHECK(out[i] == doctest::Approx(mass).epsilon(1e-12));
}

TEST_CASE("fft convolution matches direct summation on a mixed-radix mesh") {
  const GridPtr g = Grid::make({1, 5.0, 100});  // 100 = 2^2 * 5^2
  const Field p = sample(g, [](double x) { return std::exp(-x * x) - 0.4 * std::exp(-0.25 * x * x); });
  const Field u = bump(g);
  CHECK(sup_diff(convolve(p, u), oracle::convolve_direct(p, u)) <= 1e-12);
}

TEST_CASE("fft convolution matches direct summation in two dimensions") {
  const GridPtr g = Grid::make({2, 3.0, 32});
  const Field p = sample(g, [](double x, double y) { return std::exp(-x * x - 2.0 * y * y); });
  const Field u = sample(g, [](double x, double y) { return std::cos(x) * std::exp(-y * y); });
  CHECK(sup_diff(convolve(p, u), oracle::convolve_direct(p, u)) <= 1e-12);
}

TEST_CASE("dft/idft round trip and even-profile spectra are real") {
  const GridPtr g = Grid::make({1, 4.0, 64});
  Convolver conv(g);
  const Field u = bump(g);
  CHECK(sup_diff(conv.idft(conv.dft(u, false), false), u) <= 1e-12);

  const Field even = sample(g, [](double x) { return std::exp(-x * x); });
  for (const auto& z : conv.dft(even, true)) CHECK(std::abs(z.imag()) <= 1e-12);
}

TEST_CASE("builtin kernel formulas") {
  const KernelBuiltin gauss{BuiltinName::gaussian, 2.0, 3.0};
  CHECK(gauss.profile_value(1, 1.5, 0.0) == doctest::Approx(2.0 * std::exp(-2.25 / 9.0)));
  CHECK(gauss.homogeneous());

  const KernelBuiltin hat{BuiltinName::mexican_hat, 1.0, 1.0, 0.5, 2.0};
  CHECK(hat.profile_value(1, 0.0, 0.0) == doctest::Approx(0.5));
  CHECK(hat.profile_value(2, 1.0, 1.0) ==
        doctest::Approx(std::exp(-2.0) - 0.5 * std::exp(-0.5)));

  const KernelBuiltin expk{BuiltinName::exponential, 1.5, 2.0};
  CHECK(expk.profile_value(1, -3.0, 0.0) == doctest::Approx(1.5 * std::exp(-1.5)));

  const KernelBuiltin rank{BuiltinName::rank_one_gaussian, 2.0};
  CHECK(!rank.homogeneous());
  CHECK(rank.factor_value(1, 1.0, 0.0) == doctest::Approx(2.0 * std::exp(-0.5)));

  const KernelBuiltin prod{BuiltinName::inv_linear_product};
  CHECK(prod.factor_value(1, -3.0, 0.0) == doctest::Approx(0.25));
  CHECK(prod.factor_value(2, 1.0, 3.0) == doctest::Approx(1.0 / 8.0));

  CHECK(parse_builtin("gaussian", 1, 1, 0, 1).name == BuiltinName::gaussian);
  CHECK_FAILS_WITH(parse_builtin("venusian", 1, 1, 0, 1), bad_config);
}

TEST_CASE("homogeneous kernel application is the profile convolution") {
  const GridPtr g = Grid::make({1, 5.0, 64});
  const KernelModel k = KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::gaussian});
  const Field u = bump(g);
  CHECK(sup_diff(apply_kernel(k, u), oracle::convolve_direct(k.profile(), u)) <= 1e-12);

  // |profile| convolution for the sign-changing kernel
  const KernelModel hat =
      KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::mexican_hat, 1.0, 1.0, 0.8, 2.0});
  Field abs_p = hat.profile();
  for (double& v : abs_p.values) v = std::abs(v);
  CHECK(sup_diff(apply_kernel(hat, u, /*absolute=*/true),
                 oracle::convolve_direct(abs_p, u)) <= 1e-12);
}

TEST_CASE("dense kernel application, transpose, and absolute value") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  const int n = g->n();
  // deliberately asymmetric: w(x, y) = (1 + 0.5 sin(pi x / 4)) e^{-(x-y)^2} - 0.2
  auto w = [](double x, double y) {
    return (1.0 + 0.5 * std::sin(std::numbers::pi * x / 4.0)) * std::exp(-(x - y) * (x - y)) -
           0.2;
  };
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] = w(g->coord(i), g->coord(j));
  const KernelModel k = KernelModel::general(g, m);
  const Field h = bump(g);

  Field direct = make_field(g), direct_t = make_field(g), direct_abs = make_field(g);
  for (int i = 0; i < n; ++i) {
    double s = 0.0, st = 0.0, sa = 0.0;
    for (int j = 0; j < n; ++j) {
      s += w(g->coord(i), g->coord(j)) * h[static_cast<std::size_t>(j)];
      st += w(g->coord(j), g->coord(i)) * h[static_cast<std::size_t>(j)];
      sa += std::abs(w(g->coord(i), g->coord(j))) * h[static_cast<std::size_t>(j)];
    }
    direct[static_cast<std::size_t>(i)] = s * g->dx();
    direct_t[static_cast<std::size_t>(i)] = st * g->dx();
    direct_abs[static_cast<std::size_t>(i)] = sa * g->dx();
  }
  CHECK(sup_diff(apply_kernel(k, h), direct) <= 1e-12);
  CHECK(sup_diff(apply_kernel(k, h, false, /*transpose=*/true), direct_t) <= 1e-12);
  CHECK(sup_diff(apply_kernel(k, h, /*absolute=*/true), direct_abs) <= 1e-12);
}

TEST_CASE("convolution obeys the L1-L2 bound") {
  const GridPtr g = Grid::make({1, 6.0, 128});
  const KernelModel k =
      KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::mexican_hat, 1.0, 1.0, 0.5, 2.0});
  const Field h = sample(g, [](double x) { return std::sin(3.0 * x) * std::exp(-0.1 * x * x); });
  Field abs_p = k.profile();
  for (double& v : abs_p.values) v = std::abs(v);
  const double l1 = integrate(abs_p);
  const Field out = apply_kernel(k, h);
  const double out_l2 = std::sqrt(integrate(out, out));
  const double h_l2 = std::sqrt(integrate(h, h));
  CHECK(out_l2 <= l1 * h_l2 * (1.0 + 1e-12));
}

TEST_CASE("square-integral of a translation-invariant kernel grows with the box") {
  const GridPtr g = Grid::make({1, 10.0, 256});
  const KernelModel k = KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::gaussian});
  const ConditionReport r = check_condition(k, Condition::c1);
  // integral over the strip = 2L * int p^2 = 2L sqrt(pi/2)
  const double ref = 20.0 * oracle::integrate_1d(
                                [](double x) { return std::exp(-2.0 * x * x); }, -10.0, 10.0);
  CHECK(r.value_at_box == doctest::Approx(ref).epsilon(1e-10));
  CHECK(r.ratio == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r.verdict == ConditionVerdict::diverges_under_refinement);
}

TEST_CASE("sup-row mass of the gaussian kernel holds with the L1 constant") {
  const GridPtr g = Grid::make({1, 10.0, 256});
  const KernelModel k = KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::gaussian});
  const ConditionReport r = check_condition(k, Condition::c2prime);
  CHECK(r.verdict == ConditionVerdict::holds);
  REQUIRE(r.constant.has_value());
  CHECK(*r.constant == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("translation L1 continuity of the gaussian kernel holds") {
  const GridPtr g = Grid::make({1, 10.0, 256});
  const KernelModel k = KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::gaussian});
  const ConditionReport r = check_condition(k, Condition::c3prime, 0.5);
  CHECK(r.verdict == ConditionVerdict::holds);
  REQUIRE(r.alpha.has_value());
  CHECK(*r.alpha == 0.5);
  REQUIRE(r.constant.has_value());
  CHECK(*r.constant > 0.0);
}

TEST_CASE("the product kernel keeps square-integrability but not row masses") {
  const GridPtr g = Grid::make({1, 200.0, 2048});
  const KernelModel k =
      KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::inv_linear_product});

  const ConditionReport r1 = check_condition(k, Condition::c1);
  const double f2 = 2.0 * (1.0 - 1.0 / 201.0);  // int (1+|x|)^-2 over [-200, 200]
  CHECK(r1.verdict == ConditionVerdict::holds);
  CHECK(r1.value_at_box == doctest::Approx(f2 * f2).epsilon(0.03));

  const ConditionReport r2 = check_condition(k, Condition::c2);
  auto c2_closed_form = [](double L) {  // int (int |w| dy)^2 dx on [-L, L]^2
    const double l1 = 2.0 * std::log(1.0 + L);
    return 2.0 * (1.0 - 1.0 / (1.0 + L)) * l1 * l1;
  };
  CHECK(r2.verdict == ConditionVerdict::diverges_under_refinement);
  CHECK(r2.ratio == doctest::Approx(c2_closed_form(400.0) / c2_closed_form(200.0)).epsilon(0.02));
}

TEST_CASE("opaque dense kernels refuse box doubling") {
  const GridPtr g = Grid::make({1, 2.0, 16});
  std::vector<double> m(16 * 16, 0.5);
  const KernelModel k = KernelModel::general(g, m);
  CHECK_FAILS_WITH(check_condition(k, Condition::c1), kernel_not_refinable);
}

TEST_CASE("power iteration nails the separable kernel in a few steps") {
  const GridPtr g = Grid::make({1, 15.0, 512});
  const KernelModel k =
      KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::rank_one_gaussian});
  const EigenResult r = solve_rho_power(k, 1e-12, 50);
  // leading eigenvalue = int u^2 = int e^{-x^2} = sqrt(pi); eigenfunction = u
  CHECK(r.lambda == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-8));
  CHECK(r.residual <= 1e-10);
  CHECK(r.iterations <= 3);
  CHECK(integrate(r.rho) == doctest::Approx(1.0).epsilon(1e-12));
  const double scale = r.rho[g->origin()];  // rho is proportional to e^{-x^2/2}
  for (int i = 0; i < g->n(); i += 37) {
    const double x = g->coord(i);
    CHECK(r.rho[static_cast<std::size_t>(i)] ==
          doctest::Approx(scale * std::exp(-0.5 * x * x)).epsilon(1e-6));
  }
}

TEST_CASE("power iteration on a dense kernel matches an independent iteration") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  const int n = g->n();
  auto w = [](double x, double y) {
    return (1.0 + 0.5 * std::sin(0.7 * x)) * std::exp(-(x - y) * (x - y));
  };
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] = w(g->coord(i), g->coord(j));
  const KernelModel k = KernelModel::general(g, m);
  const EigenResult r = solve_rho_power(k, 1e-12, 500);

  // reference: plain dense iteration of rho'(y) = dx sum_x |w(x,y)| rho(x)
  std::vector<double> rho(static_cast<std::size_t>(n), 1.0 / 8.0);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        next[static_cast<std::size_t>(j)] +=
            std::abs(m[static_cast<std::size_t>(i) * n + j]) * rho[static_cast<std::size_t>(i)] *
            g->dx();
    double mass = 0.0;
    for (double v : next) mass += v * g->dx();
    lambda = mass;
    for (double& v : next) v /= mass;
    rho = std::move(next);
  }
  CHECK(r.lambda == doctest::Approx(lambda).epsilon(1e-9));
  double d = 0.0;
  for (int i = 0; i < n; ++i)
    d = std::max(d, std::abs(r.rho[static_cast<std::size_t>(i)] - rho[static_cast<std::size_t>(i)]));
  CHECK(d <= 1e-8);
}

TEST_CASE("closed-form density certifies the gaussian kernel") {
  const GridPtr g = Grid::make({1, 15.0, 512});
  const KernelModel k = KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::gaussian});
  const EigenResult r = solve_rho_fourier(k);
  CHECK(r.lambda == doctest::Approx(std::sqrt(std::numbers::pi) + 1.0).epsilon(1e-8));
  CHECK(r.residual <= 1e-8);
  CHECK(r.min_rho >= -1e-12);
  CHECK(integrate(r.rho) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(verify_c1prime(k, r.rho, r.lambda) <= 1e-10);
}

TEST_CASE("closed-form density works on a two-dimensional kernel") {
  const GridPtr g = Grid::make({2, 6.0, 64});
  const KernelModel k =
      KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::mexican_hat, 1.0, 1.0, 0.4, 1.8});
  const EigenResult r = solve_rho_fourier(k);
  CHECK(r.residual <= 1e-8);
  CHECK(r.min_rho >= -1e-12);
  CHECK(verify_c1prime(k, r.rho, r.lambda) <= 1e-8);
}

TEST_CASE("a vanishing kernel has no leading eigenpair") {
  const GridPtr g = Grid::make({1, 4.0, 32});
  const KernelModel k =
      KernelModel::from_builtin(g, KernelBuiltin{BuiltinName::gaussian, 0.0});
  CHECK_FAILS_WITH(solve_rho_power(k), zero_kernel);
}

TEST_CASE("condition names parse and print consistently") {
  for (Condition c : {Condition::c1, Condition::c2, Condition::c2prime, Condition::c3prime})
    CHECK(parse_condition(condition_name(c)) == c);
  CHECK_FAILS_WITH(parse_condition("c9"), bad_config);
}
