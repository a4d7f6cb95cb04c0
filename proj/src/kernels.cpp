#include "nf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "nf/convolve.hpp"

namespace nf {

namespace {

double sq(double x) { return x * x; }

}  // namespace

double KernelBuiltin::profile_value(int dim, double r0, double r1) const {
  const double rr = dim == 1 ? sq(r0) : sq(r0) + sq(r1);
  switch (name) {
    case BuiltinName::gaussian:
      return a1 * std::exp(-rr / sq(s1));
    case BuiltinName::mexican_hat:
      return a1 * std::exp(-rr / sq(s1)) - a2 * std::exp(-rr / sq(s2));
    case BuiltinName::exponential:
      return a1 * std::exp(-std::sqrt(rr) / s1);
    default:
      fail(errc::bad_argument, "profile_value: kernel is not homogeneous");
  }
}

double KernelBuiltin::factor_value(int dim, double x0, double x1) const {
  switch (name) {
    case BuiltinName::rank_one_gaussian: {
      const double rr = dim == 1 ? sq(x0) : sq(x0) + sq(x1);
      return a1 * std::exp(-rr / (2.0 * sq(s1)));
    }
    case BuiltinName::inv_linear_product: {
      double f = a1 / (1.0 + std::abs(x0));
      if (dim == 2) f /= 1.0 + std::abs(x1);
      return f;
    }
    default:
      fail(errc::bad_argument, "factor_value: kernel is not separable general");
  }
}

KernelBuiltin parse_builtin(const std::string& name, double a1, double s1, double a2,
                            double s2) {
  KernelBuiltin b;
  b.a1 = a1;
  b.s1 = s1;
  b.a2 = a2;
  b.s2 = s2;
  if (name == "gaussian")
    b.name = BuiltinName::gaussian;
  else if (name == "mexican_hat")
    b.name = BuiltinName::mexican_hat;
  else if (name == "exponential")
    b.name = BuiltinName::exponential;
  else if (name == "rank_one_gaussian")
    b.name = BuiltinName::rank_one_gaussian;
  else if (name == "inv_linear_product")
    b.name = BuiltinName::inv_linear_product;
  else
    fail(errc::bad_config, "unknown kernel builtin: " + name);
  require(s1 > 0.0 && s2 > 0.0, errc::bad_config, "kernel scales must be positive");
  return b;
}

KernelModel KernelModel::homogeneous(Field profile) {
  require(static_cast<bool>(profile.grid), errc::bad_argument, "kernel profile has no grid");
  check_finite(profile, "kernel profile");
  KernelModel k;
  k.kind_ = KernelKind::homogeneous;
  k.grid_ = profile.grid;
  k.profile_ = std::move(profile);
  return k;
}

KernelModel KernelModel::general(GridPtr grid, std::vector<double> matrix) {
  require(static_cast<bool>(grid), errc::bad_argument, "kernel grid is null");
  const std::size_t m = grid->size();
  require(m <= kDenseCap, errc::bad_argument,
          "dense kernel needs n^N <= " + std::to_string(kDenseCap));
  require(matrix.size() == m * m, errc::bad_argument,
          "dense kernel matrix must be n^N x n^N");
  for (double v : matrix)
    require(std::isfinite(v), errc::non_finite_field, "kernel matrix: non-finite entry");
  KernelModel k;
  k.kind_ = KernelKind::general;
  k.grid_ = std::move(grid);
  k.matrix_ = std::move(matrix);
  return k;
}

KernelModel KernelModel::from_builtin(const GridPtr& grid, const KernelBuiltin& b) {
  require(static_cast<bool>(grid), errc::bad_argument, "kernel grid is null");
  KernelModel k;
  k.grid_ = grid;
  k.builtin_ = b;
  if (b.homogeneous()) {
    k.kind_ = KernelKind::homogeneous;
    const int dim = grid->dim();
    k.profile_ = dim == 1 ? sample(grid, [&](double r) { return b.profile_value(1, r, 0); })
                          : sample(grid, [&](double r0, double r1) {
                              return b.profile_value(2, r0, r1);
                            });
  } else {
    k.kind_ = KernelKind::general;  // dense matrix materialized on first use
  }
  return k;
}

void KernelModel::ensure_matrix() const {
  if (kind_ != KernelKind::general || !builtin_) return;
  std::call_once(*matrix_once_, [this] {
    const std::size_t m = grid_->size();
    require(m <= kDenseCap, errc::bad_argument,
            "dense kernel needs n^N <= " + std::to_string(kDenseCap));
    const int dim = grid_->dim();
    std::vector<double> factor(m);
    for (std::size_t i = 0; i < m; ++i)
      factor[i] = builtin_->factor_value(dim, grid_->point_coord(i, 0),
                                         dim == 2 ? grid_->point_coord(i, 1) : 0.0);
    matrix_.resize(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) matrix_[i * m + j] = factor[i] * factor[j];
  });
}

const Field& KernelModel::profile() const {
  require(kind_ == KernelKind::homogeneous, errc::bad_argument,
          "kernel has no lag profile (general kind)");
  return profile_;
}

const std::vector<double>& KernelModel::matrix() const {
  require(kind_ == KernelKind::general, errc::bad_argument,
          "kernel has no dense matrix (homogeneous kind)");
  ensure_matrix();
  return matrix_;
}

Field apply_kernel(const KernelModel& k, const Field& h, bool absolute, bool transpose) {
  require(h.grid && h.grid->spec() == k.grid()->spec(), errc::grid_mismatch,
          "apply_kernel: field on a different grid");
  check_finite(h, "apply_kernel input");
  if (k.kind() == KernelKind::homogeneous) {
    Field p = k.profile();
    if (absolute)
      for (double& v : p.values) v = std::abs(v);
    if (transpose) p = reflect(p);
    return convolve(p, h);
  }
  const auto& m = k.matrix();
  const std::size_t nn = k.grid()->size();
  Field out = make_field(k.grid());
  const double vol = k.grid()->cell_volume();
  for (std::size_t i = 0; i < nn; ++i) {
    double acc = 0.0;
    if (!transpose) {
      const double* row = m.data() + i * nn;
      if (absolute)
        for (std::size_t j = 0; j < nn; ++j) acc += std::abs(row[j]) * h.values[j];
      else
        for (std::size_t j = 0; j < nn; ++j) acc += row[j] * h.values[j];
    } else {
      if (absolute)
        for (std::size_t j = 0; j < nn; ++j) acc += std::abs(m[j * nn + i]) * h.values[j];
      else
        for (std::size_t j = 0; j < nn; ++j) acc += m[j * nn + i] * h.values[j];
    }
    out.values[i] = vol * acc;
  }
  return out;
}

Condition parse_condition(const std::string& name) {
  if (name == "c1") return Condition::c1;
  if (name == "c2") return Condition::c2;
  if (name == "c2_prime" || name == "c2prime") return Condition::c2prime;
  if (name == "c3_prime" || name == "c3prime") return Condition::c3prime;
  fail(errc::bad_config, "unknown condition: " + name);
}

std::string condition_name(Condition c) {
  switch (c) {
    case Condition::c1: return "c1";
    case Condition::c2: return "c2";
    case Condition::c2prime: return "c2_prime";
    case Condition::c3prime: return "c3_prime";
  }
  return "?";
}

namespace {

// Lag shifts probed by the C3' translation test, in cells.
constexpr int kC3Shifts[3] = {1, 2, 4};

struct BoxQuantity {
  double value = 0.0;
};

// Condition quantities for a homogeneous kernel given its lag profile.
double homogeneous_quantity(const Field& profile, Condition cond, double alpha) {
  const auto& g = *profile.grid;
  const double vol_box = std::pow(2.0 * g.half_width(), g.dim());
  const double cell = g.cell_volume();
  switch (cond) {
    case Condition::c1: {
      double s = 0.0;
      for (double v : profile.values) s += v * v;
      return vol_box * cell * s;
    }
    case Condition::c2: {
      double s = 0.0;
      for (double v : profile.values) s += std::abs(v);
      return vol_box * sq(cell * s);
    }
    case Condition::c2prime: {
      double s = 0.0;
      for (double v : profile.values) s += std::abs(v);
      return cell * s;
    }
    case Condition::c3prime: {
      double worst = 0.0;
      for (int axis = 0; axis < g.dim(); ++axis) {
        for (int m : kC3Shifts) {
          double l1 = 0.0;
          for (std::size_t i = 0; i < profile.size(); ++i)
            l1 += std::abs(profile.values[g.shift(i, axis, m)] - profile.values[i]);
          l1 *= cell;
          worst = std::max(worst, l1 / std::pow(m * g.dx(), alpha));
        }
      }
      return worst;
    }
  }
  return 0.0;
}

// Condition quantities for a separable general kernel w(x,y) = f(x) f(y),
// evaluated from the factor samples without materializing the matrix.
double separable_quantity(const std::vector<double>& f, const Grid& g, Condition cond,
                          double alpha) {
  const double cell = g.cell_volume();
  double sum_abs = 0.0, sum_sq = 0.0;
  for (double v : f) {
    sum_abs += std::abs(v);
    sum_sq += v * v;
  }
  sum_abs *= cell;
  sum_sq *= cell;
  switch (cond) {
    case Condition::c1:
      return sq(sum_sq);
    case Condition::c2: {
      // integral over x of (|f(x)| * ||f||_1)^2 = ||f||_2^2 * ||f||_1^2
      return sum_sq * sq(sum_abs);
    }
    case Condition::c2prime: {
      double mx = 0.0;
      for (double v : f) mx = std::max(mx, std::abs(v));
      return mx * sum_abs;
    }
    case Condition::c3prime: {
      double worst = 0.0;
      for (int axis = 0; axis < g.dim(); ++axis) {
        for (int m : kC3Shifts) {
          double dmax = 0.0;
          for (std::size_t i = 0; i < f.size(); ++i)
            dmax = std::max(dmax, std::abs(f[g.shift(i, axis, m)] - f[i]));
          worst = std::max(worst, dmax * sum_abs / std::pow(m * g.dx(), alpha));
        }
      }
      return worst;
    }
  }
  return 0.0;
}

// Generic dense-matrix quantities (kernels loaded from file).
double dense_quantity(const std::vector<double>& m, const Grid& g, Condition cond,
                      double alpha) {
  const std::size_t nn = g.size();
  const double cell = g.cell_volume();
  switch (cond) {
    case Condition::c1: {
      double s = 0.0;
      for (double v : m) s += v * v;
      return cell * cell * s;
    }
    case Condition::c2: {
      double s = 0.0;
      for (std::size_t i = 0; i < nn; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < nn; ++j) row += std::abs(m[i * nn + j]);
        s += sq(cell * row);
      }
      return cell * s;
    }
    case Condition::c2prime: {
      double mx = 0.0;
      for (std::size_t i = 0; i < nn; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < nn; ++j) row += std::abs(m[i * nn + j]);
        mx = std::max(mx, cell * row);
      }
      return mx;
    }
    case Condition::c3prime: {
      double worst = 0.0;
      for (int axis = 0; axis < g.dim(); ++axis) {
        for (int shift : kC3Shifts) {
          for (std::size_t i = 0; i < nn; ++i) {
            const std::size_t is = g.shift(i, axis, shift);
            double l1 = 0.0;
            for (std::size_t j = 0; j < nn; ++j)
              l1 += std::abs(m[i * nn + j] - m[is * nn + j]);
            worst = std::max(worst, cell * l1 / std::pow(shift * g.dx(), alpha));
          }
        }
      }
      return worst;
    }
  }
  return 0.0;
}

// Quantity for the kernel re-instantiated on the box [-L', L')^N at the same
// dx. Built-ins resample their closure; homogeneous profiles without a
// closure are zero-extended (profiles are integrable, tails vanish).
double quantity_on_box(const KernelModel& k, Condition cond, double alpha, bool doubled) {
  const auto& g0 = *k.grid();
  GridSpec spec = g0.spec();
  if (doubled) {
    spec.half_width *= 2.0;
    spec.points_per_dim *= 2;
  }
  if (k.builtin()) {
    const auto& b = *k.builtin();
    auto g = Grid::make(spec);
    if (b.homogeneous()) {
      Field p = g->dim() == 1
                    ? sample(g, [&](double r) { return b.profile_value(1, r, 0); })
                    : sample(g, [&](double r0, double r1) { return b.profile_value(2, r0, r1); });
      return homogeneous_quantity(p, cond, alpha);
    }
    std::vector<double> f(g->size());
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] = b.factor_value(g->dim(), g->point_coord(i, 0),
                            g->dim() == 2 ? g->point_coord(i, 1) : 0.0);
    return separable_quantity(f, *g, cond, alpha);
  }
  if (k.kind() == KernelKind::homogeneous) {
    if (!doubled) return homogeneous_quantity(k.profile(), cond, alpha);
    auto g = Grid::make(spec);
    Field p = make_field(g);
    const int n0 = g0.n(), off = n0 / 2;
    if (g0.dim() == 1) {
      for (int i = 0; i < n0; ++i) p.values[i + off] = k.profile().values[i];
    } else {
      for (int i0 = 0; i0 < n0; ++i0)
        for (int i1 = 0; i1 < n0; ++i1)
          p.values[g->flat(i0 + off, i1 + off)] = k.profile().values[g0.flat(i0, i1)];
    }
    return homogeneous_quantity(p, cond, alpha);
  }
  require(!doubled, errc::kernel_not_refinable,
          "dense kernel from data cannot be re-evaluated on a doubled box");
  return dense_quantity(k.matrix(), g0, cond, alpha);
}

}  // namespace

ConditionReport check_condition(const KernelModel& k, Condition cond,
                                std::optional<double> alpha, double divergence_ratio) {
  require(divergence_ratio > 1.0, errc::bad_argument, "divergence ratio must exceed 1");
  double a = 0.5;
  if (cond == Condition::c3prime) {
    require(alpha.has_value(), errc::bad_argument, "c3_prime needs a Holder exponent alpha");
    a = *alpha;
    require(a > 0.0 && a <= 1.0, errc::bad_argument, "alpha must be in (0, 1]");
  }
  ConditionReport r;
  r.cond = cond;
  r.box_half_width = k.grid()->half_width();
  r.mesh = k.grid()->dx();
  r.divergence_ratio = divergence_ratio;
  if (cond == Condition::c3prime) r.alpha = a;
  r.value_at_box = quantity_on_box(k, cond, a, false);
  r.value_at_double_box = quantity_on_box(k, cond, a, true);
  require(std::isfinite(r.value_at_box) && std::isfinite(r.value_at_double_box),
          errc::non_finite_field, "condition quantity overflowed");
  r.ratio = r.value_at_box > 0.0 ? r.value_at_double_box / r.value_at_box
                                 : (r.value_at_double_box > 0.0 ? HUGE_VAL : 1.0);
  r.verdict = r.ratio < divergence_ratio ? ConditionVerdict::holds
                                         : ConditionVerdict::diverges_under_refinement;
  if (cond == Condition::c2prime || cond == Condition::c3prime)
    r.constant = std::max(r.value_at_box, r.value_at_double_box);
  return r;
}

EigenResult solve_rho_power(const KernelModel& k, double tol, int max_iter) {
  require(tol > 0.0 && max_iter >= 1, errc::bad_argument, "bad power-iteration parameters");
  const auto& g = k.grid();
  Field rho = make_field(g, 1.0);
  const double mass0 = integrate(rho);
  for (double& v : rho.values) v /= mass0;

  for (int iter = 1; iter <= max_iter; ++iter) {
    Field j = apply_kernel(k, rho, /*absolute=*/true, /*transpose=*/true);
    const double lambda = integrate(j);  // rho has unit mass and j >= 0
    require(lambda > 1e-300, errc::zero_kernel, "power iteration: kernel has zero mass");
    double resid = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
      resid = std::max(resid, std::abs(j.values[i] - lambda * rho.values[i]));
    resid /= lambda;
    if (resid < tol) {
      EigenResult out;
      out.rho = std::move(rho);
      out.lambda = lambda;
      out.residual = resid;
      out.iterations = iter;
      out.method = RhoMethod::power_iteration;
      out.min_rho = *std::min_element(out.rho.values.begin(), out.rho.values.end());
      return out;
    }
    for (std::size_t i = 0; i < rho.size(); ++i) rho.values[i] = j.values[i] / lambda;
  }
  fail(errc::no_convergence,
       "power iteration did not reach tol=" + std::to_string(tol) + " in " +
           std::to_string(max_iter) + " iterations");
}

EigenResult solve_rho_fourier(const KernelModel& k) {
  require(k.kind() == KernelKind::homogeneous, errc::bad_argument,
          "fourier construction needs a homogeneous kernel");
  const auto& g = k.grid();
  Field v = k.profile();
  for (double& x : v.values) x = std::abs(x);
  const double lambda = integrate(v) + 1.0;

  Convolver conv(g);
  const auto v_hat = conv.dft(v, /*center_origin=*/true);
  Field z = g->dim() == 1
                ? sample(g, [](double x) { return std::exp(-0.5 * x * x); })
                : sample(g, [](double x0, double x1) {
                    return std::exp(-0.5 * (x0 * x0 + x1 * x1));
                  });
  auto rho_hat = conv.dft(z, /*center_origin=*/true);
  const double cell = g->cell_volume();
  for (std::size_t i = 0; i < rho_hat.size(); ++i) {
    const std::complex<double> denom = lambda - cell * std::conj(v_hat[i]);
    require(std::abs(denom) >= 0.5, errc::bad_profile,
            "fourier construction: spectral denominator collapsed");
    rho_hat[i] /= denom;
  }
  Field rho = conv.idft(rho_hat, /*center_origin=*/true);

  const double max_rho = *std::max_element(rho.values.begin(), rho.values.end());
  const double min_rho = *std::min_element(rho.values.begin(), rho.values.end());
  require(max_rho > 0.0, errc::negative_density, "fourier construction: density vanished");
  require(min_rho >= -1e-8 * max_rho, errc::negative_density,
          "fourier construction: density has significant negative values");
  const double mass = integrate(rho);
  require(mass > 0.0, errc::negative_density, "fourier construction: nonpositive mass");
  for (double& x : rho.values) x /= mass;

  Field j = apply_kernel(k, rho, /*absolute=*/true, /*transpose=*/true);
  double one_sided = -HUGE_VAL;
  for (std::size_t i = 0; i < rho.size(); ++i)
    one_sided = std::max(one_sided, j.values[i] - lambda * rho.values[i]);

  EigenResult out;
  out.rho = std::move(rho);
  out.lambda = lambda;
  out.residual = std::max(0.0, one_sided / (max_rho / mass));
  out.iterations = 0;
  out.method = RhoMethod::fourier_construction;
  out.min_rho = min_rho / mass;
  return out;
}

double verify_c1prime(const KernelModel& k, const Field& rho, double lambda) {
  require(rho.grid && rho.grid->spec() == k.grid()->spec(), errc::grid_mismatch,
          "verify_c1prime: density on a different grid");
  check_finite(rho, "comparison density");
  const double sup_rho = *std::max_element(rho.values.begin(), rho.values.end());
  require(sup_rho > 0.0, errc::bad_argument, "verify_c1prime: density must be positive somewhere");
  Field j = apply_kernel(k, rho, /*absolute=*/true, /*transpose=*/true);
  double defect = -HUGE_VAL;
  for (std::size_t i = 0; i < rho.size(); ++i)
    defect = std::max(defect, j.values[i] - lambda * rho.values[i]);
  return defect / sup_rho;
}

}  // namespace nf
