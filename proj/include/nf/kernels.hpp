#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "nf/grid.hpp"

namespace nf {

// Connectivity kernels w(x, y).
//
// Homogeneous kernels store a lag profile p with w(x, y) = p(x - y) (periodic
// lag); General kernels store the dense n^N x n^N matrix w(x_i, y_j). Named
// built-ins also keep their analytic closure so the condition certifier can
// re-instantiate them on a doubled box without materializing huge matrices.

enum class KernelKind { homogeneous, general };

enum class BuiltinName {
  gaussian,            // homogeneous  a * exp(-|r|^2 / s^2)
  mexican_hat,         // homogeneous  a1 * exp(-|r|^2/s1^2) - a2 * exp(-|r|^2/s2^2)
  exponential,         // homogeneous  a * exp(-|r| / s)
  rank_one_gaussian,   // general      u(x) u(y), u = a * exp(-|x|^2 / 2)
  inv_linear_product,  // general      prod_k (1+|x_k|)^-1 * prod_k (1+|y_k|)^-1, scaled by a
};

struct KernelBuiltin {
  BuiltinName name = BuiltinName::gaussian;
  double a1 = 1.0, s1 = 1.0;  // amplitude / scale
  double a2 = 0.0, s2 = 1.0;  // second lobe (mexican_hat only)

  bool homogeneous() const {
    return name == BuiltinName::gaussian || name == BuiltinName::mexican_hat ||
           name == BuiltinName::exponential;
  }
  // Lag profile value (homogeneous) at lag r, or the separable factor u(x)
  // (general) so that w(x, y) = factor(x) * factor(y).
  double profile_value(int dim, double r0, double r1) const;
  double factor_value(int dim, double x0, double x1) const;
};

KernelBuiltin parse_builtin(const std::string& name, double a1, double s1, double a2, double s2);

// Dense matrices are capped at n^N <= 4096 rows; larger grids must go through
// the streaming certifier paths.
inline constexpr std::size_t kDenseCap = 4096;

class KernelModel {
 public:
  KernelModel() = default;  // empty; usable only after assigning a real model

  static KernelModel homogeneous(Field profile);
  static KernelModel general(GridPtr grid, std::vector<double> matrix);
  static KernelModel from_builtin(const GridPtr& grid, const KernelBuiltin& b);

  KernelKind kind() const { return kind_; }
  const GridPtr& grid() const { return grid_; }
  const Field& profile() const;
  const std::vector<double>& matrix() const;  // materialized on demand for built-ins
  const std::optional<KernelBuiltin>& builtin() const { return builtin_; }

 private:
  void ensure_matrix() const;

  KernelKind kind_ = KernelKind::homogeneous;
  GridPtr grid_;
  Field profile_;
  std::optional<KernelBuiltin> builtin_;
  mutable std::vector<double> matrix_;
  mutable std::shared_ptr<std::once_flag> matrix_once_ = std::make_shared<std::once_flag>();
};

// (K h)(x) = integral of w(x, y) h(y) dy on the box; options take |w| and/or
// the transposed kernel w(y, x). Homogeneous kernels dispatch to FFT
// convolution, General ones to a dense mat-vec.
Field apply_kernel(const KernelModel& k, const Field& h, bool absolute = false,
                   bool transpose = false);

// Integrability conditions certified by box doubling at fixed dx.
enum class Condition { c1, c2, c2prime, c3prime };
enum class ConditionVerdict { holds, diverges_under_refinement };

Condition parse_condition(const std::string& name);
std::string condition_name(Condition c);

struct ConditionReport {
  Condition cond;
  double value_at_box = 0.0;         // quantity on [-L, L)^N
  double value_at_double_box = 0.0;  // same quantity on [-2L, 2L)^N, same dx
  double ratio = 0.0;
  ConditionVerdict verdict = ConditionVerdict::holds;
  std::optional<double> constant;  // C_w for C2', L_w estimate for C3'
  std::optional<double> alpha;     // C3' only
  double box_half_width = 0.0;
  double mesh = 0.0;
  double divergence_ratio = 1.05;
};

ConditionReport check_condition(const KernelModel& k, Condition cond,
                                std::optional<double> alpha = std::nullopt,
                                double divergence_ratio = 1.05);

// Leading nonnegative eigenpair of (J rho)(y) = integral |w(x, y)| rho(x) dx,
// normalized to unit mass.
enum class RhoMethod { power_iteration, fourier_construction };

struct EigenResult {
  Field rho;
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  RhoMethod method = RhoMethod::power_iteration;
  double min_rho = 0.0;
};

EigenResult solve_rho_power(const KernelModel& k, double tol = 1e-10, int max_iter = 500);

// Closed-form construction for homogeneous kernels: with v = |w|,
// Lambda = ||w||_L1 + 1 and z(x) = exp(-|x|^2/2), the density with spectrum
// z_hat / (Lambda - v_hat) satisfies Lambda rho - J rho = z / mass >= 0, so
// the one-sided residual vanishes to roundoff by construction.
EigenResult solve_rho_fourier(const KernelModel& k);

// Signed worst-case defect max_y (J rho - lambda rho) / sup rho; <= tol
// certifies the pair as a usable comparison density.
double verify_c1prime(const KernelModel& k, const Field& rho, double lambda);

}  // namespace nf
