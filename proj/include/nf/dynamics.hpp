#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nf/kernels.hpp"
#include "nf/noise.hpp"

namespace nf {

// Model of dY = (-Y + w * G(Y)) dt + sigma(Y) dW_phi on the periodic box.

enum class GainType { sigmoid, heaviside_smooth, constant };

struct GainSpec {
  GainType type = GainType::sigmoid;
  double param = 1.0;  // sigmoid slope, step steepness, or the constant value

  double operator()(double a) const;
  double bound() const;      // sup |G|
  double lipschitz() const;
  double c_g() const;        // max(bound, lipschitz), the envelope constant
  bool is_zero() const { return type == GainType::constant && param == 0.0; }
};

enum class DiffusionType { constant, affine, bounded_smooth };

struct DiffusionSpec {
  DiffusionType type = DiffusionType::constant;
  double s0 = 1.0;
  double s1 = 0.0;  // affine slope

  double operator()(double a) const;
  double lipschitz() const;
  double c_sigma() const;  // max(|sigma(0)|, lipschitz); gives |sigma| <= C(1+|a|)
};

enum class InitialType { zero, constant, gaussian_bump, from_field };

struct InitialSpec {
  InitialType type = InitialType::zero;
  double a = 0.0;  // constant value or bump amplitude
  double s = 1.0;  // bump scale
  Field field;     // from_field only

  Field realize(const GridPtr& g) const;
};

struct ModelSpec {
  KernelModel kernel;
  GainSpec gain;
  DiffusionSpec diffusion;
  InitialSpec initial;
};

// Checks grid consistency and the linear-growth envelope of sigma on a
// sample lattice; throws on violation.
void validate_model(const ModelSpec& model);

// sup_x of the row L1 mass of the kernel (the C2' constant on this box).
double kernel_row_l1_sup(const KernelModel& k);

enum class Scheme { exponential_euler, euler_maruyama };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

struct SolverConfig {
  double dt = 0.01;
  double t_end = 1.0;
  Scheme scheme = Scheme::exponential_euler;
  int record_every = 1;
  int n_paths = 1;

  int steps() const;  // validates that t_end is an integer multiple of dt
};

struct Trajectory {
  GridPtr grid;
  std::vector<double> times;
  std::vector<Field> states;
  double dt = 0.0;
  Scheme scheme = Scheme::exponential_euler;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::string model_fingerprint;
};

// Drift term F(Y) = integral w(., y) G(Y(y)) dy.
Field drift_F(const ModelSpec& model, const Field& y);

// One explicit step given the smoothed noise increment for the interval.
// exponential_euler:  Y' = e^{-dt} Y + (1 - e^{-dt}) F(Y) + nu(dt) sigma(Y) dW
//                     with nu(dt)^2 = (1 - e^{-2dt}) / (2 dt), so a linear
//                     constant-sigma model reproduces the exact one-step
//                     variance of the damped stochastic integral.
// euler_maruyama:     Y' = Y + dt (-Y + F(Y)) + sigma(Y) dW
// Throws blow_up when sup |Y'| exceeds 1e12.
Field step(const ModelSpec& model, const Field& y, const Field& dw_phi, double dt,
           Scheme scheme);

std::string model_run_fingerprint(const ModelSpec& model, const NoiseSpec& noise,
                                  const SolverConfig& cfg);

// Integrates one sample path. smoothed_white noise draws one white increment
// per step; q_wiener paths expand the spectrum and convolve with phi
// (phi = delta embeds the increment unchanged). Records t = 0, every
// record_every-th step, and the final time.
Trajectory solve_path(const ModelSpec& model, const NoiseSpec& noise, const SolverConfig& cfg,
                      std::uint64_t path_index);
Trajectory solve_hilbert_path(const ModelSpec& model, const NoiseSpec& noise,
                              const SolverConfig& cfg, std::uint64_t path_index);

// Picard iteration of the mild equation on the solver mesh with left-point
// quadrature and frozen noise. Iterate 0 is the constant-in-time initial
// state. Returns the final-time fields of iterates 0..n_iter.
std::vector<Field> picard_iterates_at_end(const ModelSpec& model,
                                          const std::vector<Field>& dw_phi, double dt,
                                          int n_iter);

struct PicardDiagnostics {
  // H[k] = sup_x mean over paths of |Y^{k+1}(T, x) - Y^k(T, x)|^2.
  std::vector<double> H;
  double k_const = 0.0;    // 2 max(c_sigma^2, c_g^2)
  double c_w = 0.0;        // sup-row L1 kernel mass
  double phi_l2_sq = 0.0;  // ||phi||_L2^2
  double t_end = 0.0;
  int n_iter = 0;
  int n_paths = 0;
};

PicardDiagnostics picard_solve(const ModelSpec& model, const NoiseSpec& noise,
                               const SolverConfig& cfg, int n_iter, int n_paths);

}  // namespace nf
