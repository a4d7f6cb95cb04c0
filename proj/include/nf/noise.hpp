#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "nf/convolve.hpp"
#include "nf/grid.hpp"
#include "nf/rng.hpp"

namespace nf {

// Driving noise. Two interchangeable descriptions of the same spatially
// correlated forcing:
//
//   smoothed_white: a space-time white-noise increment smoothed by the
//     profile phi, one Gaussian per grid cell with the density convention
//     Var = dt / dx^N, then dW_phi = convolve(phi, dW).
//
//   q_wiener: a truncated expansion sum_k sqrt(lambda_k) dbeta_k e_k with
//     scalar Brownian coefficients; lambda_k >= 0, e_k orthonormal in the
//     box inner product. solve paths convolve these increments with phi as
//     well (phi = delta gives the identity embedding).

enum class NoiseMode { smoothed_white, q_wiener };

struct SpectrumMode {
  double lambda = 0.0;
  Field e;
};

struct NoiseSpec {
  NoiseMode mode = NoiseMode::smoothed_white;
  Field phi;
  std::vector<SpectrumMode> spectrum;  // q_wiener only
  std::uint64_t seed = 0;
};

NoiseSpec make_smoothed_white(Field phi, std::uint64_t seed);
// Validates lambda_k >= 0 and pairwise orthonormality of e_k (1e-8).
NoiseSpec make_q_wiener(Field phi, std::vector<SpectrumMode> spectrum, std::uint64_t seed);

// Smoothing profile built-ins.
Field phi_delta(const GridPtr& g);                 // 1/dx^N at the origin cell
Field phi_indicator(const GridPtr& g, double h);   // 1 on |x_k| <= h per axis
Field phi_gaussian(const GridPtr& g, double s);    // exp(-|x|^2 / s^2)

// One white-noise increment: i.i.d. N(0, dt/dx^N) per cell, value at cell i
// drawn from stream slot i.
Field white_increment(const GridPtr& g, double dt, const RngStream& rng);

// convolve(phi, white_increment); pointwise variance dt * ||phi||_L2^2.
// `scratch` (profile already set to phi) avoids re-planning in hot loops.
Field smoothed_increment(const NoiseSpec& spec, double dt, const RngStream& rng,
                         Convolver* scratch = nullptr);

// sum_k sqrt(lambda_k dt) xi_k e_k with xi_k from stream slot k.
Field qwiener_increment(const NoiseSpec& spec, double dt, const RngStream& rng);

// Equal-time spatial covariance induced by phi: c = phi (*) reflect(phi),
// so c(0) = ||phi||_L2^2 and c is even.
Field analytic_covariance(const Field& phi);

// Smallest constant C with ||phi - shift_z(phi)||_L2 <= C |z|^alpha over the
// probed cell shifts z in {1,2,4,8} dx along each axis.
double nikolskii_constant(const Field& phi, double alpha);

// Discrete Fourier mode expansion of the covariance operator with kernel
// `cov` (1-D): constant mode plus `max_pairs` cosine/sine pairs, eigenvalues
// dx * Re DFT(cov) >= 0. Including all n/2-1 pairs reproduces the covariance
// exactly on the grid.
std::vector<SpectrumMode> fourier_modes_for_covariance(const Field& cov, int max_pairs);

}  // namespace nf
