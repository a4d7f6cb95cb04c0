#pragma once

#include <complex>
#include <vector>

#include "nf/grid.hpp"

struct fftw_plan_s;

namespace nf {

// Periodic convolution engine for one grid.
//
//   apply(u)(x_i) = dx^N * sum_j profile(x_i - x_j) u(x_j)
//
// with x_i - x_j wrapped into the box. The profile is a field sampled on the
// same grid with its value at lag 0 stored at the grid point nearest 0
// (exactly 0, since n is even). Plans use FFTW_ESTIMATE and private aligned
// buffers, so results are bit-reproducible run to run and thread-safe as long
// as each thread owns its Convolver.
class Convolver {
 public:
  explicit Convolver(GridPtr grid);
  ~Convolver();
  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;

  const GridPtr& grid() const { return grid_; }

  // Precomputes the spectrum of `profile` for repeated apply() calls.
  void set_profile(const Field& profile);
  bool has_profile() const { return has_profile_; }
  Field apply(const Field& u);

  Field convolve(const Field& profile, const Field& u) {
    set_profile(profile);
    return apply(u);
  }

  // Raw half-complex DFT of a real field (unnormalized forward sum) and its
  // normalized inverse. With center_origin the data is rolled by n/2 per axis
  // before the forward / after the inverse transform, which makes spectra of
  // origin-centered even profiles real.
  std::vector<std::complex<double>> dft(const Field& u, bool center_origin);
  Field idft(const std::vector<std::complex<double>>& spectrum, bool center_origin);

  std::size_t spectrum_size() const { return n_cplx_; }

 private:
  void load_real(const std::vector<double>& values, bool center_origin);
  void run_forward();   // real_ -> cplx_
  void run_backward();  // cplx_ -> real_ (unnormalized)

  GridPtr grid_;
  fftw_plan_s* fwd_ = nullptr;
  fftw_plan_s* bwd_ = nullptr;
  double* real_ = nullptr;
  std::complex<double>* cplx_ = nullptr;
  std::size_t n_real_ = 0;
  std::size_t n_cplx_ = 0;
  std::vector<std::complex<double>> profile_hat_;
  bool has_profile_ = false;
};

// One-shot convenience wrapper; builds a transient Convolver.
Field convolve(const Field& profile, const Field& u);

}  // namespace nf
