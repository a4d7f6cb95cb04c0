#include "nf/convolve.hpp"

#include <fftw3.h>

#include <mutex>

namespace nf {

namespace {

// FFTW planning and allocation are not thread-safe; execution on private
// plans and buffers is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Convolver::Convolver(GridPtr grid) : grid_(std::move(grid)) {
  require(static_cast<bool>(grid_), errc::bad_argument, "Convolver: null grid");
  const int n = grid_->n();
  const int rank = grid_->dim();
  int dims[2] = {n, n};
  n_real_ = grid_->size();
  n_cplx_ = static_cast<std::size_t>(n / 2 + 1);
  if (rank == 2) n_cplx_ *= n;

  std::lock_guard<std::mutex> lock(fftw_mutex());
  real_ = fftw_alloc_real(n_real_);
  cplx_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n_cplx_));
  fwd_ = reinterpret_cast<fftw_plan_s*>(fftw_plan_dft_r2c(
      rank, dims, real_, reinterpret_cast<fftw_complex*>(cplx_), FFTW_ESTIMATE));
  bwd_ = reinterpret_cast<fftw_plan_s*>(fftw_plan_dft_c2r(
      rank, dims, reinterpret_cast<fftw_complex*>(cplx_), real_, FFTW_ESTIMATE));
  require(fwd_ && bwd_, errc::bad_argument, "Convolver: FFTW plan creation failed");
}

Convolver::~Convolver() {
  std::lock_guard<std::mutex> lock(fftw_mutex());
  if (fwd_) fftw_destroy_plan(reinterpret_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(reinterpret_cast<fftw_plan>(bwd_));
  if (real_) fftw_free(real_);
  if (cplx_) fftw_free(reinterpret_cast<fftw_complex*>(cplx_));
}

void Convolver::load_real(const std::vector<double>& values, bool center_origin) {
  const int n = grid_->n();
  if (!center_origin) {
    for (std::size_t i = 0; i < n_real_; ++i) real_[i] = values[i];
    return;
  }
  const int h = n / 2;
  if (grid_->dim() == 1) {
    for (int i = 0; i < n; ++i) real_[i] = values[(i + h) % n];
  } else {
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        real_[grid_->flat(i0, i1)] = values[grid_->flat((i0 + h) % n, (i1 + h) % n)];
  }
}

void Convolver::run_forward() {
  fftw_execute(reinterpret_cast<fftw_plan>(fwd_));
}

void Convolver::run_backward() {
  fftw_execute(reinterpret_cast<fftw_plan>(bwd_));
}

void Convolver::set_profile(const Field& profile) {
  require(profile.grid && profile.grid->spec() == grid_->spec(), errc::grid_mismatch,
          "convolve: profile sampled on a different grid");
  check_finite(profile, "convolve profile");
  load_real(profile.values, /*center_origin=*/true);
  run_forward();
  profile_hat_.assign(cplx_, cplx_ + n_cplx_);
  has_profile_ = true;
}

Field Convolver::apply(const Field& u) {
  require(has_profile_, errc::bad_argument, "convolve: no profile set");
  require(u.grid && u.grid->spec() == grid_->spec(), errc::grid_mismatch,
          "convolve: input sampled on a different grid");
  check_finite(u, "convolve input");
  load_real(u.values, /*center_origin=*/false);
  run_forward();
  const double scale = grid_->cell_volume() / static_cast<double>(n_real_);
  for (std::size_t k = 0; k < n_cplx_; ++k) cplx_[k] *= profile_hat_[k] * scale;
  run_backward();
  Field out = make_field(grid_);
  for (std::size_t i = 0; i < n_real_; ++i) out.values[i] = real_[i];
  return out;
}

std::vector<std::complex<double>> Convolver::dft(const Field& u, bool center_origin) {
  require(u.grid && u.grid->spec() == grid_->spec(), errc::grid_mismatch,
          "dft: input sampled on a different grid");
  load_real(u.values, center_origin);
  run_forward();
  return std::vector<std::complex<double>>(cplx_, cplx_ + n_cplx_);
}

Field Convolver::idft(const std::vector<std::complex<double>>& spectrum, bool center_origin) {
  require(spectrum.size() == n_cplx_, errc::bad_argument, "idft: spectrum size mismatch");
  for (std::size_t k = 0; k < n_cplx_; ++k) cplx_[k] = spectrum[k];
  run_backward();
  const double scale = 1.0 / static_cast<double>(n_real_);
  Field out = make_field(grid_);
  if (!center_origin) {
    for (std::size_t i = 0; i < n_real_; ++i) out.values[i] = real_[i] * scale;
    return out;
  }
  const int n = grid_->n();
  const int h = n / 2;
  if (grid_->dim() == 1) {
    for (int i = 0; i < n; ++i) out.values[(i + h) % n] = real_[i] * scale;
  } else {
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        out.values[grid_->flat((i0 + h) % n, (i1 + h) % n)] = real_[grid_->flat(i0, i1)] * scale;
  }
  return out;
}

Field convolve(const Field& profile, const Field& u) {
  require(static_cast<bool>(profile.grid), errc::bad_argument, "convolve: profile has no grid");
  Convolver c(profile.grid);
  return c.convolve(profile, u);
}

}  // namespace nf
