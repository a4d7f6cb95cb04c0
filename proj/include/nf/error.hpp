#pragma once

#include <stdexcept>
#include <string>

namespace nf {

// Failure categories surfaced to callers and mapped to CLI exit codes.
// Everything here is a caller error or a detected numerical pathology,
// not an internal bug; internal bugs use assert.
enum class errc {
  odd_mesh_count,
  mesh_too_coarse,
  bad_half_width,
  bad_dimension,
  grid_mismatch,
  non_finite_field,
  bad_profile,
  bad_spectrum,
  zero_kernel,
  no_convergence,
  negative_density,
  kernel_not_refinable,
  blow_up,
  bad_config,
  io_failure,
  bad_argument,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace nf
