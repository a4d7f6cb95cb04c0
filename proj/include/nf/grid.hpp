#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "nf/error.hpp"

namespace nf {

// Uniform periodic mesh on the box [-L, L)^N, N in {1, 2}.
// Axis coordinates are x_i = -L + i * dx with dx = 2L/n, so 0 is always a
// grid point (n is even) and -L is identified with +L.
struct GridSpec {
  int dim = 1;
  double half_width = 1.0;
  int points_per_dim = 4;

  bool operator==(const GridSpec&) const = default;
};

class Grid {
 public:
  static std::shared_ptr<const Grid> make(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int n() const { return spec_.points_per_dim; }
  double half_width() const { return spec_.half_width; }
  double dx() const { return dx_; }
  double cell_volume() const { return cell_volume_; }
  std::size_t size() const { return size_; }

  // Axis coordinate of index i in [0, n).
  double coord(int i) const { return -spec_.half_width + dx_ * i; }

  // Row-major flat index; axis 0 is the slowest.
  std::size_t flat(int i0, int i1 = 0) const {
    return dim() == 1 ? static_cast<std::size_t>(i0)
                      : static_cast<std::size_t>(i0) * n() + i1;
  }
  void unflat(std::size_t f, int& i0, int& i1) const {
    if (dim() == 1) {
      i0 = static_cast<int>(f);
      i1 = 0;
    } else {
      i0 = static_cast<int>(f / n());
      i1 = static_cast<int>(f % n());
    }
  }

  double point_coord(std::size_t f, int axis) const {
    int i0, i1;
    unflat(f, i0, i1);
    return coord(axis == 0 ? i0 : i1);
  }

  // Flat index of the coordinate origin (0 lies on the grid).
  std::size_t origin() const {
    const int half = n() / 2;
    return dim() == 1 ? flat(half) : flat(half, half);
  }

  // Periodic reflection x -> -x. Index 0 (-L) is its own mirror.
  std::size_t reflect(std::size_t f) const {
    int i0, i1;
    unflat(f, i0, i1);
    const int r0 = i0 == 0 ? 0 : n() - i0;
    const int r1 = i1 == 0 ? 0 : n() - i1;
    return flat(r0, r1);
  }

  // Periodic translation by `offset` cells along `axis`.
  std::size_t shift(std::size_t f, int axis, int offset) const {
    int i0, i1;
    unflat(f, i0, i1);
    const int nn = n();
    int& ia = axis == 0 ? i0 : i1;
    ia = ((ia + offset) % nn + nn) % nn;
    return flat(i0, i1);
  }

 private:
  explicit Grid(const GridSpec& spec);

  GridSpec spec_;
  double dx_;
  double cell_volume_;
  std::size_t size_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Scalar field sampled on a grid. Values are row-major, finite by contract.
struct Field {
  GridPtr grid;
  std::vector<double> values;

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

inline bool same_grid(const Field& a, const Field& b) {
  return a.grid && b.grid && a.grid->spec() == b.grid->spec();
}

Field make_field(const GridPtr& grid, double fill = 0.0);

// Samples f(x) (1-D) or f(x0, x1) (2-D) at grid points.
Field sample(const GridPtr& grid, const std::function<double(double)>& f);
Field sample(const GridPtr& grid, const std::function<double(double, double)>& f);

void check_finite(const Field& f, const char* what);

// Rectangle-rule box integral dx^N * sum f (optionally weighted pointwise).
// Compensated summation keeps the result independent of value magnitudes
// up to ~1e-15 relative.
double integrate(const Field& f);
double integrate(const Field& f, const Field& weight);

// Pointwise periodic reflection u(x) -> u(-x).
Field reflect(const Field& u);

}  // namespace nf
