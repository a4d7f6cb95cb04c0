#include "nf/grid.hpp"

#include <cmath>

namespace nf {

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  dx_ = 2.0 * spec.half_width / spec.points_per_dim;
  cell_volume_ = spec.dim == 1 ? dx_ : dx_ * dx_;
  size_ = static_cast<std::size_t>(spec.points_per_dim);
  if (spec.dim == 2) size_ *= spec.points_per_dim;
}

std::shared_ptr<const Grid> Grid::make(const GridSpec& spec) {
  require(spec.dim == 1 || spec.dim == 2, errc::bad_dimension,
          "grid dim must be 1 or 2, got " + std::to_string(spec.dim));
  require(spec.half_width > 0.0, errc::bad_half_width,
          "grid half_width must be positive, got " + std::to_string(spec.half_width));
  require(spec.points_per_dim % 2 == 0, errc::odd_mesh_count,
          "points_per_dim must be even, got " + std::to_string(spec.points_per_dim));
  require(spec.points_per_dim >= 4, errc::mesh_too_coarse,
          "points_per_dim must be >= 4, got " + std::to_string(spec.points_per_dim));
  return std::shared_ptr<const Grid>(new Grid(spec));
}

Field make_field(const GridPtr& grid, double fill) {
  require(static_cast<bool>(grid), errc::bad_argument, "null grid");
  return Field{grid, std::vector<double>(grid->size(), fill)};
}

Field sample(const GridPtr& grid, const std::function<double(double)>& f) {
  require(grid && grid->dim() == 1, errc::bad_dimension, "1-D sampler needs a 1-D grid");
  Field out = make_field(grid);
  for (int i = 0; i < grid->n(); ++i) out.values[i] = f(grid->coord(i));
  return out;
}

Field sample(const GridPtr& grid, const std::function<double(double, double)>& f) {
  require(grid && grid->dim() == 2, errc::bad_dimension, "2-D sampler needs a 2-D grid");
  Field out = make_field(grid);
  for (int i0 = 0; i0 < grid->n(); ++i0)
    for (int i1 = 0; i1 < grid->n(); ++i1)
      out.values[grid->flat(i0, i1)] = f(grid->coord(i0), grid->coord(i1));
  return out;
}

void check_finite(const Field& f, const char* what) {
  for (double v : f.values)
    require(std::isfinite(v), errc::non_finite_field, std::string(what) + ": non-finite value");
}

namespace {

double kahan_sum(const std::vector<double>& a, const std::vector<double>* w) {
  double sum = 0.0, comp = 0.0;
  const std::size_t m = a.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double term = w ? a[i] * (*w)[i] : a[i];
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

double integrate(const Field& f) {
  require(static_cast<bool>(f.grid), errc::bad_argument, "integrate: field has no grid");
  return f.grid->cell_volume() * kahan_sum(f.values, nullptr);
}

double integrate(const Field& f, const Field& weight) {
  require(same_grid(f, weight), errc::grid_mismatch, "integrate: weight on a different grid");
  return f.grid->cell_volume() * kahan_sum(f.values, &weight.values);
}

Field reflect(const Field& u) {
  require(static_cast<bool>(u.grid), errc::bad_argument, "reflect: field has no grid");
  Field out = make_field(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) out.values[u.grid->reflect(i)] = u.values[i];
  return out;
}

}  // namespace nf
