#pragma once

// Slow, obvious reference implementations used only by the tests. They avoid
// the library's FFT and compensated-summation machinery on purpose so the two
// sides can disagree.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "nf/grid.hpp"

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson quadrature on [a, b].
inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Direct-sum periodic convolution (p * u)(x_i) = dx^N sum_j p(x_i - x_j) u(x_j),
// the profile indexed at the wrapped difference. Matches the library's
// convolution contract; O(n^2) per axis pair.
inline nf::Field convolve_direct(const nf::Field& p, const nf::Field& u) {
  const nf::Grid& g = *p.grid;
  nf::Field out = nf::make_field(p.grid);
  const int n = g.n();
  const int half = n / 2;
  auto wrap = [n](int k) { return ((k % n) + n) % n; };
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += p[wrap(i - j + half)] * u[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = s * g.cell_volume();
    }
  } else {
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1) {
        double s = 0.0;
        for (int j0 = 0; j0 < n; ++j0)
          for (int j1 = 0; j1 < n; ++j1)
            s += p[g.flat(wrap(i0 - j0 + half), wrap(i1 - j1 + half))] * u[g.flat(j0, j1)];
        out[g.flat(i0, i1)] = s * g.cell_volume();
      }
  }
  return out;
}

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSE mean_se(const std::vector<double>& v) {
  MeanSE r;
  const double n = static_cast<double>(v.size());
  for (double x : v) r.mean += x;
  r.mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - r.mean) * (x - r.mean);
  var /= (n - 1.0);
  r.se = std::sqrt(var / n);
  return r;
}

}  // namespace oracle
