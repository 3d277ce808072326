#pragma once

// Three independent evaluations of the Protocol-1 correlation E_1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ghzsim/coefficients.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

/// E_1(phi) = 1 - (2 phi - sin 2 phi) / pi on [0, pi], extended as an even
/// 2pi-periodic function.
inline double e1_closed(double phi) noexcept {
  const double r = std::abs(reduce_angle(phi + pi) - pi);
  return 1.0 - (2.0 * r - std::sin(2.0 * r)) / pi;
}

/// Partial Fourier sum of E_1 through harmonic 2 n_max + 1.
inline double e1_series(double phi, std::size_t n_max) noexcept {
  double s = 0.0;
  for (std::size_t n = n_max + 1; n-- > 0;) {
    const double x = 2.0 * static_cast<double>(n) + 1.0;
    s += e1_fourier(n) * std::cos(x * phi);
  }
  return s;
}

/// Target correlation of the GHZ state.
inline double ghz_target(double phi) noexcept { return std::cos(phi); }

/// E_1 from the double integral
///   (2/pi) int_0^{pi/2} dB int_0^{pi/2} dC sin(2B) sign(sin(B + C - phi)).
/// The inner integrand is piecewise constant in C with jumps where
/// B + C - phi is a multiple of pi; the inner integral is therefore
/// piecewise linear in B with kinks where a jump enters or leaves
/// [0, pi/2]. Both sets of break points are placed explicitly and the
/// outer integral uses adaptive Gauss-Kronrod on each smooth piece.
inline double e1_quadrature(double phi) {
  constexpr double hi = half_pi;
  const double f = reduce_angle(phi);

  auto inner = [f](double b) {
    std::vector<double> cuts{0.0, hi};
    // zeros c = f - b + k pi inside (0, pi/2)
    for (int k = -2; k <= 3; ++k) {
      const double c = f - b + k * pi;
      if (c > 0.0 && c < hi) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double width = cuts[i + 1] - cuts[i];
      if (width <= 0.0) continue;
      const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
      total += sign(std::sin(b + mid - f)) * width;
    }
    return total;
  };

  std::vector<double> pts{0.0, hi};
  for (int k = -3; k <= 3; ++k) {
    for (double shift : {0.0, -hi}) {
      const double b = f + shift + k * pi;
      if (b > 0.0 && b < hi) pts.push_back(b);
    }
  }
  std::sort(pts.begin(), pts.end());

  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] <= pts[i]) continue;
    total += gauss_kronrod<double, 31>::integrate(
        [&](double b) { return std::sin(2.0 * b) * inner(b); }, pts[i], pts[i + 1], 10, 1e-14);
  }
  return 2.0 / pi * total;
}

/// (4/pi) sum_{n <= n_max} sin((2n+1) x) / (2n+1), the Fourier series of sign(sin x).
inline double sign_sin_fourier(double x, std::size_t n_max) noexcept {
  double s = 0.0;
  for (std::size_t n = n_max + 1; n-- > 0;) {
    const double k = 2.0 * static_cast<double>(n) + 1.0;
    s += std::sin(k * x) / k;
  }
  return 4.0 / pi * s;
}

}  // namespace ghzsim
