#pragma once

#include <cmath>
#include <numbers>

namespace rlab {

struct KernelValues {
  double gamma_a;  // 2(1 - cos ax)/(ax)^2, gamma_a(0) = 1
  double g_a;      // a^{-1}(1 - |b|/a)_+, so that int e^{ixb} gamma_a(x) dx = 2 pi g_a(b)
  double K_a;      // a^{-1} K(x/a), K(x) = 2 sin^2(x/2)/(pi x^2)
  double k_a;      // (1 - a|b|)_+, so that int e^{ixb} K_a(x) dx = k_a(b)
};

inline double gamma_kernel(double a, double x) {
  const double ax = a * x;
  if (std::abs(ax) < 1e-4) return 1.0 - ax * ax / 12.0;
  const double s = std::sin(ax / 2);
  return 4 * s * s / (ax * ax);  // 2(1 - cos ax) = 4 sin^2(ax/2), no cancellation
}

inline double g_kernel(double a, double b) { return std::max(0.0, 1.0 - std::abs(b) / a) / a; }

inline double fejer_kernel(double x) {
  if (std::abs(x) < 1e-4) return (1.0 - x * x / 12.0) / (2 * std::numbers::pi);
  const double s = std::sin(x / 2);
  return 2 * s * s / (std::numbers::pi * x * x);
}

inline double K_kernel(double a, double x) { return fejer_kernel(x / a) / a; }

inline double k_kernel(double a, double b) { return std::max(0.0, 1.0 - a * std::abs(b)); }

inline KernelValues kernel_pair(double a, double x_or_b) {
  return {gamma_kernel(a, x_or_b), g_kernel(a, x_or_b), K_kernel(a, x_or_b), k_kernel(a, x_or_b)};
}

}  // namespace rlab
