#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <vector>

namespace rlab::quad {

/// Flattened Gauss-Legendre rule over a list of panels.  Built once, then
/// reused for many integrands (the stable density evaluates thousands).
struct Rule {
  std::vector<double> x;
  std::vector<double> w;

  template <class F>
  auto integrate(F&& f) const {
    decltype(f(0.0)) acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * f(x[i]);
    return acc;
  }

  void add_panel(double a, double b) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const auto& ab = GL::abscissa();
    const auto& wt = GL::weights();
    const double h = 0.5 * (b - a), m = 0.5 * (b + a);
    for (std::size_t i = 0; i < ab.size(); ++i) {
      if (ab[i] == 0.0) {
        x.push_back(m);
        w.push_back(h * wt[i]);
        continue;
      }
      x.push_back(m - h * ab[i]);
      w.push_back(h * wt[i]);
      x.push_back(m + h * ab[i]);
      w.push_back(h * wt[i]);
    }
  }

  /// Geometric panels [lo, 2lo], ..., up to hi, plus [0, lo].
  void add_graded(double lo, double hi) {
    add_panel(0.0, lo);
    for (double a = lo; a < hi; a *= 2) add_panel(a, std::min(2 * a, hi));
  }

  void add_uniform(double a, double b, double width) {
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    for (int i = 0; i < n; ++i) add_panel(a + (b - a) * i / n, a + (b - a) * (i + 1) / n);
  }
};

}  // namespace rlab::quad
