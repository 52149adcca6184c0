#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "owd/errors.hpp"

namespace owd {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_panels = 4096;
};

struct QuadratureResult {
  double value;
  double error;
  int panels;
};

namespace detail {

template <class F>
double gauss15(const F& f, double a, double b) {
  using rule = boost::math::quadrature::gauss<double, 15>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  // Boost stores the non-negative half of the rule; x[0] == 0 for odd order.
  double sum = w[0] * f(mid);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double dx = half * x[i];
    sum += w[i] * (f(mid - dx) + f(mid + dx));
  }
  return sum * half;
}

struct Panel {
  double a;
  double b;
  double value;
  double error;

  friend bool operator<(const Panel& l, const Panel& r) {
    return l.error < r.error;
  }
};

template <class F>
Panel make_panel(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double whole = gauss15(f, a, b);
  const double halves = gauss15(f, a, mid) + gauss15(f, mid, b);
  return {a, b, halves, std::abs(halves - whole)};
}

}  // namespace detail

/// Globally adaptive 15-point Gauss-Legendre quadrature. Each panel is
/// estimated on itself and on its two halves; the panel with the largest
/// disagreement is bisected until the summed disagreement drops below
/// abs_tol. The initial panels are the consecutive pairs of `points`
/// (ascending, at least two). Throws ConvergenceFailure when max_panels is
/// exhausted first.
template <class F>
QuadratureResult integrate(const F& f, std::span<const double> points,
                           const QuadratureOptions& opts = {}) {
  if (points.size() < 2)
    throw std::invalid_argument("quadrature needs at least two points");
  const double a = points.front();
  const double b = points.back();
  std::vector<detail::Panel> heap;
  heap.reserve(static_cast<std::size_t>(std::max(opts.max_panels, 1)) +
               points.size());
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i] < points[i + 1]))
      throw std::invalid_argument("quadrature points must be increasing");
    heap.push_back(detail::make_panel(f, points[i], points[i + 1]));
    total_error += heap.back().error;
  }
  std::make_heap(heap.begin(), heap.end());

  while (total_error > opts.abs_tol) {
    if (static_cast<int>(heap.size()) >= opts.max_panels) {
      std::ostringstream msg;
      msg << "quadrature on [" << a << ", " << b << "] did not reach "
          << opts.abs_tol << " within " << opts.max_panels
          << " panels (error estimate " << total_error << ")";
      throw ConvergenceFailure(msg.str());
    }
    std::pop_heap(heap.begin(), heap.end());
    const detail::Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Cannot bisect further in double precision; keep the estimate.
      heap.push_back({worst.a, worst.b, worst.value, 0.0});
      std::push_heap(heap.begin(), heap.end());
      total_error -= worst.error;
      continue;
    }
    auto left = detail::make_panel(f, worst.a, mid);
    auto right = detail::make_panel(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
  }

  // Sum in interval order so the result does not depend on heap layout.
  std::sort(heap.begin(), heap.end(),
            [](const auto& l, const auto& r) { return l.a < r.a; });
  double value = 0.0;
  double error = 0.0;
  for (const auto& p : heap) {
    value += p.value;
    error += p.error;
  }
  return {value, error, static_cast<int>(heap.size())};
}

template <class F>
QuadratureResult integrate(const F& f, double a, double b,
                           const QuadratureOptions& opts = {}) {
  const double points[] = {a, b};
  return integrate(f, std::span<const double>(points), opts);
}

}  // namespace owd
