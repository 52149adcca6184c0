#include "owd/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "owd/errors.hpp"
#include "owd/topology.hpp"

namespace owd {
namespace {

constexpr double kCriticalOffset = 1e-6;

FreeParameter as_free(Parameter p) {
  switch (p) {
    case Parameter::h:
      return FreeParameter::h;
    case Parameter::lambda:
      return FreeParameter::lambda;
    case Parameter::gamma:
      return FreeParameter::gamma;
  }
  throw std::invalid_argument("unknown parameter");
}

ExtIsingParams ext_params(const ModelPoint& p) {
  return {p.gamma, p.delta, p.lambda, p.h, p.beta};
}

// Evaluates fn(i) for i in [0, n) on `threads` workers. Each index is
// independent, so the output does not depend on scheduling. The exception
// of the lowest failing index wins.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::string_view to_string(Model model) {
  return model == Model::xy ? "xy" : "ext-ising";
}

std::string_view to_string(Parameter param) {
  switch (param) {
    case Parameter::h:
      return "h";
    case Parameter::lambda:
      return "lambda";
    case Parameter::gamma:
      return "gamma";
  }
  return "?";
}

double ModelPoint::get(Parameter param) const {
  switch (param) {
    case Parameter::h:
      return h;
    case Parameter::lambda:
      return lambda;
    case Parameter::gamma:
      return gamma;
  }
  throw std::invalid_argument("unknown parameter");
}

ModelPoint ModelPoint::with(Parameter param, double value) const {
  ModelPoint p = *this;
  switch (param) {
    case Parameter::h:
      p.h = value;
      break;
    case Parameter::lambda:
      p.lambda = value;
      break;
    case Parameter::gamma:
      p.gamma = value;
      break;
  }
  return p;
}

XState model_state(const ModelPoint& point, const NumericOptions& opts) {
  if (point.model == Model::xy)
    return xy_state({point.gamma, point.h}, opts.quadrature);
  return ext_ising_state(ext_params(point), opts.quadrature);
}

DeficitResult deficit_at(const ModelPoint& point, const NumericOptions& opts) {
  return one_way_deficit(model_state(point, opts), opts.minimizer);
}

std::vector<double> critical_values(const ModelPoint& point, Parameter param) {
  if (point.model == Model::xy) {
    switch (param) {
      case Parameter::h:
        return {-1.0, 1.0};
      case Parameter::gamma:
        if (std::abs(point.h) < 1.0) return {0.0};
        return {};
      case Parameter::lambda:
        return {};
    }
  }
  std::vector<double> out;
  try {
    for (const auto& c : characteristic_roots(ext_params(point), as_free(param)))
      out.push_back(c.value);
  } catch (const NoRoots&) {
  }
  return out;
}

double avoid_critical(double x, std::span<const double> critical) {
  for (double c : critical)
    if (std::abs(x - c) < kCriticalOffset) return c + kCriticalOffset;
  return x;
}

void SweepSpec::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("sweep range needs lo < hi");
  if (samples < 3) throw std::invalid_argument("sweep needs at least 3 samples");
  if (fd_step && !(*fd_step > 0.0))
    throw std::invalid_argument("finite-difference step must be > 0");
  if (base.model == Model::xy && param == Parameter::lambda)
    throw std::invalid_argument("the XY chain has no lambda coupling");
  if (threads == 0) throw std::invalid_argument("threads must be >= 1");
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.samples);
  const double spacing = (spec.hi - spec.lo) / (spec.samples - 1);
  const auto critical = critical_values(spec.base, spec.param);

  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i + 1 == n ? spec.hi : spec.lo + spacing * i;
    xs[i] = avoid_critical(x, critical);
  }

  auto deficit_of = [&](double x) {
    try {
      return deficit_at(spec.base.with(spec.param, x), spec.numeric).deficit;
    } catch (const SingularIntegrand& e) {
      throw SingularIntegrand(e.what(), x);
    }
  };

  std::vector<double> deficits(n);
  std::vector<double> chi(n, std::numeric_limits<double>::quiet_NaN());
  parallel_for(n, spec.threads, [&](std::size_t i) {
    deficits[i] = deficit_of(xs[i]);
    if (spec.fd_step && i > 0 && i + 1 < n) {
      const double step = *spec.fd_step;
      const double up = avoid_critical(xs[i] + step, critical);
      const double down = avoid_critical(xs[i] - step, critical);
      chi[i] = (deficit_of(up) - deficit_of(down)) / (up - down);
    }
  });
  if (!spec.fd_step) {
    for (std::size_t i = 1; i + 1 < n; ++i)
      chi[i] = (deficits[i + 1] - deficits[i - 1]) / (xs[i + 1] - xs[i - 1]);
  }

  SweepResult result;
  result.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    result.rows.push_back({xs[i], deficits[i], chi[i]});

  const double dx = spec.fd_step.value_or(spacing);
  const double floor =
      spec.noise_floor.value_or(10.0 * spec.numeric.minimizer.tolerance / dx);
  result.extrema = find_extrema(result.rows, floor);
  return result;
}

double susceptibility(const ModelPoint& point, Parameter param, double step,
                      const NumericOptions& opts) {
  if (!(step > 0.0))
    throw std::invalid_argument("finite-difference step must be > 0");
  const double x = point.get(param);
  const double up = deficit_at(point.with(param, x + step), opts).deficit;
  const double down = deficit_at(point.with(param, x - step), opts).deficit;
  return (up - down) / (2.0 * step);
}

std::vector<Extremum> find_extrema(std::span<const SweepRow> rows,
                                   double floor) {
  std::vector<Extremum> out;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const double prev = std::abs(rows[i - 1].chi);
    const double here = std::abs(rows[i].chi);
    const double next = std::abs(rows[i + 1].chi);
    // NaN neighbours fail these comparisons, so end rows never qualify.
    if (here > prev && here > next && here > floor)
      out.push_back({rows[i].x, rows[i].chi});
  }
  return out;
}

ValidationReport validate_extrema(std::span<const double> extrema_x,
                                  std::span<const double> critical,
                                  double window, double lo, double hi) {
  ValidationReport report{{}, true};
  for (double c : critical) {
    if (c < lo || c > hi) continue;
    CriticalMatch m{c, std::nullopt, std::numeric_limits<double>::infinity(),
                    false};
    for (double x : extrema_x) {
      if (std::abs(x - c) < m.distance) {
        m.distance = std::abs(x - c);
        m.nearest = x;
      }
    }
    m.matched = m.distance <= window;
    report.pass = report.pass && m.matched;
    report.matches.push_back(m);
  }
  return report;
}

ValidationReport validate_extrema(const SweepResult& result,
                                  std::span<const double> critical,
                                  double window) {
  if (result.rows.size() < 2)
    throw std::invalid_argument("sweep result has fewer than two rows");
  // Samples shifted off a critical value still count it as in range.
  const double lo = result.rows.front().x - kCriticalOffset;
  const double hi = result.rows.back().x + kCriticalOffset;
  const double spacing = (result.rows.back().x - result.rows.front().x) /
                         static_cast<double>(result.rows.size() - 1);
  if (!(window > spacing))
    throw std::invalid_argument("window must exceed the sample spacing");
  std::vector<double> xs;
  for (const auto& e : result.extrema) xs.push_back(e.x);
  return validate_extrema(xs, critical, window, lo, hi);
}

}  // namespace owd
