#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <numbers>

#include "owd/errors.hpp"
#include "owd/sweep.hpp"

using namespace owd;

namespace {

const double kGolden = (std::sqrt(5.0) + 1.0) / 2.0;

ModelPoint xy(double gamma, double h) {
  ModelPoint p;
  p.gamma = gamma;
  p.h = h;
  return p;
}

ModelPoint case1(InverseTemperature beta = InverseTemperature::infinite()) {
  return {Model::ext_ising, 1.0, 1.0, 1.5, 0.0, beta};
}

ModelPoint case2(InverseTemperature beta = InverseTemperature::infinite()) {
  return {Model::ext_ising, 1.0, -1.0, 0.0, 1.0, beta};
}

SweepSpec spec_for(ModelPoint base, Parameter param, double lo, double hi,
                   int n) {
  SweepSpec s;
  s.base = base;
  s.param = param;
  s.lo = lo;
  s.hi = hi;
  s.samples = n;
  return s;
}

std::vector<double> xs(const std::vector<Extremum>& e) {
  std::vector<double> out;
  for (const auto& v : e) out.push_back(v.x);
  return out;
}

double max_abs_chi(const SweepResult& r) {
  double m = 0.0;
  for (const auto& row : r.rows)
    if (std::isfinite(row.chi)) m = std::max(m, std::abs(row.chi));
  return m;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("ModelPoint get/with") {
  const auto p = case1().with(Parameter::h, 0.7);
  CHECK(p.get(Parameter::h) == 0.7);
  CHECK(p.get(Parameter::lambda) == 1.5);
  CHECK(p.with(Parameter::gamma, 0.2).gamma == 0.2);
  CHECK(to_string(Parameter::lambda) == "lambda");
  CHECK(to_string(Model::ext_ising) == "ext-ising");
}

TEST_CASE("critical_values and avoid_critical") {
  const auto h = critical_values(xy(1.0, 0.0), Parameter::h);
  REQUIRE(h.size() == 2);
  CHECK(h[0] == -1.0);
  CHECK(h[1] == 1.0);
  CHECK(critical_values(xy(1.0, 0.5), Parameter::gamma) == std::vector<double>{0.0});
  CHECK(critical_values(xy(1.0, 1.5), Parameter::gamma).empty());

  const auto c1 = critical_values(case1(), Parameter::h);
  REQUIRE(c1.size() == 3);
  CHECK(std::abs(c1[2] - 2.5) < 1e-6);
  const auto c2 = critical_values(case2(), Parameter::lambda);
  REQUIRE(c2.size() == 4);
  CHECK(std::abs(c2[0] + kGolden) < 1e-6);

  const std::vector<double> crit{1.0};
  CHECK(avoid_critical(1.0, crit) == 1.0 + 1e-6);
  CHECK(avoid_critical(1.0 + 5e-7, crit) == 1.0 + 1e-6);
  CHECK(avoid_critical(1.0 - 5e-7, crit) == 1.0 + 1e-6);
  CHECK(avoid_critical(1.1, crit) == 1.1);
}

TEST_CASE("SweepSpec validation") {
  auto s = spec_for(xy(1.0, 0.0), Parameter::h, 0.0, 1.0, 3);
  CHECK_NOTHROW(s.validate());
  auto bad = s;
  bad.lo = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.samples = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.fd_step = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.param = Parameter::lambda;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.threads = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("run_sweep: XX proxy collapses above h = 1") {
  const auto r = run_sweep(spec_for(xy(1e-6, 0.0), Parameter::h, 1.05, 2.0, 20));
  REQUIRE(r.rows.size() == 20);
  for (const auto& row : r.rows) {
    CHECK(row.deficit < 1e-6);
    if (std::isfinite(row.chi)) CHECK(std::abs(row.chi) < 1e-4);
  }
  CHECK(deficit_at(xy(1e-6, 0.5)).deficit > 1e-3);
}

TEST_CASE("run_sweep: minimal three-row sweep") {
  const auto r = run_sweep(spec_for(xy(1.0, 0.0), Parameter::h, 0.2, 0.4, 3));
  REQUIRE(r.rows.size() == 3);
  CHECK(std::isnan(r.rows[0].chi));
  CHECK(std::isfinite(r.rows[1].chi));
  CHECK(std::isnan(r.rows[2].chi));
  CHECK(r.rows[1].chi ==
        doctest::Approx((r.rows[2].deficit - r.rows[0].deficit) / 0.2));
}

TEST_CASE("run_sweep: samples are nudged off critical values") {
  const auto r = run_sweep(spec_for(xy(1.0, 0.0), Parameter::h, 0.5, 1.5, 11));
  CHECK(r.rows[5].x == 1.0 + 1e-6);
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].x > r.rows[i - 1].x);
  for (const auto& row : r.rows) CHECK(row.deficit >= 0.0);
}

TEST_CASE("run_sweep: singular points carry x") {
  // The XX chain at h = 0 closes its gap at φ = π/2, which is not among the
  // field's critical values ±1.
  try {
    run_sweep(spec_for(xy(0.0, 0.0), Parameter::h, -0.2, 0.2, 3));
    FAIL("expected SingularIntegrand");
  } catch (const SingularIntegrand& e) {
    REQUIRE(e.at().has_value());
    CHECK(*e.at() == 0.0);
  }
}

TEST_CASE("run_sweep: Ising extremum near h = 1") {
  const auto r = run_sweep(spec_for(xy(1.0, 0.0), Parameter::h, 0.2, 1.8, 161));
  REQUIRE(!r.extrema.empty());
  for (double x : xs(r.extrema)) CHECK(std::abs(x - 1.0) < 0.1);
  const std::vector<double> crit{1.0};
  CHECK(validate_extrema(r, crit, 0.1).pass);
}

TEST_CASE("run_sweep: deterministic across thread counts") {
  auto s = spec_for(case1(), Parameter::h, -2.0, 3.0, 41);
  const auto one = run_sweep(s);
  s.threads = 3;
  const auto three = run_sweep(s);
  const auto again = run_sweep(s);
  REQUIRE(one.rows.size() == three.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(same_bits(one.rows[i].x, three.rows[i].x));
    CHECK(same_bits(one.rows[i].deficit, three.rows[i].deficit));
    CHECK(same_bits(one.rows[i].chi, three.rows[i].chi));
    CHECK(same_bits(again.rows[i].deficit, three.rows[i].deficit));
  }
  CHECK(xs(one.extrema) == xs(three.extrema));

  s.fd_step = 1e-3;
  s.threads = 1;
  const auto fd1 = run_sweep(s);
  s.threads = 4;
  const auto fd4 = run_sweep(s);
  for (std::size_t i = 0; i < fd1.rows.size(); ++i)
    CHECK(same_bits(fd1.rows[i].chi, fd4.rows[i].chi));
}

TEST_CASE("run_sweep: refinement moves extrema by less than one spacing") {
  const auto coarse = run_sweep(spec_for(xy(1.0, 0.0), Parameter::h, 0.2, 1.8, 161));
  const auto fine = run_sweep(spec_for(xy(1.0, 0.0), Parameter::h, 0.2, 1.8, 321));
  const double spacing = 1.6 / 160;
  for (double x : xs(coarse.extrema)) {
    double nearest = INFINITY;
    for (double y : xs(fine.extrema)) nearest = std::min(nearest, std::abs(x - y));
    CAPTURE(x);
    CHECK(nearest < spacing);
  }

  // Gap-closing extrema obey the same bound. Extrema produced by a kink in
  // Δ (the optimal measurement switching branch) peak at the last sample
  // whose stencil does not straddle the kink, so coarse and fine grids can
  // disagree by one coarse plus one fine spacing.
  const auto c1 = run_sweep(spec_for(case1(), Parameter::h, -2.5, 3.5, 301));
  const auto f1 = run_sweep(spec_for(case1(), Parameter::h, -2.5, 3.5, 601));
  const auto crit = critical_values(case1(), Parameter::h);
  for (double x : xs(c1.extrema)) {
    double nearest = INFINITY;
    for (double y : xs(f1.extrema)) nearest = std::min(nearest, std::abs(x - y));
    bool at_gap = false;
    for (double c : crit) at_gap = at_gap || std::abs(x - c) < 0.1;
    CAPTURE(x);
    CHECK(nearest < (at_gap ? 6.0 / 300 : 6.0 / 300 + 6.0 / 600));
  }
}

TEST_CASE("susceptibility: examples") {
  CHECK(std::abs(susceptibility(xy(1e-6, 1.5), Parameter::h, 1e-3)) < 1e-4);

  const double a = susceptibility(xy(1.0, 0.5), Parameter::h, 1e-3);
  const double b = susceptibility(xy(1.0, 0.5), Parameter::h, 5e-4);
  CHECK(std::abs(a - b) < std::max(1e-3, 0.05 * std::abs(a)));

  CHECK_THROWS_AS(susceptibility(xy(1.0, 0.5), Parameter::h, 0.0), std::invalid_argument);
}

TEST_CASE("susceptibility: matches a local quadratic fit") {
  const auto p = case2().with(Parameter::lambda, 1.0);
  const double chi = susceptibility(p, Parameter::lambda, 1e-3);
  CHECK(std::isfinite(chi));

  const double h = 0.01;
  Eigen::MatrixXd A(7, 3);
  Eigen::VectorXd y(7);
  for (int i = 0; i < 7; ++i) {
    const double dx = (i - 3) * h;
    A(i, 0) = 1.0;
    A(i, 1) = dx;
    A(i, 2) = dx * dx;
    y(i) = deficit_at(p.with(Parameter::lambda, 1.0 + dx)).deficit;
  }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(y);
  CHECK(std::abs(chi - coef(1)) < 0.05 * std::abs(coef(1)));
}

TEST_CASE("find_extrema") {
  const std::vector<SweepRow> rows{{0, 0, NAN}, {1, 0, 0.5},  {2, 0, -2.0},
                                   {3, 0, 1.0}, {4, 0, 1.5},  {5, 0, 0.2},
                                   {6, 0, NAN}};
  const auto e = find_extrema(rows, 0.1);
  REQUIRE(e.size() == 2);
  CHECK(e[0].x == 2.0);
  CHECK(e[0].chi == -2.0);
  CHECK(e[1].x == 4.0);
  CHECK(find_extrema(rows, 3.0).empty());
  // Plateaus are not strict maxima.
  const std::vector<SweepRow> flat{{0, 0, NAN}, {1, 0, 1.0}, {2, 0, 1.0}, {3, 0, NAN}};
  CHECK(find_extrema(flat, 0.0).empty());
}

TEST_CASE("validate_extrema: examples") {
  const std::vector<double> ex{0.49, 2.52};
  const std::vector<double> crit{0.5, 2.5};
  const auto ok = validate_extrema(ex, crit, 0.1, 0.0, 3.0);
  CHECK(ok.pass);
  REQUIRE(ok.matches.size() == 2);
  CHECK(ok.matches[0].matched);
  CHECK(ok.matches[1].distance == doctest::Approx(0.02));

  const std::vector<double> none;
  const std::vector<double> one{0.5};
  const auto miss = validate_extrema(none, one, 0.1, 0.0, 3.0);
  CHECK_FALSE(miss.pass);
  REQUIRE(miss.matches.size() == 1);
  CHECK_FALSE(miss.matches[0].matched);
  CHECK_FALSE(miss.matches[0].nearest.has_value());

  // Critical values outside the range are ignored.
  const std::vector<double> far{5.0};
  CHECK(validate_extrema(ex, far, 0.1, 0.0, 3.0).pass);
  CHECK(validate_extrema(ex, far, 0.1, 0.0, 3.0).matches.empty());

  const auto r = run_sweep(spec_for(xy(1.0, 0.0), Parameter::h, 0.2, 0.4, 3));
  CHECK_THROWS_AS(validate_extrema(r, one, 0.05), std::invalid_argument);
}

TEST_CASE("run_sweep: topological critical points are matched") {
  const auto r1 = run_sweep(spec_for(case1(), Parameter::h, -2.5, 3.5, 601));
  const auto c1 = critical_values(case1(), Parameter::h);
  CHECK(validate_extrema(r1, c1, 0.1).pass);

  const auto r2 = run_sweep(spec_for(case2(), Parameter::lambda, -2.5, 3.0, 551));
  const auto c2 = critical_values(case2(), Parameter::lambda);
  CHECK(c2.size() == 4);
  CHECK(validate_extrema(r2, c2, 0.1).pass);
}

TEST_CASE("run_sweep: temperature smooths the susceptibility") {
  struct Case {
    ModelPoint (*make)(InverseTemperature);
    Parameter param;
    double lo, hi;
    int n;
  };
  const Case cases[] = {{case1, Parameter::h, -2.5, 3.5, 601},
                        {case2, Parameter::lambda, -2.5, 3.0, 551}};
  for (const auto& c : cases) {
    const auto cold = run_sweep(
        spec_for(c.make(InverseTemperature::infinite()), c.param, c.lo, c.hi, c.n));
    double prev = max_abs_chi(cold);
    std::vector<double> low_t;
    for (double beta : {20.0, 5.0, 2.0}) {
      const auto r = run_sweep(spec_for(c.make(InverseTemperature::finite(beta)),
                                        c.param, c.lo, c.hi, c.n));
      const double m = max_abs_chi(r);
      CAPTURE(beta);
      CHECK(m <= prev);
      prev = m;
      if (beta == 20.0) low_t = xs(r.extrema);
    }
    REQUIRE(!low_t.empty());
    for (double x : low_t) {
      double nearest = INFINITY;
      for (double y : xs(cold.extrema)) nearest = std::min(nearest, std::abs(x - y));
      CAPTURE(x);
      CHECK(nearest < 0.15);
    }
  }
}
