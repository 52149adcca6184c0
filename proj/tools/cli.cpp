#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "owd/errors.hpp"
#include "owd/sweep.hpp"
#include "owd/topology.hpp"

namespace owd::cli {
namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Range {
  double lo;
  double hi;
  int n;

  double at(int i) const {
    if (n == 1) return lo;
    return i + 1 == n ? hi : lo + (hi - lo) * i / (n - 1);
  }
};

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("invalid number '" + text + "' in " + what);
  return v;
}

Range parse_range(const std::string& text, const std::string& what) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos)
    throw ConfigError(what + " must be lo:hi:N, got '" + text + "'");
  Range r{parse_double(text.substr(0, a), what),
          parse_double(text.substr(a + 1, b - a - 1), what), 0};
  const std::string count = text.substr(b + 1);
  auto [ptr, ec] =
      std::from_chars(count.data(), count.data() + count.size(), r.n);
  if (ec != std::errc() || ptr != count.data() + count.size() || r.n < 1)
    throw ConfigError(what + ": invalid sample count '" + count + "'");
  if (r.n > 1 && !(r.lo < r.hi)) throw ConfigError(what + " needs lo < hi");
  return r;
}

std::vector<double> parse_list(const std::string& text,
                               const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_double(item, what));
  return out;
}

Parameter parse_parameter(const std::string& name) {
  if (name == "h") return Parameter::h;
  if (name == "lambda") return Parameter::lambda;
  if (name == "gamma") return Parameter::gamma;
  throw ConfigError("unknown parameter '" + name + "' (h, lambda, gamma)");
}

FreeParameter as_free(Parameter p) {
  switch (p) {
    case Parameter::h:
      return FreeParameter::h;
    case Parameter::lambda:
      return FreeParameter::lambda;
    case Parameter::gamma:
      return FreeParameter::gamma;
  }
  throw ConfigError("unknown parameter");
}

std::string fixed6(double v) {
  if (std::abs(v) < 5e-7) v = 0.0;
  char buf[64];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

struct Options {
  std::string command;
  double gamma = 1.0;
  double delta = 1.0;
  double lambda = 0.0;
  double h = 0.0;
  std::optional<double> temperature;
  std::optional<double> beta;
  std::string range;
  std::string gamma_range;
  std::string model = "xy";
  std::string param = "h";
  int L = 200;
  std::string out_path;
  double tol = 1e-10;
  int grid = 64;
  std::optional<double> fd_step;
  unsigned threads = 1;
  bool critical_given = false;
  std::string critical;
  double window = 0.1;
};

struct Resolved {
  ModelPoint point;
  NumericOptions numeric;
  Parameter param = Parameter::h;
  std::optional<Range> range;
};

Resolved resolve(const Options& o) {
  if (!(o.tol > 0.0)) throw ConfigError("--tol must be > 0");
  if (o.grid < 2) throw ConfigError("--grid must be >= 2");
  if (o.fd_step && !(*o.fd_step > 0.0))
    throw ConfigError("--fd-step must be > 0");
  if (o.threads < 1) throw ConfigError("--threads must be >= 1");
  if (o.temperature && o.beta)
    throw ConfigError("--T and --beta are mutually exclusive");

  Resolved r;
  if (o.model == "xy") {
    r.point.model = Model::xy;
  } else if (o.model == "ext-ising") {
    r.point.model = Model::ext_ising;
  } else {
    throw ConfigError("unknown model '" + o.model + "' (xy, ext-ising)");
  }
  r.point.gamma = o.gamma;
  r.point.delta = o.delta;
  r.point.lambda = o.lambda;
  r.point.h = o.h;
  try {
    if (o.temperature)
      r.point.beta = InverseTemperature::from_temperature(*o.temperature);
    else if (o.beta)
      r.point.beta = InverseTemperature::finite(*o.beta);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const bool evaluates_deficit =
      o.command == "sweep" || o.command == "xy-phase-diagram";
  if (evaluates_deficit &&
      (r.point.model == Model::xy || o.command == "xy-phase-diagram") &&
      !r.point.beta.is_infinite())
    throw ConfigError("the XY chain is evaluated at zero temperature only");

  r.numeric.quadrature.abs_tol = o.tol;
  r.numeric.minimizer.grid = o.grid;
  r.param = parse_parameter(o.param);
  if (!o.range.empty()) r.range = parse_range(o.range, "--range");
  return r;
}

void echo_config(std::ostream& os, const Options& o, const Resolved& r) {
  os << "# owd " << o.command << '\n'
     << "# model: " << to_string(r.point.model) << '\n'
     << "# gamma: " << format_number(r.point.gamma) << '\n'
     << "# delta: " << format_number(r.point.delta) << '\n'
     << "# lambda: " << format_number(r.point.lambda) << '\n'
     << "# h: " << format_number(r.point.h) << '\n'
     << "# beta: "
     << (r.point.beta.is_infinite() ? std::string("inf")
                                    : format_number(r.point.beta.value()))
     << '\n'
     << "# param: " << to_string(r.param) << '\n'
     << "# range: " << (o.range.empty() ? "-" : o.range) << '\n';
  if (o.command == "xy-phase-diagram")
    os << "# gamma-range: " << o.gamma_range << '\n';
  if (o.command == "spectrum") os << "# L: " << o.L << '\n';
  os << "# tol: " << format_number(o.tol) << '\n'
     << "# grid: " << o.grid << '\n'
     << "# fd-step: "
     << (o.fd_step ? format_number(*o.fd_step) : std::string("spacing"))
     << '\n'
     << "# threads: " << o.threads << '\n';
  if (o.command == "sweep")
    os << "# critical-points: "
       << (o.critical_given ? (o.critical.empty() ? "auto" : o.critical)
                            : "-")
       << '\n'
       << "# window: " << format_number(o.window) << '\n';
}

ExtIsingParams ext_params(const ModelPoint& p) {
  return {p.gamma, p.delta, p.lambda, p.h, p.beta};
}

SweepSpec sweep_spec(const Options& o, const Resolved& r, ModelPoint base,
                     Parameter param, const Range& range) {
  SweepSpec spec;
  spec.base = base;
  spec.param = param;
  spec.lo = range.lo;
  spec.hi = range.hi;
  spec.samples = range.n;
  spec.fd_step = o.fd_step;
  spec.numeric = r.numeric;
  spec.threads = o.threads;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

int cmd_xy_phase_diagram(const Options& o, const Resolved& r,
                         std::ostream& os) {
  if (!r.range) throw ConfigError("xy-phase-diagram needs --range (h)");
  if (o.gamma_range.empty())
    throw ConfigError("xy-phase-diagram needs --gamma-range");
  const Range gammas = parse_range(o.gamma_range, "--gamma-range");
  const std::vector<double> gamma_critical{0.0};

  os << "h,gamma,deficit,chi\n";
  for (int j = 0; j < gammas.n; ++j) {
    ModelPoint base = r.point;
    base.model = Model::xy;
    base.gamma = avoid_critical(gammas.at(j), gamma_critical);
    const auto spec = sweep_spec(o, r, base, Parameter::h, *r.range);
    SweepResult result;
    try {
      result = run_sweep(spec);
    } catch (const SingularIntegrand& e) {
      std::ostringstream msg;
      msg << e.what() << " (grid point h = "
          << format_number(e.at().value_or(std::nan(""))) << ", gamma = "
          << format_number(base.gamma) << ")";
      throw SingularIntegrand(msg.str(), e.at());
    }
    for (const auto& row : result.rows)
      os << format_number(row.x) << ',' << format_number(base.gamma) << ','
         << format_number(row.deficit) << ',' << format_number(row.chi)
         << '\n';
  }
  return kSuccess;
}

int cmd_sweep(const Options& o, const Resolved& r, std::ostream& os) {
  if (!r.range) throw ConfigError("sweep needs --range");
  const auto spec = sweep_spec(o, r, r.point, r.param, *r.range);
  const auto result = run_sweep(spec);

  os << "x,deficit,chi\n";
  for (const auto& row : result.rows)
    os << format_number(row.x) << ',' << format_number(row.deficit) << ','
       << format_number(row.chi) << '\n';
  for (const auto& e : result.extrema)
    os << "# extremum: x=" << format_number(e.x)
       << " chi=" << format_number(e.chi) << '\n';
  if (!o.critical_given) return kSuccess;

  const auto critical = o.critical.empty()
                            ? critical_values(r.point, r.param)
                            : parse_list(o.critical, "--critical-points");
  ValidationReport report;
  try {
    report = validate_extrema(result, critical, o.window);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& m : report.matches) {
    os << "# critical: " << format_number(m.critical) << " nearest="
       << (m.nearest ? format_number(*m.nearest) : std::string("none"))
       << " distance=" << format_number(m.distance) << ' '
       << (m.matched ? "MATCH" : "MISS") << '\n';
  }
  os << "# validation: " << (report.pass ? "PASS" : "FAIL") << '\n';
  return report.pass ? kSuccess : kValidationFail;
}

int cmd_critical_points(const Options&, const Resolved& r, std::ostream& os) {
  const auto roots = characteristic_roots(ext_params(r.point), as_free(r.param));
  os << "value,zeta_re,zeta_im\n";
  for (const auto& c : roots)
    os << fixed6(c.value) << ',' << fixed6(c.zeta.real()) << ','
       << fixed6(c.zeta.imag()) << '\n';
  return kSuccess;
}

std::vector<double> sample_points(const Resolved& r) {
  std::vector<double> xs;
  if (!r.range) {
    xs.push_back(r.point.get(r.param));
    return xs;
  }
  for (int i = 0; i < r.range->n; ++i) xs.push_back(r.range->at(i));
  return xs;
}

int cmd_spectrum(const Options& o, const Resolved& r, std::ostream& os) {
  if (o.L < 2) throw ConfigError("--L must be >= 2");
  os << "x,phi,omega_plus,omega_minus\n";
  for (double x : sample_points(r)) {
    for (const auto& p : spectrum(ext_params(r.point.with(r.param, x)), o.L))
      os << format_number(x) << ',' << format_number(p.phi) << ','
         << format_number(p.omega_plus) << ',' << format_number(p.omega_minus)
         << '\n';
  }
  return kSuccess;
}

int cmd_winding(const Options&, const Resolved& r, std::ostream& os,
                std::ostream& err) {
  constexpr int kCurveRows = 4096;
  int code = kSuccess;
  if (r.range) {
    os << "x,nu\n";
    for (double x : sample_points(r)) {
      try {
        const int nu = winding_number(ext_params(r.point.with(r.param, x)));
        os << format_number(x) << ',' << nu << '\n';
      } catch (const GapClosed& e) {
        os << "# gap closed at x=" << format_number(x) << '\n'
           << format_number(x) << ",NA\n";
        err << "warning: " << e.what() << " (x = " << format_number(x)
            << ")\n";
      }
    }
    return code;
  }

  const auto params = ext_params(r.point);
  try {
    const int nu = winding_number(params);
    os << "# nu: " << nu << '\n';
  } catch (const GapClosed& e) {
    os << "# nu: undefined (gap closed)\n";
    err << "error: " << e.what() << '\n';
    code = kNumericalFailure;
  }
  os << "phi,Y,Z\n";
  for (int i = 0; i < kCurveRows; ++i) {
    const double phi = i + 1 == kCurveRows
                           ? std::numbers::pi
                           : -std::numbers::pi +
                                 2.0 * std::numbers::pi * i / (kCurveRows - 1);
    const auto v = winding_vector(params, phi);
    os << format_number(phi) << ',' << format_number(v.y) << ','
       << format_number(v.z) << '\n';
  }
  return code;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"One-way quantum deficit of XY and extended Ising chains"};
  app.name("owd");
  app.require_subcommand(1);
  app.fallthrough();
  // -h is taken by the field.
  app.set_help_flag("--help", "print help and exit");

  app.add_option("--gamma", o.gamma, "anisotropy gamma");
  app.add_option("--delta", o.delta, "three-site anisotropy delta");
  app.add_option("--lambda", o.lambda, "three-site coupling lambda");
  app.add_option("--h", o.h, "transverse field h");
  auto* t_opt = app.add_option("--T", o.temperature, "temperature (0 = ground state)");
  auto* b_opt = app.add_option("--beta", o.beta, "inverse temperature");
  t_opt->excludes(b_opt);
  app.add_option("--range", o.range, "sweep range lo:hi:N (use --range=lo:hi:N for negative lo)");
  app.add_option("--L", o.L, "number of sites for spectra");
  app.add_option("--out", o.out_path, "output CSV path (default stdout)");
  app.add_option("--tol", o.tol, "quadrature absolute tolerance");
  app.add_option("--grid", o.grid, "minimizer seed grid per axis");
  app.add_option("--fd-step", o.fd_step, "finite-difference step");
  app.add_option("--threads", o.threads, "worker threads");
  app.add_option("--model", o.model, "xy or ext-ising");
  app.add_option("--param", o.param, "swept or free parameter: h, lambda, gamma");

  auto* phase = app.add_subcommand("xy-phase-diagram", "deficit over an (h, gamma) grid");
  phase->add_option("--gamma-range", o.gamma_range, "gamma grid lo:hi:N");
  auto* sweep = app.add_subcommand("sweep", "deficit and susceptibility along one parameter");
  sweep->add_option("--critical-points", o.critical,
                    "validate extrema against these values (comma list; empty = computed)")
      ->expected(0, 1);
  sweep->add_option("--window", o.window, "extremum matching window");
  app.add_subcommand("critical-points", "unit-circle roots of the characteristic function");
  app.add_subcommand("spectrum", "BdG energies on the L-site wavevector grid");
  app.add_subcommand("winding", "winding vector curve and winding number");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  o.command = app.get_subcommands().front()->get_name();
  o.critical_given = sweep->count("--critical-points") > 0;

  std::ofstream file;
  std::ostream* os = &out;
  try {
    const Resolved r = resolve(o);
    if (!o.out_path.empty()) {
      file.open(o.out_path);
      if (!file) throw ConfigError("cannot open --out path '" + o.out_path + "'");
      os = &file;
    }
    os->imbue(std::locale::classic());
    echo_config(*os, o, r);
    if (o.command == "xy-phase-diagram") return cmd_xy_phase_diagram(o, r, *os);
    if (o.command == "sweep") return cmd_sweep(o, r, *os);
    if (o.command == "critical-points") return cmd_critical_points(o, r, *os);
    if (o.command == "spectrum") return cmd_spectrum(o, r, *os);
    return cmd_winding(o, r, *os, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SingularIntegrand& e) {
    err << "numerical failure: " << e.what();
    if (e.at()) err << " (x = " << format_number(*e.at()) << ')';
    err << '\n';
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace owd::cli
