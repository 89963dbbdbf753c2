// traptail: command-line front end for the exact, simulation and asymptotic
// engines. Exit codes: 0 success, 1 verification failure, 2 usage or domain
// error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "traptail/traptail.hpp"

namespace {

using namespace traptail;

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* v = std::getenv("TRAP_TAIL_LOG");
  if (!v) return LogLevel::Info;
  const std::string s(v);
  if (s == "quiet" || s == "error" || s == "0") return LogLevel::Quiet;
  if (s == "debug" || s == "2") return LogLevel::Debug;
  return LogLevel::Info;
}

template <class... Args>
void log(LogLevel level, const Args&... args) {
  if (static_cast<int>(log_level()) < static_cast<int>(level)) return;
  std::cerr << "traptail: ";
  (std::cerr << ... << args);
  std::cerr << '\n';
}

// "-" or empty means stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close(const std::string& path) {
    if (!file_) {
      std::cout.flush();
      return;
    }
    file_->close();
    if (!*file_) throw Error("failed writing '" + path + "'");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct Options {
  double alpha = 0.5;
  double beta = 2.0;
  std::string grid = "log:1:1e5:32";
  std::string out = "-";
  double eps = 1e-12;
  int modes = kDefaultModes;
  double samples = 1e6;  // accepts 1e6-style input; must be integral
  std::uint64_t seed = 1;
  unsigned workers = default_workers();
  std::optional<int> fixed_k;
  // subcommand specific
  std::string stats_out;
  std::string samples_out;
  double z_re = 0.5;
  double z_im = 0.0;
  bool quadrature = false;
  bool corrupt_phase = false;
  std::string in;
};

SimConfig sim_config(const Options& o) {
  if (!(o.samples >= 1.0 && o.samples <= 1e18) || o.samples != std::floor(o.samples)) {
    throw DomainError("--samples must be an integer in [1, 1e18]");
  }
  SimConfig c;
  c.n_samples = static_cast<std::uint64_t>(o.samples);
  c.seed = o.seed;
  c.workers = o.workers;
  c.fixed_k = o.fixed_k;
  validate(c);
  return c;
}

int run_exact(const Options& o) {
  const auto p = make_params(o.alpha, o.beta);
  const auto grid = make_log_grid(parse_grid_spec(o.grid), p.beta());
  log(LogLevel::Debug, "exact: ", grid.size(), " grid points, k_max=", mixture_truncation_index(p, o.eps));
  const auto table = mixture_tail(p, grid, o.eps, o.workers);
  Output out(o.out);
  write_csv(out.stream(), table);
  out.close(o.out);
  std::cerr << "truncation bound: " << format_g17(*table.truncation_bound) << '\n';
  return 0;
}

int run_simulate(const Options& o) {
  const auto p = make_params(o.alpha, o.beta);
  const auto grid = make_log_grid(parse_grid_spec(o.grid), p.beta());
  const auto cfg = sim_config(o);
  log(LogLevel::Debug, "simulate: ", cfg.n_samples, " samples, seed ", cfg.seed, ", ", cfg.workers, " workers");
  const auto table = estimate_tail(p, grid, cfg);
  Output out(o.out);
  write_csv(out.stream(), table);
  out.close(o.out);
  if (!o.stats_out.empty()) {
    Output s(o.stats_out);
    to_json(simulate_stats(p, cfg)).dump(s.stream());
    s.stream() << '\n';
    s.close(o.stats_out);
  }
  if (!o.samples_out.empty()) {
    const auto samples = sample_excursions(p, cfg);
    Output s(o.samples_out);
    write_samples_csv(s.stream(), samples);
    s.close(o.samples_out);
  }
  return 0;
}

// t^{-rho} g((b-1)^2 t / 2b): the tail implied by the asymptotic formula.
int run_asympt(const Options& o) {
  const auto p = make_params(o.alpha, o.beta);
  const auto grid = make_log_grid(parse_grid_spec(o.grid), p.beta());
  const auto s = oscillation_spectrum(p, o.modes);
  const auto next = oscillation_spectrum(p, o.modes + 1);
  const double c_next = next.modes.back().c;
  const double scale = theorem_argument_scale(p.beta());
  TailTable table;
  table.provenance = Provenance::Asymptotic;
  table.t_grid = grid;
  std::vector<double> bound;
  for (double t : grid) {
    const double decay = std::pow(t, -p.rho());
    table.survival.push_back(decay * g_eval(s, scale * t));
    bound.push_back(2.0 * c_next * s.prefactor * decay);
  }
  table.asymptotic_bound = std::move(bound);
  validate(table);
  Output out(o.out);
  write_csv(out.stream(), table);
  out.close(o.out);
  return 0;
}

int run_coefficients(const Options& o) {
  const auto p = make_params(o.alpha, o.beta);
  const auto s = oscillation_spectrum(p, o.modes);
  if (!s.bracket_positive) log(LogLevel::Info, "warning: sum of c_k is >= 1, the bracket can turn negative");
  Output out(o.out);
  to_json(s).dump(out.stream());
  out.stream() << '\n';
  out.close(o.out);
  return 0;
}

int run_mellin(const Options& o) {
  const auto p = make_params(o.alpha, o.beta);
  const Complex z(o.z_re, o.z_im);
  const auto v = mellin_f_star(p, z);
  Json j = Json::object();
  j.set("z_re", z.real()).set("z_im", z.imag()).set("value_re", v.value.real()).set("value_im", v.value.imag());
  j.set("in_strip", v.in_strip);
  if (o.quadrature) {
    if (z.imag() != 0.0 || !v.in_strip) throw DomainError("mellin: quadrature needs a real z inside the strip");
    const auto q = mellin_quadrature(p, z.real());
    j.set("quadrature", q.value).set("quadrature_error", q.error);
  }
  Output out(o.out);
  j.dump(out.stream());
  out.stream() << '\n';
  out.close(o.out);
  return 0;
}

int run_verify(const Options& o) {
  VerifyConfig c;
  c.alpha = o.alpha;
  c.beta = o.beta;
  c.grid = parse_grid_spec(o.grid);
  c.eps = o.eps;
  c.modes = o.modes;
  c.sim = sim_config(o);
  c.corrupt_phase = o.corrupt_phase;
  const auto report = run_verification(c);
  Output out(o.out);
  to_json(report, c).dump(out.stream());
  out.stream() << '\n';
  out.close(o.out);
  for (const auto& r : report.checks) {
    log(LogLevel::Info, "check (", r.id, ") ", r.name, ": ", r.pass ? "pass" : "FAIL", " - ", r.detail);
  }
  if (report.all_pass()) return 0;
  for (const auto& r : report.checks) {
    if (!r.pass) std::cerr << "verification failed: (" << r.id << ") " << r.name << '\n';
  }
  return 1;
}

int run_plot(const Options& o) {
  const auto p = make_params(o.alpha, o.beta);
  TailTable table;
  if (!o.in.empty()) {
    std::ifstream is(o.in);
    if (!is) throw Error("cannot open '" + o.in + "'");
    table = read_csv(is);
  } else {
    table = mixture_tail(p, make_log_grid(parse_grid_spec(o.grid), p.beta()), o.eps, o.workers);
  }
  const auto s = oscillation_spectrum(p, o.modes);
  const double scale = theorem_argument_scale(p.beta());
  SvgSeries data{"t^rho P[T>t] (" + std::string(to_string(table.provenance)) + ")", "#1f77b4", {}, {}};
  SvgSeries ref{"g((b-1)^2 t / 2b)", "#d62728", {}, {}};
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double t = table.t_grid[i];
    if (t <= 0.0) continue;
    data.x.push_back(t);
    data.y.push_back(std::pow(t, p.rho()) * table.survival[i]);
    ref.x.push_back(t);
    ref.y.push_back(g_eval(s, scale * t));
  }
  SvgChart chart;
  chart.title = "alpha=" + format_g17(p.alpha()) + ", beta=" + format_g17(p.beta()) + ", rho=" + format_g17(p.rho());
  chart.x_label = "t";
  chart.y_label = "t^rho P[T>t]";
  chart.series = {data, ref};
  Output out(o.out);
  write_svg(out.stream(), chart);
  out.close(o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Tail of the excursion length of a biased random walk in a geometric trap"};
  app.set_config("--config", "", "key=value file of default flag values (flags take precedence)");
  app.require_subcommand(1, 1);
  app.add_option("--alpha", o.alpha, "trap size parameter, P[k=n] = (1-alpha) alpha^n")->capture_default_str();
  app.add_option("--beta", o.beta, "drift ratio, > 1")->capture_default_str();
  app.add_option("--grid", o.grid, "time grid log:<t_min>:<t_max>:<points per beta-period>")->capture_default_str();
  app.add_option("--out", o.out, "output path, - for stdout")->capture_default_str();
  app.add_option("--eps", o.eps, "truncation tolerance")->capture_default_str();
  app.add_option("--modes", o.modes, "number of oscillation modes")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--samples", o.samples, "Monte Carlo sample count")->capture_default_str();
  app.add_option("--seed", o.seed, "random seed")->capture_default_str();
  app.add_option("--workers", o.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--fixed-k", o.fixed_k, "use this trap size instead of sampling it");

  auto* exact = app.add_subcommand("exact", "exact mixture tail P[T>t] as CSV");
  auto* simulate = app.add_subcommand("simulate", "simulated tail P[T>t] with 95% Wilson half-widths as CSV");
  simulate->add_option("--stats-out", o.stats_out, "also write the summary statistics as JSON");
  simulate->add_option("--samples-out", o.samples_out, "also write every sample as CSV");
  auto* asympt = app.add_subcommand("asympt", "asymptotic tail t^-rho g((b-1)^2 t/2b) as CSV");
  auto* coefficients = app.add_subcommand("coefficients", "oscillation spectrum as JSON");
  auto* mellin = app.add_subcommand("mellin", "Mellin transform f*(z) as JSON");
  mellin->add_option("--z-re", o.z_re, "real part of z")->capture_default_str();
  mellin->add_option("--z-im", o.z_im, "imaginary part of z")->capture_default_str();
  mellin->add_flag("--quadrature", o.quadrature, "also integrate numerically (real z in the strip)");
  auto* verify = app.add_subcommand("verify", "run the verification checks; JSON report");
  verify->add_flag("--corrupt-phase", o.corrupt_phase, "negative control: flip the phases of g");
  auto* plot = app.add_subcommand("plot", "SVG of t^rho P[T>t] against g");
  plot->add_option("--in", o.in, "tail CSV to plot (default: compute the exact tail)");
  for (auto* sub : {exact, simulate, asympt, coefficients, mellin, verify, plot}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*exact) return run_exact(o);
    if (*simulate) return run_simulate(o);
    if (*asympt) return run_asympt(o);
    if (*coefficients) return run_coefficients(o);
    if (*mellin) return run_mellin(o);
    if (*verify) return run_verify(o);
    if (*plot) return run_plot(o);
  } catch (const traptail::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
