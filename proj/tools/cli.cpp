#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "helmvp/error.hpp"
#include "helmvp/selftest.hpp"

namespace helmvp::cli {
namespace {

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream cell(item);
    T v{};
    if (!(cell >> v) || !(cell >> std::ws).eof())
      throw UsageError(kExitUsage, flag + ": cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(kExitUsage, flag + ": empty list");
  return out;
}

void check_experiment(const CliConfig& c) {
  try {
    c.experiment.validate();
  } catch (const Error& e) {
    throw UsageError(kExitUsage, e.what());
  }
  const double kappa = std::sqrt(c.experiment.kappa_sq);
  auto check_h = [&](double h) {
    if (!(h > 0.0)) throw UsageError(kExitUsage, "--h must be positive");
    if (!(h * kappa < 2.0 * std::numbers::pi))
      throw UsageError(kExitUsage, "h*kappa must be below 2*pi");
  };
  if (c.command == Command::Eval) check_h(c.h);
  if (c.command == Command::Converge)
    for (int k : c.experiment.h_ladder) check_h(1.0 / k);
}

void write_data(const CliConfig& c, const std::string& text, std::ostream& out) {
  if (c.output.empty()) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(c.output);
  if (!f) fail(ErrorKind::InvalidArgument, "cannot write " + c.output);
  f << text;
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

int run_eval(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const ExperimentConfig& e = c.experiment;
  const auto x = e.resolved_target();
  GridSpec grid;
  grid.h = c.h;
  grid.D = e.D;
  grid.r = e.r;
  grid.box = Box::cube(e.n, -1.0, 1.0);
  const SeparatedDensity dens = helmholtz_test_density(e.n, e.kappa_sq, e.extension);
  PotentialRequest req;
  req.M = e.M;
  req.kappa = std::sqrt(e.kappa_sq);
  req.grid = grid;
  req.density = sample(dens, grid);
  req.targets = {x};
  req.quadrature = e.quadrature;
  req.tau_mode = e.tau_mode;
  req.threads = e.threads;
  const PotentialResult r = evaluate(req, {{req.kappa, req.density.coefficients}});
  const cplx v = r.values.at(0).at(0);
  const double exact = exact_solution(x);
  const auto& d = r.diagnostics;
  err << "nodes " << d.nodes << ", tau " << d.tau << ", u in [" << d.u_min << ", "
      << d.u_max << "]" << (d.capped ? " (capped)" : "") << ", line sums "
      << d.line_sums << ", " << d.seconds << " s\n";
  if (!d.tau_converged) err << "warning: tau refinement did not settle\n";
  std::ostringstream data;
  if (c.format == TableFormat::Csv) {
    data << "approx_re,approx_im,exact,abs_error\n"
         << sci(v.real()) << ',' << sci(v.imag()) << ',' << sci(exact) << ','
         << sci(std::abs(v - exact)) << '\n';
  } else {
    data << "| approx (re) | approx (im) | exact | abs. error |\n|---:|---:|---:|---:|\n"
         << "| " << sci(v.real()) << " | " << sci(v.imag()) << " | " << sci(exact) << " | "
         << sci(std::abs(v - exact)) << " |\n";
  }
  write_data(c, data.str(), out);
  return kExitOk;
}

int run_converge(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const auto rows = run_convergence(c.experiment);
  int status = kExitOk;
  for (const auto& r : rows)
    if (!r.error.empty()) {
      err << "h^-1=" << r.inv_h << ": " << r.error << '\n';
      status = kExitEngine;
    }
  write_data(c, emit_table(rows, c.format), out);
  return status;
}

int run_tables(const CliConfig& c, std::ostream& out, std::ostream& err) {
  std::vector<TableBlock> blocks;
  for (int t = 1; t <= 4; ++t)
    if (c.which == 0 || c.which == t)
      for (const auto& b : reference_tables(t)) blocks.push_back(b);
  const std::string dir = c.fixtures.empty() ? default_fixtures_dir() : c.fixtures;
  std::string data;
  bool mismatch = false, engine = false;
  for (const auto& r : run_blocks(blocks, dir, c.experiment, c.filter)) {
    const std::string csv = emit_block(r);
    data += data.empty() ? csv : csv.substr(csv.find('\n') + 1);
    for (const auto& m : r.mismatches) err << r.golden.name << ": mismatch " << m << '\n';
    for (const auto& e : r.errors) err << r.golden.name << ": " << e << '\n';
    err << r.golden.name << ": " << (r.ok() ? "ok" : "FAILED") << '\n';
    mismatch = mismatch || !r.mismatches.empty();
    engine = engine || !r.errors.empty();
  }
  write_data(c, data, out);
  if (engine) return kExitEngine;
  return mismatch ? kExitMismatch : kExitOk;
}

int run_selftest_cmd(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const auto mods = run_selftest(c.experiment.threads);
  std::ostringstream data;
  bool ok = true;
  for (const auto& m : mods) {
    data << m.name << ": " << m.passed << " passed, " << m.failed << " failed\n";
    for (const auto& f : m.failures) err << m.name << ": " << f << '\n';
    ok = ok && m.failed == 0;
  }
  write_data(c, data.str(), out);
  return ok ? kExitOk : kExitEngine;
}

}  // namespace

CliConfig parse_args(int argc, const char* const* argv) {
  CliConfig c;
  ExperimentConfig& e = c.experiment;
  CLI::App app{"Helmholtz volume potentials by Gaussian cubature and separated sums", "helmvp"};
  app.set_help_flag("--help", "print this help and exit");
  app.set_config("--config", "", "key = value file; flags on the command line win");
  app.require_subcommand(1);

  auto* eval = app.add_subcommand("eval", "one potential value at --target")->fallthrough();
  auto* conv = app.add_subcommand("converge", "errors and rates over --h-ladder")->fallthrough();
  auto* tab = app.add_subcommand("tables", "reproduce the reference tables")->fallthrough();
  auto* self = app.add_subcommand("selftest", "built-in invariant checks")->fallthrough();

  std::size_t n = 0;
  double kappa_sq = 1.0;
  int M = 3;
  std::string ladder = "10,20,40,80", target, tau = "1e-6", extension = "analytic",
              format = "csv";
  auto* n_opt = app.add_option("--n", n, "space dimension (>= 3)");
  auto* k_opt = app.add_option("--kappa-sq", kappa_sq, "kappa^2")->capture_default_str();
  auto* m_opt = app.add_option("--M", M, "basis order, cubature order 2M")->capture_default_str();
  app.add_option("--h", c.h, "mesh width for eval")->capture_default_str();
  auto* l_opt = app.add_option("--h-ladder", ladder, "comma separated h^-1 values")
                    ->capture_default_str();
  app.add_option("--D", e.D, "shape parameter")->capture_default_str();
  app.add_option("--r", e.r, "extension radius in units of h sqrt(D)")->capture_default_str();
  app.add_option("--extension", extension, "analytic or zero")
      ->check(CLI::IsMember({"analytic", "zero"}))
      ->capture_default_str();
  app.add_option("--tau", tau, "trapezoid step, or auto")->capture_default_str();
  app.add_option("--a", e.quadrature.a, "quadrature parameter a")->capture_default_str();
  app.add_option("--b", e.quadrature.b, "quadrature parameter b")->capture_default_str();
  app.add_option("--t-max", e.quadrature.t_max, "upper end of the t window (inf: none)")
      ->capture_default_str();
  app.add_option("--target", target, "comma separated point (default 0.2,0,...,0)");
  app.add_option("--output", c.output, "data file (default stdout)");
  app.add_option("--format", format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}))
      ->capture_default_str();
  app.add_option("--threads", e.threads, "engine threads (0: all cores)")->capture_default_str();
  app.add_option("--which", c.which, "table 1-4, 0 for all")
      ->check(CLI::Range(0, 4))
      ->capture_default_str();
  app.add_option("--fixtures", c.fixtures, "golden file directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(0, app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw UsageError(0, app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& ex) {
    throw UsageError(kExitUsage, ex.what());
  }

  if (eval->parsed()) c.command = Command::Eval;
  if (conv->parsed()) c.command = Command::Converge;
  if (tab->parsed()) c.command = Command::Tables;
  if (self->parsed()) c.command = Command::Selftest;

  const bool needs_problem = c.command == Command::Eval || c.command == Command::Converge;
  if (needs_problem && n_opt->count() == 0)
    throw UsageError(kExitUsage, "--n is required for " + app.get_subcommands().at(0)->get_name());
  e.n = n_opt->count() ? n : 3;
  e.kappa_sq = kappa_sq;
  e.M = M;
  e.h_ladder = parse_list<int>(ladder, "--h-ladder");
  if (!target.empty()) e.target = parse_list<double>(target, "--target");
  e.extension = extension == "zero" ? Extension::Zero : Extension::Analytic;
  c.format = format == "markdown" ? TableFormat::Markdown : TableFormat::Csv;
  if (tau == "auto") {
    e.tau_mode = TauMode::Auto;
  } else {
    e.tau_mode = TauMode::Fixed;
    e.quadrature.tau = parse_list<double>(tau, "--tau").at(0);
  }
  try {
    e.quadrature.validate();
  } catch (const Error& ex) {
    throw UsageError(kExitUsage, ex.what());
  }
  if (c.command == Command::Tables) {
    if (k_opt->count()) c.filter.kappa_sq = {kappa_sq};
    if (m_opt->count()) c.filter.M = {M};
    if (l_opt->count()) c.filter.inv_h = e.h_ladder;
  }
  if (needs_problem) check_experiment(c);
  return c;
}

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.command) {
    case Command::Eval:
      return run_eval(config, out, err);
    case Command::Converge:
      return run_converge(config, out, err);
    case Command::Tables:
      return run_tables(config, out, err);
    case Command::Selftest:
      return run_selftest_cmd(config, out, err);
  }
  return kExitUsage;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig config;
  try {
    config = parse_args(argc, argv);
  } catch (const UsageError& u) {
    if (u.code() == 0) {
      out << u.what();
      return kExitOk;
    }
    std::string msg = u.what();
    if (const auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
    err << "usage error: " << msg << '\n';
    return kExitUsage;
  }
  try {
    return run(config, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitEngine;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitEngine;
  }
}

}  // namespace helmvp::cli
