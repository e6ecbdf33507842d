#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace helmvp;
using namespace helmvp::cli;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<const char*> args) {
  args.insert(args.begin(), "helmvp");
  std::ostringstream out, err;
  const int status = main_entry(static_cast<int>(args.size()), args.data(), out, err);
  return {status, out.str(), err.str()};
}

CliConfig parse(std::vector<const char*> args) {
  args.insert(args.begin(), "helmvp");
  return parse_args(static_cast<int>(args.size()), args.data());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("converge arguments") {
  const CliConfig c = parse({"converge", "--n", "10", "--kappa-sq", "100", "--M", "3",
                             "--h-ladder", "10,20,40,80"});
  CHECK(c.command == Command::Converge);
  CHECK(c.experiment.n == 10);
  CHECK(c.experiment.kappa_sq == 100.0);
  CHECK(c.experiment.M == 3);
  CHECK(c.experiment.h_ladder == std::vector<int>{10, 20, 40, 80});
  CHECK(c.experiment.D == 3.0);
  CHECK(c.experiment.quadrature.a == 6.0);
  CHECK(c.experiment.quadrature.b == 4.0);
  CHECK(c.experiment.extension == Extension::Analytic);
  CHECK(c.experiment.resolved_target().size() == 10);
  CHECK(c.experiment.resolved_target()[0] == 0.2);
}

TEST_CASE("usage errors") {
  const Outcome missing = invoke({"eval", "--kappa-sq", "1"});
  CHECK(missing.status == kExitUsage);
  CHECK(missing.out.empty());
  CHECK(missing.err.find("--n") != std::string::npos);
  CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

  CHECK(invoke({}).status == kExitUsage);
  CHECK(invoke({"eval", "--n", "3", "--bogus", "1"}).status == kExitUsage);
  CHECK(invoke({"eval", "--n", "3", "--format", "xml"}).status == kExitUsage);
  CHECK(invoke({"eval", "--n", "2"}).status == kExitUsage);
  CHECK(invoke({"eval", "--n", "3", "--M", "0"}).status == kExitUsage);
  CHECK(invoke({"eval", "--n", "3", "--tau", "-1"}).status == kExitUsage);
  CHECK(invoke({"eval", "--n", "3", "--target", "0,0"}).status == kExitUsage);
  // h kappa must stay below 2 pi
  CHECK(invoke({"eval", "--n", "3", "--kappa-sq", "100", "--h", "1"}).status == kExitUsage);
  CHECK(invoke({"tables", "--which", "7"}).status == kExitUsage);
}

TEST_CASE("help documents the flags") {
  const Outcome h = invoke({"--help"});
  CHECK(h.status == kExitOk);
  for (const char* flag : {"--n", "--kappa-sq", "--M", "--h", "--h-ladder", "--D", "--r",
                           "--extension", "--tau", "--a", "--b", "--target", "--output",
                           "--format", "--threads", "--which", "--config"})
    CHECK_MESSAGE(h.out.find(flag) != std::string::npos, flag);
}

TEST_CASE("tables arguments") {
  const CliConfig c = parse({"tables", "--which", "3"});
  CHECK(c.command == Command::Tables);
  CHECK(c.which == 3);
  CHECK(c.filter.kappa_sq.empty());
  CHECK(c.filter.M.empty());
  CHECK(c.filter.inv_h.empty());
  const CliConfig f = parse({"tables", "--which", "4", "--kappa-sq", "1", "--M", "2"});
  CHECK(f.filter.kappa_sq == std::vector<double>{1.0});
  CHECK(f.filter.M == std::vector<int>{2});
}

TEST_CASE("tau selection") {
  CHECK(parse({"eval", "--n", "3"}).experiment.quadrature.tau == 1e-6);
  CHECK(parse({"eval", "--n", "3", "--tau", "auto"}).experiment.tau_mode == TauMode::Auto);
  const CliConfig c = parse({"eval", "--n", "3", "--tau", "0.001", "--t-max", "inf"});
  CHECK(c.experiment.tau_mode == TauMode::Fixed);
  CHECK(c.experiment.quadrature.tau == 0.001);
  CHECK(std::isinf(c.experiment.quadrature.t_max));
}

TEST_CASE("flags override the configuration file") {
  const std::string path = "/tmp/helmvp_cli_config.ini";
  std::ofstream(path) << "# experiment\nn = 4\nkappa-sq = 10\nM = 2\nD = 2.5\n";
  const CliConfig c = parse({"converge", "--config", path.c_str(), "--kappa-sq", "1"});
  CHECK(c.experiment.n == 4);
  CHECK(c.experiment.kappa_sq == 1.0);
  CHECK(c.experiment.M == 2);
  CHECK(c.experiment.D == 2.5);
  CHECK(invoke({"converge", "--config", "/nonexistent/helmvp.ini", "--n", "3"}).status == kExitUsage);
}

TEST_CASE("selftest") {
  const Outcome s = invoke({"selftest", "--threads", "2"});
  CHECK(s.status == kExitOk);
  for (const char* m : {"specfun:", "basis:", "quadrature:", "potential:"})
    CHECK(s.out.find(m) != std::string::npos);
  CHECK(s.out.find(" 0 failed") != std::string::npos);
}

TEST_CASE("eval at the origin") {
  const Outcome r = invoke({"eval", "--n", "3", "--kappa-sq", "1", "--M", "3", "--h", "0.025",
                            "--target", "0,0,0"});
  REQUIRE(r.status == kExitOk);
  std::istringstream in(r.out);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  CHECK(header == "approx_re,approx_im,exact,abs_error");
  double re, im, exact, err;
  REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &re, &im, &exact, &err) == 4);
  CHECK(exact == 1.0);
  CHECK(std::abs(std::hypot(re - 1.0, im) - err) <= 1e-15);
  // reference 1.55e-8, accepted within a factor of 3
  CHECK(err >= 1.55e-8 / 3.0);
  CHECK(err <= 1.55e-8 * 3.0);
}

TEST_CASE("identical invocations give identical data") {
  const std::vector<const char*> args{"converge", "--n", "3", "--M", "2", "--h-ladder", "5,10",
                                      "--tau", "0.001", "--format", "markdown"};
  const Outcome a = invoke(args), b = invoke(args);
  CHECK(a.status == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.find("| 10 |") != std::string::npos);
  CHECK(a.err.find("|") == std::string::npos);

  const std::string path = "/tmp/helmvp_cli_out.csv";
  std::vector<const char*> to_file{"converge", "--n", "3", "--M", "2", "--h-ladder", "5,10",
                                   "--tau", "0.001", "--output", path.c_str()};
  const Outcome f = invoke(to_file);
  CHECK(f.status == kExitOk);
  CHECK(f.out.empty());
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(content.str().rfind("inv_h,abs_error,rate\n", 0) == 0);
}

TEST_CASE("engine errors exit with status 1") {
  const Outcome r = invoke({"eval", "--n", "3", "--h", "0.1", "--tau", "1e-9", "--t-max", "inf"});
  CHECK(r.status == kExitEngine);
  CHECK(r.out.empty());
  CHECK(r.err.rfind("error: ", 0) == 0);
}

TEST_CASE("golden mismatches exit with status 3") {
  const std::string dir = "/tmp/helmvp_cli_fixtures";
  std::filesystem::create_directories(dir);
  for (const char* f : {"table2_kappa_sq_10.csv", "table2_kappa_sq_100.csv"})
    std::filesystem::copy_file(default_fixtures_dir() + "/" + f, dir + "/" + f,
                               std::filesystem::copy_options::overwrite_existing);
  std::ofstream(dir + "/table2_kappa_sq_1.csv")
      << "# name = table2_kappa_sq_1\n# error_factor = 3\n# rate_tolerance = 0.5\n"
         "kappa_sq,M,inv_h,x,abs_error,rate,gating\n1,1,5,0.2,0.182E-03,,1\n";
  const Outcome r = invoke({"tables", "--which", "2", "--kappa-sq", "1", "--M", "1",
                            "--h-ladder", "5", "--fixtures", dir.c_str()});
  CHECK(r.status == kExitMismatch);
  CHECK(r.out.find("table2_kappa_sq_1") != std::string::npos);
}

}  // TEST_SUITE
