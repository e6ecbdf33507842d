#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "helmvp/bench.hpp"

namespace helmvp::cli {

enum class Command { Eval, Converge, Tables, Selftest };

struct CliConfig {
  Command command = Command::Selftest;
  /// n, kappa^2, M, ladder, D, r, target, quadrature and threads.
  ExperimentConfig experiment;
  double h = 0.025;  // eval only
  int which = 0;     // tables: 0 runs all four
  BlockFilter filter;
  std::string output;  // empty: stdout
  TableFormat format = TableFormat::Csv;
  std::string fixtures;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitEngine = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitMismatch = 3;

/// Usage problem; code is 0 for --help, 2 otherwise.
class UsageError : public std::runtime_error {
 public:
  UsageError(int code, const std::string& text) : std::runtime_error(text), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

CliConfig parse_args(int argc, const char* const* argv);

int run(const CliConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with exit statuses 0 ok, 1 engine error, 2 usage,
/// 3 golden mismatch.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace helmvp::cli
