#pragma once

#include <optional>
#include <string>
#include <vector>

#include "helmvp/density.hpp"
#include "helmvp/potential.hpp"

namespace helmvp {

struct ConvergenceRow {
  int inv_h = 0;
  double abs_error = 0.0;
  std::optional<double> rate;
  std::string error;  // engine diagnostic when the row failed
};

/// Upper end of the t window used by the experiments. Beyond it the
/// trapezoid step in t no longer resolves the oscillating integrand.
inline constexpr double kExperimentTMax = 2e4;

inline DEParams experiment_quadrature() {
  DEParams p;
  p.t_max = kExperimentTMax;
  return p;
}

struct ExperimentConfig {
  std::size_t n = 3;
  double kappa_sq = 1.0;
  int M = 1;
  std::vector<int> h_ladder{10, 20, 40, 80};
  double D = 3.0;
  double r = 5.0;
  /// Empty: (0.2, 0, ..., 0).
  std::vector<double> target;
  DEParams quadrature = experiment_quadrature();
  TauMode tau_mode = TauMode::Fixed;
  Extension extension = Extension::Analytic;
  unsigned threads = 0;

  std::vector<double> resolved_target() const;
  void validate() const;
};

/// prod_j w(x_j), zero outside the open cube (-1, 1)^n.
double exact_solution(const std::vector<double>& x);

/// Potential of exp(-|x|^2) in three dimensions:
/// (sqrt(pi)/2) e^{-|x|^2}/(4|x|) (W(kappa/2 - i|x|) - W(kappa/2 + i|x|)).
cplx gaussian_potential_3d(const std::vector<double>& x, double kappa);

/// Box potential of the test density at the configured target for every h.
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& config);

/// Same ladder for several kappa^2 values sharing the one-dimensional sums;
/// config.kappa_sq is ignored.
std::vector<std::vector<ConvergenceRow>> run_convergence_multi(
    const ExperimentConfig& config, const std::vector<double>& kappa_sqs);

/// rate_k = log2(e_{k-1}/e_k) where both errors are positive.
void fill_rates(std::vector<ConvergenceRow>& rows);

enum class TableFormat { Csv, Markdown };

/// Six significant digits, exponent without padding: 1.12000e-4.
std::string format_sci(double v);

std::string emit_table(const std::vector<ConvergenceRow>& rows, TableFormat format);

// Reference tables and their golden files.

struct GoldenRow {
  double kappa_sq = 0.0;
  int M = 0;
  int inv_h = 0;
  double x = 0.0;
  double abs_error = 0.0;
  std::optional<double> rate;
  bool gating = true;
};

struct GoldenBlock {
  std::string name;
  double error_factor = 3.0;
  double rate_tolerance = 0.5;
  std::vector<GoldenRow> rows;
};

GoldenBlock load_golden(const std::string& path);

/// One block of the experiment matrix; every (kappa_sq, M, inv_h, x) row of
/// the golden file is reproduced.
struct TableBlock {
  int table = 0;
  std::size_t n = 0;
  std::string golden_file;  // file name inside the fixtures directory
};

std::vector<TableBlock> reference_tables(int which);

struct BlockResult {
  GoldenBlock golden;
  std::vector<GoldenRow> measured;  // same order as golden.rows
  std::vector<std::string> mismatches;
  std::vector<std::string> errors;
  bool ok() const { return mismatches.empty() && errors.empty(); }
};

/// Restricts a block to some of its rows; empty lists select everything.
struct BlockFilter {
  std::vector<double> kappa_sq;
  std::vector<int> M;
  std::vector<int> inv_h;

  bool keeps(const GoldenRow& row) const;
};

/// Runs one block with the given engine settings and compares it to its
/// golden file. Rates are recomputed over the rows that were kept.
BlockResult run_block(const TableBlock& block, const std::string& fixtures_dir,
                      const ExperimentConfig& base, const BlockFilter& filter = {});

/// Several blocks at once; blocks of the same dimension share engine passes.
/// Blocks the filter empties are dropped.
std::vector<BlockResult> run_blocks(const std::vector<TableBlock>& blocks,
                                    const std::string& fixtures_dir,
                                    const ExperimentConfig& base, const BlockFilter& filter = {});

/// CSV of measured against golden values, one line per row.
std::string emit_block(const BlockResult& result);

std::string default_fixtures_dir();

}  // namespace helmvp
