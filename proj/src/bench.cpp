#include "helmvp/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <tuple>
#include <sstream>

#include "helmvp/error.hpp"

namespace helmvp {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "cannot parse '" + s + "' in " + where);
  }
}

std::string format_rate(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

std::vector<cplx> coefficients_for(std::size_t n, double kappa_sq, Extension ext) {
  const SeparatedDensity d = helmholtz_test_density(n, kappa_sq, ext);
  std::vector<cplx> c;
  for (std::size_t p = 0; p < d.rank(); ++p) c.push_back(d.coefficient(p));
  return c;
}

// Evaluates the test problem at several targets and kappa^2 values.
std::vector<std::vector<cplx>> solve(const ExperimentConfig& cfg, int M, int inv_h,
                                     const std::vector<std::vector<double>>& targets,
                                     const std::vector<double>& kappa_sqs) {
  GridSpec grid;
  grid.h = 1.0 / inv_h;
  grid.D = cfg.D;
  grid.r = cfg.r;
  grid.box = Box::cube(cfg.n, -1.0, 1.0);
  const SeparatedDensity dens = helmholtz_test_density(cfg.n, kappa_sqs.at(0), cfg.extension);
  PotentialRequest req;
  req.M = M;
  req.kappa = std::sqrt(kappa_sqs.at(0));
  req.grid = grid;
  req.density = sample(dens, grid);
  req.targets = targets;
  req.quadrature = cfg.quadrature;
  req.tau_mode = cfg.tau_mode;
  req.threads = cfg.threads;
  std::vector<KappaCase> cases;
  for (double k2 : kappa_sqs)
    cases.push_back({std::sqrt(k2), coefficients_for(cfg.n, k2, cfg.extension)});
  return evaluate(req, cases).values;
}

}  // namespace

std::vector<double> ExperimentConfig::resolved_target() const {
  if (!target.empty()) return target;
  std::vector<double> x(n, 0.0);
  x[0] = 0.2;
  return x;
}

void ExperimentConfig::validate() const {
  if (n < 3) fail(ErrorKind::InvalidArgument, "test problem needs n >= 3");
  if (!(kappa_sq > 0.0)) fail(ErrorKind::InvalidArgument, "kappa^2 must be positive");
  BasisOrder{M};
  if (h_ladder.empty()) fail(ErrorKind::InvalidArgument, "empty h ladder");
  for (int k : h_ladder)
    if (k <= 0) fail(ErrorKind::InvalidArgument, "h ladder entries must be positive");
  if (!target.empty() && target.size() != n)
    fail(ErrorKind::InvalidArgument, "target has " + std::to_string(target.size()) +
                                         " coordinates, expected " + std::to_string(n));
  quadrature.validate();
}

double exact_solution(const std::vector<double>& x) {
  double v = 1.0;
  for (double xj : x) {
    if (std::abs(xj) >= 1.0) return 0.0;
    v *= test_w(xj);
  }
  return v;
}

cplx gaussian_potential_3d(const std::vector<double>& x, double kappa) {
  if (x.size() != 3) fail(ErrorKind::InvalidArgument, "gaussian_potential_3d needs a 3-point");
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "gaussian_potential_3d is singular at 0");
  const cplx a = faddeeva(cplx(0.5 * kappa, -r)).value;
  const cplx b = faddeeva(cplx(0.5 * kappa, r)).value;
  const double pre = 0.5 * std::sqrt(std::numbers::pi) / (4.0 * r);
  // e^{-r^2} multiplies a term of size e^{r^2}; fold it in before subtracting.
  const cplx v = pre * (std::exp(-r * r) * a - std::exp(-r * r) * b);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    fail(ErrorKind::Overflow, "gaussian_potential_3d");
  return v;
}

void fill_rates(std::vector<ConvergenceRow>& rows) {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].rate.reset();
    if (k == 0) continue;
    const double a = rows[k - 1].abs_error, b = rows[k].abs_error;
    if (rows[k - 1].error.empty() && rows[k].error.empty() && a > 0.0 && b > 0.0)
      rows[k].rate = std::log2(a / b);
  }
}

std::vector<std::vector<ConvergenceRow>> run_convergence_multi(
    const ExperimentConfig& config, const std::vector<double>& kappa_sqs) {
  config.validate();
  const auto x = config.resolved_target();
  const double exact = exact_solution(x);
  std::vector<std::vector<ConvergenceRow>> out(kappa_sqs.size());
  for (int inv_h : config.h_ladder) {
    try {
      const auto v = solve(config, config.M, inv_h, {x}, kappa_sqs);
      for (std::size_t c = 0; c < kappa_sqs.size(); ++c)
        out[c].push_back({inv_h, std::abs(v[c][0] - exact), {}, {}});
    } catch (const Error& e) {
      for (std::size_t c = 0; c < kappa_sqs.size(); ++c)
        out[c].push_back({inv_h, std::nan(""), {}, e.what()});
    }
  }
  for (auto& rows : out) fill_rates(rows);
  return out;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& config) {
  return run_convergence_multi(config, {config.kappa_sq}).at(0);
}

std::string format_sci(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  std::string s(buf);
  const auto e = s.find('e');
  std::string mant = s.substr(0, e);
  int ex = std::stoi(s.substr(e + 1));
  return mant + "e" + std::to_string(ex);
}

std::string emit_table(const std::vector<ConvergenceRow>& rows, TableFormat format) {
  if (rows.empty()) fail(ErrorKind::InvalidArgument, "emit_table: no rows");
  std::ostringstream out;
  if (format == TableFormat::Csv) {
    out << "inv_h,abs_error,rate\n";
    for (const auto& r : rows)
      out << r.inv_h << ',' << format_sci(r.abs_error) << ','
          << (r.rate ? format_rate(*r.rate) : "") << '\n';
  } else {
    out << "| h^-1 | abs. error | rate |\n|---:|---:|---:|\n";
    for (const auto& r : rows)
      out << "| " << r.inv_h << " | " << format_sci(r.abs_error) << " | "
          << (r.rate ? format_rate(*r.rate) : "") << " |\n";
  }
  return out.str();
}

GoldenBlock load_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open golden file " + path);
  GoldenBlock g;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto kv = split(line.substr(1), '=');
      if (kv.size() == 2) {
        const std::string k = trim(kv[0]), v = trim(kv[1]);
        if (k == "name") g.name = v;
        if (k == "error_factor") g.error_factor = parse_double(v, path);
        if (k == "rate_tolerance") g.rate_tolerance = parse_double(v, path);
      }
      continue;
    }
    if (!header) {
      if (line != "kappa_sq,M,inv_h,x,abs_error,rate,gating")
        fail(ErrorKind::InvalidArgument, "unexpected golden header in " + path);
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (f.size() != 7) fail(ErrorKind::InvalidArgument, "malformed row at " + where);
    GoldenRow r;
    r.kappa_sq = parse_double(trim(f[0]), where);
    r.M = static_cast<int>(parse_double(trim(f[1]), where));
    r.inv_h = static_cast<int>(parse_double(trim(f[2]), where));
    r.x = parse_double(trim(f[3]), where);
    r.abs_error = parse_double(trim(f[4]), where);
    if (!trim(f[5]).empty()) r.rate = parse_double(trim(f[5]), where);
    r.gating = trim(f[6]) == "1";
    g.rows.push_back(r);
  }
  if (g.rows.empty()) fail(ErrorKind::InvalidArgument, "golden file has no rows: " + path);
  return g;
}

std::vector<TableBlock> reference_tables(int which) {
  switch (which) {
    case 1:
      return {{1, 3, "table1_n3.csv"}, {1, 10, "table1_n10.csv"}, {1, 100, "table1_n100.csv"}};
    case 2:
      return {{2, 3, "table2_kappa_sq_1.csv"},
              {2, 3, "table2_kappa_sq_10.csv"},
              {2, 3, "table2_kappa_sq_100.csv"}};
    case 3:
      return {{3, 10, "table3_kappa_sq_1.csv"},
              {3, 10, "table3_kappa_sq_10.csv"},
              {3, 10, "table3_kappa_sq_100.csv"}};
    case 4:
      return {{4, 100, "table4_kappa_sq_1.csv"},
              {4, 100, "table4_kappa_sq_10.csv"},
              {4, 100, "table4_kappa_sq_100.csv"}};
    default:
      fail(ErrorKind::OutOfRange, "tables are numbered 1 to 4");
  }
}

std::string default_fixtures_dir() { return HELMVP_FIXTURES_DIR; }

bool BlockFilter::keeps(const GoldenRow& row) const {
  auto in = [](const auto& list, auto v) {
    return list.empty() || std::find(list.begin(), list.end(), v) != list.end();
  };
  return in(kappa_sq, row.kappa_sq) && in(M, row.M) && in(inv_h, row.inv_h);
}

namespace {

// Rates against the row at twice h, then the gating comparison.
void compare(BlockResult& res) {
  const auto& rows = res.golden.rows;
  std::vector<bool> has_prev(rows.size(), false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& a = rows[k];
      if (a.kappa_sq == rows[i].kappa_sq && a.M == rows[i].M && a.x == rows[i].x &&
          2 * a.inv_h == rows[i].inv_h) {
        has_prev[i] = true;
        const double e0 = res.measured[k].abs_error, e1 = res.measured[i].abs_error;
        if (e0 > 0.0 && e1 > 0.0) res.measured[i].rate = std::log2(e0 / e1);
      }
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const GoldenRow& g = rows[i];
    const GoldenRow& m = res.measured[i];
    if (!g.gating) continue;
    std::ostringstream where;
    where << "kappa^2=" << g.kappa_sq << " M=" << g.M << " h^-1=" << g.inv_h << " x=" << g.x;
    const double ratio = m.abs_error / g.abs_error;
    if (!(ratio <= res.golden.error_factor && ratio >= 1.0 / res.golden.error_factor))
      res.mismatches.push_back(where.str() + ": error " + format_sci(m.abs_error) +
                               " vs " + format_sci(g.abs_error));
    if (g.rate && has_prev[i] &&
        (!m.rate || std::abs(*m.rate - *g.rate) > res.golden.rate_tolerance))
      res.mismatches.push_back(where.str() + ": rate " +
                               (m.rate ? format_rate(*m.rate) : std::string("-")) +
                               " vs " + format_rate(*g.rate));
  }
}

}  // namespace

std::vector<BlockResult> run_blocks(const std::vector<TableBlock>& blocks,
                                    const std::string& fixtures_dir,
                                    const ExperimentConfig& base, const BlockFilter& filter) {
  std::vector<BlockResult> out;
  std::vector<std::size_t> dims;
  for (const auto& block : blocks) {
    BlockResult res;
    res.golden = load_golden(fixtures_dir + "/" + block.golden_file);
    std::erase_if(res.golden.rows, [&](const GoldenRow& r) { return !filter.keeps(r); });
    if (res.golden.rows.empty()) continue;
    res.measured = res.golden.rows;
    for (auto& m : res.measured) {
      m.abs_error = std::nan("");
      m.rate.reset();
    }
    out.push_back(std::move(res));
    dims.push_back(block.n);
  }
  if (out.empty()) fail(ErrorKind::InvalidArgument, "filter leaves no table rows");

  // One engine pass per (n, M, inv_h) covers every x and kappa^2.
  struct Ref {
    std::size_t block, row;
  };
  std::map<std::tuple<std::size_t, int, int>, std::vector<Ref>> groups;
  for (std::size_t b = 0; b < out.size(); ++b)
    for (std::size_t i = 0; i < out[b].golden.rows.size(); ++i) {
      const auto& r = out[b].golden.rows[i];
      groups[{dims[b], r.M, r.inv_h}].push_back({b, i});
    }
  for (const auto& [key, refs] : groups) {
    const auto [n, M, inv_h] = key;
    std::vector<double> xs, ks;
    for (const Ref& f : refs) {
      const auto& r = out[f.block].golden.rows[f.row];
      if (std::find(xs.begin(), xs.end(), r.x) == xs.end()) xs.push_back(r.x);
      if (std::find(ks.begin(), ks.end(), r.kappa_sq) == ks.end()) ks.push_back(r.kappa_sq);
    }
    std::vector<std::vector<double>> targets;
    for (double x : xs) {
      std::vector<double> t(n, 0.0);
      t[0] = x;
      targets.push_back(t);
    }
    ExperimentConfig cfg = base;
    cfg.n = n;
    try {
      const auto v = solve(cfg, M, inv_h, targets, ks);
      for (const Ref& f : refs) {
        const auto& r = out[f.block].golden.rows[f.row];
        const std::size_t c = std::find(ks.begin(), ks.end(), r.kappa_sq) - ks.begin();
        const std::size_t t = std::find(xs.begin(), xs.end(), r.x) - xs.begin();
        out[f.block].measured[f.row].abs_error = std::abs(v[c][t] - exact_solution(targets[t]));
      }
    } catch (const Error& e) {
      const std::string msg =
          "M=" + std::to_string(M) + " h^-1=" + std::to_string(inv_h) + ": " + e.what();
      for (std::size_t b = 0; b < out.size(); ++b)
        if (std::any_of(refs.begin(), refs.end(), [&](const Ref& f) { return f.block == b; }))
          out[b].errors.push_back(msg);
    }
  }
  for (auto& res : out) compare(res);
  return out;
}

BlockResult run_block(const TableBlock& block, const std::string& fixtures_dir,
                      const ExperimentConfig& base, const BlockFilter& filter) {
  return run_blocks({block}, fixtures_dir, base, filter).at(0);
}

std::string emit_block(const BlockResult& result) {
  std::ostringstream out;
  out << "block,kappa_sq,M,inv_h,x,abs_error,rate,ref_abs_error,ref_rate,gating\n";
  for (std::size_t i = 0; i < result.golden.rows.size(); ++i) {
    const GoldenRow& g = result.golden.rows[i];
    const GoldenRow& m = result.measured.at(i);
    out << result.golden.name << ',' << g.kappa_sq << ',' << g.M << ',' << g.inv_h << ','
        << g.x << ',' << format_sci(m.abs_error) << ','
        << (m.rate ? format_rate(*m.rate) : "") << ',' << format_sci(g.abs_error) << ','
        << (g.rate ? format_rate(*g.rate) : "") << ',' << (g.gating ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace helmvp
