#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "helmvp/specfun.hpp"

namespace helmvp {

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t n() const noexcept { return lower.size(); }
  static Box cube(std::size_t n, double lo, double hi);
  void validate() const;
};

struct GridSpec {
  double h = 0.1;
  double D = 3.0;
  double r = 3.0;
  Box box;

  std::size_t n() const noexcept { return box.n(); }
  void validate() const;
};

struct IndexRange {
  long m_min = 0;
  long m_max = -1;

  std::size_t size() const noexcept {
    return m_max < m_min ? 0 : static_cast<std::size_t>(m_max - m_min + 1);
  }
  bool operator==(const IndexRange&) const = default;
};

/// All m with h*m strictly inside (P_j - r h sqrt(D), Q_j + r h sqrt(D)).
IndexRange index_range(const GridSpec& grid, std::size_t j);

using Factor1D = std::function<double(double)>;

/// sum_p alpha_p prod_j g_j^{(p)}(x_j). Factors live in a pool so that
/// terms sharing a function share its samples and one-dimensional sums.
class SeparatedDensity {
 public:
  explicit SeparatedDensity(std::size_t n);

  std::size_t add_factor(Factor1D f);
  /// ids[j] indexes the factor pool; ids.size() == n.
  void add_term(cplx coefficient, std::vector<std::size_t> ids);
  /// Convenience: every function gets its own pool slot.
  void add_term(cplx coefficient, const std::vector<Factor1D>& factors);

  std::size_t n() const noexcept { return n_; }
  std::size_t rank() const noexcept { return coefficients_.size(); }
  cplx coefficient(std::size_t p) const { return coefficients_.at(p); }
  void set_coefficient(std::size_t p, cplx c) { coefficients_.at(p) = c; }
  std::size_t factor_id(std::size_t p, std::size_t j) const {
    return ids_.at(p * n_ + j);
  }
  const Factor1D& factor(std::size_t id) const { return pool_.at(id); }
  std::size_t pool_size() const noexcept { return pool_.size(); }

  /// Pointwise value of the density.
  cplx operator()(const std::vector<double>& x) const;

 private:
  std::size_t n_;
  std::vector<Factor1D> pool_;
  std::vector<cplx> coefficients_;
  std::vector<std::size_t> ids_;
};

/// Samples g_j^{(p)}(h m) over the index ranges of a grid, tabulated once.
struct SampledDensity {
  std::size_t n = 0;
  std::size_t rank = 0;
  double h = 0.0;
  std::vector<cplx> coefficients;
  std::vector<IndexRange> ranges;           // per dimension
  std::vector<std::vector<double>> tables;  // distinct tables
  std::vector<std::size_t> table_of;        // (p, j) -> table, row major

  std::size_t table_id(std::size_t p, std::size_t j) const {
    return table_of.at(p * n + j);
  }
  const std::vector<double>& values(std::size_t p, std::size_t j) const {
    return tables.at(table_id(p, j));
  }
};

/// Tabulates over the index ranges of grid (or over explicit ranges).
SampledDensity sample(const SeparatedDensity& density, const GridSpec& grid);
SampledDensity sample(const SeparatedDensity& density, double h,
                      const std::vector<IndexRange>& ranges);

enum class Extension { Analytic, Zero };

/// w(x) = (x^2-1)^2 e^x and its second derivative, closed form on all of R.
double test_w(double x);
double test_w2(double x);

/// Rank n+1 representation of -(Delta + kappa^2) prod_j w(x_j).
SeparatedDensity helmholtz_test_density(std::size_t n, double kappa_sq,
                                        Extension ext = Extension::Analytic);

}  // namespace helmvp
