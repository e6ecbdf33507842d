#include "helmvp/density.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "helmvp/error.hpp"

namespace helmvp {

Box Box::cube(std::size_t n, double lo, double hi) {
  Box b{std::vector<double>(n, lo), std::vector<double>(n, hi)};
  b.validate();
  return b;
}

void Box::validate() const {
  if (lower.empty() || lower.size() != upper.size())
    fail(ErrorKind::InvalidArgument, "box bounds must have equal, nonzero length");
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (!(lower[j] < upper[j]) || !std::isfinite(lower[j]) ||
        !std::isfinite(upper[j]))
      fail(ErrorKind::InvalidArgument,
           "box needs finite P_j < Q_j (j=" + std::to_string(j) + ")");
}

void GridSpec::validate() const {
  if (!(h > 0.0) || !std::isfinite(h))
    fail(ErrorKind::InvalidArgument, "mesh width h must be positive");
  if (!(D > 0.0) || !std::isfinite(D))
    fail(ErrorKind::InvalidArgument, "shape parameter D must be positive");
  if (!(r >= 0.0) || !std::isfinite(r))
    fail(ErrorKind::InvalidArgument, "extension radius r must be nonnegative");
  box.validate();
}

IndexRange index_range(const GridSpec& grid, std::size_t j) {
  grid.validate();
  if (j >= grid.n())
    fail(ErrorKind::OutOfRange, "dimension index " + std::to_string(j));
  const double ext = grid.r * grid.h * std::sqrt(grid.D);
  const double lo = grid.box.lower[j] - ext;
  const double hi = grid.box.upper[j] + ext;
  const double h = grid.h;
  long a = static_cast<long>(std::floor(lo / h)) - 1;
  while (h * a <= lo) ++a;
  long b = static_cast<long>(std::ceil(hi / h)) + 1;
  while (h * b >= hi) --b;
  return {a, b};
}

SeparatedDensity::SeparatedDensity(std::size_t n) : n_(n) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "density dimension must be positive");
}

std::size_t SeparatedDensity::add_factor(Factor1D f) {
  if (!f) fail(ErrorKind::InvalidArgument, "empty factor function");
  pool_.push_back(std::move(f));
  return pool_.size() - 1;
}

void SeparatedDensity::add_term(cplx coefficient, std::vector<std::size_t> ids) {
  if (ids.size() != n_)
    fail(ErrorKind::InvalidArgument, "term needs one factor per dimension");
  for (std::size_t id : ids)
    if (id >= pool_.size()) fail(ErrorKind::OutOfRange, "factor id");
  coefficients_.push_back(coefficient);
  ids_.insert(ids_.end(), ids.begin(), ids.end());
}

void SeparatedDensity::add_term(cplx coefficient,
                                const std::vector<Factor1D>& factors) {
  if (factors.size() != n_)
    fail(ErrorKind::InvalidArgument, "term needs one factor per dimension");
  std::vector<std::size_t> ids;
  for (const auto& f : factors) ids.push_back(add_factor(f));
  add_term(coefficient, std::move(ids));
}

cplx SeparatedDensity::operator()(const std::vector<double>& x) const {
  if (x.size() != n_) fail(ErrorKind::InvalidArgument, "point dimension");
  cplx sum = 0.0;
  for (std::size_t p = 0; p < rank(); ++p) {
    double prod = 1.0;
    for (std::size_t j = 0; j < n_; ++j) prod *= pool_[factor_id(p, j)](x[j]);
    sum += coefficients_[p] * prod;
  }
  return sum;
}

SampledDensity sample(const SeparatedDensity& density, double h,
                      const std::vector<IndexRange>& ranges) {
  if (ranges.size() != density.n())
    fail(ErrorKind::InvalidArgument, "one index range per dimension required");
  SampledDensity out;
  out.n = density.n();
  out.rank = density.rank();
  out.h = h;
  out.ranges = ranges;
  for (std::size_t p = 0; p < density.rank(); ++p)
    out.coefficients.push_back(density.coefficient(p));
  std::map<std::tuple<std::size_t, long, long>, std::size_t> seen;
  out.table_of.resize(out.rank * out.n);
  for (std::size_t p = 0; p < out.rank; ++p)
    for (std::size_t j = 0; j < out.n; ++j) {
      const std::size_t id = density.factor_id(p, j);
      const IndexRange& r = ranges[j];
      const auto key = std::make_tuple(id, r.m_min, r.m_max);
      auto it = seen.find(key);
      if (it == seen.end()) {
        std::vector<double> t;
        t.reserve(r.size());
        const Factor1D& f = density.factor(id);
        for (long m = r.m_min; m <= r.m_max; ++m) {
          const double v = f(h * m);
          if (!std::isfinite(v))
            fail(ErrorKind::NonFinite, "density sample at x=" +
                                           std::to_string(h * m) + " (term " +
                                           std::to_string(p) + ", dim " +
                                           std::to_string(j) + ")");
          t.push_back(v);
        }
        out.tables.push_back(std::move(t));
        it = seen.emplace(key, out.tables.size() - 1).first;
      }
      out.table_of[p * out.n + j] = it->second;
    }
  return out;
}

SampledDensity sample(const SeparatedDensity& density, const GridSpec& grid) {
  grid.validate();
  if (grid.n() != density.n())
    fail(ErrorKind::InvalidArgument, "grid and density dimensions differ");
  std::vector<IndexRange> ranges;
  for (std::size_t j = 0; j < grid.n(); ++j) ranges.push_back(index_range(grid, j));
  return sample(density, grid.h, ranges);
}

double test_w(double x) {
  const double q = x * x - 1.0;
  return q * q * std::exp(x);
}

double test_w2(double x) {
  const double q = x * x - 1.0;
  return std::exp(x) * (q * q + 8.0 * x * q + 12.0 * x * x - 4.0);
}

SeparatedDensity helmholtz_test_density(std::size_t n, double kappa_sq,
                                        Extension ext) {
  if (n < 3) fail(ErrorKind::InvalidArgument, "test density needs n >= 3");
  SeparatedDensity d(n);
  std::size_t w, w2;
  if (ext == Extension::Analytic) {
    w = d.add_factor(test_w);
    w2 = d.add_factor(test_w2);
  } else {
    w = d.add_factor([](double x) { return std::abs(x) < 1.0 ? test_w(x) : 0.0; });
    w2 = d.add_factor([](double x) { return std::abs(x) < 1.0 ? test_w2(x) : 0.0; });
  }
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<std::size_t> ids(n, w);
    ids[p] = w2;
    d.add_term(-1.0, std::move(ids));
  }
  d.add_term(-kappa_sq, std::vector<std::size_t>(n, w));
  return d;
}

}  // namespace helmvp
