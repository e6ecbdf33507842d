// Faddeeva function for Im z >= 0.
//
// Inside the ellipse (x/6.3)^2 + (y/4.4)^2 < 1 a Weideman rational
// approximation is used; outside it the Laplace continued fraction converges
// quickly. The lower half plane goes through the reflection formula.

#include <array>
#include <cmath>
#include <numbers>

#include "helmvp/error.hpp"
#include "helmvp/specfun.hpp"

namespace helmvp {
namespace {

constexpr int kWeidemanTerms = 40;
constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

struct Weideman {
  double L;
  std::array<double, kWeidemanTerms> c;

  Weideman() {
    const int n = kWeidemanTerms;
    const int m = 2 * n;
    L = std::sqrt(n / std::numbers::sqrt2);
    std::array<double, 2 * kWeidemanTerms> f{};
    for (int k = 0; k < m; ++k) {
      const double t = L * std::tan(k * std::numbers::pi / (2.0 * m));
      f[k] = std::exp(-t * t) * (L * L + t * t);
    }
    for (int j = 1; j <= n; ++j) {
      double s = 0.0;
      for (int k = m - 1; k >= 1; --k)
        s += f[k] * std::cos(std::numbers::pi * j * k / m);
      c[j - 1] = (f[0] + 2.0 * s) / (2.0 * m);
    }
  }
};

const Weideman& weideman() {
  static const Weideman w;
  return w;
}

cplx weideman_eval(cplx z) {
  const Weideman& w = weideman();
  const cplx iz(-z.imag(), z.real());
  const cplx den = w.L - iz;
  const cplx Z = (w.L + iz) / den;
  cplx p = w.c[kWeidemanTerms - 1];
  for (int j = kWeidemanTerms - 2; j >= 0; --j) p = p * Z + w.c[j];
  return 2.0 * p / (den * den) + kInvSqrtPi / den;
}

cplx continued_fraction(cplx z, double rho) {
  const int terms = 6 + static_cast<int>(1442.0 / (26.0 + 77.0 * rho));
  cplx r = 0.0;
  for (int k = terms; k >= 1; --k) r = (0.5 * k) / (z - r);
  return cplx(0.0, kInvSqrtPi) / (z - r);
}

}  // namespace

cplx faddeeva_upper(cplx z) noexcept {
  const double ex = z.real() / 6.3;
  const double ey = z.imag() / 4.4;
  const double rho2 = ex * ex + ey * ey;
  if (rho2 < 1.0) return weideman_eval(z);
  return continued_fraction(z, std::sqrt(rho2));
}

FaddeevaResult faddeeva(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    fail(ErrorKind::NonFinite, "faddeeva argument");
  constexpr double accuracy = 1e-13;
  if (z.imag() >= 0.0) return {faddeeva_upper(z), accuracy};
  const cplx e = std::exp(-z * z);
  if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
    fail(ErrorKind::Overflow, "faddeeva reflection exp(-z^2)");
  const cplx v = 2.0 * e - faddeeva_upper(-z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    fail(ErrorKind::Overflow, "faddeeva reflection");
  return {v, accuracy};
}

cplx erfc_complex(cplx z) {
  const cplx e = std::exp(-z * z);
  if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
    fail(ErrorKind::Overflow, "erfc exp(-z^2)");
  const cplx w = faddeeva(cplx(-z.imag(), z.real())).value;
  const cplx v = e * w;
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    fail(ErrorKind::Overflow, "erfc product");
  return v;
}

}  // namespace helmvp
