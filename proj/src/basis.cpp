#include "helmvp/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "helmvp/error.hpp"

namespace helmvp {
namespace {

constexpr int kMaxDegree = 2 * kMaxOrder - 1;
constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;
constexpr double kInvPi = std::numbers::inv_pi;

struct Tables {
  // herm[k][i]: coefficient of x^i in H_k(x).
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> herm{};
  // c[k] = (-1)^k / (k! 4^k).
  std::array<double, kMaxOrder> c{};
  // Coefficients of H_{2M-1}(x)/x and the eta prefactor, indexed by M.
  std::array<std::array<double, kMaxDegree>, kMaxOrder + 1> eta{};
  std::array<double, kMaxOrder + 1> eta_scale{};
  // basis[M]: sum_{k<M} c[k] H_{2k}(s), so eta_{2M}(s) = basis(s) e^{-s^2}/sqrt(pi).
  std::array<std::array<double, kMaxDegree>, kMaxOrder + 1> basis{};

  Tables() {
    herm[0][0] = 1.0;
    herm[1][1] = 2.0;
    for (int k = 1; k < kMaxDegree; ++k)
      for (int i = 0; i <= k + 1; ++i) {
        double v = -2.0 * k * herm[k - 1][i];
        if (i > 0) v += 2.0 * herm[k][i - 1];
        herm[k + 1][i] = v;
      }
    double fact = 1.0, four = 1.0;
    for (int k = 0; k < kMaxOrder; ++k) {
      if (k > 0) {
        fact *= k;
        four *= 4.0;
      }
      c[k] = (k % 2 ? -1.0 : 1.0) / (fact * four);
    }
    double mfact = 1.0;
    for (int M = 1; M <= kMaxOrder; ++M) {
      if (M > 1) mfact *= (M - 1);
      for (int i = 0; i <= 2 * M - 2; ++i) eta[M][i] = herm[2 * M - 1][i + 1];
      eta_scale[M] = ((M - 1) % 2 ? -1.0 : 1.0) * kInvSqrtPi /
                     (std::ldexp(1.0, 2 * M - 1) * mfact);
      for (int k = 0; k < M; ++k)
        for (int i = 0; i <= 2 * k; ++i) basis[M][i] += c[k] * herm[2 * k][i];
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_args(const PsiArgs& a) {
  if (!(a.theta > 0.0) || !std::isfinite(a.theta))
    fail(ErrorKind::InvalidArgument, "theta must be positive and finite");
  if (!std::isfinite(a.x) || !std::isfinite(a.y))
    fail(ErrorKind::InvalidArgument, "Psi arguments must be finite");
}

}  // namespace

BasisOrder::BasisOrder(int M) : M_(M) {
  if (M < 1 || M > kMaxOrder)
    fail(ErrorKind::OutOfRange, "basis order M=" + std::to_string(M) +
                                    " outside [1, " +
                                    std::to_string(kMaxOrder) + "]");
}

double eta_2m(BasisOrder order, double x) {
  const int M = order.value();
  const auto& t = tables();
  const double x2 = x * x;
  // H_{2M-1}(x)/x is even: Horner in x^2.
  double s = t.eta[M][2 * M - 2];
  for (int i = 2 * M - 4; i >= 0; i -= 2) s = s * x2 + t.eta[M][i];
  return t.eta_scale[M] * s * std::exp(-x2);
}

cplx p_m(BasisOrder order, double x, cplx t) {
  const int M = order.value();
  const cplx opt = 1.0 + t;
  if (opt == 0.0) fail(ErrorKind::InvalidArgument, "p_m requires 1+t != 0");
  const cplx arg = x / std::sqrt(opt);
  const auto& tab = tables();
  cplx sum = 0.0;
  for (int s = 0; s < M; ++s)
    sum += tab.c[s] * std::pow(opt, -s - 0.5) * hermite(2 * s, arg);
  if (!finite(sum)) fail(ErrorKind::NonFinite, "p_m");
  return sum;
}

cplx f_arg(const PsiArgs& a) {
  check_args(a);
  const cplx t(0.0, a.theta);
  return std::sqrt((t + 1.0) / t) * (a.y - a.x / (t + 1.0));
}

cplx q_m(BasisOrder order, const PsiArgs& a) {
  check_args(a);
  const int M = order.value();
  if (M == 1) return 0.0;
  const auto& tab = tables();
  const cplx t(0.0, a.theta);
  const cplx opt = 1.0 + t;
  const cplx sqt = std::sqrt(t);
  const cplx F = f_arg(a);
  const cplx u = (a.y - a.x) / sqt;
  const cplx v = a.x / std::sqrt(opt);
  cplx sum = 0.0;
  for (int k = 1; k < M; ++k) {
    const cplx tail = std::pow(opt, -k - 0.5);
    for (int l = 1; l <= 2 * k; ++l) {
      const double sign = (l % 2) ? -1.0 : 1.0;
      const double binom = static_cast<double>(binomial(2 * k, l));
      const cplx first = hermite(2 * k - l, a.y) * hermite(l - 1, u);
      const cplx second =
          binom * hermite(2 * k - l, v) * hermite(l - 1, F) * tail;
      sum += tab.c[k] * sign * std::pow(sqt, -l) * (first - second);
    }
  }
  sum *= 2.0;
  if (!finite(sum)) fail(ErrorKind::NonFinite, "q_m");
  return sum;
}

cplx psi_stable(BasisOrder order, const PsiArgs& a) {
  check_args(a);
  const PsiKernel k(order, a.theta);
  const cplx v = k.psi(a.x, a.y);
  if (!finite(v)) fail(ErrorKind::NonFinite, "psi_stable");
  return v;
}

PsiKernel::PsiKernel(BasisOrder order, double theta)
    : M_(order.value()), theta_(theta) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    fail(ErrorKind::InvalidArgument, "theta must be positive and finite");
  const cplx t(0.0, theta);
  const cplx opt = 1.0 + t;
  inv_opt_ = 1.0 / opt;
  rsqrt_opt_ = 1.0 / std::sqrt(opt);
  sqrt_beta_ = std::sqrt(opt / t);
  r_ = 1.0 / sqrt_beta_;
  const auto& tab = tables();
  pcoef_.fill(0.0);
  cplx inv_s = 1.0;  // (1+t)^{-s}
  for (int s = 0; s < M_; ++s) {
    cplx inv_i = 1.0;  // (1+t)^{-i/2}, i even
    for (int i = 0; i <= 2 * s; i += 2) {
      pcoef_[i / 2] += tab.c[s] * rsqrt_opt_ * inv_s * tab.herm[2 * s][i] * inv_i;
      inv_i *= inv_opt_;
    }
    inv_s *= inv_opt_;
  }
}

cplx PsiKernel::p(double x) const noexcept {
  const double x2 = x * x;
  cplx s = pcoef_[M_ - 1];
  for (int i = M_ - 2; i >= 0; --i) s = s * x2 + pcoef_[i];
  return s;
}

cplx PsiKernel::gauss(double x) const noexcept { return std::exp(-x * x * inv_opt_); }

cplx PsiKernel::full_line(double x) const noexcept {
  return kInvSqrtPi * p(x) * gauss(x);
}

cplx PsiKernel::f(double x, double y) const noexcept {
  return sqrt_beta_ * (y - x * inv_opt_);
}

cplx PsiKernel::q(double x, double y) const noexcept {
  if (M_ == 1) return 0.0;
  // With v = (s - mu)/r, the exp(-F^2) part of int_F^inf basis(mu + r v)
  // e^{-v^2} dv is R(F) e^{-F^2}, where 2 v R - R' = basis - const. In the
  // variable s the same polynomial solves 2 (s - mu) R - r^2 R' = r basis
  // and is evaluated at s = mu + r F = y, which keeps the terms bounded.
  const int deg = 2 * M_ - 2;
  const auto& basis = tables().basis[M_];
  const cplx mu = x * inv_opt_;
  const cplx r2 = r_ * r_;
  std::array<cplx, kMaxDegree + 2> rho{};
  for (int p = deg; p >= 1; --p)
    rho[p - 1] = 0.5 * (r_ * basis[p] + 2.0 * mu * rho[p] + r2 * double(p + 1) * rho[p + 1]);
  cplx R = rho[deg - 1];
  for (int i = deg - 2; i >= 0; --i) R = R * y + rho[i];
  return -2.0 * rsqrt_opt_ * R;
}

cplx PsiKernel::psi(double x, double y) const noexcept {
  const double dy = y - x;
  return psi(x, y, p(x), gauss(x), std::polar(1.0, dy * dy / theta_));
}

cplx PsiKernel::psi(double x, double y, cplx px, cplx gx,
                    cplx unit_phase) const noexcept {
  const cplx E = std::exp(-y * y) * unit_phase;
  const cplx F = f(x, y);
  cplx w;
  if (F.real() >= 0.0)
    w = E * faddeeva_upper(cplx(-F.imag(), F.real()));
  else
    w = 2.0 * gx - E * faddeeva_upper(cplx(F.imag(), -F.real()));
  cplx v = 0.5 * kInvSqrtPi * px * w;
  if (M_ > 1) v -= 0.5 * kInvPi * E * q(x, y);
  return v;
}

}  // namespace helmvp
