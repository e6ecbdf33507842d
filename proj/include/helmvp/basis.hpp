#pragma once

#include <array>

#include "helmvp/specfun.hpp"

namespace helmvp {

inline constexpr int kMaxOrder = 5;

/// Approximation order parameter M; the cubature has order 2M.
class BasisOrder {
 public:
  BasisOrder(int M);  // NOLINT: implicit on purpose, throws OutOfRange
  int value() const noexcept { return M_; }

 private:
  int M_;
};

/// Arguments of Psi_M(x, i*theta, y).
struct PsiArgs {
  double x;
  double theta;
  double y;
};

/// eta_{2M}(x), with the removable singularity of H_{2M-1}(x)/x divided out.
double eta_2m(BasisOrder M, double x);

/// P_M(x, t), principal branches.
cplx p_m(BasisOrder M, double x, cplx t);

/// F(x, i*theta, y) = sqrt((t+1)/t) (y - x/(t+1)).
cplx f_arg(const PsiArgs& a);

/// Q_M(x, i*theta, y) as the finite double sum. Accurate for moderate
/// theta; loses digits to cancellation when theta is small.
cplx q_m(BasisOrder M, const PsiArgs& a);

/// Psi_M(x, i*theta, y) = int_y^inf (pi t)^{-1/2} e^{-(x-s)^2/t} eta_{2M}(s) ds
/// by the two-branch formula that never forms exp(+F^2).
cplx psi_stable(BasisOrder M, const PsiArgs& a);

/// Per-(M, theta) precomputation of Psi_M and its pieces. Immutable after
/// construction, so one instance can be shared between threads.
class PsiKernel {
 public:
  PsiKernel(BasisOrder M, double theta);

  int order() const noexcept { return M_; }
  double theta() const noexcept { return theta_; }

  /// P_M(x, i*theta).
  cplx p(double x) const noexcept;
  /// exp(-x^2/(1+i*theta)).
  cplx gauss(double x) const noexcept;
  /// pi^{-1/2} P_M(x, i*theta) exp(-x^2/(1+i*theta)): Psi over the full line.
  cplx full_line(double x) const noexcept;
  /// F(x, i*theta, y).
  cplx f(double x, double y) const noexcept;
  /// Q_M from a polynomial recursion in y; free of the cancellation in the
  /// double sum.
  cplx q(double x, double y) const noexcept;
  /// Psi_M(x, i*theta, y).
  cplx psi(double x, double y) const noexcept;
  /// Psi_M given precomputed p(x), gauss(x) and exp(i (y-x)^2/theta).
  cplx psi(double x, double y, cplx px, cplx gx, cplx unit_phase) const noexcept;

 private:
  int M_;
  double theta_;
  cplx inv_opt_;    // 1/(1+t)
  cplx rsqrt_opt_;  // (1+t)^{-1/2}
  cplx sqrt_beta_;  // sqrt((1+t)/t)
  cplx r_;          // 1/sqrt_beta_
  std::array<cplx, kMaxOrder> pcoef_;  // P_M as a polynomial in x^2
};

}  // namespace helmvp
