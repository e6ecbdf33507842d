#pragma once

#include <complex>
#include <cstdint>

namespace helmvp {

using cplx = std::complex<double>;

/// Physicists' Hermite polynomial H_k(z) by forward recurrence.
/// Throws NonFinite if the result overflows.
cplx hermite(unsigned k, cplx z);

struct FaddeevaResult {
  cplx value;
  double accuracy_estimate;  // relative
};

/// W(z) = exp(-z^2) erfc(-iz). For Im z < 0 the reflection
/// W(z) = 2 exp(-z^2) - W(-z) is used; throws Overflow when exp(-z^2) is
/// not representable.
FaddeevaResult faddeeva(cplx z);

/// W(z) for Im z >= 0 without validation. Hot path for the kernels.
cplx faddeeva_upper(cplx z) noexcept;

/// erfc(z) = exp(-z^2) W(iz). Throws Overflow when exp(-z^2) overflows.
cplx erfc_complex(cplx z);

/// Exact binomial coefficient, 0 <= k <= n <= 64.
std::uint64_t binomial(unsigned n, unsigned k);

}  // namespace helmvp
