#include <cmath>
#include <string>

#include "helmvp/error.hpp"
#include "helmvp/specfun.hpp"

namespace helmvp {

cplx hermite(unsigned k, cplx z) {
  cplx h0 = 1.0;
  if (k == 0) return h0;
  cplx h1 = 2.0 * z;
  for (unsigned j = 1; j < k; ++j) {
    const cplx h2 = 2.0 * z * h1 - 2.0 * static_cast<double>(j) * h0;
    h0 = h1;
    h1 = h2;
  }
  if (!std::isfinite(h1.real()) || !std::isfinite(h1.imag()))
    fail(ErrorKind::NonFinite, "hermite H_" + std::to_string(k));
  return h1;
}

std::uint64_t binomial(unsigned n, unsigned k) {
  if (n > 64 || k > n)
    fail(ErrorKind::OutOfRange, "binomial(" + std::to_string(n) + ", " +
                                    std::to_string(k) + ")");
  if (k > n - k) k = n - k;
  // C(n, j) = C(n, j-1) * (n-j+1) / j; the division is exact, and the
  // intermediate fits in 128 bits for n <= 64.
  unsigned __int128 c = 1;
  for (unsigned j = 1; j <= k; ++j) c = c * (n - j + 1) / j;
  return static_cast<std::uint64_t>(c);
}

}  // namespace helmvp
