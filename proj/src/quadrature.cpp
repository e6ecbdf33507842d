#include "helmvp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "helmvp/error.hpp"

namespace helmvp {
namespace {

constexpr double kLogMax = 709.0;

double log_phi(double u, double a, double b) {
  const double v = u - std::exp(-u);
  return a * b * v + a * std::exp(b * v);
}

// Coarse probing stride in u.
constexpr double kStride = 1.0 / 64.0;

}  // namespace

void DEParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    fail(ErrorKind::InvalidArgument, "quadrature parameters a, b must be positive");
  if (!(tau > 0.0) || tau > 1.0)
    fail(ErrorKind::InvalidArgument, "quadrature step tau must lie in (0, 1]");
  if (!(trunc_threshold > 0.0) || trunc_threshold > 1e-8)
    fail(ErrorKind::InvalidArgument, "trunc_threshold must lie in (0, 1e-8]");
  if (max_nodes < 2) fail(ErrorKind::InvalidArgument, "max_nodes must be >= 2");
  if (!(t_max > 0.0)) fail(ErrorKind::InvalidArgument, "t_max must be positive");
}

double phi(double u, double a, double b) {
  const double l = log_phi(u, a, b);
  const double v = std::exp(l);
  if (!(l <= kLogMax) || !(v > 0.0) || !std::isfinite(v))
    fail(ErrorKind::Overflow, "phi(" + std::to_string(u) + ") not representable");
  return v;
}

double phi_prime(double u, double a, double b) {
  const double p = phi(u, a, b);
  const double eu = std::exp(-u);
  const double ebv = std::exp(b * (u - eu));
  const double d = p * a * b * (1.0 + eu) * (1.0 + ebv);
  if (!(d > 0.0) || !std::isfinite(d))
    fail(ErrorKind::Overflow, "phi'(" + std::to_string(u) + ") not representable");
  return d;
}

double phi_inverse(double t, double a, double b) {
  if (!(t > 0.0) || !std::isfinite(t))
    fail(ErrorKind::InvalidArgument, "phi_inverse needs a positive finite t");
  const double target = std::log(t);
  double lo = -1.0, hi = 1.0;
  while (log_phi(lo, a, b) > target) lo *= 2.0;
  while (log_phi(hi, a, b) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_phi(mid, a, b) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

NodeWindow node_window(const DEParams& params, const DecayProbe& probe) {
  params.validate();
  const double tau = params.tau;
  NodeWindow w;
  w.tau = tau;

  // Largest |s| on each side for which Phi and Phi' stay representable.
  auto representable = [&](long s) {
    const double u = s * tau;
    const double l = log_phi(u, params.a, params.b);
    return l < kLogMax - 10.0 && l > -700.0;
  };
  long s_cap = std::numeric_limits<long>::max();
  if (std::isfinite(params.t_max))
    s_cap = static_cast<long>(
        std::floor(phi_inverse(params.t_max, params.a, params.b) / tau));
  s_cap = std::max(s_cap, 1L);

  double runmax = 0.0;
  auto eval = [&](long s) {
    const double v = probe(s * tau);
    if (!std::isfinite(v) || v < 0.0)
      fail(ErrorKind::NonFinite,
           "decay probe at u=" + std::to_string(s * tau));
    if (v > runmax) runmax = v;
    return v;
  };
  eval(0);

  const long stride = std::max(1L, std::lround(kStride / tau));
  const long limit = static_cast<long>(params.max_nodes);

  // Walks outward from |s| = first in direction dir; returns the smallest
  // |s| meeting the threshold, or the cap.
  auto search = [&](int dir, long first, long cap, bool& capped,
                    double& tail) -> long {
    capped = false;
    long prev = first - 1;  // last index known to be above threshold
    long s = first;
    for (;;) {
      if (s >= cap) {
        capped = true;
        tail = eval(dir * cap) / (runmax > 0.0 ? runmax : 1.0);
        return cap;
      }
      if (s > limit)
        fail(ErrorKind::TruncationFailure,
             "node window exceeds max_nodes=" + std::to_string(limit));
      if (!representable(dir * s))
        fail(ErrorKind::TruncationFailure,
             "integrand above threshold where Phi leaves the double range (u=" +
                 std::to_string(dir * s * tau) + ")");
      if (eval(dir * s) <= params.trunc_threshold * runmax) break;
      prev = s;
      s += stride;
    }
    // Bisection on (prev, s]: smallest index at or below the threshold.
    long lo = prev, hi = s;
    while (hi - lo > 1) {
      const long mid = lo + (hi - lo) / 2;
      if (eval(dir * mid) <= params.trunc_threshold * runmax)
        hi = mid;
      else
        lo = mid;
    }
    tail = eval(dir * hi) / (runmax > 0.0 ? runmax : 1.0);
    return hi;
  };

  bool capped_low = false, capped_high = false;
  const long n1 = search(+1, 1, s_cap, capped_high, w.tail_high);
  const long n0 = search(-1, 0, std::numeric_limits<long>::max(), capped_low,
                         w.tail_low);
  w.s_min = -n0;
  w.s_max = n1;
  w.capped = capped_high;
  w.probe_max = runmax;
  if (w.size() > params.max_nodes)
    fail(ErrorKind::TruncationFailure,
         "node window of " + std::to_string(w.size()) +
             " nodes exceeds max_nodes=" + std::to_string(params.max_nodes));
  return w;
}

std::vector<DENode> make_nodes(const DEParams& params, const NodeWindow& w) {
  std::vector<DENode> out;
  out.reserve(w.size());
  for (long s = w.s_min; s <= w.s_max; ++s) {
    const double u = s * w.tau;
    out.push_back({u, phi(u, params.a, params.b),
                   phi_prime(u, params.a, params.b), w.tau});
  }
  return out;
}

std::vector<DENode> nodes(const DEParams& params, const DecayProbe& probe) {
  return make_nodes(params, node_window(params, probe));
}

cplx integrate(const std::vector<DENode>& nodes,
               const std::function<cplx(const DENode&)>& f) {
  if (nodes.empty()) fail(ErrorKind::InvalidArgument, "integrate: no nodes");
  CompensatedSum sum;
  for (const DENode& n : nodes) {
    const cplx v = f(n);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorKind::NonFinite, "integrand at u=" + std::to_string(n.u));
    sum.add(n.weight * v);
  }
  return sum.value();
}

}  // namespace helmvp
