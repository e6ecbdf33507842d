#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "helmvp/specfun.hpp"

namespace helmvp {

/// Trapezoid rule after the substitution t = Phi(u).
struct DEParams {
  double a = 6.0;
  double b = 4.0;
  double tau = 1e-6;
  double trunc_threshold = 1e-16;
  std::size_t max_nodes = 20'000'000;
  /// Optional hard upper end of the window in t (infinity: none).
  double t_max = std::numeric_limits<double>::infinity();

  void validate() const;
};

struct DENode {
  double u;
  double phi;
  double phi_prime;
  double weight;
};

/// Phi(u) = exp(ab(u - e^{-u}) + a e^{b(u - e^{-u})}). Throws Overflow when
/// the value is not a positive finite double.
double phi(double u, double a, double b);
double phi_prime(double u, double a, double b);

/// Inverse of phi, by bisection.
double phi_inverse(double t, double a, double b);

/// Index window {s_min..s_max} of the nodes u = s*tau.
struct NodeWindow {
  long s_min = 0;
  long s_max = 1;
  double tau = 0.0;
  double probe_max = 0.0;
  /// probe/probe_max at the two ends of the window.
  double tail_low = 0.0;
  double tail_high = 0.0;
  /// True when the upper end came from t_max rather than the threshold.
  bool capped = false;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(s_max - s_min + 1);
  }
  double u_min() const noexcept { return s_min * tau; }
  double u_max() const noexcept { return s_max * tau; }
};

using DecayProbe = std::function<double(double)>;

/// Smallest N0 >= 0, N1 >= 1 with probe(-N0 tau), probe(N1 tau) below
/// trunc_threshold times the running maximum of probed values.
/// Throws TruncationFailure past max_nodes or the overflow range of Phi.
NodeWindow node_window(const DEParams& params, const DecayProbe& probe);

std::vector<DENode> make_nodes(const DEParams& params, const NodeWindow& w);

std::vector<DENode> nodes(const DEParams& params, const DecayProbe& probe);

/// tau * sum_s f(node_s), compensated, left to right.
cplx integrate(const std::vector<DENode>& nodes,
               const std::function<cplx(const DENode&)>& f);

/// Neumaier summation for complex values.
class CompensatedSum {
 public:
  void add(cplx v) noexcept {
    add_part(re_, cre_, v.real());
    add_part(im_, cim_, v.imag());
  }
  cplx value() const noexcept { return {re_ + cre_, im_ + cim_}; }

 private:
  static void add_part(double& s, double& c, double v) noexcept {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double re_ = 0.0, im_ = 0.0, cre_ = 0.0, cim_ = 0.0;
};

/// Step-halving driver: start tau, floor tau, and the stopping change.
struct AutoTau {
  double start = 0.1;
  double floor = 1e-4;
  double tolerance = 1e-12;
};

}  // namespace helmvp
