#pragma once

#include <cstddef>
#include <vector>

#include "helmvp/basis.hpp"
#include "helmvp/density.hpp"
#include "helmvp/quadrature.hpp"

namespace helmvp {

enum class Mode { Box, FullSpace };
enum class TauMode { Fixed, Auto };

struct PotentialRequest {
  BasisOrder M{1};
  double kappa = 1.0;
  GridSpec grid;
  SampledDensity density;
  std::vector<std::vector<double>> targets;
  Mode mode = Mode::Box;
  DEParams quadrature;
  TauMode tau_mode = TauMode::Fixed;
  AutoTau auto_tau;
  /// 0: hardware concurrency.
  unsigned threads = 0;
  /// |y| beyond which Psi is replaced by its limit (0 or the full-line
  /// value); the neglected part is below exp(-cut^2).
  double edge_cut = 10.0;

  void validate() const;
};

/// One wave number with its own coefficients alpha_p (same factors).
struct KappaCase {
  double kappa;
  std::vector<cplx> coefficients;
};

struct PotentialDiagnostics {
  std::size_t nodes = 0;
  double tau = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double tail_low = 0.0;
  double tail_high = 0.0;
  bool capped = false;
  std::size_t geometries = 0;  // distinct (dimension, coordinate) lines
  std::size_t line_sums = 0;   // distinct one-dimensional sums per node
  std::size_t monomials = 0;   // distinct rank-term products per node
  int tau_levels = 0;
  double tau_change = 0.0;
  bool tau_converged = true;
  double seconds = 0.0;
};

struct PotentialResult {
  std::vector<std::vector<cplx>> values;  // [case][target]
  PotentialDiagnostics diagnostics;
};

/// Evaluates several wave numbers in one pass; the one-dimensional sums
/// and the node window do not depend on kappa.
PotentialResult evaluate(const PotentialRequest& req,
                         const std::vector<KappaCase>& cases);

std::vector<cplx> box_potential(const PotentialRequest& req);
std::vector<cplx> fullspace_potential(const PotentialRequest& req);

/// sum_m g_j^{(p)}(h m) [Psi(xi, theta, y_P) - Psi(xi, theta, y_Q)] at one
/// node, with xi = (x_j - h m)/(h sqrt(D)), theta = 4 Phi/(h^2 D).
cplx onedim_sum(const DENode& node, std::size_t p, std::size_t j,
                double target_coord, const PotentialRequest& req);

/// Cubature coefficient b_{k,m}; sum_m g(hm) b_{k,m} / D^{n/2} reproduces
/// box_potential at the target h k (same node window).
cplx b_coeff(const std::vector<long>& k, const std::vector<long>& m,
             const PotentialRequest& req);

/// Direct lattice summation with the same nodes; n <= 4, lattice <= 1e6.
std::vector<cplx> naive_reference(const PotentialRequest& req);

/// Node window the engine would use for the request.
NodeWindow engine_window(const PotentialRequest& req);

}  // namespace helmvp
