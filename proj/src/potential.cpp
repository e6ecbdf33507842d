#include "helmvp/potential.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <thread>
#include <tuple>

#include "helmvp/error.hpp"

namespace helmvp {
namespace {

constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;
constexpr std::size_t kChunk = 4096;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct Geometry {
  double x;
  double P;
  double Q;
  IndexRange range;
};

struct Line {
  std::size_t geometry;
  std::size_t table;
  std::size_t p;  // a rank term using this sum, for diagnostics
  std::size_t j;
};

struct Factor {
  std::size_t line;
  unsigned power;
  bool operator<(const Factor& o) const {
    return std::tie(line, power) < std::tie(o.line, o.power);
  }
};

struct TargetPlan {
  std::vector<std::size_t> geometry;               // per dimension
  std::vector<std::size_t> monomials;              // distinct products
  std::vector<std::vector<std::size_t>> terms;     // rank terms per product
};

struct Plan {
  int M;
  Mode mode;
  double h;
  double h_sqrtD;
  double inv_sqrtD;
  double theta_scale;  // theta = theta_scale * Phi(u)
  double cut;
  std::size_t n;
  const SampledDensity* density;
  std::vector<Geometry> geometries;
  std::vector<Line> lines;
  std::vector<std::vector<Factor>> monomials;
  std::vector<TargetPlan> targets;
};

Plan make_plan(const PotentialRequest& req,
               const std::vector<std::vector<double>>& targets) {
  const SampledDensity& d = req.density;
  Plan plan;
  plan.M = req.M.value();
  plan.mode = req.mode;
  plan.h = req.grid.h;
  plan.h_sqrtD = req.grid.h * std::sqrt(req.grid.D);
  plan.inv_sqrtD = 1.0 / std::sqrt(req.grid.D);
  plan.theta_scale = 4.0 / (req.grid.h * req.grid.h * req.grid.D);
  plan.cut = req.edge_cut;
  plan.n = d.n;
  plan.density = &d;

  std::map<std::tuple<double, double, double, long, long>, std::size_t> gmap;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> lmap;
  std::map<std::vector<Factor>, std::size_t> mmap;
  for (const auto& x : targets) {
    TargetPlan tp;
    for (std::size_t j = 0; j < d.n; ++j) {
      const IndexRange& r = d.ranges[j];
      const double P = req.grid.box.lower[j], Q = req.grid.box.upper[j];
      const auto key = std::make_tuple(x[j], P, Q, r.m_min, r.m_max);
      auto it = gmap.find(key);
      if (it == gmap.end()) {
        plan.geometries.push_back({x[j], P, Q, r});
        it = gmap.emplace(key, plan.geometries.size() - 1).first;
      }
      tp.geometry.push_back(it->second);
    }
    for (std::size_t p = 0; p < d.rank; ++p) {
      std::vector<std::size_t> ls;
      for (std::size_t j = 0; j < d.n; ++j) {
        const auto key = std::make_pair(tp.geometry[j], d.table_id(p, j));
        auto it = lmap.find(key);
        if (it == lmap.end()) {
          plan.lines.push_back({key.first, key.second, p, j});
          it = lmap.emplace(key, plan.lines.size() - 1).first;
        }
        ls.push_back(it->second);
      }
      std::sort(ls.begin(), ls.end());
      std::vector<Factor> mono;
      for (std::size_t l : ls) {
        if (!mono.empty() && mono.back().line == l)
          ++mono.back().power;
        else
          mono.push_back({l, 1});
      }
      auto it = mmap.find(mono);
      if (it == mmap.end()) {
        plan.monomials.push_back(mono);
        it = mmap.emplace(std::move(mono), plan.monomials.size() - 1).first;
      }
      const auto pos = std::find(tp.monomials.begin(), tp.monomials.end(), it->second);
      if (pos == tp.monomials.end()) {
        tp.monomials.push_back(it->second);
        tp.terms.push_back({p});
      } else {
        tp.terms[pos - tp.monomials.begin()].push_back(p);
      }
    }
    plan.targets.push_back(std::move(tp));
  }
  return plan;
}

// Psi(xi, theta, y_P) - Psi(xi, theta, y_Q) at lattice index m.
inline cplx delta_at(const Plan& plan, const PsiKernel& k, const Geometry& g,
                     long m, cplx phase_p, cplx phase_q) {
  const double hm = plan.h * m;
  const double xi = (g.x - hm) / plan.h_sqrtD;
  if (plan.mode == Mode::FullSpace) return k.full_line(xi);
  const double yp = (g.P - hm) / plan.h_sqrtD;
  const double yq = (g.Q - hm) / plan.h_sqrtD;
  if (yp >= plan.cut || yq <= -plan.cut) return 0.0;
  const cplx px = k.p(xi);
  const cplx gx = k.gauss(xi);
  const cplx psi_p =
      yp <= -plan.cut ? kInvSqrtPi * px * gx : k.psi(xi, yp, px, gx, phase_p);
  const cplx psi_q = yq >= plan.cut ? cplx(0.0) : k.psi(xi, yq, px, gx, phase_q);
  return psi_p - psi_q;
}

inline std::pair<cplx, cplx> edge_phases(const Plan& plan, const Geometry& g,
                                         double theta) {
  if (plan.mode == Mode::FullSpace) return {1.0, 1.0};
  const double dp = (g.P - g.x) / plan.h_sqrtD;
  const double dq = (g.Q - g.x) / plan.h_sqrtD;
  return {std::polar(1.0, dp * dp / theta), std::polar(1.0, dq * dq / theta)};
}

void line_delta(const Plan& plan, const PsiKernel& k, const Geometry& g,
                std::vector<cplx>& out) {
  const auto [pp, pq] = edge_phases(plan, g, k.theta());
  out.resize(g.range.size());
  std::size_t i = 0;
  for (long m = g.range.m_min; m <= g.range.m_max; ++m, ++i)
    out[i] = delta_at(plan, k, g, m, pp, pq);
}

cplx ipow(cplx z, unsigned e) {
  cplx r = 1.0;
  while (e) {
    if (e & 1u) r *= z;
    e >>= 1u;
    if (e) z *= z;
  }
  return r;
}

struct Workspace {
  std::vector<std::vector<cplx>> delta;
  std::vector<cplx> sums;
  std::vector<cplx> mono;
};

void node_values(const Plan& plan, double u, double phi_u, Workspace& ws) {
  const PsiKernel k(plan.M, plan.theta_scale * phi_u);
  ws.delta.resize(plan.geometries.size());
  for (std::size_t g = 0; g < plan.geometries.size(); ++g)
    line_delta(plan, k, plan.geometries[g], ws.delta[g]);
  ws.sums.resize(plan.lines.size());
  for (std::size_t l = 0; l < plan.lines.size(); ++l) {
    const Line& line = plan.lines[l];
    const auto& table = plan.density->tables[line.table];
    const auto& delta = ws.delta[line.geometry];
    CompensatedSum s;
    for (std::size_t i = 0; i < table.size(); ++i) s.add(table[i] * delta[i]);
    const cplx v = plan.inv_sqrtD * s.value();
    if (!finite(v))
      fail(ErrorKind::NonFinite,
           "one-dimensional sum at u=" + std::to_string(u) +
               " (term p=" + std::to_string(line.p) +
               ", dimension j=" + std::to_string(line.j) + ")");
    ws.sums[l] = v;
  }
  ws.mono.resize(plan.monomials.size());
  for (std::size_t q = 0; q < plan.monomials.size(); ++q) {
    cplx v = 1.0;
    for (const Factor& f : plan.monomials[q]) v *= ipow(ws.sums[f.line], f.power);
    if (!finite(v)) {
      const Line& line = plan.lines[plan.monomials[q].front().line];
      fail(ErrorKind::NonFinite, "tensor product at u=" + std::to_string(u) +
                                     " (term p=" + std::to_string(line.p) + ")");
    }
    ws.mono[q] = v;
  }
}

double envelope(const Plan& plan, double u, double a, double b, Workspace& ws) {
  const double ph = phi(u, a, b);
  const double dph = phi_prime(u, a, b);
  node_values(plan, u, ph, ws);
  double best = 0.0;
  for (const TargetPlan& tp : plan.targets) {
    double s = 0.0;
    for (std::size_t q : tp.monomials) s += std::abs(ws.mono[q]);
    best = std::max(best, s);
  }
  return dph * best;
}

struct CaseData {
  double kappa_sq;
  std::vector<std::vector<cplx>> coef;  // [target][product]
};

std::vector<CaseData> case_data(const Plan& plan,
                                const std::vector<KappaCase>& cases) {
  std::vector<CaseData> out;
  for (const KappaCase& c : cases) {
    CaseData cd{c.kappa * c.kappa, {}};
    for (const TargetPlan& tp : plan.targets) {
      std::vector<cplx> row;
      for (const auto& terms : tp.terms) {
        CompensatedSum s;
        for (std::size_t p : terms) s.add(c.coefficients[p]);
        row.push_back(s.value());
      }
      cd.coef.push_back(std::move(row));
    }
    out.push_back(std::move(cd));
  }
  return out;
}

unsigned worker_count(unsigned requested) {
  if (requested) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs fn(begin, end, worker) over [0, count) split into contiguous blocks.
template <class Fn>
void parallel_blocks(std::size_t count, unsigned workers, Fn&& fn) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    if (count) fn(std::size_t{0}, count, 0u);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = count * w / workers, hi = count * (w + 1) / workers;
    pool.emplace_back([&, lo, hi, w] {
      try {
        fn(lo, hi, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<std::vector<cplx>> integrate_plan(const Plan& plan,
                                              const std::vector<DENode>& nodes,
                                              const std::vector<CaseData>& cases,
                                              unsigned threads) {
  const std::size_t T = plan.targets.size(), C = cases.size();
  std::vector<CompensatedSum> acc(T * C);
  const unsigned W = worker_count(threads);
  std::vector<Workspace> spaces(W);
  std::vector<cplx> buffer(std::min(kChunk, nodes.size()) * T * C);
  for (std::size_t start = 0; start < nodes.size(); start += kChunk) {
    const std::size_t len = std::min(kChunk, nodes.size() - start);
    parallel_blocks(len, W, [&](std::size_t lo, std::size_t hi, unsigned w) {
      Workspace& ws = spaces[w];
      for (std::size_t i = lo; i < hi; ++i) {
        const DENode& nd = nodes[start + i];
        node_values(plan, nd.u, nd.phi, ws);
        for (std::size_t c = 0; c < C; ++c) {
          const cplx weight =
              nd.weight * std::polar(nd.phi_prime, cases[c].kappa_sq * nd.phi);
          for (std::size_t t = 0; t < T; ++t) {
            const TargetPlan& tp = plan.targets[t];
            CompensatedSum s;
            for (std::size_t q = 0; q < tp.monomials.size(); ++q)
              s.add(cases[c].coef[t][q] * ws.mono[tp.monomials[q]]);
            buffer[(i * C + c) * T + t] = weight * s.value();
          }
        }
      }
    });
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t k = 0; k < C * T; ++k) {
        const cplx v = buffer[i * C * T + k];
        if (!finite(v))
          fail(ErrorKind::NonFinite,
               "integrand at u=" + std::to_string(nodes[start + i].u));
        acc[k].add(v);
      }
  }
  std::vector<std::vector<cplx>> out(C, std::vector<cplx>(T));
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t)
      out[c][t] = cplx(0.0, 1.0) * acc[c * T + t].value();
  return out;
}

NodeWindow window_for(const Plan& plan, const DEParams& params) {
  Workspace ws;
  return node_window(params, [&](double u) {
    return envelope(plan, u, params.a, params.b, ws);
  });
}

void validate_case(const PotentialRequest& req, double kappa,
                   std::size_t ncoef) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    fail(ErrorKind::InvalidArgument, "wave number must be positive");
  if (!(req.grid.h * kappa < 2.0 * std::numbers::pi))
    fail(ErrorKind::InvalidArgument,
         "mesh too coarse for the wave number: h*kappa must stay below 2*pi");
  if (ncoef != req.density.rank)
    fail(ErrorKind::InvalidArgument, "one coefficient per rank term required");
}

}  // namespace

void PotentialRequest::validate() const {
  grid.validate();
  quadrature.validate();
  const std::size_t n = grid.n();
  if (density.n != n)
    fail(ErrorKind::InvalidArgument, "density and grid dimensions differ");
  if (density.ranges.size() != n || density.table_of.size() != density.rank * n ||
      density.coefficients.size() != density.rank)
    fail(ErrorKind::InvalidArgument, "inconsistent sampled density");
  for (std::size_t p = 0; p < density.rank; ++p)
    for (std::size_t j = 0; j < n; ++j)
      if (density.values(p, j).size() != density.ranges[j].size())
        fail(ErrorKind::InvalidArgument, "sample table does not match its range");
  if (std::abs(density.h - grid.h) > 1e-15 * grid.h)
    fail(ErrorKind::InvalidArgument, "density sampled with a different h");
  validate_case(*this, kappa, density.coefficients.size());
  for (const auto& x : targets) {
    if (x.size() != n) fail(ErrorKind::InvalidArgument, "target dimension");
    for (double v : x)
      if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "target not finite");
  }
  if (!(edge_cut >= 6.0))
    fail(ErrorKind::InvalidArgument, "edge_cut below 6 loses accuracy");
}

NodeWindow engine_window(const PotentialRequest& req) {
  req.validate();
  const Plan plan = make_plan(req, req.targets);
  return window_for(plan, req.quadrature);
}

PotentialResult evaluate(const PotentialRequest& req,
                         const std::vector<KappaCase>& cases) {
  const auto t0 = std::chrono::steady_clock::now();
  req.validate();
  for (const KappaCase& c : cases) validate_case(req, c.kappa, c.coefficients.size());
  const Plan plan = make_plan(req, req.targets);
  const auto cd = case_data(plan, cases);

  PotentialResult res;
  PotentialDiagnostics& dg = res.diagnostics;
  dg.geometries = plan.geometries.size();
  dg.line_sums = plan.lines.size();
  dg.monomials = plan.monomials.size();
  if (req.targets.empty() || cases.empty()) {
    res.values.assign(cases.size(), {});
    return res;
  }

  if (req.tau_mode == TauMode::Fixed) {
    const NodeWindow w = window_for(plan, req.quadrature);
    const auto nd = make_nodes(req.quadrature, w);
    res.values = integrate_plan(plan, nd, cd, req.threads);
    dg.nodes = nd.size();
    dg.tau = w.tau;
    dg.u_min = w.u_min();
    dg.u_max = w.u_max();
    dg.tail_low = w.tail_low;
    dg.tail_high = w.tail_high;
    dg.capped = w.capped;
    dg.tau_levels = 1;
  } else {
    const AutoTau& at = req.auto_tau;
    if (!(at.start > 0.0) || !(at.floor > 0.0) || at.floor > at.start ||
        !(at.tolerance > 0.0))
      fail(ErrorKind::InvalidArgument, "invalid automatic step parameters");
    DEParams p = req.quadrature;
    p.tau = at.floor;
    const NodeWindow fine = window_for(plan, p);
    const double u_lo = fine.u_min(), u_hi = fine.u_max();
    double tau = at.start;
    std::vector<std::vector<cplx>> prev;
    dg.tau_converged = false;
    for (;;) {
      NodeWindow w = fine;
      w.tau = tau;
      w.s_min = std::min(0L, static_cast<long>(std::floor(u_lo / tau)));
      w.s_max = std::max(1L, static_cast<long>(std::ceil(u_hi / tau)));
      p.tau = tau;
      const auto nd = make_nodes(p, w);
      auto cur = integrate_plan(plan, nd, cd, req.threads);
      ++dg.tau_levels;
      dg.nodes = nd.size();
      dg.tau = tau;
      dg.u_min = w.u_min();
      dg.u_max = w.u_max();
      if (!prev.empty()) {
        double change = 0.0;
        for (std::size_t c = 0; c < cur.size(); ++c)
          for (std::size_t t = 0; t < cur[c].size(); ++t)
            change = std::max(change, std::abs(cur[c][t] - prev[c][t]));
        dg.tau_change = change;
        if (change < at.tolerance) dg.tau_converged = true;
      }
      prev = std::move(cur);
      if (dg.tau_converged || tau * 0.5 < at.floor * (1.0 - 1e-12)) break;
      tau *= 0.5;
    }
    res.values = std::move(prev);
    dg.tail_low = fine.tail_low;
    dg.tail_high = fine.tail_high;
    dg.capped = fine.capped;
  }
  dg.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::vector<cplx> box_potential(const PotentialRequest& req) {
  if (req.mode != Mode::Box)
    fail(ErrorKind::InvalidArgument, "box_potential needs mode Box");
  return evaluate(req, {{req.kappa, req.density.coefficients}}).values.at(0);
}

std::vector<cplx> fullspace_potential(const PotentialRequest& req) {
  if (req.mode != Mode::FullSpace)
    fail(ErrorKind::InvalidArgument, "fullspace_potential needs mode FullSpace");
  return evaluate(req, {{req.kappa, req.density.coefficients}}).values.at(0);
}

cplx onedim_sum(const DENode& node, std::size_t p, std::size_t j,
                double target_coord, const PotentialRequest& req) {
  if (req.mode != Mode::Box)
    fail(ErrorKind::InvalidArgument, "onedim_sum needs mode Box");
  req.validate();
  if (p >= req.density.rank || j >= req.density.n)
    fail(ErrorKind::OutOfRange, "onedim_sum index");
  const Plan plan = make_plan(req, {});
  const Geometry g{target_coord, req.grid.box.lower[j], req.grid.box.upper[j],
                   req.density.ranges[j]};
  const PsiKernel k(plan.M, plan.theta_scale * node.phi);
  std::vector<cplx> delta;
  line_delta(plan, k, g, delta);
  const auto& table = req.density.values(p, j);
  CompensatedSum s;
  for (std::size_t i = 0; i < table.size(); ++i) s.add(table[i] * delta[i]);
  const cplx v = s.value();
  if (!finite(v)) fail(ErrorKind::NonFinite, "onedim_sum");
  return v;
}

cplx b_coeff(const std::vector<long>& k, const std::vector<long>& m,
             const PotentialRequest& req) {
  if (req.mode != Mode::Box)
    fail(ErrorKind::InvalidArgument, "b_coeff needs mode Box");
  req.validate();
  const std::size_t n = req.density.n;
  if (k.size() != n || m.size() != n)
    fail(ErrorKind::InvalidArgument, "multi-index dimension");
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = req.grid.h * k[j];
  const Plan plan = make_plan(req, {x});
  const NodeWindow w = window_for(plan, req.quadrature);
  const auto nd = make_nodes(req.quadrature, w);
  const double ksq = req.kappa * req.kappa;
  CompensatedSum acc;
  for (const DENode& node : nd) {
    const PsiKernel ker(plan.M, plan.theta_scale * node.phi);
    cplx prod = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Geometry& g = plan.geometries[plan.targets[0].geometry[j]];
      const auto [pp, pq] = edge_phases(plan, g, ker.theta());
      prod *= delta_at(plan, ker, g, m[j], pp, pq);
    }
    acc.add(node.weight * std::polar(node.phi_prime, ksq * node.phi) * prod);
  }
  const cplx v = cplx(0.0, 1.0) * acc.value();
  if (!finite(v)) fail(ErrorKind::NonFinite, "b_coeff");
  return v;
}

std::vector<cplx> naive_reference(const PotentialRequest& req) {
  req.validate();
  const SampledDensity& d = req.density;
  const std::size_t n = d.n;
  if (n > 4) fail(ErrorKind::SizeGuard, "naive_reference supports n <= 4");
  std::size_t lattice = 1;
  for (const auto& r : d.ranges) {
    lattice *= std::max<std::size_t>(r.size(), 1);
    if (lattice > 1'000'000)
      fail(ErrorKind::SizeGuard, "naive_reference lattice exceeds 1e6 points");
  }
  const Plan plan = make_plan(req, req.targets);
  const NodeWindow w = window_for(plan, req.quadrature);
  const auto nd = make_nodes(req.quadrature, w);

  // Density values on the whole lattice, last dimension fastest.
  std::vector<cplx> gval(lattice);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t L = 0; L < lattice; ++L) {
    CompensatedSum s;
    for (std::size_t p = 0; p < d.rank; ++p) {
      double prod = 1.0;
      for (std::size_t j = 0; j < n; ++j) prod *= d.values(p, j)[idx[j]];
      s.add(d.coefficients[p] * prod);
    }
    gval[L] = s.value();
    for (std::size_t j = n; j-- > 0;) {
      if (++idx[j] < d.ranges[j].size()) break;
      idx[j] = 0;
    }
  }

  const double scale = std::pow(plan.inv_sqrtD, static_cast<double>(n));
  const double ksq = req.kappa * req.kappa;
  std::vector<cplx> out;
  std::vector<std::vector<cplx>> delta(n);
  for (const TargetPlan& tp : plan.targets) {
    CompensatedSum acc;
    for (const DENode& node : nd) {
      const PsiKernel ker(plan.M, plan.theta_scale * node.phi);
      for (std::size_t j = 0; j < n; ++j)
        line_delta(plan, ker, plan.geometries[tp.geometry[j]], delta[j]);
      CompensatedSum s;
      std::fill(idx.begin(), idx.end(), 0);
      for (std::size_t L = 0; L < lattice; ++L) {
        cplx prod = gval[L];
        for (std::size_t j = 0; j < n; ++j) prod *= delta[j][idx[j]];
        s.add(prod);
        for (std::size_t j = n; j-- > 0;) {
          if (++idx[j] < d.ranges[j].size()) break;
          idx[j] = 0;
        }
      }
      acc.add(node.weight * std::polar(node.phi_prime, ksq * node.phi) *
              (scale * s.value()));
    }
    out.push_back(cplx(0.0, 1.0) * acc.value());
  }
  return out;
}

}  // namespace helmvp
