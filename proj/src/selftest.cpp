#include "helmvp/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "helmvp/basis.hpp"
#include "helmvp/potential.hpp"

namespace helmvp {
namespace {

class Checker {
 public:
  explicit Checker(std::string name) { m_.name = std::move(name); }

  // |got - want| <= tol max(1, |want|), or tol |want| when relative.
  void near(const std::string& what, cplx got, cplx want, double tol,
            bool relative = false) {
    const double scale = relative ? std::abs(want) : std::max(1.0, std::abs(want));
    const double err = std::abs(got - want) / scale;
    if (err <= tol) {
      ++m_.passed;
      return;
    }
    ++m_.failed;
    char buf[96];
    std::snprintf(buf, sizeof buf, ": deviation %.3e > %.1e", err, tol);
    m_.failures.push_back(what + buf);
  }

  template <class F>
  void guarded(const std::string& what, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      ++m_.failed;
      m_.failures.push_back(what + ": " + e.what());
    }
  }

  SelftestModule take() { return std::move(m_); }

 private:
  SelftestModule m_;
};

SelftestModule check_specfun() {
  Checker c("specfun");
  c.guarded("faddeeva", [&] {
    c.near("W(0)", faddeeva(0.0).value, 1.0, 1e-15);
    for (double x = -3.0; x <= 3.0; x += 0.75)
      for (double y = -2.0; y <= 2.0; y += 0.5) {
        const cplx z(x, y);
        c.near("W(z)+W(-z)", faddeeva(z).value + faddeeva(-z).value,
               2.0 * std::exp(-z * z), 1e-12);
      }
    for (double y = 0.0; y <= 5.0; y += 0.5)
      c.near("W(iy)", faddeeva(cplx(0.0, y)).value,
             std::exp(y * y) * std::erfc(y), 1e-12);
    for (double x = 0.0; x <= 5.0; x += 0.5)
      c.near("Re W(x)", faddeeva(x).value.real(), std::exp(-x * x), 1e-13);
  });
  c.guarded("hermite", [&] {
    for (double x = -2.0; x <= 2.0; x += 0.5) {
      const cplx z(x, 0.3);
      c.near("H_4", hermite(4, z), 16.0 * std::pow(z, 4) - 48.0 * z * z + 12.0, 1e-13);
    }
  });
  c.guarded("binomial", [&] {
    for (unsigned n = 1; n <= 40; ++n)
      for (unsigned k = 1; k < n; ++k)
        c.near("Pascal", double(binomial(n, k)),
               double(binomial(n - 1, k - 1) + binomial(n - 1, k)), 0.0);
  });
  return c.take();
}

SelftestModule check_basis() {
  Checker c("basis");
  c.guarded("moments", [&] {
    // The trapezoid rule is spectrally accurate for these Gaussians.
    for (int M = 1; M <= 4; ++M)
      for (int k = 0; k < M; ++k) {
        double s = 0.0;
        const double dx = 0.05;
        for (int i = -240; i <= 240; ++i) {
          const double x = i * dx;
          s += std::pow(x, 2 * k) * eta_2m(M, x);
        }
        c.near("moment", s * dx, k == 0 ? 1.0 : 0.0, 1e-10);
      }
  });
  c.guarded("full line", [&] {
    for (int M = 1; M <= 4; ++M)
      for (double theta : {0.05, 1.0, 30.0}) {
        const PsiKernel k(M, theta);
        for (double x : {-1.0, 0.0, 0.7}) {
          const cplx d = psi_stable(M, {x, theta, -10.0}) - psi_stable(M, {x, theta, 10.0});
          c.near("Psi(-Y)-Psi(Y)", d, k.full_line(x), 1e-12);
        }
      }
  });
  c.guarded("closed form", [&] {
    for (int M = 1; M <= 4; ++M)
      for (double theta : {0.5, 2.0, 8.0})
        for (double x : {-0.8, 0.3})
          for (double y : {-0.6, 0.4, 1.1}) {
            const PsiArgs a{x, theta, y};
            const cplx t(0.0, theta);
            const cplx F = f_arg(a);
            const cplx ref = std::exp(-x * x / (1.0 + t)) / (2.0 * std::sqrt(std::numbers::pi)) *
                             (erfc_complex(F) * p_m(M, x, t) -
                              std::exp(-F * F) * std::numbers::inv_sqrtpi * q_m(M, a));
            c.near("psi_stable", psi_stable(M, a), ref, 1e-11);
          }
  });
  return c.take();
}

SelftestModule check_quadrature() {
  Checker c("quadrature");
  c.guarded("trapezoid", [&] {
    DEParams p;
    p.tau = 1e-3;
    const auto ex = nodes(p, [&](double u) {
      const double t = phi(u, p.a, p.b);
      return std::exp(-t) * phi_prime(u, p.a, p.b);
    });
    c.near("int e^-t", integrate(ex, [](const DENode& n) { return cplx(std::exp(-n.phi) * n.phi_prime); }),
           1.0, 1e-10);
    const auto sq = nodes(p, [&](double u) {
      const double t = phi(u, p.a, p.b);
      return std::exp(-t) / std::sqrt(t) * phi_prime(u, p.a, p.b);
    });
    c.near("int t^-1/2 e^-t",
           integrate(sq, [](const DENode& n) { return cplx(std::exp(-n.phi) / std::sqrt(n.phi) * n.phi_prime); }),
           std::sqrt(std::numbers::pi), 1e-10);
  });
  c.guarded("inverse", [&] {
    for (double u = -2.0; u <= 1.0; u += 0.25)
      c.near("phi_inverse", phi_inverse(phi(u, 6, 4), 6, 4), u, 1e-12);
  });
  return c.take();
}

SelftestModule check_potential(unsigned threads) {
  Checker c("potential");
  c.guarded("naive", [&] {
    for (int M = 1; M <= 3; ++M) {
      PotentialRequest req;
      req.M = M;
      req.kappa = 2.0;
      req.grid.h = 0.25;
      req.grid.r = 2.0;
      req.grid.box = Box::cube(3, -1.0, 1.0);
      req.density = sample(helmholtz_test_density(3, 4.0), req.grid);
      req.targets = {{0.2, 0.0, 0.0}, {0.5, -0.25, 1.3}};
      req.quadrature.tau = 0.02;
      req.threads = threads;
      const auto fast = box_potential(req);
      const auto slow = naive_reference(req);
      for (std::size_t t = 0; t < fast.size(); ++t)
        c.near("box vs naive", fast[t], slow[t], 1e-12, true);
    }
  });
  return c.take();
}

}  // namespace

std::vector<SelftestModule> run_selftest(unsigned threads) {
  return {check_specfun(), check_basis(), check_quadrature(), check_potential(threads)};
}

}  // namespace helmvp
