#include <doctest.h>

#include <cmath>

#include "helmvp/error.hpp"
#include "helmvp/quadrature.hpp"
#include "oracle/refs.hpp"

using namespace helmvp;

namespace {

DecayProbe envelope(double (*f)(double), const DEParams& p) {
  return [f, p](double u) { return std::abs(f(phi(u, p.a, p.b)) * phi_prime(u, p.a, p.b)); };
}

double exp_decay(double t) { return std::exp(-t); }
double gauss_moment(double t) { return t * std::exp(-t * t); }

double de_integral(double (*f)(double), double tau) {
  DEParams p;
  p.tau = tau;
  const auto ns = nodes(p, envelope(f, p));
  return integrate(ns, [f](const DENode& n) { return cplx(f(n.phi) * n.phi_prime); }).real();
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("phi values") {
  CHECK(phi(0.0, 6, 4) == doctest::Approx(std::exp(-24.0 + 6.0 * std::exp(-4.0))).epsilon(1e-14));
  CHECK(phi(0.0, 6, 4) == doctest::Approx(4.207e-11).epsilon(1e-3));
  CHECK(phi(0.1, 6, 4) > phi(0.0, 6, 4));
  CHECK(phi(-3.0, 6, 4) == doctest::Approx(refs::phi_m3).epsilon(1e-13));
  double prev = 0.0;
  for (double u = -3.25; u <= 1.2; u += 1e-3) {
    const double v = phi(u, 6, 4);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(phi(2.0, 6, 4), Error);
  CHECK_THROWS_AS(phi(-4.0, 6, 4), Error);  // underflows
}

TEST_CASE("phi_prime") {
  const double h = 1e-6;
  const double fd = (phi(0.3 + h, 6, 4) - phi(0.3 - h, 6, 4)) / (2 * h);
  CHECK(phi_prime(0.3, 6, 4) / fd == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(phi_prime(0.0, 6, 4) == doctest::Approx(refs::phi_prime_0).epsilon(1e-13));
  for (double u = -3.25; u <= 1.2; u += 1e-2) CHECK(phi_prime(u, 6, 4) > 0.0);
  try {
    phi_prime(2.0, 6, 4);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Overflow);
  }
}

TEST_CASE("phi_inverse") {
  for (double u = -2.0; u <= 1.0; u += 0.125)
    CHECK(phi_inverse(phi(u, 6, 4), 6, 4) == doctest::Approx(u).epsilon(1e-12));
}

TEST_CASE("window for a vanishing probe") {
  DEParams p;
  p.tau = 0.01;
  const auto ns = nodes(p, [](double) { return 0.0; });
  REQUIRE(ns.size() == 2);
  CHECK(ns[0].u == 0.0);
  CHECK(ns[1].u == doctest::Approx(0.01));
  for (const auto& n : ns) {
    CHECK(n.weight == 0.01);
    CHECK(n.phi > 0.0);
    CHECK(n.phi_prime > 0.0);
  }
}

TEST_CASE("window for a Gaussian probe") {
  DEParams p;
  p.tau = 0.01;
  const double sigma = 0.1;
  auto probe = [&](double u) { return std::exp(-u * u / (2 * sigma * sigma)); };
  const NodeWindow w = node_window(p, probe);
  CHECK(w.s_min == -w.s_max);
  CHECK(probe(w.u_min()) <= p.trunc_threshold);
  CHECK(probe(w.u_max()) <= p.trunc_threshold);
  CHECK(probe(w.u_max() - p.tau) > p.trunc_threshold);
  CHECK(probe(w.u_min() + p.tau) > p.trunc_threshold);
  CHECK(w.size() == make_nodes(p, w).size());
  CHECK_FALSE(w.capped);
}

TEST_CASE("window limits") {
  DEParams p;
  p.tau = 1e-3;
  p.max_nodes = 100;
  try {
    node_window(p, [](double) { return 1.0; });
    FAIL("expected a truncation failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TruncationFailure);
  }
  DEParams q;
  q.tau = 1e-3;
  q.t_max = 100.0;
  const NodeWindow w = node_window(q, [](double u) { return u < 0.0 ? std::exp(40.0 * u) : 1.0; });
  CHECK(w.capped);
  CHECK(phi(w.u_max(), q.a, q.b) <= 100.0);
  CHECK(phi(w.u_max() + q.tau, q.a, q.b) > 100.0);
}

TEST_CASE("parameter validation") {
  DEParams p;
  p.tau = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = DEParams{};
  p.tau = 2.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = DEParams{};
  p.trunc_threshold = 1e-6;
  CHECK_THROWS_AS(p.validate(), Error);
  p = DEParams{};
  p.a = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("integrate sums") {
  DEParams p;
  p.tau = 0.01;
  const NodeWindow w{-20, 30, 0.01};
  const auto ns = make_nodes(p, w);
  CHECK(integrate(ns, [](const DENode&) { return cplx(1.0); }).real() ==
        doctest::Approx(51 * 0.01).epsilon(1e-15));
  CHECK_THROWS_AS(integrate(ns, [](const DENode&) { return cplx(std::nan("")); }), Error);
  CHECK_THROWS_AS(integrate({}, [](const DENode&) { return cplx(1.0); }), Error);
  const cplx a = integrate(ns, [](const DENode& n) { return cplx(std::sin(n.u), n.phi); });
  const cplx b = integrate(ns, [](const DENode& n) { return cplx(std::sin(n.u), n.phi); });
  CHECK(a == b);
}

// At tau = 0.01 the trapezoid error with a=6, b=4 is 4.4e-6 (checked with
// 30-digit arithmetic), so 1e-10 there is out of reach.
TEST_CASE("known integrals at tau = 0.01" * doctest::should_fail()) {
  CHECK(std::abs(de_integral(exp_decay, 0.01) - 1.0) <= 1e-10);
  CHECK(std::abs(de_integral(gauss_moment, 0.01) - 0.5) <= 1e-10);
}

TEST_CASE("known integrals") {
  CHECK(std::abs(de_integral(exp_decay, 0.005) - 1.0) <= 1e-10);
  CHECK(std::abs(de_integral(exp_decay, 0.002) - 1.0) <= 1e-14);
  CHECK(std::abs(de_integral(gauss_moment, 0.002) - 0.5) <= 1e-14);
  CHECK(std::abs(de_integral(exp_decay, 1e-4) - 1.0) <= 1e-14);
}

TEST_CASE("step halving from tau = 0.05" * doctest::should_fail()) {
  for (double tau = 0.05; tau > 0.003; tau /= 2)
    CHECK(std::abs(de_integral(exp_decay, tau) - de_integral(exp_decay, tau / 2)) < 1e-12);
}

TEST_CASE("step halving once the map is resolved") {
  for (double tau = 0.0025; tau > 1e-4; tau /= 2) {
    CHECK(std::abs(de_integral(exp_decay, tau) - de_integral(exp_decay, tau / 2)) < 1e-12);
    CHECK(std::abs(de_integral(gauss_moment, tau) - de_integral(gauss_moment, tau / 2)) < 1e-12);
  }
}

TEST_CASE("compensated sum") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(cplx(1e-16, -1e-16));
  s.add(-1.0);
  CHECK(s.value().real() == doctest::Approx(1e-13).epsilon(1e-12));
  CHECK(s.value().imag() == doctest::Approx(-1e-13).epsilon(1e-12));
}

}  // TEST_SUITE
