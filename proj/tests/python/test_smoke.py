import cmath
import math

import pytest

import helmvp


def test_faddeeva_at_i():
    assert abs(helmvp.faddeeva(1j) - math.e * math.erfc(1)) < 1e-15


def test_erfc_real_axis():
    for x in (-2.0, -0.3, 0.0, 0.7, 3.0):
        assert abs(helmvp.erfc(complex(x)) - math.erfc(x)) <= 1e-15 * max(1.0, math.erfc(x))


def test_psi_limits():
    # Psi vanishes for y -> +inf and reaches the full-line value for y -> -inf.
    M, x, th = 2, 0.3, 0.8
    full = helmvp.p_m(M, x, 1j * th) * cmath.exp(-x * x / (1 + 1j * th)) / math.sqrt(math.pi)
    assert abs(helmvp.psi(M, x, th, 40.0)) < 1e-14
    assert abs(helmvp.psi(M, x, th, -40.0) - full) < 1e-14


def test_phi_is_increasing():
    vals = [helmvp.phi(u) for u in (-1.0, 0.0, 0.5, 1.0)]
    assert vals == sorted(vals) and vals[0] > 0


def test_exact_solution():
    w = lambda t: (t * t - 1) ** 2 * math.exp(t)
    assert helmvp.exact_solution([0.2, 0.0, 0.0]) == pytest.approx(w(0.2) * w(0) ** 2, rel=1e-15)
    assert helmvp.exact_solution([1.5, 0.0, 0.0]) == 0.0


def test_potential_error_level():
    # kappa^2 = 1, M = 3, h = 1/10 at (0.2, 0, 0): published error 1.12e-4.
    x = [0.2, 0.0, 0.0]
    err = abs(helmvp.test_potential(3, 1.0, 3, 0.1, [x], tau=2e-5)[0] - helmvp.exact_solution(x))
    assert 1.12e-4 / 3 <= err <= 1.12e-4 * 3


def test_convergence_rows():
    rows = helmvp.convergence(3, 1.0, 1, [5, 10], tau=2e-5)
    assert [r["inv_h"] for r in rows] == [5, 10]
    assert rows[0]["rate"] is None
    assert abs(rows[1]["rate"] - 2.18) < 0.05


def test_errors_are_raised():
    with pytest.raises(helmvp.Error):
        helmvp.psi(9, 0.0, 1.0, 0.0)
    with pytest.raises(helmvp.Error):
        helmvp.gaussian_potential_3d([0.0, 0.0], 1.0)


def test_selftest():
    res = helmvp.selftest()
    assert res and all(failed == 0 for _, failed in res.values())
