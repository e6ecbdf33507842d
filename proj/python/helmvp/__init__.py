"""Helmholtz volume potentials by approximate approximations."""

from ._helmvp import (
    Error,
    convergence,
    erfc,
    exact_solution,
    faddeeva,
    gaussian_potential_3d,
    p_m,
    phi,
    psi,
    selftest,
    test_potential,
)

__all__ = [
    "Error",
    "convergence",
    "erfc",
    "exact_solution",
    "faddeeva",
    "gaussian_potential_3d",
    "p_m",
    "phi",
    "psi",
    "selftest",
    "test_potential",
]
