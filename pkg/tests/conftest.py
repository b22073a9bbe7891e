"""Shared fixtures and independent numerical oracles."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from kdvbvp import (
    FlowCoefficients,
    ProblemConfig,
    SolitonData,
    build_setup,
    potential_jet,
)


@pytest.fixture(scope="session")
def setup_s1():
    return build_setup(FlowCoefficients([8.0, 4.0]), -1.0)


@pytest.fixture(scope="session")
def setup_s2():
    # phi(rho) = 16 rho (rho^2 + 1)(rho^2 + 4)
    return build_setup(FlowCoefficients([128.0, 80.0, 8.0]), -1.0)


def midpoint_w0(setup, mu_lower, seed):
    """w0 at the midpoint of the admissible t=0 bracket."""
    probe = object.__new__(ProblemConfig)
    object.__setattr__(probe, "setup", setup)
    object.__setattr__(probe, "mu_lower", mu_lower)
    object.__setattr__(probe, "seed", seed)
    object.__setattr__(probe, "w0", 0.0)
    lo, hi = probe.w_bracket(0.0)
    return 0.5 * (lo + hi)


def make_problem(setup, mu_lower, seed, frac=0.5):
    probe = object.__new__(ProblemConfig)
    object.__setattr__(probe, "setup", setup)
    object.__setattr__(probe, "mu_lower", mu_lower)
    object.__setattr__(probe, "seed", seed)
    object.__setattr__(probe, "w0", 0.0)
    lo, hi = probe.w_bracket(0.0)
    return ProblemConfig(
        setup=setup, mu_lower=mu_lower, seed=seed, w0=lo + frac * (hi - lo)
    )


@pytest.fixture(scope="session")
def cfg_s1_n0(setup_s1):
    return make_problem(setup_s1, -0.5, SolitonData())


@pytest.fixture(scope="session")
def cfg_s1_n1(setup_s1):
    return make_problem(setup_s1, -0.5, SolitonData([0.6], [1.2]))


# -- oracles -----------------------------------------------------------------


def shoot_jost_plus(data: SolitonData, x: float, rho: complex, x_far: float = 25.0):
    """(e+, e+') by integrating -y'' + q y = rho^2 y from the far right."""

    def rhs(t, y):
        q = potential_jet(data, t, 0)[0]
        return [y[1], (q - rho * rho) * y[0]]

    y0 = [np.exp(1j * rho * x_far), 1j * rho * np.exp(1j * rho * x_far)]
    sol = solve_ivp(rhs, (x_far, x), np.array(y0, dtype=complex),
                    rtol=1e-11, atol=1e-13, method="DOP853")
    return sol.y[0, -1], sol.y[1, -1]


def shoot_jost_minus(data: SolitonData, x: float, rho: complex, x_far: float = 25.0):
    """(e-, e-') by integrating from the far left (e- ~ e^{i rho x}, x -> -inf)."""

    def rhs(t, y):
        q = potential_jet(data, t, 0)[0]
        return [y[1], (q - rho * rho) * y[0]]

    y0 = [np.exp(-1j * rho * x_far), 1j * rho * np.exp(-1j * rho * x_far)]
    sol = solve_ivp(rhs, (-x_far, x), np.array(y0, dtype=complex),
                    rtol=1e-11, atol=1e-13, method="DOP853")
    return sol.y[0, -1], sol.y[1, -1]


def fd_jet(data: SolitonData, x: float, order: int, h: float = 1e-2):
    """Derivative tower by repeated central differences on q values (oracle)."""
    ks = np.arange(-order, order + 1)
    vals = np.array([potential_jet(data, x + k * h, 0)[0] for k in ks])
    out = [vals[order]]
    cur = vals
    for _ in range(order):
        cur = (cur[2:] - cur[:-2]) / (2.0 * h)
        out.append(cur[len(cur) // 2])
    return np.array(out)


def count_real_roots(poly_coeffs, tol=1e-7):
    """Number of real roots of a numpy Polynomial coefficient array."""
    roots = np.polynomial.polynomial.polyroots(poly_coeffs)
    scale = max(1.0, float(np.max(np.abs(roots))) if len(roots) else 1.0)
    return int(np.sum(np.abs(roots.imag) <= tol * scale))
