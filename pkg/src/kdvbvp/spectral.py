"""Dispersion polynomial and root-structure toolkit.

Given flow coefficients C_0..C_s the dispersion polynomial is

    phi(rho) = (1/2) rho sum_nu C_nu (2 rho^2)^nu
             = 4^s rho prod_nu (rho^2 - d_nu),      d_nu = -delta_nu^2 < 0,

its square in lambda = rho^2 is f(lambda) = 16^s lambda prod (lambda-d_nu)^2,
and the restriction of phi to the imaginary axis is the real odd function

    Phi(xi) = -i phi(i xi) = 4^s xi prod (delta_nu^2 - xi^2).

From a level mu in (mu_minus, 0) the module extracts the 2s+1 real roots
0 > c_0 > c_1 > c'_1 > ... > c_s > c'_s of f(lambda) = mu, the denominator
polynomial g(lambda) = 4^s prod (lambda - c_nu), the boundary constants a_n,
and the 2s+1 branch functions xi_j(eta) solving Phi(xi) = eta.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import Assumption1Error, EtaOutOfRangeError, MuOutOfRangeError, NormalizationError

_NEWTON_TOL = 1e-13


@dataclass(frozen=True)
class FlowCoefficients:
    """Coefficients C_0..C_s of the flow combination, C_s != 0."""

    C: tuple[float, ...]

    def __init__(self, C):
        object.__setattr__(self, "C", tuple(float(c) for c in C))
        if len(self.C) < 2:
            raise Assumption1Error("need s >= 1, i.e. at least two coefficients")
        if self.C[-1] == 0.0:
            raise Assumption1Error("leading coefficient C_s must be nonzero")

    @property
    def s(self) -> int:
        return len(self.C) - 1

    def phi_coeffs(self) -> np.ndarray:
        """Coefficients of phi(rho) in rho, ascending; only odd powers occur."""
        s = self.s
        out = np.zeros(2 * s + 2)
        for nu, c in enumerate(self.C):
            out[2 * nu + 1] = 0.5 * c * 2.0**nu
        return out

    def phi(self, rho):
        return np.polynomial.polynomial.polyval(rho, self.phi_coeffs())


def _polish(func, dfunc, x, tol=_NEWTON_TOL):
    """A few guarded Newton steps to tighten a bracketed root."""
    for _ in range(8):
        d = dfunc(x)
        if d == 0.0:
            break
        step = func(x) / d
        x -= step
        if abs(step) <= tol * max(1.0, abs(x)):
            break
    return x


def build_phi(coeffs: FlowCoefficients):
    """Validate the factorized form of phi; return (d, delta), delta increasing.

    Requires the leading coefficient of phi to be 4^s (the normalization the
    factorized form silently assumes, i.e. C_s = 2^(s+1)) and all roots d_nu
    of the even factor to be real, negative and distinct.
    """
    s = coeffs.s
    lead = 0.5 * coeffs.C[-1] * 2.0**s
    if not math.isclose(lead, 4.0**s, rel_tol=1e-12):
        raise NormalizationError(
            f"leading coefficient of phi is {lead:g}, expected 4^{s} = {4.0 ** s:g} "
            f"(C_s must equal 2^{s + 1})"
        )
    # even factor in lambda = rho^2: phi/rho = 4^s prod (lambda - d_nu)
    lam_coeffs = np.array([0.5 * c * 2.0**nu for nu, c in enumerate(coeffs.C)])
    roots = np.roots(lam_coeffs[::-1])
    if np.any(np.abs(roots.imag) > 1e-9 * np.maximum(1.0, np.abs(roots.real))):
        raise Assumption1Error(f"complex roots of the even factor: {roots}")
    d = np.sort(roots.real)  # ascending: d_s < ... < d_1 < 0
    if np.any(d >= 0.0):
        raise Assumption1Error(f"nonnegative root d = {d[d >= 0.0]}")
    if np.any(np.diff(d) < 1e-12 * np.abs(d[:-1])):
        raise Assumption1Error("repeated roots of the even factor")
    d = d[::-1]  # d_1 > d_2 > ... > d_s (so delta increasing)
    delta = np.sqrt(-d)
    return d, delta


@dataclass(frozen=True)
class SpectralSetup:
    """All mu-level spectral data derived from the flow coefficients."""

    coeffs: FlowCoefficients
    mu_star: float
    d: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    mu_minus: float = 0.0
    c0: float = 0.0
    c: np.ndarray = None
    cprime: np.ndarray = None
    a: np.ndarray = None

    @property
    def s(self) -> int:
        return self.coeffs.s

    @property
    def kappa_star(self) -> float:
        return math.sqrt(-self.mu_star)

    @property
    def gamma0(self) -> float:
        return math.sqrt(-self.c0)

    @property
    def gamma(self) -> np.ndarray:
        return np.sqrt(-self.c)

    @property
    def gammaprime(self) -> np.ndarray:
        return np.sqrt(-self.cprime)

    # -- polynomial evaluators ---------------------------------------------

    def f_eval(self, lam):
        """f(lambda) = 16^s lambda prod (lambda - d_nu)^2."""
        lam = np.asarray(lam, dtype=float)
        out = 16.0**self.s * lam
        for dn in self.d:
            out = out * (lam - dn) ** 2
        return out[()] if out.ndim == 0 else out

    def f_prime(self, lam):
        prod = np.prod(lam - self.d)
        dsum = sum(np.prod(np.delete(lam - self.d, i)) for i in range(self.s))
        return 16.0**self.s * prod * (prod + 2.0 * lam * dsum)

    def phi_imag(self, xi):
        """Phi(xi) = -i phi(i xi) = 4^s xi prod (delta_nu^2 - xi^2)."""
        xi = np.asarray(xi, dtype=float)
        out = 4.0**self.s * xi
        for dl in self.delta:
            out = out * (dl**2 - xi**2)
        return out[()] if out.ndim == 0 else out

    def phi_imag_prime(self, xi):
        terms = self.delta**2 - xi**2
        prod = np.prod(terms)
        dsum = sum(np.prod(np.delete(terms, i)) for i in range(self.s))
        return 4.0**self.s * (prod - 2.0 * xi**2 * dsum)

    def g_eval(self, lam):
        """g(lambda) = 4^s prod (lambda - c_nu)."""
        lam = np.asarray(lam, dtype=float)
        out = np.full_like(lam, 4.0**self.s, dtype=float)
        for cn in self.c:
            out = out * (lam - cn)
        return out[()] if out.ndim == 0 else out

    def g_prime(self, lam):
        return 4.0**self.s * sum(
            np.prod(np.delete(lam - self.c, i)) for i in range(self.s)
        )

    # -- branch functions ---------------------------------------------------

    def xi_roots(self, eta: float) -> np.ndarray:
        """The 2s+1 solutions xi_j(eta) of Phi(xi) = eta, j = -s..s ascending.

        Brackets: xi_0 in (-gamma0, gamma0), xi_j in (gamma_j, gamma'_j),
        xi_{-j} in (-gamma'_j, -gamma_j); valid for |eta| < kappa_star.
        """
        if abs(eta) >= self.kappa_star:
            raise EtaOutOfRangeError(
                f"|eta| = {abs(eta):g} >= kappa* = {self.kappa_star:g}"
            )
        brackets = [(-self.gammaprime[j], -self.gamma[j]) for j in range(self.s - 1, -1, -1)]
        brackets.append((-self.gamma0, self.gamma0))
        brackets += [(self.gamma[j], self.gammaprime[j]) for j in range(self.s)]
        roots = []
        for lo, hi in brackets:
            func = lambda x: self.phi_imag(x) - eta
            root = brentq(func, lo, hi, xtol=1e-6)
            root = _polish(func, self.phi_imag_prime, root)
            roots.append(root)
        return np.array(roots)

    # -- export -------------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "s": self.s,
            "C": list(self.coeffs.C),
            "d": [float(x) for x in self.d],
            "delta": [float(x) for x in self.delta],
            "mu_minus": self.mu_minus,
            "mu_star": self.mu_star,
            "c0": self.c0,
            "c": [float(x) for x in self.c],
            "cprime": [float(x) for x in self.cprime],
            "gamma": [float(x) for x in self.gamma],
            "gamma0": self.gamma0,
            "gammaprime": [float(x) for x in self.gammaprime],
            "kappa_star": self.kappa_star,
            "a": [float(x) for x in self.a],
        }

    def to_json(self) -> str:
        doc = self.to_json_obj()
        return json.dumps(
            {k: (v if not isinstance(v, float) else float(f"{v:.15g}")) for k, v in doc.items()},
            indent=2,
        )


def mu_minus_of(d: np.ndarray, s: int) -> float:
    """Infimum of levels mu for which f(lambda) = mu keeps all roots real.

    On the negative axis f has a local minimum in each gap between
    consecutive members of {d_s < ... < d_1 < 0}; the binding level is the
    largest of those minimum values.
    """
    # f'(lambda) / 16^s = prod(lam-d) * (prod(lam-d) + 2 lam sum_i prod_{j!=i})
    prod_poly = np.polynomial.Polynomial.fromroots(d)
    dsum = prod_poly.deriv()
    fprime = prod_poly * (prod_poly + np.polynomial.Polynomial([0.0, 2.0]) * dsum)
    crit = fprime.roots()
    crit = np.sort(crit[np.abs(crit.imag) < 1e-9].real)
    f = lambda lam: 16.0**s * lam * np.prod((lam - d) ** 2)
    minima = []
    d_sorted = np.sort(d)  # ascending
    walls = np.concatenate([d_sorted, [0.0]])
    for lo, hi in zip(walls[:-1], walls[1:]):
        inside = crit[(crit > lo + 1e-14) & (crit < hi - 1e-14)]
        if len(inside) == 0:
            raise MuOutOfRangeError("no critical point in a negative-axis gap")
        minima.append(min(f(x) for x in inside))
    return float(max(minima))


def roots_c(setup_d: np.ndarray, s: int, mu: float, mu_minus: float):
    """The 2s+1 real roots of f(lambda) = mu, descending, for mu in (mu_minus, 0).

    Returns (c0, c, cprime) with c0 > c_1 > c'_1 > ... > c_s > c'_s and the
    sign checks f'(c_nu) < 0, f'(c0) > 0, f'(c'_nu) > 0.
    """
    if not (mu_minus < mu < 0.0):
        raise MuOutOfRangeError(f"mu = {mu:g} outside ({mu_minus:g}, 0)")

    def f(lam):
        return 16.0**s * lam * np.prod((lam - setup_d) ** 2)

    def fp(lam):
        prod = np.prod(lam - setup_d)
        dsum = sum(np.prod(np.delete(lam - setup_d, i)) for i in range(s))
        return 16.0**s * prod * (prod + 2.0 * lam * dsum)

    func = lambda lam: f(lam) - mu
    prod_poly = np.polynomial.Polynomial.fromroots(setup_d)
    fprime = prod_poly * (prod_poly + np.polynomial.Polynomial([0.0, 2.0]) * prod_poly.deriv())
    crit = fprime.roots()
    crit = np.sort(crit[np.abs(crit.imag) < 1e-9].real)
    walls = np.concatenate([np.sort(setup_d), [0.0]])  # d_s < ... < d_1 < 0

    roots = []
    # single crossing on the branch descending to -infinity, left of d_s
    lo = walls[0] - 1.0
    while func(lo) > 0.0:
        lo = walls[0] - 2.0 * (walls[0] - lo)
    roots.append(brentq(func, lo, walls[0] - 1e-15))
    # two crossings per gap, split at the interior valley minimum where f < mu
    for w_lo, w_hi in zip(walls[:-1], walls[1:]):
        inside = crit[(crit > w_lo + 1e-14) & (crit < w_hi - 1e-14)]
        x_min = min(inside, key=f)
        roots.append(brentq(func, w_lo + 1e-15, x_min))
        roots.append(brentq(func, x_min, w_hi - 1e-15))
    roots = sorted((_polish(func, fp, r) for r in roots), reverse=True)
    if len(roots) != 2 * s + 1:
        raise MuOutOfRangeError(f"found {len(roots)} real roots, expected {2 * s + 1}")
    c0 = roots[0]
    c = np.array(roots[1::2])
    cprime = np.array(roots[2::2])
    if fp(c0) <= 0.0 or any(fp(x) >= 0.0 for x in c) or any(fp(x) <= 0.0 for x in cprime):
        raise MuOutOfRangeError("root labelling violates the sign convention")
    return c0, c, cprime


def boundary_constants(d: np.ndarray, c: np.ndarray, n_max: int) -> np.ndarray:
    """Constants a_n from prod (lam-d)/(lam-c) = 1 + sum (-1)^n a_n / lam^n.

    Computed by power-series division in u = 1/lambda.
    """
    num = np.array([1.0])
    den = np.array([1.0])
    for dn in d:
        num = np.convolve(num, [1.0, -dn])[: n_max + 1]
    for cn in c:
        den = np.convolve(den, [1.0, -cn])[: n_max + 1]
    num = np.pad(num, (0, n_max + 1 - len(num)))
    den = np.pad(den, (0, n_max + 1 - len(den)))
    series = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        series[n] = (num[n] - np.dot(series[:n], den[n:0:-1])) / den[0]
    signs = np.array([(-1.0) ** n for n in range(1, n_max + 1)])
    return series[1:] * signs


def build_setup(coeffs: FlowCoefficients, mu_star: float, n_max: int | None = None) -> SpectralSetup:
    """Assemble the full spectral setup at level mu_star."""
    d, delta = build_phi(coeffs)
    s = coeffs.s
    mu_minus = mu_minus_of(d, s)
    c0, c, cprime = roots_c(d, s, mu_star, mu_minus)
    a = boundary_constants(d, c, n_max if n_max is not None else s + 1)
    return SpectralSetup(
        coeffs=coeffs,
        mu_star=float(mu_star),
        d=d,
        delta=delta,
        mu_minus=mu_minus,
        c0=c0,
        c=c,
        cprime=cprime,
        a=a,
    )
