"""Reflectionless potential engine.

A potential is parametrized by eigenvalue parameters kappa_k (eigenvalues
-kappa_k^2) and positive Gram constants g_k entering the determinant formula

    q(x) = -2 (d^2/dx^2) ln det(I + G(x)),
    G_jk = sqrt(g_j g_k) exp(-(kappa_j+kappa_k) x) / (kappa_j + kappa_k).

The module computes derivative jets of q, the Jost solutions and their
x-derivatives in closed form, the rational Weyl function (poles i*xi_k on the
imaginary segment with positive weights), the eigenvalue classification by
pole pairing, and the normalizing constants with their conversion back to
Gram constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    CapExceededError,
    GlueMismatchError,
    PoleWeightError,
    RootCountError,
    RoundTripError,
    SignPatternError,
)
from .taylor import Series

MAX_SOLITONS = 12
_GLUE_TOL = 1e-9


@dataclass(frozen=True)
class SolitonData:
    """Eigenvalue parameters (increasing) and positive Gram constants."""

    kappa: tuple[float, ...]
    g: tuple[float, ...]

    def __init__(self, kappa=(), g=()):
        kappa = tuple(float(k) for k in kappa)
        g = tuple(float(x) for x in g)
        if len(kappa) != len(g):
            raise ValueError("kappa and g must have equal length")
        if len(kappa) > MAX_SOLITONS:
            raise CapExceededError(f"n = {len(kappa)} exceeds cap {MAX_SOLITONS}")
        if any(k <= 0 for k in kappa) or any(x <= 0 for x in g):
            raise ValueError("kappa and g must be positive")
        if any(b <= a for a, b in zip(kappa, kappa[1:])):
            raise ValueError("kappa must be strictly increasing")
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "g", g)

    @property
    def n(self) -> int:
        return len(self.kappa)

    def shift(self, T: float) -> "SolitonData":
        """Data of the translated potential q(. + T)."""
        return SolitonData(self.kappa, [g * math.exp(-2.0 * k * T) for k, g in zip(self.kappa, self.g)])

    def reflected(self) -> "SolitonData":
        """Data of the mirrored potential q(-x).

        The left Gram constants follow the standard two-sided relation
        g~_k = (2 kappa_k)^2 / g_k * prod_{j!=k} ((kappa_k+kappa_j)/(kappa_k-kappa_j))^2,
        validated against the Jost-asymptotics shooting oracle in the tests.
        """
        kap = np.array(self.kappa)
        g_ref = []
        for k in range(self.n):
            ratio = 1.0
            for j in range(self.n):
                if j != k:
                    ratio *= ((kap[k] + kap[j]) / (kap[k] - kap[j])) ** 2
            g_ref.append((2.0 * kap[k]) ** 2 / self.g[k] * ratio)
        return SolitonData(self.kappa, g_ref)

    def to_json_obj(self):
        return [{"kappa": k, "g": g} for k, g in zip(self.kappa, self.g)]

    @staticmethod
    def from_json_obj(obj) -> "SolitonData":
        pairs = sorted(((item["kappa"], item["g"]) for item in obj), key=lambda p: p[0])
        return SolitonData([p[0] for p in pairs], [p[1] for p in pairs])


# -- potential values and jets ---------------------------------------------


@lru_cache(maxsize=64)
def _tau_terms(data: SolitonData) -> tuple[np.ndarray, np.ndarray]:
    """Exponents and log-coefficients of the determinant expansion.

    det(I + G(x)) = sum over index subsets S of the principal minors of the
    Cauchy-type Gram matrix, each of which has the closed product form

        det G_S(x) = prod_{j in S} g_j e^{-2 kappa_j x} / (2 kappa_j)
                     * prod_{j<k in S} ((kappa_j-kappa_k)/(kappa_j+kappa_k))^2.

    Every factor is positive, so the expansion is free of cancellation even
    when the kappa cluster and the straightforward determinant is hopelessly
    ill conditioned.  Returns (K_S, log c_S) with tau = sum c_S e^(-2 K_S x).
    """
    n = data.n
    kap = data.kappa
    log_single = [math.log(g) - math.log(2.0 * k) for k, g in zip(kap, data.g)]
    log_pair = [
        [
            2.0 * (math.log(abs(kap[i] - kap[j])) - math.log(kap[i] + kap[j]))
            if i != j
            else 0.0
            for j in range(n)
        ]
        for i in range(n)
    ]
    size = 1 << n
    Ksum = np.zeros(size)
    logc = np.zeros(size)
    for mask in range(1, size):
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        acc = logc[rest] + log_single[i]
        j_mask = rest
        while j_mask:
            j = (j_mask & -j_mask).bit_length() - 1
            acc += log_pair[i][j]
            j_mask ^= 1 << j
        logc[mask] = acc
        Ksum[mask] = Ksum[rest] + kap[i]
    return Ksum, logc


def potential_jet(data: SolitonData, x: float, order: int) -> np.ndarray:
    """Derivative tower [q(x), q'(x), ..., q^(order)(x)].

    The tau function is evaluated through its cancellation-free subset
    expansion (normalized in log space, so the affine-in-x overall factor
    that the second log-derivative kills anyway never overflows); the jet of
    q is -2 times the second derivative of the log-tau Taylor series.
    """
    if data.n == 0:
        return np.zeros(order + 1)
    K = order + 2
    Ksum, logc = _tau_terms(data)
    t = logc - 2.0 * Ksum * x
    t -= t.max()
    p = np.exp(t)
    # factor out the weighted-mean exponential rate: the second
    # log-derivative is blind to it, and centering keeps the Taylor
    # coefficients of tau small so the log recurrence does not cancel
    rates = -2.0 * (Ksum - float(np.sum(p * Ksum) / np.sum(p)))
    coeffs = np.empty(K + 1)
    coeffs[0] = p.sum()
    for k in range(1, K + 1):
        p *= rates / k
        coeffs[k] = p.sum()
    logtau = Series(coeffs).log()
    return -2.0 * logtau.deriv().deriv().derivatives()[: order + 1]


def potential_grid(data: SolitonData, xs, order: int) -> np.ndarray:
    """Jets over a grid; shape (len(xs), order+1)."""
    return np.array([potential_jet(data, float(x), order) for x in xs])


# -- Jost solutions ---------------------------------------------------------


def jost_plus(data: SolitonData, x: float, rho) -> tuple[complex, complex]:
    """(e+(x, rho), d/dx e+(x, rho)) for Im rho >= 0 (also valid off-axis)."""
    if data.n == 0:
        e = np.exp(1j * rho * x)
        return e, 1j * rho * e
    kap = np.array(data.kappa)
    m = np.sqrt(np.array(data.g))
    v = m * np.exp(-kap * x)
    A = np.eye(data.n) + np.outer(v, v) / np.add.outer(kap, kap)
    phi = np.linalg.solve(A, v)
    dv = -kap * v
    dA = -np.outer(v, v)
    dphi = np.linalg.solve(A, dv - dA @ phi)
    denom = kap - 1j * np.asarray(rho)
    u = 1.0 - np.sum(phi * v / denom)
    du = -np.sum((dphi * v + phi * dv) / denom)
    e = np.exp(1j * rho * x)
    return e * u, e * (1j * rho * u + du)


def jost_minus(data: SolitonData, x: float, rho) -> tuple[complex, complex]:
    """(e-(x, rho), d/dx e-(x, rho)) via the mirrored potential."""
    val, der = jost_plus(data.reflected(), -x, -rho)
    return val, -der


# -- Weyl function ----------------------------------------------------------


@dataclass(frozen=True)
class DiscreteWeylFunction:
    """m(rho) = i rho + i sum w_k / (rho - i xi_k) with positive weights."""

    xi: np.ndarray
    w: np.ndarray

    def __init__(self, xi, w):
        xi = np.asarray(xi, dtype=float)
        w = np.asarray(w, dtype=float)
        order = np.argsort(xi)
        object.__setattr__(self, "xi", xi[order])
        object.__setattr__(self, "w", w[order])
        if np.any(self.w <= 0.0):
            raise PoleWeightError(f"nonpositive weights: {self.w[self.w <= 0.0]}")
        if len(xi) > 1 and np.min(np.diff(self.xi)) < 1e-11 * max(1.0, np.max(np.abs(self.xi))):
            from .errors import PoleCollisionError

            raise PoleCollisionError("coincident poles in the Weyl function")

    @property
    def n(self) -> int:
        return len(self.xi)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=complex)
        out = 1j * rho
        for xi, w in zip(self.xi, self.w):
            out = out + 1j * w / (rho - 1j * xi)
        return out[()] if out.ndim == 0 else out

    def at_imag(self, kappa: float) -> float:
        """m(i kappa) = -kappa + sum w_k / (kappa - xi_k), real for real kappa."""
        return -kappa + float(np.sum(self.w / (kappa - self.xi)))

    def b_n(self, n: int) -> float:
        """Laurent coefficient b_n = (-1)^n sum_k w_k xi_k^(n-1)."""
        return (-1.0) ** n * float(np.sum(self.w * self.xi ** (n - 1)))


def weyl_function(data: SolitonData, check_glue: bool = True) -> DiscreteWeylFunction:
    """Partial-fraction data of the Weyl-Marchenko function of the potential.

    The x=0 values of e+ and its derivative are rational in rho; on the
    imaginary axis rho = i xi they reduce to real rational functions whose
    common denominator yields the pole polynomial
    h(xi) = prod(kappa_j + xi) - sum_k c_k prod_{j!=k}(kappa_j + xi).
    """
    if data.n == 0:
        return DiscreteWeylFunction([], [])
    kap = np.array(data.kappa)
    m = np.sqrt(np.array(data.g))
    v = m.copy()  # at x=0
    A = np.eye(data.n) + np.outer(v, v) / np.add.outer(kap, kap)
    phi = np.linalg.solve(A, v)
    dv = -kap * v
    dA = -np.outer(v, v)
    dphi = np.linalg.solve(A, dv - dA @ phi)
    c = phi * v
    dc = dphi * v + phi * dv

    P = np.polynomial.Polynomial
    prod_all = P.fromroots(-kap)
    h = prod_all.copy()
    hN = P([0.0])
    for k in range(data.n):
        partial = P.fromroots(np.delete(-kap, k)) if data.n > 1 else P([1.0])
        h = h - c[k] * partial
        hN = hN - dc[k] * partial

    xi = np.sort(h.roots())
    if np.any(np.abs(xi.imag) > 1e-9 * max(1.0, float(np.max(np.abs(xi))))):
        raise RootCountError(f"complex Weyl poles: {xi}")
    xi = xi.real
    weights = hN(xi) / h.deriv()(xi)
    mw = DiscreteWeylFunction(xi, weights)

    if check_glue:
        _check_glue(data, mw)
    return mw


def _check_glue(data: SolitonData, mw: DiscreteWeylFunction):
    """The rational form must match both half-plane logarithmic derivatives."""
    probes = [0.7 + 0.9j, -1.3 + 0.4j, 1.1 - 0.8j, -0.5 - 1.7j]
    scale = max(1.0, float(np.max(np.abs(mw.xi), initial=0.0)))
    for rho in probes:
        rho = rho * scale
        if rho.imag > 0:
            val, der = jost_plus(data, 0.0, rho)
        else:
            val, der = jost_minus(data, 0.0, rho)
        direct = der / val
        rational = mw(rho)
        if abs(direct - rational) > _GLUE_TOL * max(1.0, abs(direct)):
            raise GlueMismatchError(
                f"half-plane mismatch at rho={rho}: {direct} vs {rational}"
            )


# -- classification and normalizing constants --------------------------------


@dataclass(frozen=True)
class SpectralClassification:
    """Eigenvalues split by pole pairing, plus the unpaired pole set."""

    lambda1: tuple[float, ...]  # pole-free eigenvalues
    lambda2: tuple[float, ...]  # eigenvalues at paired +-xi pole locations
    lambda0_1: tuple[float, ...]  # unpaired poles (signed), incl. xi = 0
    pair_weights: dict  # |xi| -> (w at -xi, w at +xi) for lambda2 members

    @property
    def eigenvalues(self) -> tuple[float, ...]:
        return tuple(sorted(self.lambda1 + self.lambda2))


def _secular_roots(lam: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Roots of -1 + sum_i W_i / (lam - lam_i) = 0 with all W_i > 0.

    The function is strictly decreasing between consecutive poles, so there
    is exactly one root in each gap (lam_i, lam_{i+1}) and one right of
    lam_max.  Each root is located by bisection in the gap-relative
    coordinate lam = lam_i + s (lam_{i+1} - lam_i), which keeps full
    accuracy even for tightly clustered poles where the equivalent
    polynomial formulation loses most of its digits.
    """
    order = np.argsort(lam)
    lam = lam[order]
    W = W[order]
    m = len(lam)
    roots = np.empty(m)
    for i in range(m):
        width = (lam[i + 1] - lam[i]) if i + 1 < m else (float(np.sum(W)) + 1.0)
        base = lam[i] - lam  # base[i] = 0, base[i+1] = -width for interior gaps

        def F(s):
            return -1.0 + float(np.sum(W / (base + s * width)))

        lo, hi = 0.0, 1.0  # F(0+) = +inf, F(1-) = -inf (or F(1) < 0 at the top)
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if F(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        roots[i] = lam[i] + 0.5 * (lo + hi) * width
    return roots


def classify(mw: DiscreteWeylFunction, pair_tol: float = 1e-9) -> SpectralClassification:
    """Split the spectrum via the pole-pairing rule and the symmetry equation.

    Paired poles +-xi give eigenvalues |xi|; the remaining eigenvalues are
    the positive roots of m(i kappa) = m(-i kappa), i.e. of the secular
    polynomial -prod(lam - lam_i) + sum W_i prod_{j!=i}(lam - lam_j) in
    lam = kappa^2 over the distinct pole locations lam_i = xi_i^2.
    """
    if mw.n == 0:
        return SpectralClassification((), (), (), {})
    scale = max(1.0, float(np.max(np.abs(mw.xi))))
    used = np.zeros(mw.n, dtype=bool)
    lambda2 = []
    pair_weights = {}
    lambda0_1 = []
    lam_vals = []
    W_vals = []
    for i in range(mw.n):
        if used[i]:
            continue
        xi = mw.xi[i]
        partner = None
        if abs(xi) > pair_tol * scale:
            for j in range(i + 1, mw.n):
                if not used[j] and abs(mw.xi[j] + xi) <= pair_tol * scale:
                    partner = j
                    break
        if partner is not None:
            used[i] = used[partner] = True
            a = abs(xi)
            lo, hi = (i, partner) if mw.xi[i] < mw.xi[partner] else (partner, i)
            lambda2.append(a)
            pair_weights[a] = (mw.w[lo], mw.w[hi])
            lam_vals.append(a * a)
            W_vals.append(mw.w[i] + mw.w[partner])
        else:
            used[i] = True
            lambda0_1.append(xi)
            lam_vals.append(xi * xi)
            W_vals.append(mw.w[i])

    roots = _secular_roots(np.array(lam_vals), np.array(W_vals))
    if len(roots) != len(lam_vals) or np.any(roots <= 0.0):
        raise RootCountError(
            f"expected {len(lam_vals)} positive symmetry roots, got {roots}"
        )
    lambda1 = tuple(float(math.sqrt(r)) for r in roots)
    total = len(lambda1) + len(lambda2)
    if total != mw.n:
        raise RootCountError(f"eigenvalue count {total} != pole count {mw.n}")
    return SpectralClassification(
        lambda1=lambda1,
        lambda2=tuple(sorted(lambda2)),
        lambda0_1=tuple(sorted(lambda0_1)),
        pair_weights=pair_weights,
    )


def alphas(mw: DiscreteWeylFunction, cls: SpectralClassification) -> dict[float, float]:
    """Normalizing constants alpha(kappa) from the measure data."""
    out = {}
    for kappa in cls.lambda1:
        prod = 1.0
        for xi in cls.lambda0_1:
            prod *= (kappa + xi) / (kappa - xi)
        out[kappa] = prod
    for kappa in cls.lambda2:
        w_minus, w_plus = cls.pair_weights[kappa]
        prod = 1.0
        for xi in cls.lambda0_1:
            prod *= (kappa + xi) / (kappa - xi)
        out[kappa] = -(w_minus / w_plus) * prod
    return out


def expected_alpha_signs(n: int) -> list[float]:
    """Admissible sign pattern of alpha over increasing kappa: (-1)^(n-k)."""
    return [(-1.0) ** (n - k) for k in range(1, n + 1)]


def from_alphas(kappas, alpha_map, check_roundtrip: bool = True) -> SolitonData:
    """Gram constants from (eigenvalues, normalizing constants).

    Uses |alpha_k| = g_k / (2 kappa_k) * prod_{j!=k} |kappa_k - kappa_j| /
    (kappa_k + kappa_j), the norm relation between the two-sided Jost
    proportionality and the Gram parametrization (validated against the
    shooting oracle in the tests).  The signs of alpha are forced by g > 0
    and must follow the (-1)^(n-k) pattern.
    """
    kappas = sorted(float(k) for k in kappas)
    n = len(kappas)
    if n == 0:
        return SolitonData()
    al = [float(alpha_map[k]) for k in kappas]
    signs = expected_alpha_signs(n)
    for a, sgn in zip(al, signs):
        if a * sgn <= 0.0:
            raise SignPatternError(
                f"alpha signs {[math.copysign(1, a) for a in al]} do not match "
                f"the admissible pattern {signs}"
            )
    g = []
    for k in range(n):
        prod = 1.0
        for j in range(n):
            if j != k:
                prod *= abs(kappas[k] + kappas[j]) / abs(kappas[k] - kappas[j])
        g.append(abs(al[k]) * 2.0 * kappas[k] * prod)
    data = SolitonData(kappas, g)
    if check_roundtrip:
        mw = weyl_function(data)
        back = alphas(mw, classify(mw))
        for k, a in zip(kappas, al):
            k_match = min(back, key=lambda kk: abs(kk - k))
            if abs(k_match - k) > 1e-8 * max(1.0, k) or abs(back[k_match] - a) > 1e-8 * max(
                1.0, abs(a)
            ):
                raise RoundTripError(
                    f"alpha roundtrip failed at kappa={k}: {a} vs {back.get(k_match)}"
                )
    return data
