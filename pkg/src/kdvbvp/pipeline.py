"""The inverse-spectral construction of BVP solutions.

Given a spectral setup at level mu_star, a reflectionless seed potential Q
bounded by mu_lower (mu_star < mu_lower < 0), and an initial value w0 inside
the bracket (M(0, i kappa*), M(0, -i kappa*)), the transform

    m(T, rho) = (M(T, phi(rho)) - w(T)) / g(rho^2)

is the Weyl function of a reflectionless potential q(., T); q(x, t) solves
the flow equation with the integrable boundary conditions.  w solves the
Riccati problem dw/dt + w^2 = Q - mu_star, realized in closed form through
the Jost basis of Q at the spectral point mu_star.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BracketError,
    BracketViolationError,
    ConfigError,
    GlueMismatchError,
    PoleWeightError,
    RootCountError,
)
from .soliton import (
    DiscreteWeylFunction,
    SolitonData,
    alphas,
    classify,
    from_alphas,
    jost_minus,
    jost_plus,
    potential_jet,
    weyl_function,
)
from .spectral import SpectralSetup

_IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class ProblemConfig:
    """Validated inputs of the construction."""

    setup: SpectralSetup
    mu_lower: float  # spectral bound of the seed, in (mu_star, 0)
    seed: SolitonData
    w0: float

    def __post_init__(self):
        st = self.setup
        if not (st.mu_minus < st.mu_star < self.mu_lower < 0.0):
            raise ConfigError(
                f"need mu_minus < mu_star < mu_lower < 0, got "
                f"{st.mu_minus:g}, {st.mu_star:g}, {self.mu_lower:g}"
            )
        bound = math.sqrt(-self.mu_lower)
        if any(k >= bound for k in self.seed.kappa):
            raise ConfigError(
                f"seed eigenvalue parameters {self.seed.kappa} must stay below "
                f"sqrt(-mu_lower) = {bound:g}"
            )
        lo, hi = self.w_bracket(0.0)
        if not (lo < self.w0 < hi):
            raise BracketError(f"w0 = {self.w0:g} outside the bracket ({lo:g}, {hi:g})")

    @property
    def kappa_star(self) -> float:
        return self.setup.kappa_star

    # -- seed Weyl data ------------------------------------------------------

    def seed_M_values(self, T: float) -> tuple[float, float]:
        """(M(T, i kappa*), M(T, -i kappa*)) via the Jost log-derivatives."""
        ks = self.kappa_star
        ep, dep = jost_plus(self.seed, T, 1j * ks)
        em, dem = jost_minus(self.seed, T, -1j * ks)
        return (dep / ep).real, (dem / em).real

    def w_bracket(self, T: float) -> tuple[float, float]:
        return self.seed_M_values(T)

    # -- Riccati solution ----------------------------------------------------

    def _jost_basis(self, T: float):
        ks = self.kappa_star
        ep, dep = jost_plus(self.seed, T, 1j * ks)
        em, dem = jost_minus(self.seed, T, -1j * ks)
        return ep.real, dep.real, em.real, dem.real

    def riccati_w(self, T: float) -> float:
        """w(T) = z'(T)/z(T) with z in the Jost basis at spectral point mu_star.

        z = A e+(., i kappa*) + B e-(., -i kappa*), fixed by z(0) = 1 and
        z'(0) = w0; the comparison bracket M(T, i k*) < w(T) < M(T, -i k*)
        is re-checked at every call.
        """
        ep0, dep0, em0, dem0 = self._jost_basis(0.0)
        det = ep0 * dem0 - em0 * dep0
        A = (dem0 - self.w0 * em0) / det
        B = (self.w0 * ep0 - dep0) / det
        ep, dep, em, dem = self._jost_basis(T)
        z = A * ep + B * em
        dz = A * dep + B * dem
        if z == 0.0:
            raise BracketViolationError(f"z(T) vanished at T = {T:g}")
        w = dz / z
        lo, hi = (dep / ep, dem / em)
        if not (lo < w < hi):
            raise BracketViolationError(
                f"w({T:g}) = {w:g} escaped the bracket ({lo:g}, {hi:g})"
            )
        return w


def measure_transform(cfg: ProblemConfig, T: float, check: bool = True) -> DiscreteWeylFunction:
    """Discrete measure of m(T, .): the full pole/weight list.

    Each seed pole i eta with weight theta spawns 2s+1 poles at i xi_j(eta)
    with residue weights theta / (Phi'(xi_j) g(-xi_j^2)); the zeros of
    g(rho^2) add poles at +-i gamma_nu with weights
    +-(w(T) - M(T, +-(-1)^(nu-1) i kappa*)) / (2 gamma_nu g'(c_nu)).
    """
    st = cfg.setup
    seed_T = cfg.seed.shift(T)
    Mw = weyl_function(seed_T)
    wT = cfg.riccati_w(T)
    ks = st.kappa_star

    poles: list[float] = []
    weights: list[float] = []
    for eta, theta in zip(Mw.xi, Mw.w):
        for xi in st.xi_roots(eta):
            poles.append(xi)
            weights.append(theta / (st.phi_imag_prime(xi) * st.g_eval(-xi * xi)))
    M_plus = Mw.at_imag(ks) if Mw.n else -ks
    M_minus = Mw.at_imag(-ks) if Mw.n else ks
    for nu in range(1, st.s + 1):
        gam = st.gamma[nu - 1]
        gp = st.g_prime(st.c[nu - 1])
        M_fwd = M_plus if nu % 2 == 1 else M_minus  # M(T, (-1)^(nu-1) i kappa*)
        M_bwd = M_minus if nu % 2 == 1 else M_plus
        poles.append(gam)
        weights.append((wT - M_fwd) / (2.0 * gam * gp))
        poles.append(-gam)
        weights.append((M_bwd - wT) / (2.0 * gam * gp))

    expected = (2 * st.s + 1) * cfg.seed.n + 2 * st.s
    if len(poles) != expected:
        raise RootCountError(f"pole count {len(poles)} != (2s+1)n+2s = {expected}")
    bad = [w for w in weights if w <= 0.0]
    if bad:
        raise PoleWeightError(f"nonpositive transformed weights: {bad}")
    mw = DiscreteWeylFunction(poles, weights)
    if check:
        _check_transform_identity(cfg, T, mw, Mw, wT)
    return mw


def _check_transform_identity(cfg, T, mw, Mw, wT, n_points: int = 20, tol: float = _IDENTITY_TOL):
    """m built from the measure must equal (M(phi(rho)) - w)/g(rho^2) off-axis."""
    st = cfg.setup
    rng = np.random.default_rng(1234)
    rho = rng.uniform(0.5, 2.5, n_points) * np.exp(1j * rng.uniform(0.2, math.pi - 0.2, n_points))
    rho = np.where(rng.uniform(size=n_points) < 0.5, rho, np.conj(rho))
    phi = cfg.setup.coeffs.phi(rho)
    g_val = 4.0**st.s * np.prod([rho**2 - cn for cn in st.c], axis=0)
    direct = (Mw(phi) - wT) / g_val
    from_measure = mw(rho)
    err = np.abs(direct - from_measure) / np.maximum(1.0, np.abs(direct))
    if np.max(err) > tol:
        raise GlueMismatchError(
            f"measure transform identity violated: max rel err {np.max(err):.3e}"
        )


@dataclass(frozen=True)
class EvolvedSpectrum:
    """Time-invariant spectrum of q with initial normalizing constants."""

    lambda1: tuple[float, ...]
    lambda2: tuple[float, ...]
    alphas_at_0: dict
    phase_rate: dict  # kappa -> d/dT log alpha = -2 Phi(kappa)

    @property
    def eigenvalues(self):
        return tuple(sorted(self.lambda1 + self.lambda2))


def evolve_spectrum(cfg: ProblemConfig) -> EvolvedSpectrum:
    """Spectrum of q from the seed spectrum and the branch functions."""
    st = cfg.setup
    seed_mw = weyl_function(cfg.seed)
    seed_cls = classify(seed_mw)
    lambda1 = [float(d) for d in st.delta]
    lambda2 = [float(gmm) for gmm in st.gamma]
    for eta in seed_cls.lambda1:
        lambda1 += [abs(x) for x in st.xi_roots(eta)]
    for eta in seed_cls.lambda2:
        lambda2 += [abs(x) for x in st.xi_roots(eta)]
    mw0 = measure_transform(cfg, 0.0)
    cls0 = classify(mw0)
    al0 = alphas(mw0, cls0)
    rates = {k: -2.0 * float(st.phi_imag(k)) for k in al0}
    expected = (2 * st.s + 1) * cfg.seed.n + 2 * st.s
    if len(lambda1) + len(lambda2) != expected:
        raise RootCountError(
            f"spectrum count {len(lambda1) + len(lambda2)} != {expected}"
        )
    return EvolvedSpectrum(
        lambda1=tuple(sorted(lambda1)),
        lambda2=tuple(sorted(lambda2)),
        alphas_at_0=al0,
        phase_rate=rates,
    )


def reconstruct_with_measure(
    cfg: ProblemConfig, T: float, check: bool = True
) -> tuple[SolitonData, DiscreteWeylFunction]:
    """(soliton data of q(., T), transformed measure) at time T."""
    mw = measure_transform(cfg, T, check=check)
    cls = classify(mw)
    al = alphas(mw, cls)
    data = from_alphas(cls.eigenvalues, al, check_roundtrip=False)
    if check:
        # The round trip back through the forward map is the gate, but that
        # map is intrinsically ill conditioned for clustered eigenvalues
        # (products of 1/(kappa_k - kappa_j)); scale the tolerance by the
        # amplification factor so the gate tests the logic, not the
        # conditioning.  The glue probe is skipped for the same reason.
        back = weyl_function(data, check_glue=False)
        if back.n != mw.n:
            raise RootCountError("reconstructed pole count mismatch")
        kap = np.array(data.kappa)
        amp = 1.0
        for k in range(data.n):
            others = np.delete(kap, k)
            amp = max(amp, float(np.prod((kap[k] + others) / np.abs(kap[k] - others))))
        eps_amp = 2.2e-16 * amp
        scale = max(1.0, float(np.max(np.abs(mw.xi))))
        tol_xi = max(1e-8, 10.0 * eps_amp) * scale
        tol_w = max(1e-7, 100.0 * eps_amp)
        if np.max(np.abs(back.xi - mw.xi)) > tol_xi or np.max(
            np.abs(back.w - mw.w) / np.maximum(1e-8, mw.w)
        ) > tol_w:
            raise GlueMismatchError("reconstructed Weyl function does not match the measure")
    return data, mw


def reconstruct_q(cfg: ProblemConfig, T: float, check: bool = True) -> SolitonData:
    """Soliton data of q(., T) from the transformed measure."""
    return reconstruct_with_measure(cfg, T, check=check)[0]


@dataclass
class SolutionField:
    """Sampled solution with per-point derivative jets and audit data."""

    t_grid: np.ndarray
    x_grid: np.ndarray
    q: np.ndarray  # shape (nt, nx, jet_order+1)
    w: np.ndarray  # w(t)
    a: np.ndarray  # boundary constants a_n(mu_star)
    s: int
    C: tuple[float, ...]
    t_groups: list = field(default_factory=list)  # index runs with uniform dt
    measures: list = field(default_factory=list)  # DiscreteWeylFunction per t

    @property
    def jet_order(self) -> int:
        return self.q.shape[2] - 1


def solve(
    cfg: ProblemConfig,
    t_grid,
    x_grid,
    jet_order: int | None = None,
    t_groups=None,
    check: bool = True,
) -> SolutionField:
    """Reconstruct q over the grid; jets to order 2s+3 by default."""
    st = cfg.setup
    t_grid = np.asarray(t_grid, dtype=float)
    x_grid = np.asarray(x_grid, dtype=float)
    order = jet_order if jet_order is not None else 2 * st.s + 3
    nt, nx = len(t_grid), len(x_grid)
    q = np.empty((nt, nx, order + 1))
    w = np.empty(nt)
    measures = []
    for it, t in enumerate(t_grid):
        data_t, mw_t = reconstruct_with_measure(cfg, float(t), check=check)
        measures.append(mw_t)
        w[it] = cfg.riccati_w(float(t))
        for ix, x in enumerate(x_grid):
            q[it, ix] = potential_jet(data_t, float(x), order)
    if t_groups is None:
        t_groups = [list(range(nt))]
    return SolutionField(
        t_grid=t_grid,
        x_grid=x_grid,
        q=q,
        w=w,
        a=np.asarray(st.a, dtype=float),
        s=st.s,
        C=st.coeffs.C,
        t_groups=t_groups,
        measures=measures,
    )
