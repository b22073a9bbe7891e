"""Independent verification harness for sampled solution fields.

The checks are deliberately decoupled from the construction they audit:
the time derivative is approximated by finite differences on the sampled
snapshots, the flow right-hand side is evaluated exactly on the stored jets,
and the boundary/Laurent/closure identities are recomputed from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffpoly import b_n_eval, beta_poly, kdv_flow
from .errors import GridError, JetTooShortError
from .pipeline import SolutionField

_DEFAULT_TOL = {
    "residual": 1e-6,
    "boundary": 1e-8,
    "laurent": 1e-8,
    "closure": 1e-7,
}


@dataclass
class VerificationReport:
    """Aggregated check results with per-check tables in ``details``."""

    residual_sup: float
    boundary_max_err: float
    laurent_max_err: float
    closure_max_err: float
    bracket_ok: bool
    pole_count_ok: bool
    details: list = field(default_factory=list)
    tolerances: dict = field(default_factory=lambda: dict(_DEFAULT_TOL))

    @property
    def checks(self) -> list[tuple[str, bool, str]]:
        """(name, passed, summary) triples for the report lines."""
        tol = self.tolerances
        return [
            ("pde-residual", self.residual_sup <= tol["residual"],
             f"{self.residual_sup:.3e} <= {tol['residual']:g}"),
            ("boundary", self.boundary_max_err <= tol["boundary"],
             f"{self.boundary_max_err:.3e} <= {tol['boundary']:g}"),
            ("laurent", self.laurent_max_err <= tol["laurent"],
             f"{self.laurent_max_err:.3e} <= {tol['laurent']:g}"),
            ("closure-identity", self.closure_max_err <= tol["closure"],
             f"{self.closure_max_err:.3e} <= {tol['closure']:g}"),
            ("bracket", self.bracket_ok, "w(t) inside its bracket"),
            ("pole-count", self.pole_count_ok, "measure sizes match (2s+1)n+2s"),
        ]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def to_json_obj(self):
        return {
            "residual_sup": self.residual_sup,
            "boundary_max_err": self.boundary_max_err,
            "laurent_max_err": self.laurent_max_err,
            "closure_max_err": self.closure_max_err,
            "bracket_ok": self.bracket_ok,
            "pole_count_ok": self.pole_count_ok,
            "details": self.details,
        }


# -- individual checks -------------------------------------------------------


def pde_residual(field: SolutionField, details: list | None = None) -> float:
    """Normalized sup-residual of dq/dt = sum_nu C_nu X_nu(q).

    dq/dt comes from 4th-order central differences in t within each uniform
    t-group (>= 5 points each); the right-hand side is evaluated exactly on
    the stored jets.  The sup runs over the open semi-axes x != 0; the x = 0
    residual is reported in the details table but not folded into the result.
    """
    flows = [kdv_flow(nu) for nu in range(len(field.C))]
    need = max(f.max_order() for f in flows)
    if field.jet_order < need:
        raise JetTooShortError(
            f"flow evaluation needs jets of order {need}, field has {field.jet_order}"
        )
    worst = {"neg": 0.0, "zero": 0.0, "pos": 0.0}
    qdot_sup = 0.0
    worst_point = None
    for group in field.t_groups:
        idx = list(group)
        if len(idx) < 5:
            raise GridError(f"t-group {idx} has fewer than 5 points")
        ts = field.t_grid[idx]
        dts = np.diff(ts)
        dt = dts[0]
        if dt <= 0 or np.max(np.abs(dts - dt)) > 1e-12 * max(1.0, abs(dt)):
            raise GridError(f"t-group at t={ts[0]:g} is not uniformly spaced")
        q = field.q[idx]  # (nt, nx, K+1)
        qdot = (q[:-4, :, 0] - 8.0 * q[1:-3, :, 0] + 8.0 * q[3:-1, :, 0] - q[4:, :, 0]) / (
            12.0 * dt
        )
        qdot_sup = max(qdot_sup, float(np.max(np.abs(qdot))))
        for i, it in enumerate(idx[2:-2]):
            for ix, x in enumerate(field.x_grid):
                jet = field.q[it, ix]
                rhs = sum(c * f.eval_jet(jet) for c, f in zip(field.C, flows))
                r = abs(qdot[i, ix] - rhs)
                region = "zero" if x == 0.0 else ("neg" if x < 0.0 else "pos")
                if region != "zero" and r > max(worst["neg"], worst["pos"]):
                    worst_point = (float(field.t_grid[it]), float(x))
                worst[region] = max(worst[region], r)
    scale = max(qdot_sup, 1e-300)
    sup = max(worst["neg"], worst["pos"]) / scale
    if details is not None:
        details.append(
            {
                "check": "pde-residual",
                "residual_neg_axis": worst["neg"] / scale,
                "residual_pos_axis": worst["pos"] / scale,
                "residual_x0": worst["zero"] / scale,
                "qdot_sup": qdot_sup,
                "worst_point": worst_point,
            }
        )
    return sup


def boundary_residual(field: SolutionField, details: list | None = None) -> float:
    """Max over t of |b_2n| (n <= s-1) and |b_{2n-1} - a_n| (n <= s+1) at x=0."""
    ix0 = np.flatnonzero(field.x_grid == 0.0)
    if len(ix0) == 0:
        raise GridError("boundary check needs x = 0 in the grid")
    ix0 = int(ix0[0])
    s = field.s
    a = field.a
    need = max(beta_poly(2 * s + 1).max_order(), 0)
    if field.jet_order < need:
        raise JetTooShortError(f"boundary check needs jets of order {need}")
    err = 0.0
    rows = []
    for it, t in enumerate(field.t_grid):
        jet = field.q[it, ix0]
        row = {"t": float(t)}
        for n in range(1, s):
            e = abs(b_n_eval(2 * n, jet))
            row[f"b{2 * n}"] = e
            err = max(err, e)
        for n in range(1, s + 2):
            e = abs(b_n_eval(2 * n - 1, jet) - a[n - 1])
            row[f"b{2 * n - 1}-a{n}"] = e
            err = max(err, e)
        rows.append(row)
    if details is not None:
        details.append({"check": "boundary", "max_err": err, "rows": rows})
    return err


def laurent_crosscheck(
    field: SolutionField, n_max: int = 6, details: list | None = None
) -> float:
    """Max relative error between measure-side and jet-side b_n, n <= n_max.

    The measure side uses the closed form b_n = (-1)^n sum_k w_k xi_k^{n-1};
    the jet side evaluates the boundary functionals on the x = 0 jets.
    """
    if not field.measures:
        raise GridError("laurent check needs the per-t measures")
    ix0 = np.flatnonzero(field.x_grid == 0.0)
    if len(ix0) == 0:
        raise GridError("laurent check needs x = 0 in the grid")
    ix0 = int(ix0[0])
    n_max = min(n_max, field.jet_order + 1)
    err = 0.0
    rows = []
    for it, t in enumerate(field.t_grid):
        mw = field.measures[it]
        jet = field.q[it, ix0]
        row = {"t": float(t)}
        for n in range(1, n_max + 1):
            lhs = mw.b_n(n)
            rhs = b_n_eval(n, jet)
            e = abs(lhs - rhs) / max(1.0, abs(rhs))
            row[f"b{n}"] = e
            err = max(err, e)
        rows.append(row)
    if details is not None:
        details.append({"check": "laurent", "max_err": err, "rows": rows})
    return err


def closure_check(field: SolutionField, details: list | None = None) -> float:
    """Max over t of |w(t) - (-1)^(s-1) 4^s b_2s(x=0 jet)| / (1 + |w(t)|)."""
    ix0 = np.flatnonzero(field.x_grid == 0.0)
    if len(ix0) == 0:
        raise GridError("closure check needs x = 0 in the grid")
    ix0 = int(ix0[0])
    s = field.s
    sign = (-1.0) ** (s - 1)
    err = 0.0
    rows = []
    for it, t in enumerate(field.t_grid):
        w_from_jet = sign * 4.0**s * b_n_eval(2 * s, field.q[it, ix0])
        e = abs(field.w[it] - w_from_jet) / (1.0 + abs(field.w[it]))
        rows.append({"t": float(t), "err": e})
        err = max(err, e)
    if details is not None:
        details.append({"check": "closure-identity", "max_err": err, "rows": rows})
    return err


# -- aggregation -------------------------------------------------------------


def verify_field(
    field: SolutionField,
    brackets=None,
    expected_poles: int | None = None,
    n_max: int = 6,
    tolerances: dict | None = None,
) -> VerificationReport:
    """Run all checks and aggregate into a report.

    ``brackets`` is an optional (nt, 2) array of admissible (lo, hi) per t for
    the bracket check; ``expected_poles`` the required measure size per t.
    Both default to "not checkable -> reported true only if data agrees".
    """
    details: list = []
    residual = pde_residual(field, details)
    boundary = boundary_residual(field, details)
    laurent = laurent_crosscheck(field, n_max, details)
    closure = closure_check(field, details)

    bracket_ok = True
    if brackets is not None:
        brackets = np.asarray(brackets, dtype=float)
        bracket_ok = bool(
            np.all((brackets[:, 0] < field.w) & (field.w < brackets[:, 1]))
        )
        details.append({"check": "bracket", "ok": bracket_ok})

    pole_count_ok = True
    if expected_poles is not None and field.measures:
        counts = [mw.n for mw in field.measures]
        pole_count_ok = all(c == expected_poles for c in counts)
        details.append(
            {"check": "pole-count", "ok": pole_count_ok, "counts": counts,
             "expected": expected_poles}
        )

    tol = dict(_DEFAULT_TOL)
    if tolerances:
        tol.update(tolerances)
    return VerificationReport(
        residual_sup=residual,
        boundary_max_err=boundary,
        laurent_max_err=laurent,
        closure_max_err=closure,
        bracket_ok=bracket_ok,
        pole_count_ok=pole_count_ok,
        details=details,
        tolerances=tol,
    )
