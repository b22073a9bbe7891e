"""Command-line front end: config parsing, orchestration, data export.

Subcommands: ``flows``, ``spectral``, ``solve``, ``verify``.  All numeric
output is serialized with 17 significant decimal digits and fixed iteration
orders, so repeated runs of the same config are byte-identical.

Exit codes: 0 ok, 2 config error, 3 math-precondition error, 4 verification
failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from .diffpoly import beta_poly, kdv_flow
from .errors import ConfigError, KdvBvpError, VerificationFailure
from .pipeline import ProblemConfig, SolutionField, solve
from .soliton import DiscreteWeylFunction, SolitonData
from .spectral import FlowCoefficients, build_setup
from .verify import VerificationReport, verify_field


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _to_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with fixed 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {_to_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        items = [f"{inner}{_to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise ConfigError(f"cannot serialize value of type {type(obj).__name__}")


# -- config parsing ----------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Validated CLI configuration for the solve pipeline."""

    C: tuple[float, ...]
    mu_star: float
    mu_lower: float
    solitons: SolitonData
    w0: float
    t_grid: np.ndarray
    x_grid: np.ndarray
    tolerances: dict
    output_dir: str | None


def _need(doc: dict, key: str, kinds, where: str = "config"):
    if key not in doc:
        raise ConfigError(f"missing key '{key}' in {where}")
    value = doc[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ConfigError(f"key '{key}' has the wrong type in {where}")
    return value


def _parse_grid(doc: dict, key: str) -> np.ndarray:
    spec = _need(doc, key, dict)
    start = float(_need(spec, "start", (int, float), key))
    stop = float(_need(spec, "stop", (int, float), key))
    steps = _need(spec, "steps", int, key)
    if steps < 1:
        raise ConfigError(f"{key}.steps must be >= 1")
    if steps == 1:
        return np.array([start])
    return np.linspace(start, stop, steps)


def parse_run_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    C = _need(doc, "C", list)
    if not C or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in C):
        raise ConfigError("'C' must be a non-empty list of numbers")
    mu_star = float(_need(doc, "mu_star", (int, float)))
    mu_lower = float(_need(doc, "mu_lower", (int, float)))
    sol_doc = _need(doc, "solitons", list)
    try:
        solitons = SolitonData.from_json_obj(sol_doc)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad 'solitons' entry: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    w0_doc = _need(doc, "w0", (int, float, dict))
    t_grid = _parse_grid(doc, "t_grid")
    x_grid = _parse_grid(doc, "x_grid")
    tolerances = doc.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("'tolerances' must be an object")
    out = doc.get("output_dir")
    if out is not None and not isinstance(out, str):
        raise ConfigError("'output_dir' must be a string")

    if isinstance(w0_doc, dict):
        frac = _need(w0_doc, "fraction", (int, float), "w0")
        if not 0.0 < frac < 1.0:
            raise ConfigError("w0.fraction must lie in (0, 1)")
        setup = build_setup(FlowCoefficients(C), mu_star)
        probe = object.__new__(ProblemConfig)
        object.__setattr__(probe, "setup", setup)
        object.__setattr__(probe, "mu_lower", mu_lower)
        object.__setattr__(probe, "seed", solitons)
        object.__setattr__(probe, "w0", 0.0)
        lo, hi = probe.w_bracket(0.0)
        w0 = lo + float(frac) * (hi - lo)
    else:
        w0 = float(w0_doc)
    return RunConfig(
        C=tuple(float(c) for c in C),
        mu_star=mu_star,
        mu_lower=mu_lower,
        solitons=solitons,
        w0=w0,
        t_grid=t_grid,
        x_grid=x_grid,
        tolerances=dict(tolerances),
        output_dir=out,
    )


def _load_json(path: str) -> dict:
    import json

    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not text.strip():
        raise ConfigError(f"{path} is empty")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _problem_config(run: RunConfig) -> ProblemConfig:
    setup = build_setup(FlowCoefficients(run.C), run.mu_star)
    return ProblemConfig(setup=setup, mu_lower=run.mu_lower, seed=run.solitons, w0=run.w0)


# -- file export/import ------------------------------------------------------


def _jet_columns(order: int) -> list[str]:
    names = ["q", "q_x", "q_xx"]
    names += [f"q_x{k}" for k in range(3, order + 1)]
    return names[: order + 1]


def write_solution_csv(field: SolutionField, path: str):
    cols = _jet_columns(field.jet_order)
    with open(path, "w") as fh:
        fh.write("t,x," + ",".join(cols) + "\n")
        for it, t in enumerate(field.t_grid):
            for ix, x in enumerate(field.x_grid):
                row = [_fmt(t), _fmt(x)] + [_fmt(v) for v in field.q[it, ix]]
                fh.write(",".join(row) + "\n")


def write_w_csv(field: SolutionField, path: str):
    with open(path, "w") as fh:
        fh.write("t,w\n")
        for t, w in zip(field.t_grid, field.w):
            fh.write(f"{_fmt(t)},{_fmt(w)}\n")


def _read_csv(path: str) -> tuple[list[str], np.ndarray]:
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise ConfigError(f"{path} is empty")
    header = lines[0].split(",")
    try:
        rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise ConfigError(f"{path} has a malformed row: {exc}") from exc
    if rows.size == 0 or rows.shape[1] != len(header):
        raise ConfigError(f"{path} rows do not match the header")
    return header, rows


def load_solution(out_dir: str) -> tuple[SolutionField, dict]:
    """Rebuild a SolutionField from exported files; returns (field, report doc)."""
    header, rows = _read_csv(os.path.join(out_dir, "solution.csv"))
    if header[:2] != ["t", "x"]:
        raise ConfigError("solution.csv must start with columns t, x")
    _, wrows = _read_csv(os.path.join(out_dir, "w.csv"))
    doc = _load_json(os.path.join(out_dir, "report.json"))
    meta = _need(doc, "meta", dict, "report.json")
    t_grid = np.array([float(v) for v in _need(meta, "t_grid", list, "meta")])
    x_grid = np.array([float(v) for v in _need(meta, "x_grid", list, "meta")])
    nt, nx = len(t_grid), len(x_grid)
    order = len(header) - 3
    if rows.shape != (nt * nx, order + 3):
        raise ConfigError("solution.csv does not match the grids in report.json")
    q = rows[:, 2:].reshape(nt, nx, order + 1)
    if wrows.shape != (nt, 2):
        raise ConfigError("w.csv does not match the t grid")
    measures = [
        DiscreteWeylFunction([p["xi"] for p in entry], [p["w"] for p in entry])
        for entry in meta.get("measures", [])
    ]
    field = SolutionField(
        t_grid=t_grid,
        x_grid=x_grid,
        q=q,
        w=wrows[:, 1],
        a=np.array([float(v) for v in _need(meta, "a", list, "meta")]),
        s=_need(meta, "s", int, "meta"),
        C=tuple(float(v) for v in _need(meta, "C", list, "meta")),
        t_groups=[list(g) for g in meta.get("t_groups", [])],
        measures=measures,
    )
    return field, doc


def _report_doc(
    field: SolutionField, report: VerificationReport, brackets, expected_poles, run_doc
) -> dict:
    meta = {
        "s": field.s,
        "C": list(field.C),
        "a": [float(v) for v in field.a],
        "t_grid": [float(v) for v in field.t_grid],
        "x_grid": [float(v) for v in field.x_grid],
        "t_groups": [list(map(int, g)) for g in field.t_groups],
        "brackets": [[float(lo), float(hi)] for lo, hi in brackets],
        "expected_poles": int(expected_poles),
        "measures": [
            [{"xi": float(xi), "w": float(w)} for xi, w in zip(mw.xi, mw.w)]
            for mw in field.measures
        ],
    }
    return {
        "config": run_doc,
        "meta": meta,
        "report": report.to_json_obj(),
        "checks": [
            {"name": name, "passed": passed, "summary": summary}
            for name, passed, summary in report.checks
        ],
    }


# -- subcommands -------------------------------------------------------------


def cmd_flows(args) -> int:
    max_nu = args.max_order if args.max_order is not None else 2
    max_beta = args.max_beta if args.max_beta is not None else 2 * max_nu + 1
    lines = []
    for nu in range(max_nu + 1):
        lines.append(f"X{nu} = {kdv_flow(nu).render()}")
    for n in range(1, max_beta + 1):
        lines.append(f"beta{n} = {beta_poly(n).render()}")
    print("\n".join(lines))
    return 0


def cmd_spectral(args) -> int:
    doc = _load_json(args.config)
    C = _need(doc, "C", list)
    mu_star = float(_need(doc, "mu_star", (int, float)))
    setup = build_setup(FlowCoefficients(C), mu_star)
    text = _to_json(setup.to_json_obj())
    print(text)
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        with open(os.path.join(args.output, "spectral.json"), "w") as fh:
            fh.write(text + "\n")
    return 0


def cmd_solve(args) -> int:
    doc = _load_json(args.config)
    run = parse_run_config(doc)
    out_dir = args.output or run.output_dir
    if not out_dir:
        raise ConfigError("solve needs an output directory (--output or output_dir)")
    cfg = _problem_config(run)

    jet_order = args.max_order if args.max_order is not None else None
    nt = len(run.t_grid)
    if nt < 5:
        raise ConfigError("t_grid needs at least 5 points for the residual check")
    field = solve(cfg, run.t_grid, run.x_grid, jet_order=jet_order)
    brackets = [cfg.w_bracket(float(t)) for t in run.t_grid]
    expected = (2 * cfg.setup.s + 1) * run.solitons.n + 2 * cfg.setup.s
    tolerances = dict(run.tolerances)
    if args.tol is not None:
        tolerances["residual"] = args.tol
    report = verify_field(field, brackets=brackets, expected_poles=expected,
                          tolerances=tolerances)

    os.makedirs(out_dir, exist_ok=True)
    write_solution_csv(field, os.path.join(out_dir, "solution.csv"))
    write_w_csv(field, os.path.join(out_dir, "w.csv"))
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        fh.write(_to_json(_report_doc(field, report, brackets, expected, doc)) + "\n")
    from .plots import render_figures

    render_figures(field, out_dir, brackets=brackets)
    for name, passed, summary in report.checks:
        print(f"{name}: {'PASS' if passed else 'FAIL'} ({summary})")
    if not report.ok:
        raise VerificationFailure("one or more solution checks failed")
    return 0


def cmd_verify(args) -> int:
    if not args.output:
        raise ConfigError("verify needs --output pointing at a solve output directory")
    field, doc = load_solution(args.output)
    meta = doc["meta"]
    brackets = meta.get("brackets")
    expected = meta.get("expected_poles")
    tolerances = doc.get("config", {}).get("tolerances", {})
    if args.tol is not None:
        tolerances = dict(tolerances)
        tolerances["residual"] = args.tol
    report = verify_field(field, brackets=brackets, expected_poles=expected,
                          tolerances=tolerances)
    for name, passed, summary in report.checks:
        print(f"{name}: {'PASS' if passed else 'FAIL'} ({summary})")
    if not report.ok:
        raise VerificationFailure("re-verification failed")
    return 0


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdvbvp",
        description="Inverse-spectral solver for boundary value problems of "
        "general KdV equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("flows", cmd_flows),
        ("spectral", cmd_spectral),
        ("solve", cmd_solve),
        ("verify", cmd_verify),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--output", type=str, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-order", type=int, default=None)
        if name == "flows":
            p.add_argument("--max-beta", type=int, default=None)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.fn in (cmd_spectral, cmd_solve) and not args.config:
        print("config-error: --config is required", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except KdvBvpError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
