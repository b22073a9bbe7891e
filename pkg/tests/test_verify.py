"""Verification harness: trivial fields, mutation sensitivity, grid errors."""

import dataclasses

import numpy as np
import pytest

from kdvbvp.errors import GridError, JetTooShortError
from kdvbvp.pipeline import SolutionField, solve
from kdvbvp.soliton import DiscreteWeylFunction
from kdvbvp.verify import (
    VerificationReport,
    boundary_residual,
    laurent_crosscheck,
    pde_residual,
    closure_check,
    verify_field,
)


def _copy_field(field: SolutionField) -> SolutionField:
    return dataclasses.replace(
        field,
        q=field.q.copy(),
        w=field.w.copy(),
        measures=list(field.measures),
        t_groups=[list(g) for g in field.t_groups],
    )


@pytest.fixture(scope="module")
def solved_field(cfg_s1_n1):
    t = -0.002 + 1e-3 * np.arange(5)
    x = np.linspace(-4.0, 4.0, 9)  # includes x = 0
    return solve(cfg_s1_n1, t, x)


def _zero_field():
    nt, nx = 5, 7
    x = np.linspace(-3.0, 3.0, nx)
    return SolutionField(
        t_grid=1e-3 * np.arange(nt),
        x_grid=x,
        q=np.zeros((nt, nx, 6)),
        w=np.zeros(nt),
        a=np.zeros(2),
        s=1,
        C=(8.0, 4.0),
        t_groups=[list(range(nt))],
        measures=[DiscreteWeylFunction([], []) for _ in range(nt)],
    )


class TestTrivialFields:
    def test_zero_potential_passes_everything(self):
        report = verify_field(_zero_field(), expected_poles=0)
        assert report.residual_sup == 0.0
        assert report.boundary_max_err == 0.0
        assert report.laurent_max_err == 0.0
        assert report.closure_max_err == 0.0
        assert report.ok

    def test_solved_field_passes(self, solved_field, cfg_s1_n1):
        brackets = np.array([cfg_s1_n1.w_bracket(t) for t in solved_field.t_grid])
        report = verify_field(solved_field, brackets=brackets, expected_poles=5)
        for name, passed, summary in report.checks:
            assert passed, f"{name}: {summary}"
        assert report.ok

    def test_report_json_shape(self, solved_field):
        report = verify_field(solved_field)
        doc = report.to_json_obj()
        for key in (
            "residual_sup",
            "boundary_max_err",
            "laurent_max_err",
            "closure_max_err",
            "bracket_ok",
            "pole_count_ok",
            "details",
        ):
            assert key in doc


class TestMutationSensitivity:
    def test_interior_sample_breaks_residual(self, solved_field):
        bad = _copy_field(solved_field)
        bad.q[2, 1, 0] *= 1.01  # x != 0 sample feeding the stencil center
        report = verify_field(bad)
        assert report.residual_sup > report.tolerances["residual"]

    def test_origin_jet_breaks_boundary_and_laurent(self, solved_field):
        bad = _copy_field(solved_field)
        ix0 = int(np.flatnonzero(bad.x_grid == 0.0)[0])
        bad.q[2, ix0, 0] *= 1.01
        assert boundary_residual(bad) > 1e-8
        assert laurent_crosscheck(bad) > 1e-8

    def test_w_sample_breaks_closure_identity(self, solved_field):
        bad = _copy_field(solved_field)
        bad.w[2] += 0.01 * (1.0 + abs(bad.w[2]))
        assert closure_check(bad) > 1e-7

    def test_measure_weight_breaks_laurent(self, solved_field):
        bad = _copy_field(solved_field)
        mw = bad.measures[2]
        w = np.array(mw.w)
        w[0] *= 1.01
        bad.measures[2] = DiscreteWeylFunction(mw.xi, w)
        assert laurent_crosscheck(bad) > 1e-8

    def test_bad_bracket_flags(self, solved_field):
        brackets = np.tile([solved_field.w[0] + 0.1, solved_field.w[0] + 0.2],
                           (len(solved_field.t_grid), 1))
        report = verify_field(solved_field, brackets=brackets)
        assert not report.bracket_ok
        assert not report.ok

    def test_bad_pole_count_flags(self, solved_field):
        report = verify_field(solved_field, expected_poles=7)
        assert not report.pole_count_ok
        assert not report.ok


class TestGridErrors:
    def test_short_t_group(self, solved_field):
        bad = _copy_field(solved_field)
        bad.t_groups = [[0, 1, 2]]
        with pytest.raises(GridError):
            pde_residual(bad)

    def test_nonuniform_spacing(self, solved_field):
        bad = _copy_field(solved_field)
        bad.t_grid = bad.t_grid.copy()
        bad.t_grid[3] += 3e-4
        with pytest.raises(GridError):
            pde_residual(bad)

    def test_missing_origin(self, solved_field):
        bad = _copy_field(solved_field)
        bad.x_grid = bad.x_grid + 0.1
        with pytest.raises(GridError):
            boundary_residual(bad)
        with pytest.raises(GridError):
            laurent_crosscheck(bad)
        with pytest.raises(GridError):
            closure_check(bad)

    def test_jet_too_short(self, solved_field):
        bad = _copy_field(solved_field)
        bad.q = bad.q[:, :, :2]
        with pytest.raises(JetTooShortError):
            pde_residual(bad)

    def test_missing_measures(self, solved_field):
        bad = _copy_field(solved_field)
        bad.measures = []
        with pytest.raises(GridError):
            laurent_crosscheck(bad)


class TestReportLines:
    def test_six_checks(self):
        report = VerificationReport(
            residual_sup=0.0,
            boundary_max_err=0.0,
            laurent_max_err=0.0,
            closure_max_err=0.0,
            bracket_ok=True,
            pole_count_ok=True,
        )
        names = [name for name, _, _ in report.checks]
        assert names == [
            "pde-residual",
            "boundary",
            "laurent",
            "closure-identity",
            "bracket",
            "pole-count",
        ]
