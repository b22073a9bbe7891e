"""Inverse-spectral solver for boundary value problems of general KdV equations.

The package constructs exact solutions q(x, t) of equations of the form
dq/dt = sum_nu C_nu X_nu(q) (linear combinations of the KdV hierarchy flows)
with integrable boundary conditions at x = 0, by evolving the spectral
measure of a reflectionless seed potential and reconstructing the potential
at every time slice.
"""

from .diffpoly import DiffPoly, b_n_eval, beta_poly, kdv_flow
from .errors import KdvBvpError
from .pipeline import (
    EvolvedSpectrum,
    ProblemConfig,
    SolutionField,
    evolve_spectrum,
    measure_transform,
    reconstruct_q,
    reconstruct_with_measure,
    solve,
)
from .soliton import (
    DiscreteWeylFunction,
    SolitonData,
    SpectralClassification,
    alphas,
    classify,
    from_alphas,
    jost_minus,
    jost_plus,
    potential_grid,
    potential_jet,
    weyl_function,
)
from .spectral import FlowCoefficients, SpectralSetup, build_setup
from .taylor import Series
from .verify import (
    VerificationReport,
    boundary_residual,
    laurent_crosscheck,
    pde_residual,
    closure_check,
    verify_field,
)

__all__ = [
    "DiffPoly",
    "DiscreteWeylFunction",
    "EvolvedSpectrum",
    "FlowCoefficients",
    "KdvBvpError",
    "ProblemConfig",
    "Series",
    "SolitonData",
    "SolutionField",
    "SpectralClassification",
    "SpectralSetup",
    "VerificationReport",
    "alphas",
    "b_n_eval",
    "beta_poly",
    "boundary_residual",
    "build_setup",
    "classify",
    "evolve_spectrum",
    "from_alphas",
    "jost_minus",
    "jost_plus",
    "kdv_flow",
    "laurent_crosscheck",
    "measure_transform",
    "pde_residual",
    "potential_grid",
    "potential_jet",
    "reconstruct_q",
    "reconstruct_with_measure",
    "closure_check",
    "solve",
    "verify_field",
    "weyl_function",
]

__version__ = "0.1.0"
