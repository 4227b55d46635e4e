"""Scattering branches and bound states of nonlinear delta-potential chains."""

from ._core import (
    BoundState,
    ConvergenceError,
    DomainError,
    Error,
    NoBoundStateError,
    NoBranchError,
    OracleBranch,
    ScatteringSolution,
    ValidationError,
    lambert_w,
    oracle_branches,
    preset_names,
    single_delta_closed_form,
    solve_bound,
    solve_scattering,
    solve_single_bound,
    solve_symmetric_double,
    sweep_preset,
    validate,
)

__all__ = [
    "BoundState",
    "ConvergenceError",
    "DomainError",
    "Error",
    "NoBoundStateError",
    "NoBranchError",
    "OracleBranch",
    "ScatteringSolution",
    "ValidationError",
    "lambert_w",
    "oracle_branches",
    "preset_names",
    "single_delta_closed_form",
    "solve_bound",
    "solve_scattering",
    "solve_single_bound",
    "solve_symmetric_double",
    "sweep_preset",
    "validate",
]
