"""Embedded propositional solving: CDCL, cardinality constraints, MaxSAT."""

from .cnf import (
    CnfInstance,
    MaxSatResult,
    MaxSatStatus,
    SolverModel,
    Totalizer,
    maximize_satisfied_soft,
)
from .solver import Solver, SolverTimeout

__all__ = [
    "CnfInstance",
    "MaxSatResult",
    "MaxSatStatus",
    "Solver",
    "SolverModel",
    "SolverTimeout",
    "Totalizer",
    "maximize_satisfied_soft",
]
