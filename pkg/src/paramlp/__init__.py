"""Uni-parametric linear programming with the parameter in the matrix and the right-hand side.

The problem ``min c^T x  s.t. (A + lam dA) x = b + lam db, x >= 0`` is
embedded in a larger LP whose constraint matrix depends on ``lam`` only
through one block; invariancy intervals of its induced optimal partition are
found from eigenvalue conditions and the optimal value on each interval is a
rational function of ``lam``.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .embedding import InducedPartition, ParametricLP, check_induced_conditions, embed, induced_partition
from .errors import (
    DegenerateInput,
    InconsistencyError,
    MPSParseError,
    NumericFailure,
    ParamLPError,
    ParseError,
    PerturbationParseError,
    PoleError,
    ProbeFailure,
    ShapeError,
    UnsupportedFeature,
    UnsupportedSize,
)
from .invariancy import ConditionFunction, IntervalCertificate, build_conditions, invariancy_interval
from .lp_core import OptimalPartition, PrimalDualSolution, StandardLP, Status, optimal_partition, solve
from .mps import parse_mps, read_mps, write_mps
from .oracle import OracleReport, grid_verify
from .perturbation import PerturbationSpec, generate_perturbation, parse_perturbation
from .sweep import BoundaryPoint, InvariancyInterval, PointKind, SweepReport, refines, sweep
from .value_function import RationalFunction, build_value_function, evaluate

__all__ = [
    "BoundaryPoint",
    "ConditionFunction",
    "DegenerateInput",
    "InconsistencyError",
    "InducedPartition",
    "IntervalCertificate",
    "InvariancyInterval",
    "MPSParseError",
    "NumericFailure",
    "OptimalPartition",
    "OracleReport",
    "ParamLPError",
    "ParametricLP",
    "ParseError",
    "PerturbationParseError",
    "PerturbationSpec",
    "PointKind",
    "PoleError",
    "PrimalDualSolution",
    "ProbeFailure",
    "RationalFunction",
    "ShapeError",
    "StandardLP",
    "Status",
    "SweepReport",
    "UnsupportedFeature",
    "UnsupportedSize",
    "build_conditions",
    "build_value_function",
    "check_induced_conditions",
    "embed",
    "evaluate",
    "generate_perturbation",
    "grid_verify",
    "induced_partition",
    "invariancy_interval",
    "optimal_partition",
    "parse_mps",
    "parse_perturbation",
    "read_mps",
    "refines",
    "solve",
    "sweep",
    "write_mps",
]
