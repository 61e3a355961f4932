"""Exponential matrix solutions of the matrix-valued Bratu equation,
realized on the symmetric domains of type BDI and CI, with independent
verification oracles for every identity involved."""

__version__ = "0.1.0"

from .bdi import (
    BdiGaussFactors,
    BdiGenerator,
    BdiPoint,
    block_gauss,
    bratu_solution,
    exp_trajectory,
    gauss_compose,
    make_generator,
)
from .ci import CiGaussFactors, CiGenerator, CiPoint
from .domains import BoundedGenerator, DomainPoint, SvdFactors, delta, psi
from .errors import (
    ConsistencyError,
    PointAtInfinityError,
    PreconditionError,
    SpdLossError,
    ValidationError,
)
from .trajectory import Trajectory, uniform_grid

__all__ = [
    "BdiGaussFactors",
    "BdiGenerator",
    "BdiPoint",
    "BoundedGenerator",
    "CiGaussFactors",
    "CiGenerator",
    "CiPoint",
    "ConsistencyError",
    "DomainPoint",
    "PointAtInfinityError",
    "PreconditionError",
    "SpdLossError",
    "SvdFactors",
    "Trajectory",
    "ValidationError",
    "block_gauss",
    "bratu_solution",
    "delta",
    "exp_trajectory",
    "gauss_compose",
    "make_generator",
    "psi",
    "uniform_grid",
]
