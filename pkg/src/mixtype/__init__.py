"""Nonlocal problem for a mixed parabolic-hyperbolic equation with three type-change lines."""

from .errors import (
    ConfigError,
    CurveInvalid,
    DomainError,
    InvalidTime,
    MixtypeError,
    NoIntersection,
    NonMonotone,
    OutOfRegion,
    ParseError,
    SigmaInvalid,
    StepSingular,
)
from .geometry import CharPoint, Point, SubdomainId, TypeChangeCurve, affix, build_char_maps, classify, to_char
from .parabolic import KernelConfig
from .pipeline import ProblemSpec, ResidualReport, Solution, convergence_study, solve, verify
from .source import SourceTerm
from .tracefn import TraceFn
from .traces import Sigma

__version__ = "0.1.0"

__all__ = [
    "CharPoint",
    "ConfigError",
    "CurveInvalid",
    "DomainError",
    "InvalidTime",
    "KernelConfig",
    "MixtypeError",
    "NoIntersection",
    "NonMonotone",
    "OutOfRegion",
    "ParseError",
    "Point",
    "ProblemSpec",
    "ResidualReport",
    "Sigma",
    "SigmaInvalid",
    "Solution",
    "SourceTerm",
    "StepSingular",
    "SubdomainId",
    "TraceFn",
    "TypeChangeCurve",
    "affix",
    "build_char_maps",
    "classify",
    "convergence_study",
    "solve",
    "to_char",
    "verify",
]
