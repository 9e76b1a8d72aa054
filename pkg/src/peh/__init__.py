"""
PE homology of hierarchical tilings.

Approximant chain complexes, connecting maps and direct limits for 1-D mixed
substitutions and declaratively specified higher-dimensional approximants.
"""

from peh.client import PEHomology
from peh.config import RunConfig
from peh.datasets import ApproximantDataset, compute, duality_gap_report, load_and_validate
from peh.exceptions import (
    ComplexInvalid,
    DivisibilityError,
    ExpectationMismatch,
    HorizonExceeded,
    InconsistentCycle,
    InputError,
    InvariantViolation,
    NotAChainMap,
    NotACycle,
    NotClassified,
    NotStabilized,
    ParseError,
    PEHError,
    ReportSchemaError,
    ValidationError,
)
from peh.limits import DirectSystem, LimitGroup, iso_check, limit_of_system, stationary_limit
from peh.linalg import AbelianGroup, FinChainComplex, IntMatrix, homology, smith_normal_form
from peh.report import PipelineReport
from peh.subst1d import SubstitutionSystem1D, load_system, pe_homology_1d

__version__ = "0.1.0"
__all__ = [
    "AbelianGroup",
    "ApproximantDataset",
    "ComplexInvalid",
    "DirectSystem",
    "DivisibilityError",
    "ExpectationMismatch",
    "FinChainComplex",
    "HorizonExceeded",
    "InconsistentCycle",
    "InputError",
    "IntMatrix",
    "InvariantViolation",
    "LimitGroup",
    "NotAChainMap",
    "NotACycle",
    "NotClassified",
    "NotStabilized",
    "PEHError",
    "PEHomology",
    "ParseError",
    "PipelineReport",
    "ReportSchemaError",
    "RunConfig",
    "SubstitutionSystem1D",
    "ValidationError",
    "compute",
    "duality_gap_report",
    "homology",
    "iso_check",
    "limit_of_system",
    "load_and_validate",
    "load_system",
    "pe_homology_1d",
    "smith_normal_form",
    "stationary_limit",
]
