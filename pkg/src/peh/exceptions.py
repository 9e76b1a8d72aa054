"""
PE homology exceptions.
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

# Process exit codes used by the command line front end.
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_COMPUTATION_ERROR = 2


class PEHError(Exception):
    """Base exception for all PE homology errors."""

    exit_code = EXIT_COMPUTATION_ERROR

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.code = code
        self.details = details or {}

    def __str__(self) -> str:
        if self.code:
            return f"[{self.code}] {self.message}"
        return self.message

    def to_dict(self) -> Dict[str, Any]:
        """Structured form embedded in reports."""
        return {
            "type": type(self).__name__,
            "message": self.message,
            "details": self.details,
        }


class InputError(PEHError):
    """Base class for errors caused by malformed input."""

    exit_code = EXIT_INPUT_ERROR


class ValidationError(InputError):
    """Raised when an argument or configuration value is invalid."""

    pass


class ParseError(InputError):
    """Raised when an input document cannot be parsed."""

    pass


class ComplexInvalid(InputError):
    """Raised when boundary matrices do not form a chain complex."""

    pass


class NotACycle(InputError):
    """Raised when a chain that must be a cycle has nonzero boundary."""

    pass


class NotAChainMap(InputError):
    """Raised when a family of matrices does not commute with the boundaries."""

    pass


class DivisibilityError(InputError):
    """Raised when a boundary row is not divisible by its class's isotropy order."""

    pass


@dataclass(frozen=True)
class Violation:
    """A single failed dataset check."""

    check: str
    message: str
    degree: Optional[int] = None
    row: Optional[int] = None
    col: Optional[int] = None

    def __str__(self) -> str:
        where = []
        if self.degree is not None:
            where.append(f"degree {self.degree}")
        if self.row is not None and self.col is not None:
            where.append(f"entry ({self.row}, {self.col})")
        location = f" at {', '.join(where)}" if where else ""
        return f"{self.check}{location}: {self.message}"


class InvariantViolation(InputError):
    """Raised when a dataset fails one or more invariant checks."""

    def __init__(self, violations: List[Violation]):
        self.violations = list(violations)
        summary = "; ".join(str(v) for v in self.violations[:5])
        if len(self.violations) > 5:
            summary += f"; and {len(self.violations) - 5} more"
        super().__init__(
            f"Dataset failed validation: {summary}",
            details={"violations": [asdict(v) for v in self.violations]},
        )


class HorizonExceeded(PEHError):
    """Raised when no limit criterion is detected within the stage horizon."""

    pass


class NotClassified(PEHError):
    """Raised when a normal-form operation receives an unclassified limit."""

    pass


class NotStabilized(PEHError):
    """Raised when a legal-pair set is still growing at the horizon."""

    pass


class InconsistentCycle(PEHError):
    """Raised when letters inside one supertile carry unequal coefficients."""

    pass


class ExpectationMismatch(PEHError):
    """Raised when a computed limit differs from the group an input file expects."""

    pass


class ReportSchemaError(PEHError):
    """Raised when a JSON report does not validate against the shipped schema."""

    pass
