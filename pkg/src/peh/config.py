"""
Run configuration shared by the library facade and the command line.
"""

from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Optional

from peh.constants import (
    COEFFICIENT_MODES,
    DEFAULT_HORIZON,
    DEFAULT_LEVELS,
    DEFAULT_LIMIT_HORIZON,
    DEFAULT_VERIFIED_DEPTH,
    OUTPUT_FORMATS,
)
from peh.exceptions import ValidationError


@dataclass(frozen=True)
class RunConfig:
    """
    Tunables for one pipeline run.

    Example:
        ```python
        config = RunConfig(levels=4, dagger=True).validate()
        config.with_options(format="json").format   # 'json'
        ```
    """

    levels: int = DEFAULT_LEVELS
    horizon: int = DEFAULT_HORIZON
    limit_horizon: int = DEFAULT_LIMIT_HORIZON
    verified_depth: int = DEFAULT_VERIFIED_DEPTH
    format: str = "text"
    dagger: bool = False
    mode: Optional[str] = None
    output: Optional[str] = None
    include_timing: bool = False

    def validate(self) -> "RunConfig":
        """
        Raises:
            ValidationError: If a count is not positive or a choice is unknown.
        """
        for name in ("levels", "horizon", "limit_horizon", "verified_depth"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValidationError(f"Please provide a valid {name} (got {value!r}).")
        if self.format not in OUTPUT_FORMATS:
            raise ValidationError(f"Please provide a valid output format (got {self.format}).")
        if self.mode is not None and self.mode not in COEFFICIENT_MODES:
            raise ValidationError(f"Please provide a valid coefficient mode (got {self.mode}).")
        return self

    def with_options(self, **overrides: Any) -> "RunConfig":
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ValidationError(f"Unknown configuration option(s): {', '.join(unknown)}.")
        return replace(self, **overrides).validate()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
