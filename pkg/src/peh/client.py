"""
PE homology library facade.
"""

from pathlib import Path
from typing import Any, Optional, Union

from peh.catalog import load_input
from peh.config import RunConfig
from peh.datasets import ApproximantDataset
from peh.exceptions import ValidationError
from peh.report import PipelineReport
from peh.resources.datasets import Datasets
from peh.resources.limits import Limits
from peh.resources.matrices import Matrices
from peh.resources.systems import Systems
from peh.subst1d import SubstitutionSystem1D


class PEHomology:
    """
    Entry point for computing PE homology.

    Holds a validated ``RunConfig`` and exposes resources bound to it. Use
    ``with_options`` to derive a facade with other settings.

    Example:
        ```python
        from peh import PEHomology

        peh = PEHomology(levels=6)

        # Stationary limits
        peh.limits.stationary([[1, 1, 1], [1, 0, 0], [1, 0, 0]])

        # 1-D systems and 2-D datasets, bundled or from files
        fibonacci = peh.systems.compute("fibonacci")
        penrose = peh.with_options(dagger=True).datasets.compute("penrose-kite-dart")

        # Any input file, dispatched by suffix
        report = peh.compute("examples/thue-morse.toml")
        ```
    """

    def __init__(self, config: Optional[RunConfig] = None, **overrides: Any):
        """
        Initialize the facade.

        Args:
            config: Base configuration (default: ``RunConfig()``).
            **overrides: Individual ``RunConfig`` fields to replace.

        Raises:
            ValidationError: If the configuration is invalid.
        """
        if config is not None and not isinstance(config, RunConfig):
            raise ValidationError("Please provide a valid RunConfig.")
        base = config or RunConfig()
        self.config = base.with_options(**overrides) if overrides else base.validate()

        self.matrices = Matrices(self)
        self.limits = Limits(self)
        self.systems = Systems(self)
        self.datasets = Datasets(self)

    def with_options(self, **overrides: Any) -> "PEHomology":
        """
        Create a new facade with some settings replaced.

        Example:
            ```python
            peh = PEHomology()
            quick = peh.with_options(levels=3, verified_depth=6)
            ```
        """
        return PEHomology(self.config, **overrides)

    def compute(self, source: Union[str, Path]) -> PipelineReport:
        """Run the pipeline matching the input kind of ``source``."""
        item = load_input(source)
        if isinstance(item, SubstitutionSystem1D):
            return self.systems.compute(item)
        if isinstance(item, ApproximantDataset):
            return self.datasets.compute(item)
        raise ValidationError(f"Please provide a valid input (got {type(item).__name__}).")

    def __repr__(self) -> str:
        return f"PEHomology({self.config!r})"
