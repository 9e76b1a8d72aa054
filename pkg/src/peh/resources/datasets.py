"""
Datasets Resource.

Declarative approximant datasets of dimension two and up.
"""

from pathlib import Path
from typing import Any, Mapping, Optional, Union

from peh.catalog import resolve
from peh.datasets import (
    ApproximantDataset,
    DaggerDataset,
    ValidationReport,
    compute,
    dagger_transform,
    duality_gap_report,
    load_dataset,
    validation_report,
)
from peh.report import PipelineReport, ShortExactSequenceReport
from peh.resources.base import BaseResource

Source = Union[ApproximantDataset, str, Path, Mapping[str, Any]]


class Datasets(BaseResource):
    """
    Load, validate and compute approximant datasets.

    Example:
        ```python
        peh = PEHomology(dagger=True)
        report = peh.datasets.compute("penrose-kite-dart")
        str(report.dagger.limits[0])              # 'Z^2'
        report.duality_gap.cokernel.torsion       # (5, 5)
        ```
    """

    def load(self, source: Source) -> ApproximantDataset:
        if isinstance(source, ApproximantDataset):
            return source
        if isinstance(source, Mapping):
            return load_dataset(source)
        return load_dataset(resolve(source))

    def validate(self, source: Source) -> ApproximantDataset:
        """
        Raises:
            InvariantViolation: Listing every failed check.
        """
        return validation_report(self.load(source)).raise_for_violations()

    def report(self, source: Source) -> ValidationReport:
        return validation_report(self.load(source))

    def dagger(self, source: Source) -> DaggerDataset:
        return dagger_transform(self.load(source))

    def duality_gap(self, source: Source) -> ShortExactSequenceReport:
        return duality_gap_report(self.load(source))

    def compute(
        self,
        source: Source,
        dagger: Optional[bool] = None,
        mode: Optional[str] = None,
    ) -> PipelineReport:
        settings = self._settings({"dagger": dagger, "mode": mode})
        return compute(
            self.load(source),
            limit_horizon=settings.limit_horizon,
            verified_depth=settings.verified_depth,
            dagger=settings.dagger,
            mode=settings.mode,
        )
