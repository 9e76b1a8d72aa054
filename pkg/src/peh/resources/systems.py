"""
Systems Resource.

One-dimensional mixed substitution systems.
"""

from pathlib import Path
from typing import Any, Iterable, List, Mapping, Optional, Union

from peh.catalog import resolve
from peh.report import PipelineReport
from peh.resources.base import BaseResource
from peh.subst1d import (
    Pair,
    SubstitutionSystem1D,
    arnoux_rauzy_system,
    legal_pairs,
    load_system,
    pe_homology_1d,
    solenoid_system,
)


class Systems(BaseResource):
    """
    Load and compute 1-D systems.

    Example:
        ```python
        peh = PEHomology(levels=4)
        report = peh.systems.compute("fibonacci")
        str(report.limits[0])   # 'Z^2'
        ```
    """

    def load(self, source: Union[str, Path, Mapping[str, Any]]) -> SubstitutionSystem1D:
        """Load a TOML file, a bundled example by name, or a parsed document."""
        if isinstance(source, Mapping):
            return load_system(source)
        return load_system(resolve(source))

    def legal_pairs(self, system: SubstitutionSystem1D, level: int = 0) -> List[Pair]:
        return legal_pairs(system, level, self.config.horizon)

    def solenoid(self, k: int) -> SubstitutionSystem1D:
        return solenoid_system(k)

    def arnoux_rauzy(
        self, k: int, prefix: Iterable[int] = (), cycle: Iterable[int] = ()
    ) -> SubstitutionSystem1D:
        return arnoux_rauzy_system(k, prefix, cycle)

    def compute(
        self,
        system: Union[SubstitutionSystem1D, str, Path, Mapping[str, Any]],
        levels: Optional[int] = None,
    ) -> PipelineReport:
        if not isinstance(system, SubstitutionSystem1D):
            system = self.load(system)
        settings = self._settings({"levels": levels})
        return pe_homology_1d(
            system,
            levels=settings.levels,
            horizon=settings.horizon,
            limit_horizon=settings.limit_horizon,
            verified_depth=settings.verified_depth,
        )
