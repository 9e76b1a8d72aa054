"""
Limits Resource.

Direct limits of stationary and eventually periodic systems of groups.
"""

from fractions import Fraction
from typing import Optional, Sequence, Union

from peh.limits import (
    DirectSystem,
    LimitGroup,
    iso_check,
    limit_of_system,
    membership_in_system,
    membership_test,
    stationary_limit,
)
from peh.linalg import IntMatrix
from peh.resources.base import BaseResource


class Limits(BaseResource):
    """
    Direct limit classification with the facade's horizons.

    Example:
        ```python
        peh = PEHomology(verified_depth=8)
        str(peh.limits.stationary([[2]]))   # 'Z[1/2]'
        ```
    """

    def stationary(
        self,
        matrix: Union[IntMatrix, Sequence[Sequence[int]]],
        verified_depth: Optional[int] = None,
    ) -> LimitGroup:
        M = matrix if isinstance(matrix, IntMatrix) else IntMatrix(matrix)
        settings = self._settings({"verified_depth": verified_depth})
        return stationary_limit(M, settings.verified_depth)

    def system(
        self,
        system: DirectSystem,
        limit_horizon: Optional[int] = None,
        verified_depth: Optional[int] = None,
    ) -> LimitGroup:
        """
        Raises:
            HorizonExceeded: If no isomorphism tail or stationary period is found.
        """
        settings = self._settings(
            {"limit_horizon": limit_horizon, "verified_depth": verified_depth}
        )
        return limit_of_system(system, settings.limit_horizon, settings.verified_depth)

    def membership(
        self,
        presentation: Union[LimitGroup, IntMatrix, Sequence[IntMatrix]],
        vector: Sequence[Union[int, Fraction]],
        depth: Optional[int] = None,
    ) -> bool:
        """Membership along a stationary presentation or a list of stage maps."""
        n = depth if depth is not None else self.config.verified_depth
        if isinstance(presentation, (LimitGroup, IntMatrix)):
            return membership_test(presentation, vector, n)
        return membership_in_system(list(presentation), vector, n)

    def iso(self, first: LimitGroup, second: LimitGroup) -> bool:
        return iso_check(first, second)
