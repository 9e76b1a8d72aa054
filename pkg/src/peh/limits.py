"""
Direct systems of finitely generated abelian groups and their limits.

A stationary system ``Z^k -> Z^k -> ...`` along a repeated matrix ``M`` is first cut
down to the eventual image of ``M``, where the reduced matrix ``M'`` is
nonsingular. Unimodular ``M'`` gives a free group. When the non-unit eigenvalues of
``M'`` are integers with full eigenspaces, and those eigenvectors generate the integer
points of their span over ``Z[1/|l|]``, the limit is reported in normal form; everything
else is kept as a presentation.
"""

import logging
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from sympy import Matrix, primefactors

from peh.constants import DEFAULT_LIMIT_HORIZON, DEFAULT_VERIFIED_DEPTH
from peh.exceptions import HorizonExceeded, NotClassified, PEHError, ValidationError
from peh.linalg import AbelianGroup, IntMatrix, is_homomorphism, is_isomorphism, saturate
from peh.linalg.smith import solve_integer

logger = logging.getLogger(__name__)


class LimitKind(str, Enum):
    NORMAL_FORM = "normal_form"
    PRESENTATION = "presentation"


def radical(m: int) -> int:
    """Product of the distinct primes dividing ``m``."""
    return math.prod(primefactors(abs(m)))


def _merge_localized(pairs: Sequence[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    counts: Counter = Counter()
    for base, mult in pairs:
        if base < 2 or mult < 1:
            raise ValidationError(f"Please provide a valid localisation Z[1/{base}]^{mult}.")
        counts[radical(base)] += mult
    return tuple(sorted(counts.items()))


@dataclass(frozen=True)
class LimitGroup:
    """
    Classified direct limit.

    ``NORMAL_FORM``: ``Z^free_rank`` plus ``Z[1/base]^mult`` for each entry of
    ``localized`` plus torsion. With ``coefficients == "Q"`` only ``free_rank`` is
    used and the group is ``Q^free_rank``.

    ``PRESENTATION``: the limit of ``Z^rank`` along the nonsingular ``matrix``,
    plus ``torsion`` (which is unresolved when ``torsion_resolved`` is false).
    """

    kind: LimitKind
    free_rank: int = 0
    localized: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)
    torsion: Tuple[int, ...] = field(default_factory=tuple)
    rank: int = 0
    matrix: Optional[IntMatrix] = None
    verified_depth: int = 0
    coefficients: str = "Z"
    torsion_resolved: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "localized", _merge_localized(self.localized))
        object.__setattr__(self, "torsion", AbelianGroup(0, tuple(self.torsion)).torsion)
        if self.kind is LimitKind.PRESENTATION:
            if self.matrix is None or self.matrix.shape != (self.rank, self.rank):
                raise ValidationError("Please provide a valid square presentation matrix.")
            if self.matrix.det() == 0:
                raise ValidationError("Presentation matrices must be nonsingular.")

    @classmethod
    def normal_form(
        cls,
        free_rank: int = 0,
        localized: Sequence[Tuple[int, int]] = (),
        torsion: Sequence[int] = (),
        verified_depth: int = 0,
    ) -> "LimitGroup":
        return cls(
            LimitKind.NORMAL_FORM,
            free_rank=free_rank,
            localized=tuple(localized),
            torsion=tuple(torsion),
            verified_depth=verified_depth,
        )

    @classmethod
    def from_group(cls, group: AbelianGroup, verified_depth: int = 0) -> "LimitGroup":
        return cls.normal_form(group.free_rank, (), group.torsion, verified_depth)

    @classmethod
    def rational(cls, rank: int) -> "LimitGroup":
        return cls(LimitKind.NORMAL_FORM, free_rank=rank, coefficients="Q")

    @classmethod
    def presentation(
        cls,
        matrix: IntMatrix,
        torsion: Sequence[int] = (),
        verified_depth: int = 0,
        torsion_resolved: bool = True,
    ) -> "LimitGroup":
        return cls(
            LimitKind.PRESENTATION,
            torsion=tuple(torsion),
            rank=matrix.rows,
            matrix=matrix,
            verified_depth=verified_depth,
            torsion_resolved=torsion_resolved,
        )

    @property
    def is_classified(self) -> bool:
        return self.kind is LimitKind.NORMAL_FORM

    def __str__(self) -> str:
        if self.coefficients == "Q":
            if self.free_rank == 0:
                return "0"
            return "Q" if self.free_rank == 1 else f"Q^{self.free_rank}"
        parts = []
        if self.kind is LimitKind.PRESENTATION:
            parts.append(f"colim(Z^{self.rank}, {self.matrix.to_lists()})")
        elif self.free_rank:
            parts.append(str(AbelianGroup(self.free_rank)))
        for base, mult in self.localized:
            parts.extend([f"Z[1/{base}]"] * mult)
        parts.extend(f"Z/{d}" for d in self.torsion)
        if not self.torsion_resolved:
            parts.append("(torsion unresolved)")
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> Dict[str, Any]:
        if self.kind is LimitKind.PRESENTATION:
            return {
                "kind": self.kind.value,
                "rank": self.rank,
                "matrix": self.matrix.to_lists() if self.matrix is not None else [],
                "torsion": list(self.torsion),
                "torsion_resolved": self.torsion_resolved,
                "verified_depth": self.verified_depth,
                "coefficients": self.coefficients,
                "text": str(self),
            }
        return {
            "kind": self.kind.value,
            "free_rank": self.free_rank,
            "localized": [{"base": b, "mult": m} for b, m in self.localized],
            "torsion": list(self.torsion),
            "verified_depth": self.verified_depth,
            "coefficients": self.coefficients,
            "text": str(self),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LimitGroup":
        """Read an expectation such as ``{"free_rank": 1, "localized": [{"base": 2}]}``."""
        if data.get("coefficients", "Z") == "Q":
            return cls.rational(int(data.get("free_rank", 0)))
        localized = [(int(e["base"]), int(e.get("mult", 1))) for e in data.get("localized", [])]
        return cls.normal_form(
            int(data.get("free_rank", 0)),
            localized,
            [int(d) for d in data.get("torsion", [])],
        )


class EventualImage(NamedTuple):
    rank: int
    basis: IntMatrix
    matrix: IntMatrix


def eventual_image(M: IntMatrix) -> EventualImage:
    """
    Restrict a square matrix to the saturated column space of its stable power.

    Returns ``(r, B, M')`` with ``M @ B == B @ M'`` and ``M'`` nonsingular.
    """
    if M.rows != M.cols:
        raise ValidationError("Please provide a valid square matrix.")
    k = M.rows
    B = saturate(M.power(k))
    columns = []
    for column in (M @ B).columns():
        solution = solve_integer(B, column)
        if solution is None:
            raise PEHError("Eventual image is not invariant under the matrix.")
        columns.append(solution)
    reduced = IntMatrix.from_columns(columns, B.cols)
    logger.debug("Eventual image of %dx%d matrix has rank %d", k, k, B.cols)
    return EventualImage(B.cols, B, reduced)


def _is_integral(vector: Sequence[Fraction]) -> bool:
    return all(x.denominator == 1 for x in vector)


def _fractions(v: Sequence[Union[int, Fraction]]) -> List[Fraction]:
    return [Fraction(x) for x in v]


def membership_in_system(
    maps: Sequence[IntMatrix], v: Sequence[Union[int, Fraction]], depth: int
) -> bool:
    """
    True iff the rational vector ``v`` becomes integral after at most ``depth`` of
    the given stage maps, applied in order.
    """
    w = _fractions(v)
    for n in range(min(depth, len(maps)) + 1):
        if _is_integral(w):
            return True
        if n == len(maps):
            break
        matrix = maps[n]
        w = [sum((a * x for a, x in zip(row, w)), Fraction(0)) for row in matrix]
    return False


def membership_test(
    P: Union[LimitGroup, IntMatrix], v: Sequence[Union[int, Fraction]], depth: int
) -> bool:
    """
    True iff ``v`` lies in ``M'^-n Z^r`` for some ``n <= depth``.

    Example:
        ```python
        membership_test(IntMatrix([[2]]), [Fraction(1, 8)], 12)   # True
        membership_test(IntMatrix([[2]]), [Fraction(1, 3)], 12)   # False
        ```
    """
    matrix = P.matrix if isinstance(P, LimitGroup) else P
    if matrix is None:
        raise NotClassified("Membership needs a presentation matrix.")
    if len(v) != matrix.cols:
        raise ValidationError(f"Please provide a valid vector of length {matrix.cols}.")
    return membership_in_system([matrix] * depth, v, depth)


def _primitive(vector: Sequence[Any]) -> Tuple[int, ...]:
    values = [Fraction(int(x.p), int(x.q)) for x in vector]
    scale = math.lcm(*[x.denominator for x in values])
    ints = [int(x * scale) for x in values]
    g = math.gcd(*ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    return tuple(-x for x in ints) if lead < 0 else tuple(ints)


class Eigenspace(NamedTuple):
    value: int
    basis: IntMatrix


def expanding_eigenspaces(reduced: IntMatrix) -> Optional[List[Eigenspace]]:
    """
    Saturated eigenspaces of the eigenvalues of modulus other than one.

    Returns None unless every eigenvalue is an integer and each non-unit eigenvalue
    has a full set of eigenvectors.
    """
    spaces = []
    for value, multiplicity, vectors in Matrix(reduced.to_lists()).eigenvects():
        if not value.is_integer:
            return None
        if abs(int(value)) == 1:
            continue
        if len(vectors) != multiplicity:
            return None
        columns = [_primitive(list(vector)) for vector in vectors]
        basis = saturate(IntMatrix.from_columns(columns, reduced.rows))
        spaces.append(Eigenspace(int(value), basis))
    return spaces


def _is_localized(x: Any, value: int) -> bool:
    return set(primefactors(int(x.q))) <= set(primefactors(abs(value)))


def eigenlattice_spans(
    reduced: IntMatrix, spaces: Sequence[Eigenspace], depth: int = DEFAULT_VERIFIED_DEPTH
) -> bool:
    """
    True iff the integer points of the expanding span lie in the sum of the
    ``Z[1/|l|]``-spans of the eigenspace bases.

    Coordinates are solved exactly; a coordinate on an eigenvector of ``l`` may only
    have primes of ``l`` in its denominator. Each component ``x * e`` must also pass
    ``membership_test`` along ``reduced`` within ``depth`` steps.
    """
    if not spaces:
        return True
    owners: List[int] = []
    columns: List[Tuple[int, ...]] = []
    for space in spaces:
        columns.extend(space.basis.columns())
        owners.extend([space.value] * space.basis.cols)
    E = IntMatrix.from_columns(columns, reduced.rows)
    P = Matrix(E.to_lists())
    gram = P.T * P
    for point in saturate(E).columns():
        coordinates = gram.LUsolve(P.T * Matrix(list(point)))
        for x, value, vector in zip(coordinates, owners, columns):
            if not _is_localized(x, value):
                return False
            component = [Fraction(int(x.p), int(x.q)) * c for c in vector]
            if not membership_test(reduced, component, depth):
                return False
    return True


def stationary_limit(M: IntMatrix, verified_depth: int = DEFAULT_VERIFIED_DEPTH) -> LimitGroup:
    """
    Classify the limit of ``Z^k -> Z^k -> ...`` along the repeated matrix ``M``.

    The expanding part is classified as ``Z[1/|l|]^d`` per eigenvalue ``l`` when the
    eigenvectors generate its integer points over the localised rings. The quotient by
    it is carried unimodularly and contributes a free summand.

    Example:
        ```python
        str(stationary_limit(IntMatrix([[1, 1, 1], [1, 0, 0], [1, 0, 0]])))
        # 'Z + Z[1/2]'
        stationary_limit(IntMatrix([[2, -1], [0, 7]])).is_classified
        # False
        ```
    """
    started = time.perf_counter()
    rank, _, reduced = eventual_image(M)
    if rank == 0:
        return LimitGroup.normal_form(verified_depth=verified_depth)
    if abs(reduced.det()) == 1:
        return LimitGroup.normal_form(rank, verified_depth=verified_depth)

    spaces = expanding_eigenspaces(reduced)
    if spaces is None:
        logger.info("Reduced matrix %s is not diagonalisable over Z", reduced.to_lists())
        return LimitGroup.presentation(reduced, verified_depth=verified_depth)
    if not eigenlattice_spans(reduced, spaces, verified_depth):
        logger.warning(
            "Eigenvectors of %s span a proper sublattice over the localised rings; "
            "keeping the presentation",
            reduced.to_lists(),
        )
        return LimitGroup.presentation(reduced, verified_depth=verified_depth)

    localized = [(abs(space.value), space.basis.cols) for space in spaces]
    free_rank = rank - sum(space.basis.cols for space in spaces)
    result = LimitGroup.normal_form(free_rank, localized, verified_depth=verified_depth)
    logger.debug(
        "Classified stationary limit of %s as %s (elapsed: %.3fs)",
        M.to_lists(),
        result,
        time.perf_counter() - started,
    )
    return result


@dataclass(frozen=True)
class DirectSystem:
    """
    ``stages[0] -> stages[1] -> ...`` along ``maps``.

    When ``stationary_from`` is set, stage data from that index on repeats with the
    given ``period`` and the truncated lists hold at least one full period.
    """

    stages: Tuple[AbelianGroup, ...]
    maps: Tuple[IntMatrix, ...]
    stationary_from: Optional[int] = None
    period: int = 1
    coefficients: str = "Z"

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.stages:
            raise ValidationError("Please provide at least one stage.")
        if len(self.maps) != len(self.stages) - 1:
            raise ValidationError(
                f"Please provide {len(self.stages) - 1} stage maps (got {len(self.maps)})."
            )
        if self.coefficients not in ("Z", "Q"):
            raise ValidationError(f"Please provide valid coefficients (got {self.coefficients}).")
        for i, F in enumerate(self.maps):
            source, target = self.stages[i], self.stages[i + 1]
            if not is_homomorphism(F, source, target):
                raise ValidationError(
                    f"Stage map {i} is not a homomorphism from {source} to {target}."
                )
        if self.period < 1:
            raise ValidationError("Please provide a valid period.")
        if self.stationary_from is not None:
            s = self.stationary_from
            if s < 0 or s + self.period >= len(self.stages):
                raise ValidationError("Stationary systems must list one full period of maps.")
            if self.stages[s] != self.stages[s + self.period]:
                raise ValidationError("Stationary stages must repeat with the declared period.")

    @classmethod
    def stationary(
        cls, group: AbelianGroup, F: IntMatrix, coefficients: str = "Z"
    ) -> "DirectSystem":
        return cls((group, group), (F,), stationary_from=0, coefficients=coefficients)

    def period_map(self) -> IntMatrix:
        """Composite of one period of maps starting at ``stationary_from``."""
        if self.stationary_from is None:
            raise ValidationError("Only stationary systems have a period map.")
        composite = IntMatrix.identity(self.stages[self.stationary_from].n_generators)
        for i in range(self.stationary_from, self.stationary_from + self.period):
            composite = self.maps[i] @ composite
        return composite


def _is_stage_isomorphism(sys: DirectSystem, i: int) -> bool:
    F = sys.maps[i]
    if sys.coefficients == "Q":
        return F.rows == F.cols and F.det() != 0
    return is_isomorphism(F, sys.stages[i], sys.stages[i + 1])


def _isomorphism_tail(sys: DirectSystem) -> int:
    start = len(sys.maps)
    while start > 0 and _is_stage_isomorphism(sys, start - 1):
        start -= 1
    return start


def _stationary(sys: DirectSystem, verified_depth: int) -> LimitGroup:
    group = sys.stages[sys.stationary_from or 0]
    composite = sys.period_map()
    if sys.coefficients == "Q":
        return LimitGroup.rational(eventual_image(composite).rank)
    f = group.free_rank
    free_block = composite.select(range(f), range(f))
    free_limit = stationary_limit(free_block, verified_depth)
    if not group.torsion:
        return free_limit

    torsion_only = AbelianGroup(0, group.torsion)
    n = group.n_generators
    torsion_block = composite.select(range(f, n), range(f, n))
    if not is_isomorphism(torsion_block, torsion_only, torsion_only):
        logger.warning("Torsion %s is not carried bijectively; left unresolved", torsion_only)
        reduced = eventual_image(free_block).matrix
        return LimitGroup.presentation(
            reduced, group.torsion, verified_depth, torsion_resolved=False
        )
    if free_limit.is_classified:
        return LimitGroup.normal_form(
            free_limit.free_rank, free_limit.localized, group.torsion, verified_depth
        )
    return LimitGroup.presentation(free_limit.matrix, group.torsion, verified_depth)


def limit_of_system(
    sys: DirectSystem,
    horizon: int = DEFAULT_LIMIT_HORIZON,
    verified_depth: int = DEFAULT_VERIFIED_DEPTH,
) -> LimitGroup:
    """
    Limit of a direct system.

    An isomorphism tail starting at a stage ``N <= horizon`` gives ``stages[N]``.
    Otherwise a stationary system is classified along its period map.

    Raises:
        HorizonExceeded: If neither criterion is detected within ``horizon`` stages.
    """
    if horizon < 1:
        raise ValidationError("Please provide a valid horizon.")
    tail = _isomorphism_tail(sys)
    has_tail = tail < len(sys.maps) or not sys.maps
    if sys.stationary_from is not None and sys.stationary_from <= horizon:
        if has_tail and tail <= sys.stationary_from:
            return _group_limit(sys, tail, verified_depth)
        return _stationary(sys, verified_depth)
    if has_tail and tail <= horizon:
        return _group_limit(sys, tail, verified_depth)
    raise HorizonExceeded(
        f"No isomorphism tail or stationary period found within {horizon} stages.",
        details={"stages": len(sys.stages), "horizon": horizon},
    )


def _group_limit(sys: DirectSystem, stage: int, verified_depth: int) -> LimitGroup:
    group = sys.stages[stage]
    if sys.coefficients == "Q":
        return LimitGroup.rational(group.n_generators)
    return LimitGroup.from_group(group, verified_depth)


def iso_check(L1: LimitGroup, L2: LimitGroup) -> bool:
    """
    Compare two classified limits.

    Raises:
        NotClassified: If either limit is a presentation.
    """
    for limit in (L1, L2):
        if not limit.is_classified:
            raise NotClassified(f"Cannot compare the unclassified limit {limit}.")
    return (
        L1.coefficients == L2.coefficients
        and L1.free_rank == L2.free_rank
        and L1.localized == L2.localized
        and L1.torsion == L2.torsion
    )
