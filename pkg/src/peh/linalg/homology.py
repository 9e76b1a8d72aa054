"""
Homology of bounded chain complexes of free abelian groups.

Generators of ``H_n`` are lifted deterministically: cycles come from a saturated
kernel basis of ``d_n``, and the Smith reduction of the boundaries expressed in
that basis fixes the generator order (free generators first, then torsion
generators by increasing invariant factor).
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from peh.exceptions import ComplexInvalid, NotACycle, NotAChainMap, ValidationError, Violation
from peh.linalg.groups import AbelianGroup
from peh.linalg.matrix import IntMatrix, Vector
from peh.linalg.smith import kernel_basis, left_inverse, smith_normal_form

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FinChainComplex:
    """
    ``0 <- C_0 <- C_1 <- ... <- C_top <- 0`` with ``C_n = Z^dims[n]``.

    ``boundaries[n - 1]`` is the matrix of ``d_n : C_n -> C_{n-1}``.
    """

    dims: Tuple[int, ...]
    boundaries: Tuple[IntMatrix, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        if not self.dims or any(d < 0 for d in self.dims):
            raise ValidationError("Please provide valid chain group ranks.")
        if len(self.boundaries) != len(self.dims) - 1:
            raise ValidationError(
                f"Please provide {len(self.dims) - 1} boundary matrices "
                f"(got {len(self.boundaries)})."
            )
        for n, d in enumerate(self.boundaries, start=1):
            if d.shape != (self.dims[n - 1], self.dims[n]):
                raise ValidationError(
                    f"Boundary d_{n} must be {self.dims[n - 1]}x{self.dims[n]}, "
                    f"got {d.rows}x{d.cols}."
                )

    @property
    def top_degree(self) -> int:
        return len(self.dims) - 1

    def boundary(self, n: int) -> IntMatrix:
        """``d_n``, with the zero maps at ``n = 0`` and ``n = top + 1``."""
        if n == 0:
            return IntMatrix.zeros(0, self.dims[0])
        if n == self.top_degree + 1:
            return IntMatrix.zeros(self.dims[self.top_degree], 0)
        if not 0 < n <= self.top_degree:
            raise ValidationError(f"Please provide a valid degree (got {n}).")
        return self.boundaries[n - 1]

    def composition_violations(self) -> List[Violation]:
        """Every nonzero entry of ``d_{n-1} @ d_n``."""
        found = []
        for n in range(2, self.top_degree + 1):
            product = self.boundaries[n - 2] @ self.boundaries[n - 1]
            for i, j, x in product.nonzero_entries():
                found.append(
                    Violation("boundary_squared", f"d_{n - 1} d_{n} has entry {x}", n, i, j)
                )
        return found

    def validate(self) -> "FinChainComplex":
        violations = self.composition_violations()
        if violations:
            first = violations[0]
            raise ComplexInvalid(
                f"Boundary maps do not compose to zero: {first}",
                details={"violations": [str(v) for v in violations]},
            )
        return self

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * d for n, d in enumerate(self.dims))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dims": list(self.dims),
            "boundaries": {str(n): d.to_lists() for n, d in enumerate(self.boundaries, start=1)},
        }


@dataclass(frozen=True)
class HomologyGroup:
    """``H_n`` with its generator lifts and the data that reduces cycles to coordinates."""

    degree: int
    group: AbelianGroup
    generators: Tuple[Vector, ...]
    boundary: IntMatrix
    cycle_inverse: IntMatrix
    transform: IntMatrix
    rows: Tuple[int, ...]

    def coordinates(self, cycle: Sequence[int]) -> Vector:
        """
        Express a cycle in generator coordinates.

        Raises:
            NotACycle: If ``d_n @ cycle`` is nonzero.
        """
        if len(cycle) != self.boundary.cols:
            raise ValidationError(
                f"Please provide a valid chain of length {self.boundary.cols} "
                f"in degree {self.degree}."
            )
        if any(self.boundary.apply(cycle)):
            raise NotACycle(f"Chain {tuple(cycle)} is not a cycle in degree {self.degree}.")
        y = self.transform.apply(self.cycle_inverse.apply(cycle))
        return self.group.reduce([y[i] for i in self.rows])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "group": self.group.to_dict(),
            "generators": [list(g) for g in self.generators],
        }


@dataclass(frozen=True)
class HomologyResult:
    complex: FinChainComplex
    degrees: Tuple[HomologyGroup, ...]

    def __getitem__(self, n: int) -> HomologyGroup:
        return self.degrees[n]

    @property
    def groups(self) -> Tuple[AbelianGroup, ...]:
        return tuple(h.group for h in self.degrees)

    def to_dict(self) -> Dict[str, Any]:
        return {"degrees": [h.to_dict() for h in self.degrees]}


def _homology_in_degree(C: FinChainComplex, n: int) -> HomologyGroup:
    cycles = kernel_basis(C.boundary(n))
    inverse = left_inverse(cycles)
    relations = inverse @ C.boundary(n + 1)
    snf = smith_normal_form(relations)
    free_rows = tuple(range(snf.rank, cycles.cols))
    torsion_rows = tuple(i for i, d in enumerate(snf.invariant_factors) if d > 1)
    group = AbelianGroup(len(free_rows), tuple(snf.invariant_factors[i] for i in torsion_rows))
    rows = free_rows + torsion_rows
    generators = tuple(cycles.apply(snf.U_inv.column(i)) for i in rows)
    return HomologyGroup(
        degree=n,
        group=group,
        generators=generators,
        boundary=C.boundary(n),
        cycle_inverse=inverse,
        transform=snf.U,
        rows=rows,
    )


def homology(C: FinChainComplex) -> HomologyResult:
    """
    Compute ``H_n = ker d_n / im d_{n+1}`` in every degree.

    Raises:
        ComplexInvalid: If some ``d_{n-1} @ d_n`` is nonzero.

    Example:
        ```python
        circle = FinChainComplex((1, 1), (IntMatrix([[0]]),))
        [str(g) for g in homology(circle).groups]   # ['Z', 'Z']
        ```
    """
    started = time.perf_counter()
    C.validate()
    degrees = tuple(_homology_in_degree(C, n) for n in range(C.top_degree + 1))
    logger.debug(
        "Computed homology of complex with dims %s: %s (elapsed: %.3fs)",
        list(C.dims),
        ", ".join(str(h.group) for h in degrees),
        time.perf_counter() - started,
    )
    return HomologyResult(complex=C, degrees=degrees)


def homology_class(H: HomologyResult, degree: int, cycle: Sequence[int]) -> Vector:
    return H[degree].coordinates(cycle)


@dataclass(frozen=True)
class ChainMap:
    """Per-degree matrices ``f_n : C_n(source) -> C_n(target)``."""

    source: FinChainComplex
    target: FinChainComplex
    maps: Tuple[IntMatrix, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.source.top_degree != self.target.top_degree:
            raise ValidationError("Chain map source and target must have the same top degree.")
        if len(self.maps) != len(self.source.dims):
            raise ValidationError(
                f"Please provide {len(self.source.dims)} chain map matrices "
                f"(got {len(self.maps)})."
            )
        for n, f in enumerate(self.maps):
            if f.shape != (self.target.dims[n], self.source.dims[n]):
                raise ValidationError(
                    f"Chain map f_{n} must be {self.target.dims[n]}x{self.source.dims[n]}, "
                    f"got {f.rows}x{f.cols}."
                )

    @classmethod
    def identity(cls, C: FinChainComplex) -> "ChainMap":
        return cls(C, C, tuple(IntMatrix.identity(d) for d in C.dims))

    def compose(self, first: "ChainMap") -> "ChainMap":
        """The chain map ``self o first``."""
        if first.target != self.source:
            raise ValidationError("Chain maps do not compose: target and source differ.")
        maps = tuple(g @ f for g, f in zip(self.maps, first.maps))
        return ChainMap(first.source, self.target, maps)

    def commutation_violations(self, degrees: Optional[Iterable[int]] = None) -> List[Violation]:
        """Nonzero entries of ``f_{n-1} d_n - d_n f_n`` for the requested degrees."""
        wanted = range(1, self.source.top_degree + 1) if degrees is None else degrees
        found = []
        for n in wanted:
            if not 0 < n <= self.source.top_degree:
                continue
            pushed = self.maps[n - 1] @ self.source.boundary(n)
            defect = pushed - self.target.boundary(n) @ self.maps[n]
            for i, j, x in defect.nonzero_entries():
                found.append(
                    Violation("chain_map_commutes", f"f d - d f has entry {x}", n, i, j)
                )
        return found

    def validate(self, degrees: Optional[Iterable[int]] = None) -> "ChainMap":
        violations = self.commutation_violations(degrees)
        if violations:
            raise NotAChainMap(
                f"Maps do not commute with the boundaries: {violations[0]}",
                details={"violations": [str(v) for v in violations]},
            )
        return self


def induced_map(f: ChainMap, Hsrc: HomologyResult, Htgt: HomologyResult, degree: int) -> IntMatrix:
    """
    Matrix of ``H_degree(f)`` in the generator bases of ``Hsrc`` and ``Htgt``.

    Columns are indexed by source generators; torsion rows are reduced modulo the
    target's invariant factors.

    Raises:
        NotAChainMap: If f fails to commute at ``degree`` or ``degree + 1``.
    """
    f.validate((degree, degree + 1))
    fn = f.maps[degree]
    target = Htgt[degree]
    columns = [target.coordinates(fn.apply(g)) for g in Hsrc[degree].generators]
    return IntMatrix.from_columns(columns, target.group.n_generators)
