"""
Finitely generated abelian groups in invariant-factor normal form, and
homomorphisms between them written in generator coordinates.

Generators are ordered free first, then torsion in the order of the invariant
factors. A homomorphism ``F`` from ``source`` to ``target`` is an integer matrix
with one column per source generator and one row per target generator; rows that
belong to torsion generators are read modulo their invariant factor.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

from peh.exceptions import ValidationError
from peh.linalg.matrix import IntMatrix, Vector
from peh.linalg.smith import (
    column_lattice_basis,
    kernel_basis,
    smith_normal_form,
    solve_integer,
)


@dataclass(frozen=True)
class AbelianGroup:
    """
    Z^free_rank plus the cyclic groups Z/d for d in ``torsion``.

    Example:
        ```python
        G = AbelianGroup(2, (5,))
        str(G)   # 'Z^2 + Z/5'
        ```
    """

    free_rank: int = 0
    torsion: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "torsion", tuple(self.torsion))
        if self.free_rank < 0:
            raise ValidationError("Please provide a valid free rank.")
        for d in self.torsion:
            if d < 2:
                raise ValidationError(f"Invariant factors must be at least 2 (got {d}).")
        for d, e in zip(self.torsion, self.torsion[1:]):
            if e % d:
                raise ValidationError(f"Invariant factors must divide each other ({d} !| {e}).")

    @classmethod
    def from_moduli(cls, free_rank: int, moduli: Sequence[int]) -> "AbelianGroup":
        """Normalise an arbitrary list of cyclic orders into invariant factors."""
        snf = smith_normal_form(IntMatrix.diagonal([abs(m) for m in moduli]))
        free = free_rank + (len(moduli) - snf.rank)
        return cls(free, tuple(d for d in snf.invariant_factors if d > 1))

    @property
    def n_generators(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def is_trivial(self) -> bool:
        return self.n_generators == 0

    @property
    def moduli(self) -> Tuple[int, ...]:
        """Per-generator modulus, 0 for free generators."""
        return (0,) * self.free_rank + self.torsion

    def reduce(self, coordinates: Sequence[int]) -> Vector:
        """Reduce torsion coordinates into ``[0, d)``."""
        if len(coordinates) != self.n_generators:
            raise ValidationError(
                f"Please provide a valid coordinate vector of length {self.n_generators}."
            )
        return tuple(c % m if m else c for c, m in zip(coordinates, self.moduli))

    def reduce_matrix(self, F: IntMatrix) -> IntMatrix:
        """Reduce the torsion rows of a homomorphism matrix into this group."""
        return IntMatrix.from_columns([self.reduce(col) for col in F.columns()], F.rows)

    def relations(self) -> IntMatrix:
        """Columns generating the relation lattice of the torsion generators."""
        n = self.n_generators
        columns = []
        for i, d in enumerate(self.torsion):
            col = [0] * n
            col[self.free_rank + i] = d
            columns.append(col)
        return IntMatrix.from_columns(columns, n)

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> Dict[str, Any]:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AbelianGroup":
        moduli = [int(d) for d in data.get("torsion", [])]
        return cls.from_moduli(int(data.get("free_rank", 0)), moduli)


def is_homomorphism(F: IntMatrix, source: AbelianGroup, target: AbelianGroup) -> bool:
    """Check that F sends every source relation into the target relations."""
    if F.shape != (target.n_generators, source.n_generators):
        return False
    target_relations = target.relations()
    for column in source.relations().columns():
        image = F.apply(column)
        if solve_integer(target_relations, image) is None:
            return False
    return True


@dataclass(frozen=True)
class HomomorphismReport:
    """Kernel, image and cokernel of a homomorphism, as abstract groups."""

    kernel: AbelianGroup
    image: AbelianGroup
    cokernel: AbelianGroup

    @property
    def injective(self) -> bool:
        return self.kernel.is_trivial

    @property
    def surjective(self) -> bool:
        return self.cokernel.is_trivial

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kernel": self.kernel.to_dict(),
            "image": self.image.to_dict(),
            "cokernel": self.cokernel.to_dict(),
        }


def _group_of_cokernel(A: IntMatrix) -> AbelianGroup:
    snf = smith_normal_form(A)
    return AbelianGroup(A.rows - snf.rank, tuple(d for d in snf.invariant_factors if d > 1))


def homomorphism_report(
    F: IntMatrix, source: AbelianGroup, target: AbelianGroup
) -> HomomorphismReport:
    """
    Compute kernel, image and cokernel of ``F : source -> target``.

    Raises:
        ValidationError: If F has the wrong shape or is not well defined.
    """
    if not is_homomorphism(F, source, target):
        raise ValidationError(
            f"Please provide a valid homomorphism from {source} to {target}."
        )
    ns = source.n_generators
    stacked = F.hstack(target.relations())
    cokernel = _group_of_cokernel(stacked)

    solutions = kernel_basis(stacked)
    projected = solutions.select(range(ns), range(solutions.cols))
    kernel_lattice = column_lattice_basis(projected)

    source_relations: List[Sequence[int]] = []
    for column in source.relations().columns():
        coords = solve_integer(kernel_lattice, column)
        if coords is None:
            raise ValidationError("Source relations must lie in the kernel lattice.")
        source_relations.append(coords)
    kernel = _group_of_cokernel(
        IntMatrix.from_columns(source_relations, kernel_lattice.cols)
    )
    image = _group_of_cokernel(kernel_lattice)
    return HomomorphismReport(kernel=kernel, image=image, cokernel=cokernel)


def is_isomorphism(F: IntMatrix, source: AbelianGroup, target: AbelianGroup) -> bool:
    report = homomorphism_report(F, source, target)
    return report.injective and report.surjective


@dataclass(frozen=True)
class CokernelProjection:
    """
    Coordinates on ``Z^rows / column-lattice(A)``.

    ``transform`` is the left Smith transform of A; ``free_rows`` and
    ``torsion_rows`` pick the rows of ``transform @ x`` that survive, in generator
    order.
    """

    group: AbelianGroup
    transform: IntMatrix
    free_rows: Tuple[int, ...]
    torsion_rows: Tuple[int, ...]
    generators: Tuple[Vector, ...]

    def project(self, x: Sequence[int]) -> Vector:
        y = self.transform.apply(x)
        raw = [y[i] for i in self.free_rows] + [y[i] for i in self.torsion_rows]
        return self.group.reduce(raw)


def cokernel(A: IntMatrix) -> Tuple[AbelianGroup, CokernelProjection]:
    """
    The group ``Z^rows / column-lattice(A)`` together with its projection.

    Example:
        ```python
        group, projection = cokernel(IntMatrix([[2, 0], [0, 3]]))
        str(group)                    # 'Z/6'
        projection.project((1, 1))    # a coordinate in [0, 6)
        ```
    """
    snf = smith_normal_form(A)
    free_rows = tuple(range(snf.rank, A.rows))
    torsion_rows = tuple(i for i, d in enumerate(snf.invariant_factors) if d > 1)
    group = AbelianGroup(len(free_rows), tuple(snf.invariant_factors[i] for i in torsion_rows))
    generators = tuple(snf.U_inv.column(i) for i in free_rows + torsion_rows)
    return group, CokernelProjection(group, snf.U, free_rows, torsion_rows, generators)
