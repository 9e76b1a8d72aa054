"""
Smith normal form and the lattice operations built on it.

The decomposition is computed by elementary row and column operations, always
pivoting on the entry of smallest nonzero magnitude, and records the unimodular
transforms together with their exact inverses.
"""

import logging
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from peh.exceptions import ValidationError
from peh.linalg.matrix import IntMatrix, Vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SmithDecomposition:
    """
    Result of :func:`smith_normal_form`.

    ``U @ A @ V == D`` with ``U`` and ``V`` unimodular; ``U_inv`` and ``V_inv`` are
    their inverses. ``invariant_factors`` lists the ``rank`` nonzero diagonal
    entries of ``D`` (ones included), each dividing the next.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix
    rank: int
    invariant_factors: Tuple[int, ...]


class _Eliminator:
    """Mutable working state for one Smith reduction."""

    def __init__(self, A: IntMatrix):
        self.m, self.n = A.shape
        self.a = A.to_lists()
        self.u = IntMatrix.identity(self.m).to_lists()
        self.u_inv = IntMatrix.identity(self.m).to_lists()
        self.v = IntMatrix.identity(self.n).to_lists()
        self.v_inv = IntMatrix.identity(self.n).to_lists()
        self.steps = 0

    def swap_rows(self, i: int, k: int) -> None:
        if i == k:
            return
        self.a[i], self.a[k] = self.a[k], self.a[i]
        self.u[i], self.u[k] = self.u[k], self.u[i]
        for row in self.u_inv:
            row[i], row[k] = row[k], row[i]

    def swap_cols(self, j: int, k: int) -> None:
        if j == k:
            return
        for row in self.a:
            row[j], row[k] = row[k], row[j]
        for row in self.v:
            row[j], row[k] = row[k], row[j]
        self.v_inv[j], self.v_inv[k] = self.v_inv[k], self.v_inv[j]

    def add_row(self, target: int, source: int, k: int) -> None:
        """row[target] += k * row[source]"""
        self.steps += 1
        a_t, a_s = self.a[target], self.a[source]
        for j in range(self.n):
            a_t[j] += k * a_s[j]
        u_t, u_s = self.u[target], self.u[source]
        for j in range(self.m):
            u_t[j] += k * u_s[j]
        for row in self.u_inv:
            row[source] -= k * row[target]

    def add_col(self, target: int, source: int, k: int) -> None:
        """col[target] += k * col[source]"""
        self.steps += 1
        for row in self.a:
            row[target] += k * row[source]
        for row in self.v:
            row[target] += k * row[source]
        vi_s, vi_t = self.v_inv[source], self.v_inv[target]
        for j in range(self.n):
            vi_s[j] -= k * vi_t[j]

    def negate_row(self, i: int) -> None:
        self.a[i] = [-x for x in self.a[i]]
        self.u[i] = [-x for x in self.u[i]]
        for row in self.u_inv:
            row[i] = -row[i]

    def smallest_entry(self, t: int) -> Optional[Tuple[int, int]]:
        best = None
        best_abs = 0
        for i in range(t, self.m):
            row = self.a[i]
            for j in range(t, self.n):
                x = row[j]
                if x and (best is None or abs(x) < best_abs):
                    best, best_abs = (i, j), abs(x)
        return best

    def clear_cross(self, t: int) -> bool:
        """Reduce column t and row t modulo the pivot; True if remainders are left."""
        p = self.a[t][t]
        left = False
        for i in range(t + 1, self.m):
            if self.a[i][t]:
                self.add_row(i, t, -(self.a[i][t] // p))
                left = left or self.a[i][t] != 0
        for j in range(t + 1, self.n):
            if self.a[t][j]:
                self.add_col(j, t, -(self.a[t][j] // p))
                left = left or self.a[t][j] != 0
        return left

    def repivot_cross(self, t: int) -> None:
        best_abs = abs(self.a[t][t])
        move: Optional[Tuple[str, int]] = None
        for i in range(t + 1, self.m):
            x = self.a[i][t]
            if x and abs(x) < best_abs:
                best_abs, move = abs(x), ("row", i)
        for j in range(t + 1, self.n):
            x = self.a[t][j]
            if x and abs(x) < best_abs:
                best_abs, move = abs(x), ("col", j)
        if move is None:
            return
        if move[0] == "row":
            self.swap_rows(t, move[1])
        else:
            self.swap_cols(t, move[1])

    def non_divisible(self, t: int) -> Optional[int]:
        p = self.a[t][t]
        for i in range(t + 1, self.m):
            row = self.a[i]
            for j in range(t + 1, self.n):
                if row[j] % p:
                    return i
        return None

    def run(self) -> int:
        t = 0
        while t < min(self.m, self.n):
            pivot = self.smallest_entry(t)
            if pivot is None:
                break
            self.swap_rows(t, pivot[0])
            self.swap_cols(t, pivot[1])
            while True:
                if self.clear_cross(t):
                    self.repivot_cross(t)
                    continue
                bad_row = self.non_divisible(t)
                if bad_row is None:
                    break
                self.add_row(t, bad_row, 1)
            if self.a[t][t] < 0:
                self.negate_row(t)
            t += 1
        return t


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """
    Compute the Smith normal form ``U @ A @ V == D`` of an integer matrix.

    Args:
        A: Any integer matrix, including empty shapes.

    Returns:
        The decomposition with transforms, inverses, rank and invariant factors.

    Example:
        ```python
        snf = smith_normal_form(IntMatrix([[2, 4], [6, 8]]))
        snf.invariant_factors   # (2, 4)
        ```
    """
    started = time.perf_counter()
    work = _Eliminator(A)
    rank = work.run()
    m, n = A.shape
    factors = tuple(work.a[i][i] for i in range(rank))
    logger.debug(
        "Computed %dx%d Smith form, rank %d, %d elementary steps (elapsed: %.3fs)",
        m,
        n,
        rank,
        work.steps,
        time.perf_counter() - started,
    )
    return SmithDecomposition(
        U=IntMatrix(work.u, m, m),
        D=IntMatrix(work.a, m, n),
        V=IntMatrix(work.v, n, n),
        U_inv=IntMatrix(work.u_inv, m, m),
        V_inv=IntMatrix(work.v_inv, n, n),
        rank=rank,
        invariant_factors=factors,
    )


def rank(A: IntMatrix) -> int:
    return smith_normal_form(A).rank


def _normalize_sign(column: Sequence[int]) -> Vector:
    lead = next((x for x in column if x), 0)
    return tuple(-x for x in column) if lead < 0 else tuple(column)


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """
    Saturated basis of ``{x : A x = 0}`` as the columns of the result.

    Each basis column is sign-normalised so its first nonzero entry is positive.
    """
    snf = smith_normal_form(A)
    columns = [_normalize_sign(snf.V.column(j)) for j in range(snf.rank, A.cols)]
    return IntMatrix.from_columns(columns, A.cols)


def column_lattice_basis(A: IntMatrix) -> IntMatrix:
    """A basis (full column rank) of the lattice spanned by the columns of A."""
    snf = smith_normal_form(A)
    columns = [
        tuple(d * x for x in snf.U_inv.column(i)) for i, d in enumerate(snf.invariant_factors)
    ]
    return IntMatrix.from_columns(columns, A.rows)


def saturate(A: IntMatrix) -> IntMatrix:
    """A basis of the integer points in the rational column span of A."""
    snf = smith_normal_form(A)
    return IntMatrix.from_columns([snf.U_inv.column(i) for i in range(snf.rank)], A.rows)


def solve_integer(A: IntMatrix, b: Sequence[int]) -> Optional[Vector]:
    """
    Find an integer solution of ``A x = b``.

    Returns:
        A solution vector, or ``None`` when no integer solution exists.
    """
    snf = smith_normal_form(A)
    y = snf.U.apply(b)
    z: List[int] = [0] * A.cols
    for i, d in enumerate(snf.invariant_factors):
        if y[i] % d:
            return None
        z[i] = y[i] // d
    if any(y[i] for i in range(snf.rank, A.rows)):
        return None
    return snf.V.apply(z)


def in_column_lattice(A: IntMatrix, b: Sequence[int]) -> bool:
    return solve_integer(A, b) is not None


def left_inverse(Z: IntMatrix) -> IntMatrix:
    """
    Integer left inverse ``L`` with ``L @ Z == I`` of a saturated full-rank basis.

    Raises:
        ValidationError: If the columns of Z are dependent or not saturated.
    """
    snf = smith_normal_form(Z)
    k = Z.cols
    if snf.rank != k or any(d != 1 for d in snf.invariant_factors):
        raise ValidationError(
            "Please provide a saturated basis of full column rank for the left inverse."
        )
    return snf.V @ snf.U.select(range(k), range(Z.rows))
