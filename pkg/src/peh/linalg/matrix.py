"""
Dense integer matrices with exact arithmetic.

Entries are Python ints, so no intermediate result can overflow. Matrices are
immutable; every operation returns a new instance. Shapes with zero rows or zero
columns are legal and denote zero maps.
"""

from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from peh.exceptions import ValidationError

Vector = Tuple[int, ...]


def _check_int(value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"Please provide a valid integer matrix entry (got {value!r}).")
    return value


class IntMatrix:
    """
    Dense arbitrary-precision integer matrix.

    Example:
        ```python
        A = IntMatrix([[1, -1], [0, 2]])
        A.shape          # (2, 2)
        (A @ A)[0, 1]    # -3
        ```
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(
        self,
        data: Sequence[Sequence[int]],
        rows: Optional[int] = None,
        cols: Optional[int] = None,
    ):
        table = tuple(tuple(_check_int(x) for x in row) for row in data)
        n_rows = len(table) if rows is None else rows
        if cols is None:
            n_cols = len(table[0]) if table else 0
        else:
            n_cols = cols
        if len(table) != n_rows:
            raise ValidationError(
                f"Please provide a valid integer matrix: expected {n_rows} rows, got {len(table)}."
            )
        for row in table:
            if len(row) != n_cols:
                raise ValidationError(
                    "Please provide a valid integer matrix: rows have different lengths."
                )
        self.rows = n_rows
        self.cols = n_cols
        self._data = table

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows=rows, cols=cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], rows=n, cols=n)

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        """Build a matrix whose columns are the given vectors."""
        for column in columns:
            if len(column) != rows:
                raise ValidationError(
                    f"Please provide a valid column vector of length {rows}."
                )
        return cls(
            [[columns[j][i] for j in range(len(columns))] for i in range(rows)],
            rows=rows,
            cols=len(columns),
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> Vector:
        """Entries in row-major order."""
        return tuple(x for row in self._data for x in row)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self._data[i][j]

    def row(self, i: int) -> Vector:
        return self._data[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self._data)

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def to_lists(self) -> List[List[int]]:
        return [list(row) for row in self._data]

    def __iter__(self) -> Iterator[Vector]:
        return iter(self._data)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(
            [[self._data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            rows=self.cols,
            cols=self.rows,
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValidationError(
                f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}."
            )
        other_cols = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in other_cols] for row in self._data],
            rows=self.rows,
            cols=other.cols,
        )

    def apply(self, vector: Sequence[int]) -> Vector:
        """Return the product of this matrix with a column vector."""
        if len(vector) != self.cols:
            raise ValidationError(
                f"Please provide a valid vector of length {self.cols} (got {len(vector)})."
            )
        return tuple(sum(a * b for a, b in zip(row, vector)) for row in self._data)

    def _combine(self, other: "IntMatrix", sign: int) -> "IntMatrix":
        if self.shape != other.shape:
            raise ValidationError(f"Shape mismatch: {self.shape} vs {other.shape}.")
        return IntMatrix(
            [[a + sign * b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
            rows=self.rows,
            cols=self.cols,
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * x for x in row] for row in self._data], self.rows, self.cols)

    def power(self, k: int) -> "IntMatrix":
        if self.rows != self.cols:
            raise ValidationError("Please provide a valid square matrix.")
        result = IntMatrix.identity(self.rows)
        base = self
        while k > 0:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValidationError("Cannot stack matrices with different row counts.")
        return IntMatrix(
            [r + s for r, s in zip(self._data, other._data)],
            rows=self.rows,
            cols=self.cols + other.cols,
        )

    def select(self, rows: Iterable[int], cols: Iterable[int]) -> "IntMatrix":
        """Submatrix on the given row and column indices, in the given order."""
        row_idx = list(rows)
        col_idx = list(cols)
        return IntMatrix(
            [[self._data[i][j] for j in col_idx] for i in row_idx],
            rows=len(row_idx),
            cols=len(col_idx),
        )

    def is_zero(self) -> bool:
        return all(x == 0 for row in self._data for x in row)

    def nonzero_entries(self) -> List[Tuple[int, int, int]]:
        return [
            (i, j, x) for i, row in enumerate(self._data) for j, x in enumerate(row) if x != 0
        ]

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValidationError("Please provide a valid square matrix.")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_lists()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        if self.rows == 0 or self.cols == 0:
            return f"IntMatrix.zeros({self.rows}, {self.cols})"
        return f"IntMatrix({self.to_lists()!r})"
