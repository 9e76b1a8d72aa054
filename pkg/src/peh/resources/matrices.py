"""
Matrices Resource.

Smith normal forms, kernels, cokernels and homology of finite complexes.
"""

from typing import Sequence, Tuple, Union

from peh.linalg import (
    AbelianGroup,
    CokernelProjection,
    FinChainComplex,
    HomologyResult,
    HomomorphismReport,
    IntMatrix,
    SmithDecomposition,
    cokernel,
    homology,
    homomorphism_report,
    kernel_basis,
    smith_normal_form,
)
from peh.resources.base import BaseResource

MatrixLike = Union[IntMatrix, Sequence[Sequence[int]]]


def _as_matrix(value: MatrixLike) -> IntMatrix:
    return value if isinstance(value, IntMatrix) else IntMatrix(value)


class Matrices(BaseResource):
    """
    Exact integer linear algebra.

    Example:
        ```python
        peh = PEHomology()
        peh.matrices.snf([[2, 0], [0, 3]]).invariant_factors   # (1, 6)
        str(peh.matrices.cokernel([[2], [0]]))                 # 'Z + Z/2'
        ```
    """

    def snf(self, matrix: MatrixLike) -> SmithDecomposition:
        return smith_normal_form(_as_matrix(matrix))

    def kernel(self, matrix: MatrixLike) -> IntMatrix:
        """Sign-normalised kernel basis as the columns of a matrix."""
        return kernel_basis(_as_matrix(matrix))

    def cokernel(self, matrix: MatrixLike) -> AbelianGroup:
        return cokernel(_as_matrix(matrix))[0]

    def cokernel_projection(
        self, matrix: MatrixLike
    ) -> Tuple[AbelianGroup, CokernelProjection]:
        return cokernel(_as_matrix(matrix))

    def homology(self, complex: FinChainComplex) -> HomologyResult:
        """
        Raises:
            ComplexInvalid: If some ``d_{n-1} d_n`` is nonzero.
        """
        return homology(complex.validate())

    def homomorphism(
        self,
        matrix: MatrixLike,
        source: AbelianGroup,
        target: AbelianGroup,
    ) -> HomomorphismReport:
        return homomorphism_report(_as_matrix(matrix), source, target)
