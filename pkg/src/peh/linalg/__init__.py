"""
Exact integer linear algebra: matrices, Smith normal form, abelian groups, homology.
"""

from peh.linalg.groups import (
    AbelianGroup,
    CokernelProjection,
    HomomorphismReport,
    cokernel,
    homomorphism_report,
    is_homomorphism,
    is_isomorphism,
)
from peh.linalg.homology import (
    ChainMap,
    FinChainComplex,
    HomologyGroup,
    HomologyResult,
    homology,
    homology_class,
    induced_map,
)
from peh.linalg.matrix import IntMatrix, Vector
from peh.linalg.smith import (
    SmithDecomposition,
    column_lattice_basis,
    in_column_lattice,
    kernel_basis,
    left_inverse,
    rank,
    saturate,
    smith_normal_form,
    solve_integer,
)

__all__ = [
    "AbelianGroup",
    "ChainMap",
    "CokernelProjection",
    "FinChainComplex",
    "HomologyGroup",
    "HomologyResult",
    "HomomorphismReport",
    "IntMatrix",
    "SmithDecomposition",
    "Vector",
    "cokernel",
    "column_lattice_basis",
    "homology",
    "homology_class",
    "homomorphism_report",
    "in_column_lattice",
    "induced_map",
    "is_homomorphism",
    "is_isomorphism",
    "kernel_basis",
    "left_inverse",
    "rank",
    "saturate",
    "smith_normal_form",
    "solve_integer",
]
