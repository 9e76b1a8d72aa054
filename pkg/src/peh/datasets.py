"""
Declarative approximant datasets.

A dataset lists the cell classes of one approximant per degree, its boundary
matrices and a connecting map, either at chain level (validated against the
boundaries) or at homology level (matrices in declared generator coordinates,
trusted once the declared generators are checked to form a basis).

Document layout::

    {
      "name": "periodic-triangle",
      "dimension": 2,
      "classes": {"0": [{"name": "v", "isotropy": 6}, ...], "1": [...], "2": [...]},
      "boundaries": {"1": [[...], ...], "2": [[...], ...]},
      "connecting": {"mode": "chain", "matrices": {"0": [[...]], ...}},
      "stationary": true,
      "orientable": true,
      "mode": "Z",
      "expected": {"limit": {"0": {"free_rank": 1, "torsion": [6]}}}
    }
"""

import json
import logging
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from peh.constants import DEFAULT_LIMIT_HORIZON, DEFAULT_VERIFIED_DEPTH
from peh.exceptions import (
    DivisibilityError,
    InputError,
    InvariantViolation,
    ParseError,
    PEHError,
    ValidationError,
    Violation,
)
from peh.limits import DirectSystem, LimitGroup, limit_of_system
from peh.linalg import (
    AbelianGroup,
    ChainMap,
    FinChainComplex,
    HomologyResult,
    IntMatrix,
    Vector,
    homology,
    homomorphism_report,
    induced_map,
    is_isomorphism,
)
from peh.report import (
    ConnectingSummary,
    LevelSummary,
    PipelineReport,
    ShortExactSequenceReport,
    check_expectations,
)

logger = logging.getLogger(__name__)


class ConnectingMode(str, Enum):
    CHAIN = "chain"
    HOMOLOGY = "homology"


@dataclass(frozen=True)
class CellClass:
    name: str
    isotropy: int = 1
    rev_sym: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "isotropy": self.isotropy, "rev_sym": self.rev_sym}


@dataclass(frozen=True)
class DeclaredHomology:
    """Homology-level connecting data: per-degree generators and matrices."""

    generators: Mapping[int, Tuple[Vector, ...]] = field(default_factory=dict)
    matrices: Mapping[int, IntMatrix] = field(default_factory=dict)


@dataclass(frozen=True)
class Connecting:
    mode: ConnectingMode
    matrices: Mapping[int, IntMatrix] = field(default_factory=dict)
    generators: Mapping[int, Tuple[Vector, ...]] = field(default_factory=dict)
    dagger: Optional[DeclaredHomology] = None

    @property
    def declared(self) -> DeclaredHomology:
        return DeclaredHomology(self.generators, self.matrices)


@dataclass(frozen=True)
class ApproximantDataset:
    """
    One approximant of a hierarchical tiling with its connecting map.

    ``classes[n]`` orders the chain basis in degree ``n``; ``boundaries[n]`` is the
    matrix of ``d_n`` with rows indexed by ``classes[n - 1]``.
    """

    name: str
    dimension: int
    classes: Mapping[int, Tuple[CellClass, ...]]
    boundaries: Mapping[int, IntMatrix]
    connecting: Connecting
    stationary: bool = True
    orientable: bool = True
    mode: str = "Z"
    expected: Mapping[str, Any] = field(default_factory=dict)
    description: str = ""

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(len(self.classes.get(n, ())) for n in range(self.dimension + 1))

    @property
    def isotropy(self) -> Tuple[int, ...]:
        return tuple(c.isotropy for c in self.classes.get(0, ()))

    @property
    def has_isotropy(self) -> bool:
        return any(n != 1 for n in self.isotropy)

    def complex(self) -> FinChainComplex:
        return FinChainComplex(
            self.dims, tuple(self.boundaries[n] for n in range(1, self.dimension + 1))
        )

    def cells(self) -> Dict[int, List[str]]:
        return {n: [c.name for c in classes] for n, classes in sorted(self.classes.items())}

    def expected_limits(self, section: Optional[str] = None) -> Dict[int, LimitGroup]:
        block = self.expected.get(section, {}) if section else self.expected
        return {int(n): LimitGroup.from_dict(v) for n, v in block.get("limit", {}).items()}

    def with_mode(self, mode: str) -> "ApproximantDataset":
        """
        The same dataset read with other coefficients.

        Raises:
            ValidationError: If integer coefficients are requested for a dataset
                with orientation-reversing self-symmetric classes.
        """
        if mode not in ("Z", "Q"):
            raise ValidationError(f"Please provide a valid coefficient mode (got {mode}).")
        if mode == "Z" and any(c.rev_sym for cs in self.classes.values() for c in cs):
            raise ValidationError(
                f"Dataset '{self.name}' has orientation-reversing self-symmetric classes "
                "and can only be computed with rational coefficients."
            )
        return replace(self, mode=mode)


@dataclass(frozen=True)
class DaggerDataset(ApproximantDataset):
    """A dataset whose degree-0 basis vector at class ``v`` stands for ``scaling[v] * 1(v)``."""

    scaling: Tuple[int, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    dataset: ApproximantDataset
    violations: Tuple[Violation, ...]
    checks: Tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.violations

    def raise_for_violations(self) -> ApproximantDataset:
        if self.violations:
            raise InvariantViolation(list(self.violations))
        return self.dataset


# Parsing


def _matrix(value: Any, cols: int, what: str) -> IntMatrix:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise ParseError(f"Please provide {what} as a list of integer rows.")
    try:
        width = len(value[0]) if value else cols
        return IntMatrix(value, rows=len(value), cols=width)
    except ValidationError as e:
        raise ParseError(f"Please provide a valid {what}: {e.message}") from e


def _vectors(value: Any, what: str) -> Tuple[Vector, ...]:
    if not isinstance(value, list):
        raise ParseError(f"Please provide {what} as a list of integer vectors.")
    vectors = []
    for v in value:
        if not isinstance(v, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in v
        ):
            raise ParseError(f"Please provide {what} as integer vectors (got {v!r}).")
        vectors.append(tuple(v))
    return tuple(vectors)


def _degree_map(value: Any, what: str) -> Dict[int, Any]:
    if not isinstance(value, dict):
        raise ParseError(f"Please provide {what} keyed by degree.")
    try:
        return {int(k): v for k, v in value.items()}
    except ValueError as e:
        raise ParseError(f"Please provide {what} keyed by integer degrees.") from e


def _classes(value: Any, dimension: int) -> Dict[int, Tuple[CellClass, ...]]:
    raw = _degree_map(value, "classes")
    classes = {}
    for n in range(dimension + 1):
        entries = raw.get(n, [])
        parsed = []
        for entry in entries:
            if isinstance(entry, str):
                entry = {"name": entry}
            if not isinstance(entry, dict) or "name" not in entry:
                raise ParseError(f"Please provide a valid cell class in degree {n}: {entry!r}.")
            isotropy = entry.get("isotropy", 1)
            if not isinstance(isotropy, int) or isinstance(isotropy, bool):
                raise ParseError(f"Please provide an integer isotropy order for '{entry['name']}'.")
            rev_sym = bool(entry.get("rev_sym", False))
            parsed.append(CellClass(str(entry["name"]), isotropy, rev_sym))
        classes[n] = tuple(parsed)
    return classes


def _declared(value: Any) -> DeclaredHomology:
    generators = {
        n: _vectors(v, f"generators in degree {n}")
        for n, v in _degree_map(value.get("generators", {}), "generators").items()
    }
    matrices = {
        n: _matrix(v, len(generators.get(n, ())), f"homology matrix in degree {n}")
        for n, v in _degree_map(value.get("matrices", {}), "matrices").items()
    }
    return DeclaredHomology(generators, matrices)


def dataset_from_document(document: Mapping[str, Any]) -> ApproximantDataset:
    """
    Raises:
        ParseError: If the document does not have the dataset layout.
    """
    if not isinstance(document, Mapping):
        raise ParseError("Please provide a dataset document (a JSON object).")
    try:
        name = str(document["name"])
        dimension = int(document["dimension"])
        classes = _classes(document["classes"], dimension)
        dims = [len(classes[n]) for n in range(dimension + 1)]
        boundaries = {
            n: _matrix(v, dims[n] if n < len(dims) else 0, f"boundary d_{n}")
            for n, v in _degree_map(document.get("boundaries", {}), "boundaries").items()
        }
        for n in range(1, dimension + 1):
            boundaries.setdefault(n, IntMatrix.zeros(dims[n - 1], dims[n]))
        conn = document.get("connecting", {"mode": "chain"})
        mode = ConnectingMode(conn.get("mode", "chain"))
        if mode is ConnectingMode.CHAIN:
            matrices = {
                n: _matrix(v, dims[n] if n < len(dims) else 0, f"chain map in degree {n}")
                for n, v in _degree_map(conn.get("matrices", {}), "chain maps").items()
            }
            connecting = Connecting(mode, matrices)
        else:
            declared = _declared(conn)
            dagger = _declared(conn["dagger"]) if "dagger" in conn else None
            connecting = Connecting(mode, declared.matrices, declared.generators, dagger)
    except KeyError as e:
        raise ParseError(f"Please provide the dataset field {e}.") from e
    except (TypeError, ValueError, AttributeError) as e:
        raise ParseError(f"Please provide a valid dataset document: {e}") from e
    coefficient_mode = str(document.get("mode", "Z"))
    if coefficient_mode not in ("Z", "Q"):
        raise ParseError(f"Please provide a valid coefficient mode (got {coefficient_mode}).")
    return ApproximantDataset(
        name=name,
        dimension=dimension,
        classes=classes,
        boundaries=boundaries,
        connecting=connecting,
        stationary=bool(document.get("stationary", True)),
        orientable=bool(document.get("orientable", True)),
        mode=coefficient_mode,
        expected=dict(document.get("expected", {})),
        description=str(document.get("description", "")),
    )


def load_dataset(source: Union[str, Path, Mapping[str, Any]]) -> ApproximantDataset:
    """Parse a dataset from a JSON file or an already decoded document."""
    if isinstance(source, Mapping):
        return dataset_from_document(source)
    path = Path(source)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ParseError(f"Cannot read dataset file '{path}': {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"Cannot parse dataset file '{path}': {e}") from e
    return dataset_from_document(document)


# Validation


def _check_shapes(ds: ApproximantDataset) -> List[Violation]:
    found = []
    dims = ds.dims
    for n in range(1, ds.dimension + 1):
        d = ds.boundaries[n]
        if d.shape != (dims[n - 1], dims[n]):
            found.append(
                Violation("shape", f"d_{n} is {d.rows}x{d.cols}, expected "
                          f"{dims[n - 1]}x{dims[n]}", n)
            )
    extra = sorted(set(ds.boundaries) - set(range(1, ds.dimension + 1)))
    for n in extra:
        found.append(Violation("shape", f"boundary d_{n} exceeds dimension {ds.dimension}", n))
    if ds.connecting.mode is ConnectingMode.CHAIN:
        for n in range(ds.dimension + 1):
            f = ds.connecting.matrices.get(n)
            if f is None:
                found.append(Violation("shape", f"chain map missing in degree {n}", n))
            elif f.shape != (dims[n], dims[n]):
                found.append(
                    Violation("shape", f"chain map f_{n} is {f.rows}x{f.cols}, expected "
                              f"{dims[n]}x{dims[n]}", n)
                )
    return found


def _check_classes(ds: ApproximantDataset) -> List[Violation]:
    found = []
    for n, classes in sorted(ds.classes.items()):
        for i, c in enumerate(classes):
            if c.isotropy < 1:
                found.append(
                    Violation("isotropy", f"class '{c.name}' has isotropy {c.isotropy}", n, i)
                )
            if c.rev_sym and ds.mode != "Q":
                found.append(
                    Violation(
                        "rev_sym_mode",
                        f"class '{c.name}' reverses its own orientation; "
                        "only rational coefficients are allowed",
                        n,
                        i,
                    )
                )
    return found


def _check_declared(
    declared: DeclaredHomology, H: HomologyResult, dimension: int, required: bool
) -> List[Violation]:
    found = []
    for n in range(dimension + 1):
        if n not in declared.generators:
            if required:
                found.append(Violation("generator_basis", "no generators declared", n))
            continue
        h = H[n]
        generators = declared.generators[n]
        coordinates = []
        for j, g in enumerate(generators):
            if len(g) != h.boundary.cols:
                found.append(Violation("generator_cycle", f"generator {j} has wrong length", n))
                continue
            defect = h.boundary.apply(g)
            if any(defect):
                found.append(
                    Violation("generator_cycle", f"generator {j} has boundary {list(defect)}", n)
                )
                continue
            coordinates.append(h.coordinates(g))
        if len(coordinates) != len(generators):
            continue
        P = IntMatrix.from_columns(coordinates, h.group.n_generators)
        if len(generators) != h.group.n_generators or not _is_basis(P, h.group):
            found.append(
                Violation("generator_basis", f"declared generators do not form a basis of "
                          f"{h.group}", n)
            )
            continue
        F = declared.matrices.get(n)
        if F is None or F.shape != (len(generators), len(generators)):
            found.append(Violation("homology_map", "missing or misshaped matrix", n))
    return found


def _is_basis(P: IntMatrix, group: AbelianGroup) -> bool:
    try:
        return is_isomorphism(P, group, group)
    except ValidationError:
        return False


def validation_report(ds: ApproximantDataset) -> ValidationReport:
    """Run every dataset check and collect the violations."""
    checks = ["shape", "isotropy", "rev_sym_mode"]
    violations = _check_shapes(ds) + _check_classes(ds)
    if violations:
        return ValidationReport(ds, tuple(violations), tuple(checks))

    C = _reduced(ds).complex()
    checks.append("boundary_squared")
    violations = C.composition_violations()
    if violations:
        return ValidationReport(ds, tuple(violations), tuple(checks))

    if ds.connecting.mode is ConnectingMode.CHAIN:
        checks.append("chain_map_commutes")
        violations = _chain_map(_reduced(ds)).commutation_violations()
    else:
        checks.extend(["generator_cycle", "generator_basis", "homology_map"])
        H = homology(C)
        violations = _check_declared(_reduced(ds).connecting.declared, H, ds.dimension, True)
    return ValidationReport(ds, tuple(violations), tuple(checks))


def load_and_validate(source: Union[str, Path, Mapping[str, Any]]) -> ApproximantDataset:
    """
    Load a dataset and run every check.

    Raises:
        ParseError: If the document cannot be parsed.
        InvariantViolation: Listing every failed check with its location.
    """
    return validation_report(load_dataset(source)).raise_for_violations()


# Coefficients


def _kept(ds: ApproximantDataset, n: int) -> List[int]:
    classes = ds.classes.get(n, ())
    if ds.mode != "Q":
        return list(range(len(classes)))
    return [i for i, c in enumerate(classes) if not c.rev_sym]


def _reduced(ds: ApproximantDataset) -> ApproximantDataset:
    """Drop orientation-reversing self-symmetric classes in rational mode."""
    if ds.mode != "Q" or not any(c.rev_sym for cs in ds.classes.values() for c in cs):
        return ds
    keep = {n: _kept(ds, n) for n in range(ds.dimension + 1)}
    classes = {n: tuple(ds.classes[n][i] for i in keep[n]) for n in keep}
    boundaries = {
        n: ds.boundaries[n].select(keep[n - 1], keep[n]) for n in range(1, ds.dimension + 1)
    }
    conn = ds.connecting
    if conn.mode is ConnectingMode.CHAIN:
        connecting = replace(
            conn, matrices={n: m.select(keep[n], keep[n]) for n, m in conn.matrices.items()}
        )
    else:
        generators = {
            n: tuple(tuple(g[i] for i in keep[n]) for g in gens)
            for n, gens in conn.generators.items()
        }
        connecting = replace(conn, generators=generators)
    logger.debug("Dropped orientation-reversing classes from %s", ds.name)
    return replace(ds, classes=classes, boundaries=boundaries, connecting=connecting)


def _chain_map(ds: ApproximantDataset) -> ChainMap:
    C = ds.complex()
    return ChainMap(C, C, tuple(ds.connecting.matrices[n] for n in range(ds.dimension + 1)))


# Dagger complex


def dagger_transform(ds: ApproximantDataset) -> DaggerDataset:
    """
    Rescale degree 0 so the basis vector at class ``v`` represents
    ``isotropy(v) * 1(v)``; ``d_1`` becomes ``D^-1 d_1``.

    Raises:
        DivisibilityError: If a row of ``d_1`` is not divisible by its class's
            isotropy order, or a chain-level ``f_0`` does not rescale integrally.
        ValidationError: If homology-level data comes without a ``dagger`` block.
    """
    scaling = ds.isotropy
    if not scaling:
        raise ValidationError(f"Dataset '{ds.name}' has no degree-0 classes.")
    boundaries = dict(ds.boundaries)
    if ds.dimension >= 1:
        d1 = ds.boundaries[1]
        rows = []
        for i, row in enumerate(d1):
            for j, x in enumerate(row):
                if x % scaling[i]:
                    raise DivisibilityError(
                        f"Entry {x} of d_1 at class '{ds.classes[0][i].name}', column "
                        f"'{ds.classes[1][j].name}' is not divisible by isotropy {scaling[i]}.",
                        details={"row": i, "col": j},
                    )
            rows.append([x // scaling[i] for x in row])
        boundaries[1] = IntMatrix(rows, rows=d1.rows, cols=d1.cols)

    conn = ds.connecting
    if conn.mode is ConnectingMode.CHAIN:
        matrices = dict(conn.matrices)
        f0 = conn.matrices[0]
        rescaled = []
        for i in range(f0.rows):
            row = []
            for j in range(f0.cols):
                x = f0[i, j] * scaling[j]
                if x % scaling[i]:
                    raise DivisibilityError(
                        f"Chain map f_0 does not rescale integrally at "
                        f"({ds.classes[0][i].name}, {ds.classes[0][j].name}).",
                        details={"row": i, "col": j},
                    )
                row.append(x // scaling[i])
            rescaled.append(row)
        matrices[0] = IntMatrix(rescaled, rows=f0.rows, cols=f0.cols)
        connecting = replace(conn, matrices=matrices)
    else:
        if conn.dagger is None:
            raise ValidationError(
                f"Dataset '{ds.name}' declares homology-level connecting data but no "
                "connecting.dagger block to read the dagger generators from."
            )
        override = conn.dagger
        generators = dict(conn.generators)
        generators.update(override.generators)
        matrices = dict(conn.matrices)
        matrices.update(override.matrices)
        connecting = Connecting(conn.mode, matrices, generators, None)

    expected = dict(ds.expected.get("dagger", {}))
    return DaggerDataset(
        name=f"{ds.name} (dagger)",
        dimension=ds.dimension,
        classes=ds.classes,
        boundaries=boundaries,
        connecting=connecting,
        stationary=ds.stationary,
        orientable=ds.orientable,
        mode=ds.mode,
        expected=expected,
        scaling=scaling,
    )


# Computation


def _free_block(F: IntMatrix, source: AbelianGroup, target: AbelianGroup) -> IntMatrix:
    return F.select(range(target.free_rank), range(source.free_rank))


def _duality_notes(ds: ApproximantDataset, H: HomologyResult) -> List[str]:
    d = ds.dimension
    if not ds.orientable:
        return ["no fundamental class; duality is not asserted"]
    if ds.has_isotropy and not isinstance(ds, DaggerDataset):
        return [
            "nontrivial isotropy: integer Poincare duality holds for the dagger groups, "
            "not for these"
        ]
    label = "H^dagger" if isinstance(ds, DaggerDataset) and ds.has_isotropy else "H"
    return [
        f"{label}_{k} = {H[k].group} is isomorphic to Cech H^{d - k} (PE Poincare duality)"
        for k in range(d + 1)
    ]


def compute(
    ds: ApproximantDataset,
    limit_horizon: int = DEFAULT_LIMIT_HORIZON,
    verified_depth: int = DEFAULT_VERIFIED_DEPTH,
    dagger: bool = False,
    mode: Optional[str] = None,
) -> PipelineReport:
    """
    Homology of the approximant, induced connecting maps and their limits.

    With ``dagger`` the modified pipeline runs too and the inclusion
    ``H_0^dagger -> H_0`` is reported.

    Raises:
        InvariantViolation: If the dataset fails validation.
    """
    started = time.perf_counter()
    if mode is not None and mode != ds.mode:
        ds = ds.with_mode(mode)
    validation = validation_report(ds)
    validation.raise_for_violations()

    work = _reduced(ds)
    C = work.complex()
    H = homology(C)
    report = PipelineReport(
        kind="dataset",
        name=ds.name,
        settings={
            "mode": ds.mode,
            "limit_horizon": limit_horizon,
            "verified_depth": verified_depth,
            "dagger": dagger,
            "connecting": ds.connecting.mode.value,
        },
        levels=[LevelSummary(0, work.cells(), C, H, ds.mode)],
        expected={
            n: e for n, e in work.expected_limits().items() if e.coefficients == ds.mode
        },
        validation=[f"{check}: ok" for check in validation.checks],
    )

    if work.connecting.mode is ConnectingMode.CHAIN:
        chain = _chain_map(work)
        induced = {n: induced_map(chain, H, H, n) for n in range(work.dimension + 1)}
        report.connecting.append(
            ConnectingSummary(0, 1, induced, chain=dict(enumerate(chain.maps)))
        )
    else:
        induced = {n: work.connecting.matrices[n] for n in range(work.dimension + 1)}
        report.connecting.append(ConnectingSummary(0, 1, induced, declared=True))

    if not work.stationary:
        report.validation.append("dataset is not stationary; limits are not computed")
    else:
        for n in range(work.dimension + 1):
            group = H[n].group
            try:
                if ds.mode == "Q":
                    free = AbelianGroup(group.free_rank)
                    system = DirectSystem.stationary(
                        free, _free_block(induced[n], group, group), coefficients="Q"
                    )
                else:
                    system = DirectSystem.stationary(group, group.reduce_matrix(induced[n]))
                report.limits[n] = limit_of_system(system, limit_horizon, verified_depth)
            except InputError:
                raise
            except PEHError as e:
                report.record_error(e)

    report.duality = _duality_notes(work, H)
    check_expectations(report)

    if dagger and not isinstance(ds, DaggerDataset):
        dagger_ds = dagger_transform(ds)
        report.dagger = compute(dagger_ds, limit_horizon, verified_depth)
        if ds.mode == "Z":
            report.duality_gap = duality_gap_report(ds, dagger_ds)
    report.timing["total"] = time.perf_counter() - started
    logger.info(
        "Computed dataset %s: %s (elapsed: %.3fs)",
        ds.name,
        ", ".join(f"H_{n} = {g}" for n, g in sorted(report.limits.items())),
        report.timing["total"],
    )
    return report


def duality_gap_report(
    ds: ApproximantDataset, dagger_ds: Optional[DaggerDataset] = None
) -> ShortExactSequenceReport:
    """
    Kernel, image and cokernel of ``H_0^dagger -> H_0`` induced by ``x -> D x``.

    Example:
        ```python
        gap = duality_gap_report(load_and_validate(fixture_path("penrose-kite-dart.json")))
        gap.sequence   # '0 -> Z^2 -> Z^2 + Z/5 -> Z/5 + Z/5 -> 0'
        ```
    """
    if ds.mode != "Z":
        raise ValidationError("The dagger inclusion is reported for integer coefficients only.")
    dagger_ds = dagger_ds or dagger_transform(ds)
    plain = homology(ds.complex())[0]
    modified = homology(dagger_ds.complex())[0]
    columns = [
        plain.coordinates(tuple(s * x for s, x in zip(dagger_ds.scaling, g)))
        for g in modified.generators
    ]
    F = IntMatrix.from_columns(columns, plain.group.n_generators)
    result = ShortExactSequenceReport(
        source=modified.group,
        target=plain.group,
        matrix=F,
        homomorphism=homomorphism_report(F, modified.group, plain.group),
    )
    logger.debug("Dagger inclusion for %s: %s", ds.name, result.sequence)
    return result
