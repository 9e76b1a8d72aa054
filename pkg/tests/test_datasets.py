"""
Tests for declarative approximant datasets.
"""

import json

import pytest

from peh import (
    DivisibilityError,
    InvariantViolation,
    ParseError,
    ValidationError,
    compute,
    duality_gap_report,
    load_and_validate,
)
from peh.catalog import fixture_path
from peh.datasets import (
    ConnectingMode,
    DaggerDataset,
    dagger_transform,
    load_dataset,
    validation_report,
)
from peh.linalg import AbelianGroup, IntMatrix

INTEGER_FIXTURES = [
    "penrose-kite-dart",
    "pentagonal-bs",
    "periodic-triangle",
    "periodic-square",
    "periodic-square-translation",
]


def _document(name):
    return json.loads(fixture_path(f"{name}.json").read_text(encoding="utf-8"))


def _violation_checks(document):
    with pytest.raises(InvariantViolation) as exc_info:
        load_and_validate(document)
    return [v.check for v in exc_info.value.violations]


class TestLoading:
    """Tests for reading dataset documents."""

    def test_penrose(self):
        """Test the parsed Penrose approximant."""
        ds = load_dataset(fixture_path("penrose-kite-dart.json"))
        assert ds.dims == (7, 7, 2)
        assert ds.isotropy == (5, 5, 1, 1, 1, 1, 1)
        assert ds.has_isotropy
        assert ds.connecting.mode is ConnectingMode.HOMOLOGY
        assert ds.connecting.dagger is not None
        assert ds.cells()[2] == ["kite", "dart"]

    def test_pentagonal_description(self):
        """Test that the pentagonal fixture documents its reduced cells."""
        ds = load_dataset(fixture_path("pentagonal-bs.json"))
        assert "v4 attaches only to p" in ds.description
        assert "no m-p edges" in ds.description
        d1 = ds.boundaries[1]
        names = [c.name for c in ds.classes[0]]
        v4, m, p = names.index("v4"), names.index("m"), names.index("p")
        assert [j for j in range(d1.cols) if d1[v4, j]] == [2]
        assert not any(d1[m, j] and d1[p, j] for j in range(d1.cols))

    def test_description_defaults_to_empty(self):
        """Test that datasets without a description load."""
        assert load_dataset(fixture_path("periodic-triangle.json")).description == ""

    def test_missing_boundaries_default_to_zero(self):
        """Test that omitted boundaries are zero maps."""
        document = _document("periodic-square-translation")
        del document["boundaries"]
        ds = load_dataset(document)
        assert ds.boundaries[1] == IntMatrix.zeros(1, 2)
        assert ds.boundaries[2] == IntMatrix.zeros(2, 1)

    def test_expected_limits(self):
        """Test reading the expected groups, dagger block included."""
        ds = load_dataset(fixture_path("periodic-triangle.json"))
        assert str(ds.expected_limits()[0]) == "Z + Z/6"
        assert str(ds.expected_limits("dagger")[0]) == "Z"

    def test_missing_field_raises_error(self):
        """Test that required fields are enforced."""
        document = _document("periodic-triangle")
        del document["name"]
        with pytest.raises(ParseError) as exc_info:
            load_dataset(document)
        assert "'name'" in str(exc_info.value)

    def test_unknown_connecting_mode_raises_error(self):
        """Test that only chain and homology connecting data are accepted."""
        document = _document("periodic-triangle")
        document["connecting"]["mode"] = "cochain"
        with pytest.raises(ParseError):
            load_dataset(document)

    def test_unknown_coefficients_raise_error(self):
        """Test that only Z and Q are accepted."""
        document = _document("periodic-triangle")
        document["mode"] = "R"
        with pytest.raises(ParseError) as exc_info:
            load_dataset(document)
        assert "coefficient mode" in str(exc_info.value)

    def test_non_integer_matrix_raises_error(self):
        """Test that boundary entries must be integers."""
        document = _document("periodic-triangle")
        document["boundaries"]["1"][0][0] = 0.5
        with pytest.raises(ParseError):
            load_dataset(document)

    def test_missing_file_raises_error(self, tmp_path):
        """Test that unreadable files are parse errors."""
        with pytest.raises(ParseError) as exc_info:
            load_dataset(tmp_path / "missing.json")
        assert "Cannot read" in str(exc_info.value)

    def test_malformed_json_raises_error(self, tmp_path):
        """Test that invalid JSON is a parse error."""
        path = tmp_path / "broken.json"
        path.write_text("{")
        with pytest.raises(ParseError) as exc_info:
            load_dataset(path)
        assert "Cannot parse" in str(exc_info.value)


class TestValidation:
    """Tests for dataset invariant checks."""

    @pytest.mark.parametrize("name", INTEGER_FIXTURES + ["pentagonal-bs-rational"])
    def test_bundled_datasets_are_valid(self, name):
        """Test that every bundled dataset passes every check."""
        report = validation_report(load_dataset(fixture_path(f"{name}.json")))
        assert report.valid
        assert "boundary_squared" in report.checks

    def test_boundary_squared(self):
        """Test that d1 d2 != 0 is reported."""
        document = _document("periodic-triangle")
        document["boundaries"]["2"][0][0] = 2
        assert "boundary_squared" in _violation_checks(document)

    def test_chain_map_commutes(self):
        """Test that a corrupted chain map is reported."""
        document = _document("periodic-triangle")
        document["connecting"]["matrices"]["1"][0][1] = 1
        assert "chain_map_commutes" in _violation_checks(document)

    def test_shape(self):
        """Test that a boundary of the wrong size is reported."""
        document = _document("periodic-triangle")
        document["boundaries"]["1"].pop()
        assert _violation_checks(document) == ["shape"]

    def test_missing_chain_map(self):
        """Test that chain mode needs a matrix in every degree."""
        document = _document("periodic-triangle")
        del document["connecting"]["matrices"]["2"]
        assert "shape" in _violation_checks(document)

    def test_isotropy(self):
        """Test that isotropy orders must be positive."""
        document = _document("periodic-triangle")
        document["classes"]["0"][0]["isotropy"] = 0
        assert "isotropy" in _violation_checks(document)

    def test_rev_sym_needs_rational_coefficients(self):
        """Test that orientation-reversing classes are rejected over Z."""
        document = _document("pentagonal-bs-rational")
        document["mode"] = "Z"
        document["expected"] = {}
        assert "rev_sym_mode" in _violation_checks(document)

    def test_generator_cycle(self):
        """Test that declared generators must be cycles."""
        document = _document("penrose-kite-dart")
        document["connecting"]["generators"]["1"] = [[0, 0, 1, 0, 0, 0, 0]]
        assert "generator_cycle" in _violation_checks(document)

    def test_generator_basis(self):
        """Test that declared generators must form a basis."""
        document = _document("penrose-kite-dart")
        document["connecting"]["generators"]["0"][0] = [2, 0, 0, 0, 0, 0, 0]
        assert "generator_basis" in _violation_checks(document)

    def test_homology_map(self):
        """Test that each degree needs a declared matrix."""
        document = _document("penrose-kite-dart")
        del document["connecting"]["matrices"]["1"]
        assert "homology_map" in _violation_checks(document)

    def test_violation_location(self):
        """Test that violations carry the degree and matrix entry."""
        document = _document("periodic-triangle")
        document["boundaries"]["2"][0][0] = 2
        with pytest.raises(InvariantViolation) as exc_info:
            load_and_validate(document)
        violation = exc_info.value.violations[0]
        assert violation.degree == 2
        assert violation.row is not None and violation.col is not None
        assert "Dataset failed validation" in str(exc_info.value)

    def test_report_without_raising(self):
        """Test that the report lists violations without raising."""
        document = _document("periodic-triangle")
        document["boundaries"]["2"][0][0] = 2
        report = validation_report(load_dataset(document))
        assert not report.valid
        with pytest.raises(InvariantViolation):
            report.raise_for_violations()


class TestDagger:
    """Tests for the dagger complex."""

    def test_penrose_boundary_rows_are_divided(self):
        """Test that the sun and star rows are divided by five."""
        dagger = dagger_transform(load_and_validate(fixture_path("penrose-kite-dart.json")))
        assert isinstance(dagger, DaggerDataset)
        assert dagger.boundaries[1].row(0) == (1, 0, 0, 0, 0, 0, 0)
        assert dagger.boundaries[1].row(1) == (0, -1, 0, 0, 0, 0, 0)
        assert dagger.scaling == (5, 5, 1, 1, 1, 1, 1)
        assert dagger.name == "penrose-kite-dart (dagger)"

    def test_declared_dagger_block_overrides_degree_zero(self):
        """Test that the dagger block replaces only the degrees it lists."""
        dagger = dagger_transform(load_and_validate(fixture_path("penrose-kite-dart.json")))
        assert dagger.connecting.matrices[0] == IntMatrix([[2, 1], [1, 1]])
        assert dagger.connecting.matrices[1] == IntMatrix([[-1]])
        assert len(dagger.connecting.generators[0]) == 2

    def test_missing_dagger_block_raises_error(self):
        """Test that homology-level data needs its own dagger generators."""
        document = _document("penrose-kite-dart")
        del document["connecting"]["dagger"]
        with pytest.raises(ValidationError) as exc_info:
            dagger_transform(load_and_validate(document))
        assert "connecting.dagger" in str(exc_info.value)

    def test_missing_dagger_block_fails_the_dagger_run(self):
        """Test that the dagger pipeline reports the missing block as an input error."""
        document = _document("penrose-kite-dart")
        del document["connecting"]["dagger"]
        ds = load_and_validate(document)
        assert str(compute(ds).limits[0]) == "Z^2 + Z/5"
        with pytest.raises(ValidationError):
            compute(ds, dagger=True)

    def test_divisibility_error(self):
        """Test that a boundary row not divisible by isotropy is rejected."""
        document = _document("periodic-triangle")
        document["boundaries"]["1"][0][2] = -3
        with pytest.raises(DivisibilityError) as exc_info:
            dagger_transform(load_dataset(document))
        assert "'v'" in str(exc_info.value)
        assert "'vf'" in str(exc_info.value)

    def test_chain_map_rescaling(self):
        """Test that f0 is conjugated by the isotropy scaling."""
        document = _document("periodic-triangle")
        document["connecting"]["matrices"]["0"] = [[1, 0, 0], [0, 1, 2], [0, 0, 1]]
        dagger = dagger_transform(load_dataset(document))
        assert dagger.connecting.matrices[0] == IntMatrix([[1, 0, 0], [0, 1, 3], [0, 0, 1]])

    def test_chain_map_rescaling_divisibility_error(self):
        """Test that a non-integral rescaled f0 is rejected."""
        document = _document("periodic-triangle")
        document["connecting"]["matrices"]["0"] = [[1, 0, 1], [0, 1, 0], [0, 0, 1]]
        with pytest.raises(DivisibilityError) as exc_info:
            dagger_transform(load_dataset(document))
        assert "f_0" in str(exc_info.value)


class TestCompute:
    """Tests for the dataset pipeline."""

    def test_penrose(self):
        """Test limits, dagger limits and the duality gap of the Penrose approximant."""
        report = compute(load_and_validate(fixture_path("penrose-kite-dart.json")), dagger=True)
        assert report.exit_code == 0
        assert report.levels[0].homology.groups == (
            AbelianGroup(2, (5,)),
            AbelianGroup(1),
            AbelianGroup(1),
        )
        assert str(report.limits[0]) == "Z^2 + Z/5"
        assert str(report.limits[1]) == "Z"
        assert str(report.limits[2]) == "Z"
        assert str(report.dagger.limits[0]) == "Z^2"
        assert report.connecting[0].declared
        assert report.duality_gap.kernel.is_trivial
        assert report.duality_gap.cokernel == AbelianGroup(0, (5, 5))

    def test_penrose_duality_note(self):
        """Test that duality is only asserted for the dagger groups."""
        report = compute(load_and_validate(fixture_path("penrose-kite-dart.json")), dagger=True)
        assert "isotropy" in report.duality[0]
        assert report.dagger.duality[0].startswith("H^dagger_0")

    @pytest.mark.parametrize(
        "name,limits,dagger_zero,gap",
        [
            ("periodic-triangle", ["Z + Z/6", "0", "Z"], "Z", (6, 6)),
            ("periodic-square", ["Z + Z/2 + Z/4", "0", "Z"], "Z", (2, 4, 4)),
            ("pentagonal-bs", ["Z + Z[1/6]", "0", "Z"], "Z + Z[1/6]", (2, 60)),
            ("periodic-square-translation", ["Z", "Z^2", "Z"], "Z", ()),
        ],
    )
    def test_chain_datasets(self, name, limits, dagger_zero, gap):
        """Test limits and the dagger inclusion of the chain-level datasets."""
        ds = load_and_validate(fixture_path(f"{name}.json"))
        report = compute(ds, dagger=True)
        assert report.exit_code == 0
        assert [str(report.limits[n]) for n in range(3)] == limits
        assert str(report.dagger.limits[0]) == dagger_zero
        assert report.duality_gap.kernel.is_trivial
        assert report.duality_gap.cokernel.torsion == gap

    def test_rational_dataset(self):
        """Test that rational mode drops the orientation-reversing edge."""
        report = compute(load_and_validate(fixture_path("pentagonal-bs-rational.json")))
        assert report.exit_code == 0
        assert [str(report.limits[n]) for n in range(3)] == ["Q^2", "0", "Q"]
        assert report.levels[0].coefficients == "Q"
        assert report.levels[0].cells[1] == []

    def test_rational_override(self):
        """Test that an integer dataset can be computed over Q."""
        ds = load_and_validate(fixture_path("pentagonal-bs.json"))
        report = compute(ds, mode="Q")
        assert report.exit_code == 0
        assert str(report.limits[0]) == "Q^2"

    def test_integer_override_with_rev_sym_raises_error(self):
        """Test that Z cannot be forced onto orientation-reversing classes."""
        ds = load_dataset(fixture_path("pentagonal-bs-rational.json"))
        with pytest.raises(ValidationError) as exc_info:
            compute(ds, mode="Z")
        assert "rational coefficients" in str(exc_info.value)

    def test_duality_gap_needs_integers(self):
        """Test that the dagger inclusion is only reported over Z."""
        ds = load_dataset(fixture_path("pentagonal-bs-rational.json"))
        with pytest.raises(ValidationError):
            duality_gap_report(ds)

    def test_non_stationary_dataset_has_no_limits(self):
        """Test that limits are skipped for non-stationary data."""
        document = _document("periodic-triangle")
        document["stationary"] = False
        report = compute(load_and_validate(document))
        assert report.limits == {}
        assert any("not stationary" in note for note in report.validation)

    def test_expectation_mismatch(self):
        """Test that a wrong expected group is a computation error."""
        document = _document("periodic-triangle")
        document["expected"]["limit"]["0"] = {"free_rank": 2}
        report = compute(load_and_validate(document))
        assert report.exit_code == 2
        assert report.errors[0]["type"] == "ExpectationMismatch"

    def test_invalid_dataset_raises_error(self):
        """Test that compute refuses invalid datasets."""
        document = _document("periodic-triangle")
        document["connecting"]["matrices"]["1"][0][1] = 1
        with pytest.raises(InvariantViolation):
            compute(load_dataset(document))

    @pytest.mark.parametrize("name", INTEGER_FIXTURES)
    def test_euler_characteristic(self, name):
        """Test that homology ranks alternate to the chain-rank sum."""
        report = compute(load_and_validate(fixture_path(f"{name}.json")))
        level = report.levels[0]
        ranks = sum((-1) ** n * g.free_rank for n, g in enumerate(level.homology.groups))
        assert ranks == level.complex.euler_characteristic()
