"""
Pipeline reports and their text and JSON renderings.
"""

import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Dict, List, Optional

import jsonschema

from peh.constants import JSON_INT_MAX, JSON_INT_MIN, REPORT_SCHEMA_VERSION
from peh.exceptions import EXIT_OK, ExpectationMismatch, PEHError, ReportSchemaError
from peh.limits import LimitGroup, iso_check
from peh.linalg import (
    AbelianGroup,
    FinChainComplex,
    HomologyResult,
    HomomorphismReport,
    IntMatrix,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShortExactSequenceReport:
    """
    The map ``H_0^dagger -> H_0`` induced by the inclusion of the dagger complex.

    ``sequence`` renders ``0 -> kernel -> source -> target -> cokernel -> 0`` style
    text, with the kernel dropped when the map is injective.
    """

    source: AbelianGroup
    target: AbelianGroup
    matrix: IntMatrix
    homomorphism: HomomorphismReport

    @property
    def kernel(self) -> AbelianGroup:
        return self.homomorphism.kernel

    @property
    def image(self) -> AbelianGroup:
        return self.homomorphism.image

    @property
    def cokernel(self) -> AbelianGroup:
        return self.homomorphism.cokernel

    @property
    def sequence(self) -> str:
        head = "0" if self.kernel.is_trivial else f"0 -> {self.kernel}"
        return f"{head} -> {self.source} -> {self.target} -> {self.cokernel} -> 0"

    def to_dict(self) -> Dict[str, Any]:
        data = self.homomorphism.to_dict()
        data.update(
            {
                "source": self.source.to_dict(),
                "target": self.target.to_dict(),
                "matrix": self.matrix.to_lists(),
                "sequence": self.sequence,
            }
        )
        return data


@dataclass
class LevelSummary:
    """One approximant: its cell classes, complex and homology."""

    level: int
    cells: Dict[int, List[str]]
    complex: FinChainComplex
    homology: Optional[HomologyResult] = None
    coefficients: str = "Z"

    def group_text(self, degree: int) -> str:
        if self.homology is None:
            return "?"
        group = self.homology[degree].group
        if self.coefficients == "Q":
            return str(LimitGroup.rational(group.free_rank))
        return str(group)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "level": self.level,
            "cells": {str(n): list(names) for n, names in self.cells.items()},
            "coefficients": self.coefficients,
        }
        data.update(self.complex.to_dict())
        if self.homology is not None:
            degrees = self.homology.to_dict()["degrees"]
            if self.coefficients == "Q":
                for entry in degrees:
                    entry["group"]["torsion"] = []
            data["homology"] = degrees
        return data


@dataclass
class ConnectingSummary:
    """Connecting maps from level ``source`` to level ``target``."""

    source: int
    target: int
    induced: Dict[int, IntMatrix]
    chain: Dict[int, IntMatrix] = field(default_factory=dict)
    declared: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "source": self.source,
            "target": self.target,
            "declared": self.declared,
            "chain": {str(n): m.to_lists() for n, m in sorted(self.chain.items())},
            "induced": {str(n): m.to_lists() for n, m in sorted(self.induced.items())},
        }


@dataclass
class PipelineReport:
    """
    Everything one pipeline run produced.

    ``errors`` holds structured errors; a report with errors maps to the exit code
    of the first one. ``dagger`` nests the report of the modified pipeline.
    """

    kind: str
    name: str
    settings: Dict[str, Any] = field(default_factory=dict)
    levels: List[LevelSummary] = field(default_factory=list)
    connecting: List[ConnectingSummary] = field(default_factory=list)
    limits: Dict[int, LimitGroup] = field(default_factory=dict)
    expected: Dict[int, LimitGroup] = field(default_factory=dict)
    duality: List[str] = field(default_factory=list)
    duality_gap: Optional[ShortExactSequenceReport] = None
    dagger: Optional["PipelineReport"] = None
    validation: List[str] = field(default_factory=list)
    errors: List[Dict[str, Any]] = field(default_factory=list)
    exit_codes: List[int] = field(default_factory=list)
    timing: Dict[str, float] = field(default_factory=dict)

    def record_error(self, error: PEHError) -> None:
        logger.warning("%s: %s", type(error).__name__, error.message)
        self.errors.append(error.to_dict())
        self.exit_codes.append(error.exit_code)

    @property
    def exit_code(self) -> int:
        if self.exit_codes:
            return self.exit_codes[0]
        if self.dagger is not None:
            return self.dagger.exit_code
        return EXIT_OK

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "input": {"kind": self.kind, "name": self.name, "settings": self.settings},
            "levels": [level.to_dict() for level in self.levels],
            "connecting": [c.to_dict() for c in self.connecting],
            "limits": {str(n): limit.to_dict() for n, limit in sorted(self.limits.items())},
            "expected": {str(n): e.to_dict() for n, e in sorted(self.expected.items())},
            "duality": list(self.duality),
            "duality_gap": self.duality_gap.to_dict() if self.duality_gap else None,
            "dagger": self.dagger.to_dict(include_timing) if self.dagger else None,
            "validation": list(self.validation),
            "errors": list(self.errors),
            "exit_code": self.exit_code,
        }
        if include_timing:
            data["timing"] = dict(self.timing)
        return data

    def to_json(self, include_timing: bool = False) -> str:
        document = json_safe(self.to_dict(include_timing))
        validate_report(document)
        return json.dumps(document, sort_keys=True, indent=2)

    def to_text(self, include_timing: bool = False) -> str:
        return "\n".join(_text_lines(self, include_timing)) + "\n"


def json_safe(value: Any) -> Any:
    """Replace integers outside the signed 64-bit range by decimal strings."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return value if JSON_INT_MIN <= value <= JSON_INT_MAX else str(value)
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    return value


@lru_cache(maxsize=1)
def report_schema() -> Dict[str, Any]:
    text = resources.files("peh").joinpath("schema/report.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_report(document: Dict[str, Any]) -> None:
    """
    Raises:
        ReportSchemaError: If the document does not match the shipped schema.
    """
    try:
        jsonschema.validate(document, report_schema())
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path)
        raise ReportSchemaError(
            f"Report does not match the schema at '{path}': {e.message}",
            code="report_schema",
        ) from e


def _text_lines(report: PipelineReport, include_timing: bool, indent: str = "") -> List[str]:
    lines = [f"{indent}{report.kind} {report.name}"]
    for level in report.levels:
        dims = " ".join(str(d) for d in level.complex.dims)
        lines.append(f"{indent}  level {level.level}: chain ranks {dims}")
        if level.homology is not None:
            for h in level.homology.degrees:
                lines.append(f"{indent}    H_{h.degree} = {level.group_text(h.degree)}")
    for c in report.connecting:
        flag = " (declared)" if c.declared else ""
        for n, matrix in sorted(c.induced.items()):
            lines.append(
                f"{indent}  map H_{n}: level {c.source} -> {c.target}{flag}: {matrix.to_lists()}"
            )
    for n, limit in sorted(report.limits.items()):
        lines.append(f"{indent}  limit H_{n} = {limit}")
    for n, expected in sorted(report.expected.items()):
        lines.append(f"{indent}  expected H_{n} = {expected}")
    for note in report.duality:
        lines.append(f"{indent}  duality: {note}")
    if report.duality_gap is not None:
        lines.append(f"{indent}  dagger inclusion H_0: {report.duality_gap.sequence}")
    for entry in report.validation:
        lines.append(f"{indent}  check: {entry}")
    for error in report.errors:
        lines.append(f"{indent}  error: {error['type']}: {error['message']}")
    if include_timing:
        for stage, seconds in sorted(report.timing.items()):
            lines.append(f"{indent}  time {stage}: {seconds:.3f}s")
    if report.dagger is not None:
        lines.extend(_text_lines(report.dagger, include_timing, indent + "  "))
    return lines


def check_expectations(report: PipelineReport) -> None:
    """Record an error for every expected limit the computation does not reproduce."""
    for degree, expected in sorted(report.expected.items()):
        computed = report.limits.get(degree)
        if computed is None:
            continue
        try:
            matches = iso_check(computed, expected)
        except PEHError as e:
            report.record_error(e)
            continue
        if matches:
            report.validation.append(f"H_{degree} limit matches expected {expected}")
        else:
            report.record_error(
                ExpectationMismatch(
                    f"H_{degree} limit {computed} differs from expected {expected}.",
                    details={"degree": degree},
                )
            )
