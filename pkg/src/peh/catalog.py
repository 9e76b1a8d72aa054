"""
Bundled example systems and datasets.
"""

import json
import logging
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Union

from peh.constants import FIXTURES_ENV
from peh.datasets import ApproximantDataset, load_dataset
from peh.exceptions import ParseError, ValidationError
from peh.subst1d import SubstitutionSystem1D, load_system

logger = logging.getLogger(__name__)

SYSTEM_SUFFIX = ".toml"
DATASET_SUFFIX = ".json"


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str
    path: Path
    expected: Dict[str, str]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "kind": self.kind,
            "path": str(self.path),
            "expected": dict(self.expected),
        }


def fixture_dir() -> Path:
    """The fixture directory: ``$PEH_FIXTURES`` when set, the bundled one otherwise."""
    override = os.environ.get(FIXTURES_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("peh").joinpath("fixtures")))


def fixture_path(name: str) -> Path:
    """
    Raises:
        ValidationError: If no fixture with that file name exists.
    """
    path = fixture_dir() / name
    if not path.is_file():
        raise ValidationError(f"Please provide a valid fixture name (got {name}).")
    return path


def resolve(source: Union[str, Path]) -> Path:
    """A file path as given, or a bundled fixture looked up by name with or without suffix."""
    path = Path(source)
    if path.is_file():
        return path
    directory = fixture_dir()
    for candidate in (directory / path.name, directory / f"{path.name}{SYSTEM_SUFFIX}",
                      directory / f"{path.name}{DATASET_SUFFIX}"):
        if candidate.is_file():
            logger.debug("Resolved %s to fixture %s", source, candidate)
            return candidate
    raise ParseError(f"Cannot find input file or bundled example '{source}'.")


def load_input(source: Union[str, Path]) -> Union[SubstitutionSystem1D, ApproximantDataset]:
    """
    Load a 1-D system (``.toml``) or a dataset (``.json``).

    Raises:
        ParseError: If the file is missing, has another suffix or does not parse.
    """
    path = resolve(source)
    if path.suffix == SYSTEM_SUFFIX:
        return load_system(path)
    if path.suffix == DATASET_SUFFIX:
        return load_dataset(path)
    raise ParseError(f"Cannot tell the input kind of '{path}' (expected .toml or .json).")


def _expected_text(path: Path) -> Dict[str, str]:
    item = load_input(path)
    if isinstance(item, SubstitutionSystem1D):
        limits = item.expected
    else:
        limits = item.expected_limits()
    return {f"H_{n}": str(limit) for n, limit in sorted(limits.items())}


def catalog() -> List[CatalogEntry]:
    """Every fixture in the fixture directory with its expected limit groups."""
    directory = fixture_dir()
    if not directory.is_dir():
        raise ValidationError(f"Please provide a valid fixture directory (got {directory}).")
    entries = []
    for path in sorted(directory.iterdir()):
        if path.suffix not in (SYSTEM_SUFFIX, DATASET_SUFFIX):
            continue
        kind = "system" if path.suffix == SYSTEM_SUFFIX else "dataset"
        entries.append(CatalogEntry(path.stem, kind, path, _expected_text(path)))
    return entries


def catalog_json() -> str:
    return json.dumps([entry.to_dict() for entry in catalog()], sort_keys=True, indent=2)
