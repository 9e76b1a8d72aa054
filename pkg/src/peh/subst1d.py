"""
One-dimensional mixed substitution systems.

Level ``i`` of the hierarchy is built from supertiles of the rules
``n_i, n_{i+1}, ...`` read off the direction sequence. Its approximant has one
vertex class per legal two-letter factor ``u.v`` and one edge class per letter;
all edges point right. Connecting maps push every level-``i`` vertex inside a
level-``i+1`` supertile to that supertile's right endpoint.
"""

import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple, Union

from peh.constants import (
    DEFAULT_HORIZON,
    DEFAULT_LEVELS,
    DEFAULT_LIMIT_HORIZON,
    DEFAULT_VERIFIED_DEPTH,
)
from peh.exceptions import (
    InconsistentCycle,
    InputError,
    NotAChainMap,
    NotStabilized,
    ParseError,
    PEHError,
    ValidationError,
)
from peh.limits import DirectSystem, LimitGroup, limit_of_system
from peh.linalg import (
    ChainMap,
    FinChainComplex,
    HomologyResult,
    IntMatrix,
    homology,
    induced_map,
    solve_integer,
)
from peh.report import ConnectingSummary, LevelSummary, PipelineReport, check_expectations

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

Word = Tuple[str, ...]
Pair = Tuple[str, str]


def pair_name(pair: Pair) -> str:
    return f"{pair[0]}.{pair[1]}"


@dataclass(frozen=True)
class Direction:
    """
    Eventually periodic sequence of rule names: ``prefix`` once, then ``cycle``
    repeated forever. A periodic direction has an empty prefix.
    """

    prefix: Tuple[str, ...] = ()
    cycle: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ValidationError("Please provide a non-empty repeated block of rules.")

    @classmethod
    def periodic(cls, *names: str) -> "Direction":
        return cls((), names)

    def rule_at(self, level: int) -> str:
        if level < 0:
            raise ValidationError(f"Please provide a valid level (got {level}).")
        if level < len(self.prefix):
            return self.prefix[level]
        return self.cycle[(level - len(self.prefix)) % len(self.cycle)]

    def names(self) -> FrozenSet[str]:
        return frozenset(self.prefix) | frozenset(self.cycle)

    @property
    def stationary_from(self) -> int:
        return len(self.prefix)

    @property
    def period(self) -> int:
        return len(self.cycle)


@dataclass(frozen=True)
class SubstitutionSystem1D:
    name: str
    alphabet: Tuple[str, ...]
    rules: Mapping[str, Mapping[str, Word]]
    direction: Direction
    expected: Mapping[int, LimitGroup] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if not self.alphabet:
            raise ValidationError("Please provide a non-empty alphabet.")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError("Alphabet letters must be distinct.")
        letters = set(self.alphabet)
        rules = {}
        for rule_name, images in self.rules.items():
            if set(images) != letters:
                raise ValidationError(f"Rule '{rule_name}' must map every letter of the alphabet.")
            rules[rule_name] = {a: tuple(images[a]) for a in self.alphabet}
            for a, word in rules[rule_name].items():
                if not word:
                    raise ValidationError(f"Rule '{rule_name}' maps '{a}' to an empty word.")
                unknown = set(word) - letters
                if unknown:
                    raise ValidationError(
                        f"Rule '{rule_name}' maps '{a}' to a word with unknown letters "
                        f"{sorted(unknown)}."
                    )
        object.__setattr__(self, "rules", rules)
        missing = self.direction.names() - set(rules)
        if missing:
            raise ValidationError(f"Direction references undefined rules {sorted(missing)}.")

    def rule(self, level: int) -> Mapping[str, Word]:
        """The rule that subdivides level ``level + 1`` supertiles into level ``level`` tiles."""
        return self.rules[self.direction.rule_at(level)]


def abelianization_matrix(rule: Mapping[str, Sequence[str]], alphabet: Sequence[str]) -> IntMatrix:
    """``M[x, y]`` counts the occurrences of ``x`` in the image of ``y``."""
    return IntMatrix([[list(rule[y]).count(x) for y in alphabet] for x in alphabet])


def _interior_pairs(word: Word) -> List[Pair]:
    return list(zip(word, word[1:]))


def _junction(rule: Mapping[str, Word], pair: Pair) -> Pair:
    return (rule[pair[0]][-1], rule[pair[1]][0])


_State = Tuple[FrozenSet[str], FrozenSet[Pair]]


def _apply(rule: Mapping[str, Word], state: _State) -> _State:
    letters, pairs = state
    new_letters = set()
    new_pairs = set()
    for b in letters:
        new_letters.update(rule[b])
        new_pairs.update(_interior_pairs(rule[b]))
    new_pairs.update(_junction(rule, p) for p in pairs)
    return frozenset(new_letters), frozenset(new_pairs)


def _depth_state(system: SubstitutionSystem1D, level: int, depth: int) -> _State:
    state: _State = (frozenset(system.alphabet), frozenset())
    for j in reversed(range(level, level + depth)):
        state = _apply(system.rule(j), state)
    return state


def legal_pairs(
    system: SubstitutionSystem1D, level: int, horizon: int = DEFAULT_HORIZON
) -> List[Pair]:
    """
    Two-letter factors of the level-``level`` supertile words, in lexicographic order.

    The union of factors over growing depths is declared stable once it stays
    unchanged across one full repeated block of the direction after its prefix.

    Raises:
        NotStabilized: If the set still grows at ``horizon``.
    """
    if horizon < 1:
        raise ValidationError("Please provide a valid horizon.")
    window = system.direction.period
    remaining_prefix = max(0, system.direction.stationary_from - level)
    seen_letters: FrozenSet[str] = frozenset()
    seen_pairs: FrozenSet[Pair] = frozenset()
    unchanged = 0
    for depth in range(horizon + 1):
        letters, pairs = _depth_state(system, level, depth)
        grown_letters = seen_letters | letters
        grown_pairs = seen_pairs | pairs
        if depth > 0 and (grown_letters, grown_pairs) == (seen_letters, seen_pairs):
            unchanged += 1
        else:
            unchanged = 0
        seen_letters, seen_pairs = grown_letters, grown_pairs
        if unchanged >= window and depth - window >= remaining_prefix:
            logger.debug(
                "Legal pairs of %s at level %d stabilised at depth %d: %d pairs",
                system.name,
                level,
                depth,
                len(seen_pairs),
            )
            return sorted(seen_pairs)
    raise NotStabilized(
        f"Legal pairs of '{system.name}' at level {level} still grow at horizon {horizon}.",
        details={"level": level, "horizon": horizon, "pairs": len(seen_pairs)},
    )


@dataclass(frozen=True)
class LevelComplex:
    level: int
    vertex_classes: Tuple[Pair, ...]
    edge_classes: Tuple[str, ...]
    d1: IntMatrix

    @property
    def complex(self) -> FinChainComplex:
        return FinChainComplex((len(self.vertex_classes), len(self.edge_classes)), (self.d1,))

    def cells(self) -> Dict[int, List[str]]:
        return {0: [pair_name(p) for p in self.vertex_classes], 1: list(self.edge_classes)}


def level_complex(
    system: SubstitutionSystem1D, level: int, horizon: int = DEFAULT_HORIZON
) -> LevelComplex:
    pairs = legal_pairs(system, level, horizon)
    d1 = IntMatrix(
        [[int(u == letter) - int(v == letter) for letter in system.alphabet] for u, v in pairs],
        rows=len(pairs),
        cols=len(system.alphabet),
    )
    return LevelComplex(level, tuple(pairs), system.alphabet, d1)


def _push_right(
    rule: Mapping[str, Word], lower: LevelComplex, upper: LevelComplex
) -> IntMatrix:
    column = {pair: j for j, pair in enumerate(lower.vertex_classes)}
    rows = []
    for a, b in upper.vertex_classes:
        row = [0] * len(lower.vertex_classes)
        for w in _interior_pairs(rule[a]) + [_junction(rule, (a, b))]:
            if w not in column:
                raise PEHError(
                    f"Pair {pair_name(w)} inside a level-{upper.level} supertile is not legal "
                    f"at level {lower.level}."
                )
            row[column[w]] += 1
        rows.append(row)
    return IntMatrix(rows, rows=len(upper.vertex_classes), cols=len(lower.vertex_classes))


def connecting_map_deg0(
    system: SubstitutionSystem1D, level: int, horizon: int = DEFAULT_HORIZON
) -> IntMatrix:
    """
    Chain-level degree-0 connecting map from level ``level`` to ``level + 1``.

    Rows are level-``level + 1`` vertex classes, columns level-``level`` ones.
    """
    lower = level_complex(system, level, horizon)
    upper = level_complex(system, level + 1, horizon)
    return _push_right(system.rule(level), lower, upper)


def _companion(deg0: IntMatrix, lower: LevelComplex, upper: LevelComplex) -> IntMatrix:
    """Degree-1 matrix ``f1`` with ``deg0 @ d1_lower == d1_upper @ f1``."""
    pushed = deg0 @ lower.d1
    columns = []
    for j, target in enumerate(pushed.columns()):
        solution = solve_integer(upper.d1, target)
        if solution is None:
            raise NotAChainMap(
                f"Boundary of edge class '{lower.edge_classes[j]}' at level {lower.level} "
                f"is not a boundary at level {upper.level}."
            )
        columns.append(solution)
    return IntMatrix.from_columns(columns, len(upper.edge_classes))


def connecting_chain_map(
    system: SubstitutionSystem1D, level: int, horizon: int = DEFAULT_HORIZON
) -> ChainMap:
    lower = level_complex(system, level, horizon)
    upper = level_complex(system, level + 1, horizon)
    deg0 = _push_right(system.rule(level), lower, upper)
    return ChainMap(lower.complex, upper.complex, (deg0, _companion(deg0, lower, upper)))


def connecting_map_deg1(
    system: SubstitutionSystem1D, level: int, cycle: Sequence[int]
) -> Tuple[int, ...]:
    """
    Re-express a level-``level`` 1-cycle on the level-``level + 1`` supertiles.

    Raises:
        InconsistentCycle: If the letters of some supertile carry unequal coefficients.
    """
    if len(cycle) != len(system.alphabet):
        raise ValidationError(
            f"Please provide one coefficient per letter ({len(system.alphabet)})."
        )
    coefficient = dict(zip(system.alphabet, cycle))
    rule = system.rule(level)
    result = []
    for a in system.alphabet:
        values = {coefficient[letter] for letter in rule[a]}
        if len(values) != 1:
            raise InconsistentCycle(
                f"Supertile '{a}' at level {level + 1} covers letters with coefficients "
                f"{sorted(values)}.",
                details={"level": level, "supertile": a},
            )
        result.append(values.pop())
    return tuple(result)


def _induced_deg1(
    system: SubstitutionSystem1D, level: int, source: HomologyResult, target: HomologyResult
) -> IntMatrix:
    columns = [
        target[1].coordinates(connecting_map_deg1(system, level, g))
        for g in source[1].generators
    ]
    return IntMatrix.from_columns(columns, target[1].group.n_generators)


def pe_homology_1d(
    system: SubstitutionSystem1D,
    levels: int = DEFAULT_LEVELS,
    horizon: int = DEFAULT_HORIZON,
    limit_horizon: int = DEFAULT_LIMIT_HORIZON,
    verified_depth: int = DEFAULT_VERIFIED_DEPTH,
) -> PipelineReport:
    """
    Approximants, homology, connecting maps and limits of a 1-D system.

    Computation errors are recorded in the report; input errors propagate.

    Example:
        ```python
        report = pe_homology_1d(load_system(fixture_path("fibonacci.toml")))
        str(report.limits[0])   # 'Z^2'
        ```
    """
    if levels < 1:
        raise ValidationError("Please provide a valid number of levels.")
    direction = system.direction
    n_levels = max(levels, direction.stationary_from + direction.period + 1)
    report = PipelineReport(
        kind="system",
        name=system.name,
        settings={
            "levels": n_levels,
            "horizon": horizon,
            "limit_horizon": limit_horizon,
            "verified_depth": verified_depth,
        },
        expected=dict(system.expected),
    )
    started = time.perf_counter()
    try:
        complexes = [level_complex(system, i, horizon) for i in range(n_levels)]
        results = [homology(c.complex) for c in complexes]
        report.levels = [
            LevelSummary(c.level, c.cells(), c.complex, h) for c, h in zip(complexes, results)
        ]
        report.timing["homology"] = time.perf_counter() - started

        maps: Dict[int, List[IntMatrix]] = {0: [], 1: []}
        for i in range(n_levels - 1):
            lower, upper = complexes[i], complexes[i + 1]
            deg0 = _push_right(system.rule(i), lower, upper)
            chain = ChainMap(lower.complex, upper.complex, (deg0, _companion(deg0, lower, upper)))
            induced = {
                0: induced_map(chain, results[i], results[i + 1], 0),
                1: _induced_deg1(system, i, results[i], results[i + 1]),
            }
            maps[0].append(induced[0])
            maps[1].append(induced[1])
            report.connecting.append(
                ConnectingSummary(i, i + 1, induced, chain={0: deg0, 1: chain.maps[1]})
            )
        report.validation.append("chain maps commute with boundaries at every level")
        report.timing["connecting"] = time.perf_counter() - started
    except InputError:
        raise
    except PEHError as e:
        report.record_error(e)
        return report

    for degree in (0, 1):
        stages = tuple(h[degree].group for h in results)
        directed = DirectSystem(
            stages,
            tuple(maps[degree]),
            stationary_from=direction.stationary_from,
            period=direction.period,
        )
        try:
            report.limits[degree] = limit_of_system(directed, limit_horizon, verified_depth)
        except PEHError as e:
            report.record_error(e)
    report.timing["total"] = time.perf_counter() - started
    check_expectations(report)
    logger.info(
        "Computed %s over %d levels: %s (elapsed: %.3fs)",
        system.name,
        n_levels,
        ", ".join(f"H_{n} = {g}" for n, g in sorted(report.limits.items())),
        report.timing["total"],
    )
    return report


# Builders


def solenoid_system(k: int) -> SubstitutionSystem1D:
    """The one-letter system ``a -> a^k``."""
    if k < 1:
        raise ValidationError("Please provide a valid solenoid multiplier.")
    return SubstitutionSystem1D(
        name=f"solenoid-{k}",
        alphabet=("a",),
        rules={"s": {"a": ("a",) * k}},
        direction=Direction.periodic("s"),
    )


def arnoux_rauzy_rule(k: int, i: int) -> Dict[str, Word]:
    """``j -> j i`` for ``j != i`` and ``i -> i`` on the letters ``0 .. k-1``."""
    letter = str(i)
    return {str(j): (str(j), letter) if j != i else (letter,) for j in range(k)}


def arnoux_rauzy_system(
    k: int, prefix: Iterable[int] = (), cycle: Iterable[int] = ()
) -> SubstitutionSystem1D:
    """
    Arnoux-Rauzy system on ``k`` letters with direction ``prefix`` then ``cycle``
    repeated, given as letter indices. The default cycle is ``0, 1, ..., k-1``.
    """
    if k < 2:
        raise ValidationError("Please provide at least two letters.")
    cycle = tuple(cycle) or tuple(range(k))
    prefix = tuple(prefix)
    for i in prefix + cycle:
        if not 0 <= i < k:
            raise ValidationError(f"Please provide letter indices below {k} (got {i}).")
    return SubstitutionSystem1D(
        name=f"arnoux-rauzy-{k}",
        alphabet=tuple(str(j) for j in range(k)),
        rules={f"r{i}": arnoux_rauzy_rule(k, i) for i in range(k)},
        direction=Direction(tuple(f"r{i}" for i in prefix), tuple(f"r{i}" for i in cycle)),
    )


# Files


def _word(value: Any) -> Word:
    if isinstance(value, str):
        return tuple(value)
    if isinstance(value, list) and all(isinstance(x, str) for x in value):
        return tuple(value)
    raise ParseError(f"Please provide a valid word (string or list of letters), got {value!r}.")


def system_from_document(document: Mapping[str, Any]) -> SubstitutionSystem1D:
    """Build a system from a parsed TOML document."""
    try:
        alphabet = [str(a) for a in document["alphabet"]]
        rules = {
            str(name): {str(a): _word(w) for a, w in images.items()}
            for name, images in document["rules"].items()
        }
        direction_doc = document.get("direction", {})
        cycle = direction_doc.get("cycle")
        if cycle is None:
            cycle = list(rules)[:1] if len(rules) == 1 else None
        if cycle is None:
            raise ParseError("Please provide [direction] cycle for a system with several rules.")
        direction = Direction(tuple(direction_doc.get("prefix", [])), tuple(cycle))
        expected = {
            int(degree): LimitGroup.from_dict(value)
            for degree, value in document.get("expected", {}).get("limit", {}).items()
        }
    except (KeyError, TypeError, AttributeError, ValueError) as e:
        raise ParseError(f"Please provide a valid system document: {e}") from e
    return SubstitutionSystem1D(
        name=str(document.get("name", "system")),
        alphabet=tuple(alphabet),
        rules=rules,
        direction=direction,
        expected=expected,
    )


def load_system(source: Union[str, Path, Mapping[str, Any]]) -> SubstitutionSystem1D:
    """
    Load a system from a TOML file or an already parsed document.

    Raises:
        ParseError: If the file cannot be read or parsed.
    """
    if isinstance(source, Mapping):
        return system_from_document(source)
    path = Path(source)
    try:
        with path.open("rb") as handle:
            document = tomllib.load(handle)
    except OSError as e:
        raise ParseError(f"Cannot read system file '{path}': {e.strerror}") from e
    except tomllib.TOMLDecodeError as e:
        raise ParseError(f"Cannot parse system file '{path}': {e}") from e
    document.setdefault("name", path.stem)
    return system_from_document(document)


