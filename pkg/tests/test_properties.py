"""
Randomised and brute-force checks of the algebraic identities the pipeline relies on.
"""

import itertools
import json
import random
from fractions import Fraction

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form as sympy_smith_normal_form
from sympy.polys.domains import ZZ

from peh.catalog import fixture_path
from peh.datasets import compute, dataset_from_document, load_and_validate, validation_report
from peh.limits import eventual_image, iso_check, membership_test, stationary_limit
from peh.linalg import (
    AbelianGroup,
    ChainMap,
    FinChainComplex,
    IntMatrix,
    homology,
    induced_map,
    kernel_basis,
    smith_normal_form,
)
from peh.subst1d import legal_pairs, level_complex, load_system, pe_homology_1d

SNF_CASES = range(1000)
EULER_CASES = range(200)
KERNEL_CASES = range(200)

CHAIN_FIXTURES = ["periodic-triangle", "periodic-square", "pentagonal-bs"]
CORRUPTION_CASES = [(CHAIN_FIXTURES[i % len(CHAIN_FIXTURES)], i) for i in range(100)]

HOMOTOPY_FIXTURES = CHAIN_FIXTURES + ["periodic-square-translation"]
INTEGER_DATASETS = HOMOTOPY_FIXTURES + ["penrose-kite-dart"]
SYSTEMS = ["fibonacci", "thue-morse", "dyadic", "triadic", "arnoux-rauzy-3"]

PRIMES = (2, 3, 5, 7)


def _random_matrix(rng, rows, cols, bound=6):
    return IntMatrix([[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)])


def _random_unimodular(rng, n, steps=6):
    U = IntMatrix.identity(n)
    U_inv = IntMatrix.identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        E = [[int(r == s) for s in range(n)] for r in range(n)]
        E_inv = [row[:] for row in E]
        E[i][j] = c
        E_inv[i][j] = -c
        U = IntMatrix(E) @ U
        U_inv = U_inv @ IntMatrix(E_inv)
    return U, U_inv


def _chain_map(name):
    ds = load_and_validate(fixture_path(f"{name}.json"))
    C = ds.complex()
    return ChainMap(C, C, tuple(ds.connecting.matrices[n] for n in range(ds.dimension + 1)))


def _homotopic(f, rng):
    """``f + d h + h d`` for a random degree-raising ``h``."""
    C = f.source
    top = C.top_degree
    h = [_random_matrix(rng, C.dims[n + 1], C.dims[n], bound=2) for n in range(top)]
    maps = []
    for n in range(top + 1):
        g = f.maps[n]
        if n < top:
            g = g + C.boundary(n + 1) @ h[n]
        if n > 0:
            g = g + h[n - 1] @ C.boundary(n)
        maps.append(g)
    return ChainMap(C, C, tuple(maps))


def _rational_rank(limit):
    return limit.free_rank + sum(mult for _, mult in limit.localized)


def _divisible_primes(reduced, depth=12):
    """Primes p for which some w/p with w not divisible by p lies in the limit."""
    found = set()
    for p in PRIMES:
        for w in itertools.product(range(p), repeat=reduced.rows):
            if any(w) and membership_test(reduced, [Fraction(x, p) for x in w], depth):
                found.add(p)
                break
    return found


def _assert_oracle_agrees(limit, block):
    if not limit.is_classified:
        return
    reduced = eventual_image(block).matrix
    claimed = {p for p in PRIMES if any(base % p == 0 for base, _ in limit.localized)}
    assert _divisible_primes(reduced) == claimed


def _supertile_words(system, depth):
    words = []
    for letter in system.alphabet:
        for k in range(depth + 1):
            word = (letter,)
            for j in reversed(range(k)):
                word = tuple(c for a in word for c in system.rule(j)[a])
            words.append(word)
    return words


def _cokernel(rows, pairs, alphabet):
    """Cokernel of the pair-letter incidence matrix via sympy's Smith form."""
    A = [[int(u == a) - int(v == a) for a in alphabet] for u, v in pairs]
    n = max(rows, len(alphabet))
    padded = Matrix(n, n, lambda i, j: A[i][j] if i < rows and j < len(alphabet) else 0)
    factors = []
    if any(padded):
        S = sympy_smith_normal_form(padded, domain=ZZ)
        factors = [abs(int(S[i, i])) for i in range(n) if S[i, i] != 0]
    return AbelianGroup.from_moduli(rows - len(factors), factors), Matrix(A).rank()


class TestSmithProperties:
    """Tests for the Smith decomposition of random matrices."""

    @pytest.mark.parametrize("seed", SNF_CASES)
    def test_decomposition(self, seed):
        """Test U A V == D with unimodular transforms and dividing factors."""
        rng = random.Random(seed)
        A = _random_matrix(rng, rng.randint(1, 8), rng.randint(1, 8), bound=9)
        snf = smith_normal_form(A)
        assert snf.U @ A @ snf.V == snf.D
        assert snf.U @ snf.U_inv == IntMatrix.identity(A.rows)
        assert snf.V @ snf.V_inv == IntMatrix.identity(A.cols)
        assert abs(snf.U.det()) == 1
        assert abs(snf.V.det()) == 1
        assert len(snf.invariant_factors) == snf.rank
        for i in range(A.rows):
            for j in range(A.cols):
                if i != j:
                    assert snf.D[i, j] == 0
        for a, b in zip(snf.invariant_factors, snf.invariant_factors[1:]):
            assert a > 0
            assert b % a == 0

    @pytest.mark.parametrize("seed", KERNEL_CASES)
    def test_kernel_basis(self, seed):
        """Test that kernel columns are annihilated and count cols - rank."""
        rng = random.Random(seed)
        A = _random_matrix(rng, rng.randint(1, 4), rng.randint(2, 6), bound=3)
        K = kernel_basis(A)
        assert (A @ K).is_zero()
        assert K.cols == A.cols - smith_normal_form(A).rank


class TestEulerCharacteristic:
    """Tests for homology ranks of random two-step complexes."""

    @pytest.mark.parametrize("seed", EULER_CASES)
    def test_alternating_ranks(self, seed):
        """Test that free ranks of homology sum to the Euler characteristic."""
        rng = random.Random(seed)
        c2 = rng.randint(1, 3)
        c1 = c2 + rng.randint(1, 3)
        c0 = rng.randint(1, 4)
        d2 = _random_matrix(rng, c1, c2, bound=4)
        left_kernel = kernel_basis(d2.T)
        d1 = _random_matrix(rng, c0, left_kernel.cols, bound=3) @ left_kernel.T
        C = FinChainComplex((c0, c1, c2), (d1, d2)).validate()
        H = homology(C)
        ranks = [group.free_rank for group in H.groups]
        assert ranks[0] - ranks[1] + ranks[2] == C.euler_characteristic()


class TestCorruptedChainMaps:
    """Tests that perturbed connecting matrices never validate."""

    @pytest.mark.parametrize("name,seed", CORRUPTION_CASES)
    def test_single_entry_perturbation(self, name, seed):
        """Test that changing one entry of a chain map is detected."""
        rng = random.Random(seed)
        document = json.loads(fixture_path(f"{name}.json").read_text())
        matrices = document["connecting"]["matrices"]
        degree = rng.choice(sorted(matrices))
        matrix = matrices[degree]
        i = rng.randrange(len(matrix))
        j = rng.randrange(len(matrix[0]))
        matrix[i][j] += rng.choice([-1, 1])
        report = validation_report(dataset_from_document(document))
        assert not report.valid
        assert {v.check for v in report.violations} == {"chain_map_commutes"}


class TestInducedMaps:
    """Tests for functoriality of induced maps on the chain-level fixtures."""

    @pytest.mark.parametrize("name", HOMOTOPY_FIXTURES)
    @pytest.mark.parametrize("seed", range(10))
    def test_homotopic_maps_agree(self, name, seed):
        """Test that f + d h + h d induces the same map as f."""
        f = _chain_map(name)
        g = _homotopic(f, random.Random(seed))
        g.validate()
        H = homology(f.source)
        for n in range(f.source.top_degree + 1):
            assert induced_map(g, H, H, n) == induced_map(f, H, H, n)

    @pytest.mark.parametrize("name", HOMOTOPY_FIXTURES)
    @pytest.mark.parametrize("seed", range(10))
    def test_composition(self, name, seed):
        """Test that H(g o f) is H(g) H(f) reduced in the target."""
        f = _chain_map(name)
        g = _homotopic(f, random.Random(seed))
        H = homology(f.source)
        for n in range(f.source.top_degree + 1):
            product = induced_map(g, H, H, n) @ induced_map(f, H, H, n)
            assert induced_map(g.compose(f), H, H, n) == H[n].group.reduce_matrix(product)

    @pytest.mark.parametrize("name", HOMOTOPY_FIXTURES)
    def test_identity_induces_identity(self, name):
        """Test that the identity chain map induces the identity."""
        C = _chain_map(name).source
        H = homology(C)
        for n in range(C.top_degree + 1):
            assert induced_map(ChainMap.identity(C), H, H, n) == IntMatrix.identity(
                H[n].group.n_generators
            )


class TestConjugationInvariance:
    """Tests that limits do not depend on the chosen basis."""

    @pytest.mark.parametrize("seed", range(100))
    def test_unimodular_conjugate(self, seed):
        """Test that M and U M U^-1 have the same limit."""
        rng = random.Random(seed)
        n = rng.randint(2, 3)
        diagonal = [rng.choice([-3, -2, -1, 0, 1, 2, 3, 4, 6]) for _ in range(n)]
        M = IntMatrix(
            [
                [diagonal[i] if i == j else (rng.randint(-4, 4) if j > i else 0) for j in range(n)]
                for i in range(n)
            ]
        )
        U, U_inv = _random_unimodular(rng, n)
        assert U @ U_inv == IntMatrix.identity(n)
        original = stationary_limit(M)
        conjugate = stationary_limit(U @ M @ U_inv)
        assert original.kind == conjugate.kind
        if original.is_classified:
            assert iso_check(original, conjugate)
        else:
            assert original.rank == conjugate.rank
            assert abs(original.matrix.det()) == abs(conjugate.matrix.det())


class TestOracleConsistency:
    """Tests that every bundled normal form agrees with a brute-force membership search."""

    @pytest.mark.parametrize("name", SYSTEMS)
    def test_systems(self, name):
        """Test the primes of the localised summands along one period of each system."""
        system = load_system(fixture_path(f"{name}.toml"))
        report = pe_homology_1d(system)
        assert report.exit_code == 0
        start = system.direction.stationary_from
        for degree in (0, 1):
            group = report.levels[start].homology[degree].group
            composite = IntMatrix.identity(group.n_generators)
            for i in range(start, start + system.direction.period):
                composite = report.connecting[i].induced[degree] @ composite
            block = composite.select(range(group.free_rank), range(group.free_rank))
            _assert_oracle_agrees(report.limits[degree], block)

    @pytest.mark.parametrize("name", INTEGER_DATASETS)
    def test_datasets(self, name):
        """Test the primes of the localised summands of each integer dataset."""
        report = compute(load_and_validate(fixture_path(f"{name}.json")))
        assert report.exit_code == 0
        for n, limit in report.limits.items():
            group = report.levels[0].homology[n].group
            block = report.connecting[0].induced[n].select(
                range(group.free_rank), range(group.free_rank)
            )
            _assert_oracle_agrees(limit, block)

    def test_thue_morse_has_dyadic_vectors(self):
        """Test that only halves of integer vectors are reached along Thue-Morse."""
        reduced = eventual_image(IntMatrix([[1, 1, 1], [1, 0, 0], [1, 0, 0]])).matrix
        assert _divisible_primes(reduced) == {2}


class TestFiniteWords:
    """Tests against factors of explicitly expanded supertile words."""

    @pytest.mark.parametrize("name", SYSTEMS)
    def test_legal_pairs(self, name):
        """Test that legal pairs are the two-letter factors of the expanded words."""
        system = load_system(fixture_path(f"{name}.toml"))
        words = _supertile_words(system, 12)
        factors = sorted({(w[i], w[i + 1]) for w in words for i in range(len(w) - 1)})
        assert legal_pairs(system, 0) == factors

    @pytest.mark.parametrize("name", SYSTEMS)
    def test_level_homology(self, name):
        """Test H_0 and the rank of H_1 against a sympy Smith form of the word complex."""
        system = load_system(fixture_path(f"{name}.toml"))
        words = _supertile_words(system, 12)
        pairs = sorted({(w[i], w[i + 1]) for w in words for i in range(len(w) - 1)})
        expected, incidence_rank = _cokernel(len(pairs), pairs, system.alphabet)
        H = homology(level_complex(system, 0).complex)
        assert H[0].group == expected
        assert H[1].group.free_rank == len(system.alphabet) - incidence_rank


class TestCoefficientAgreement:
    """Tests that integer and rational runs agree after tensoring with Q."""

    @pytest.mark.parametrize("name", INTEGER_DATASETS)
    def test_ranks(self, name):
        """Test that the rational rank of every Z limit is the Q limit's dimension."""
        ds = load_and_validate(fixture_path(f"{name}.json"))
        integral = compute(ds)
        rational = compute(ds, mode="Q")
        assert integral.exit_code == 0
        assert rational.exit_code == 0
        assert sorted(integral.limits) == sorted(rational.limits)
        for n, limit in integral.limits.items():
            assert limit.is_classified
            assert rational.limits[n].coefficients == "Q"
            assert _rational_rank(limit) == rational.limits[n].free_rank
