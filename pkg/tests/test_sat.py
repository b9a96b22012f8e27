import itertools
import random

import pytest

from strtool.languages import BudgetExceeded
from strtool.logogram import ProblemIndex
from strtool.sat import (
    CnfInstance,
    EchelonSpec,
    consistent_selection_count,
    decode,
    effective_size,
    encode,
    enumerate_echelon,
    is_bewitched,
    occurrence_size,
    parse_formula,
    satisfies,
    selection_strings,
    solutions,
)

PAPER_EXAMPLE = CnfInstance.of(4, [[1, 3, -4], [2, -3]])


def random_instance(rng: random.Random, max_n: int = 4, max_m: int = 3) -> CnfInstance:
    n = rng.randint(1, max_n)
    m = rng.randint(1, max_m)
    clauses = []
    for _ in range(m):
        clause = set()
        for var in range(1, n + 1):
            roll = rng.random()
            if roll < 0.3:
                clause.add(var)
            elif roll < 0.6:
                clause.add(-var)
        clauses.append(clause)
    return CnfInstance.of(n, clauses)


class TestInstance:
    def test_validation(self):
        with pytest.raises(ValueError):
            CnfInstance.of(0, [[1]])
        with pytest.raises(ValueError):
            CnfInstance.of(2, [[3]])
        with pytest.raises(ValueError):
            CnfInstance.of(2, [[0]])

    def test_well_formedness_flag(self):
        tautologicalish = CnfInstance.of(2, [[1, -1]])
        assert not tautologicalish.is_well_formed
        assert PAPER_EXAMPLE.is_well_formed

    def test_formula_grammar(self):
        assert parse_formula("1,3,-4;2,-3", 4) == PAPER_EXAMPLE
        empty_clause = parse_formula("1;;2", 2)
        assert empty_clause.m == 3 and frozenset() in empty_clause.clauses
        with pytest.raises(ValueError):
            parse_formula("", 2)
        with pytest.raises(ValueError):
            parse_formula("1,x", 2)


class TestEncoding:
    def test_clause_block(self):
        assert encode(CnfInstance.of(4, [[1, 3, -4]])) == "00001" + "01" + "1012"

    def test_paper_formula(self):
        assert encode(PAPER_EXAMPLE) == "00001001" + "1012" + "0120"

    def test_minimal_echelon(self):
        assert encode(CnfInstance.of(1, [[1]])) == "01011"
        assert decode("01011") == CnfInstance.of(1, [[1]])

    def test_decode_errors(self):
        with pytest.raises(ValueError):
            decode("0101")  # missing body
        with pytest.raises(ValueError):
            decode("1011")  # no leading zero block
        with pytest.raises(ValueError):
            decode("01013")  # bad code
        with pytest.raises(ValueError):
            decode("010111")  # body too long

    def test_unencodable_clause(self):
        with pytest.raises(ValueError):
            encode(CnfInstance.of(1, [[1, -1]]))

    def test_roundtrip_on_seeded_instances(self):
        rng = random.Random(6)
        for _ in range(1000):
            inst = random_instance(rng)
            assert decode(encode(inst)) == inst

    def test_position_formula(self):
        spec = EchelonSpec(4, 2)
        word = encode(PAPER_EXAMPLE)
        assert word[spec.position(1, 1) - 1] == "1"
        assert word[spec.position(1, 4) - 1] == "2"
        assert word[spec.position(2, 3) - 1] == "2"
        assert spec.word_length == len(word)


class TestSolutions:
    def test_order(self):
        assert solutions(1) == [(0,), (1,)]
        assert solutions(2) == [(0, 0), (1, 0), (0, 1), (1, 1)]
        assert len(solutions(3)) == 8

    def test_satisfies(self):
        single = CnfInstance.of(1, [[1]])
        assert satisfies(single, (1,))
        assert not satisfies(single, (0,))
        empty = CnfInstance.of(1, [[]])
        assert not satisfies(empty, (0,)) and not satisfies(empty, (1,))
        assert satisfies(PAPER_EXAMPLE, (1, 1, 0, 0))

    def test_satisfies_needs_total_assignment(self):
        with pytest.raises(ValueError):
            satisfies(PAPER_EXAMPLE, (1, 1))


class TestEchelons:
    def test_small_counts(self):
        p11 = enumerate_echelon(EchelonSpec(1, 1))
        assert len(p11.base) == 3 and len(p11.target) == 2
        p21 = enumerate_echelon(EchelonSpec(2, 1))
        assert len(p21.base) == 9 and len(p21.target) == 8
        assert len(p11.regions) == 2 and len(p21.regions) == 4

    def test_regions_recompose_target(self):
        problem = enumerate_echelon(EchelonSpec(2, 2))
        union = frozenset().union(*(r.words for r in problem.regions))
        assert union == problem.target.words
        for j, region in enumerate(problem.regions):
            y = solutions(2)[j]
            assert region.words == {w for w in problem.base.words if satisfies(decode(w), y)}

    def test_prefix_free(self):
        for spec in (EchelonSpec(1, 1), EchelonSpec(2, 1), EchelonSpec(2, 2)):
            base = enumerate_echelon(spec).base
            words = sorted(base.words)
            for a in words:
                for b in words:
                    if a != b:
                        assert not b.startswith(a)
            assert ProblemIndex(base).prefix_free

    def test_cross_echelon_prefixes_disambiguate(self):
        words = set()
        for spec in (EchelonSpec(1, 1), EchelonSpec(1, 2), EchelonSpec(2, 1)):
            words |= enumerate_echelon(spec).base.words
        ordered = sorted(words)
        assert not any(ordered[i + 1].startswith(ordered[i]) for i in range(len(ordered) - 1))

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            enumerate_echelon(EchelonSpec(4, 4))


class TestEffectiveSize:
    def test_paper_values(self):
        assert occurrence_size(PAPER_EXAMPLE) == 4
        assert effective_size(PAPER_EXAMPLE) == 2
        assert is_bewitched(PAPER_EXAMPLE)

    def test_alternate_witness_assignment(self):
        # x4=0, x3=0 also forces the paper formula true
        partial = {4: 0, 3: 0}
        for clause in PAPER_EXAMPLE.clauses:
            assert any(
                (lit > 0 and partial.get(lit) == 1) or (lit < 0 and partial.get(-lit) == 0)
                for lit in clause
            )

    def test_single_variable(self):
        single = CnfInstance.of(1, [[1]])
        assert effective_size(single) == 1
        assert not is_bewitched(single)

    def test_unsatisfiable_returns_declared_n(self):
        empty = CnfInstance.of(1, [[]])
        assert effective_size(empty) == 1
        contradiction = CnfInstance.of(2, [[1], [-1]])
        assert effective_size(contradiction) == 2

    def test_never_exceeds_declared_n(self):
        rng = random.Random(8)
        for _ in range(150):
            inst = random_instance(rng, max_n=3, max_m=3)
            eff = effective_size(inst)
            assert eff <= inst.n
            if not any(satisfies(inst, y) for y in solutions(inst.n)):
                assert eff == inst.n


class TestSelectionOracle:
    def test_known_counts(self):
        assert consistent_selection_count(1, 1) == 2
        assert consistent_selection_count(2, 1) == 4
        assert consistent_selection_count(1, 2) == 2
        assert consistent_selection_count(2, 2) == 12
        assert consistent_selection_count(3, 2) == 30
        assert consistent_selection_count(2, 3) == 28
        assert consistent_selection_count(3, 3) == 126

    def test_matches_direct_enumeration(self):
        for n, m in itertools.product(range(1, 4), range(1, 4)):
            assert len(selection_strings(EchelonSpec(n, m))) == consistent_selection_count(n, m)
