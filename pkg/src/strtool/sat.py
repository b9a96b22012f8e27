"""CNF formulas encoded as words over {0,1,2}, and their echelons.

Encoding: a formula with n variables and m clauses becomes the prefix
0..010..01 (n zeros, a one, m zeros, a one) followed by m blocks of n codes,
one block per clause; code 0 means the variable is absent from the clause,
1 present plain, 2 present negated.  Clause j's code for variable i sits at
word position (n + m + 2) + (j - 1) * n + i.  All encoded words form a
prefix-free language, one echelon per (n, m).

Literals are nonzero signed integers (DIMACS style): +i for the plain
variable, -i for its negation.  The CLI formula grammar separates clauses
with ';' and literals with ',': "1,3,-4;2,-3".
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .languages import BudgetExceeded, FiniteLanguage
from .logogram import DecisionProblem
from .strings import TERNARY, Alphabet, PartialString

SAT_ALPHABET: Alphabet = TERNARY
DEFAULT_WORD_BUDGET = 2_000_000


@dataclass(frozen=True)
class CnfInstance:
    """n variables, m clauses; a clause is a frozenset of signed literals.

    A clause holding both a literal and its negation is constructible (and
    flagged by `is_well_formed`) but has no encoded form: the code scheme
    reserves a single code per (clause, variable) slot.
    """

    n: int
    m: int
    clauses: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        if len(self.clauses) != self.m:
            raise ValueError(f"declared m={self.m} but got {len(self.clauses)} clauses")
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.n:
                    raise ValueError(f"literal {lit} out of range for n={self.n}")

    @classmethod
    def of(cls, n: int, clauses) -> "CnfInstance":
        clause_sets = tuple(frozenset(c) for c in clauses)
        return cls(n, len(clause_sets), clause_sets)

    @property
    def is_well_formed(self) -> bool:
        return all(not any(-lit in clause for lit in clause) for clause in self.clauses)

    def occurring_variables(self) -> frozenset[int]:
        return frozenset(abs(lit) for clause in self.clauses for lit in clause)


Assignment = tuple  # of 0/1 values, index i-1 holding the value of variable i


def solutions(n: int) -> list[Assignment]:
    """The 2**n assignments in binary-counting order, variable 1 least significant."""
    if n < 1:
        raise ValueError("need n >= 1")
    return [tuple((j >> (i - 1)) & 1 for i in range(1, n + 1)) for j in range(2 ** n)]


def satisfies(inst: CnfInstance, y: Assignment) -> bool:
    """True iff every clause has a literal made true by y; an empty clause fails."""
    if len(y) != inst.n:
        raise ValueError(f"assignment has {len(y)} values, expected {inst.n}")
    def lit_true(lit: int) -> bool:
        value = y[abs(lit) - 1]
        return value == 1 if lit > 0 else value == 0
    return all(any(lit_true(lit) for lit in clause) for clause in inst.clauses)


@dataclass(frozen=True)
class EchelonSpec:
    """One (n, m) slice of the encoded language."""

    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and m >= 1")

    @property
    def prefix(self) -> str:
        return "0" * self.n + "1" + "0" * self.m + "1"

    @property
    def word_length(self) -> int:
        return self.n + self.m + 2 + self.n * self.m

    @property
    def body_positions(self) -> tuple[int, ...]:
        start = self.n + self.m + 2
        return tuple(range(start + 1, start + self.n * self.m + 1))

    def position(self, clause: int, var: int) -> int:
        if not (1 <= clause <= self.m and 1 <= var <= self.n):
            raise ValueError(f"(clause={clause}, var={var}) outside echelon ({self.n},{self.m})")
        return (self.n + self.m + 2) + (clause - 1) * self.n + var


def encode(inst: CnfInstance) -> str:
    spec = EchelonSpec(inst.n, inst.m)
    body = []
    for clause in inst.clauses:
        for i in range(1, inst.n + 1):
            plain, negated = i in clause, -i in clause
            if plain and negated:
                raise ValueError(f"clause {set(clause)} holds both {i} and {-i}: not encodable")
            body.append("1" if plain else "2" if negated else "0")
    return spec.prefix + "".join(body)


def decode(word: str) -> CnfInstance:
    n = 0
    while n < len(word) and word[n] == "0":
        n += 1
    if n == 0 or n >= len(word) or word[n] != "1":
        raise ValueError(f"malformed prefix in {word!r}")
    rest = word[n + 1:]
    m = 0
    while m < len(rest) and rest[m] == "0":
        m += 1
    if m == 0 or m >= len(rest) or rest[m] != "1":
        raise ValueError(f"malformed prefix in {word!r}")
    body = rest[m + 1:]
    if len(body) != n * m:
        raise ValueError(f"expected a body of {n * m} codes, got {len(body)} in {word!r}")
    clauses = []
    for j in range(m):
        clause = []
        for i in range(1, n + 1):
            code = body[j * n + i - 1]
            if code == "1":
                clause.append(i)
            elif code == "2":
                clause.append(-i)
            elif code != "0":
                raise ValueError(f"bad code {code!r} in {word!r}")
        clauses.append(frozenset(clause))
    return CnfInstance(n, m, tuple(clauses))


def enumerate_echelon(spec: EchelonSpec, budget: int = DEFAULT_WORD_BUDGET) -> DecisionProblem:
    """The full echelon: all encoded words, the satisfiable ones, and one region per assignment."""
    count = 3 ** (spec.n * spec.m)
    if count > budget:
        raise BudgetExceeded(f"echelon ({spec.n},{spec.m}) enumeration", count, budget)
    ys = solutions(spec.n)
    words = []
    region_words: list[list[str]] = [[] for _ in ys]
    sat_words = []
    for body in itertools.product(SAT_ALPHABET.symbols, repeat=spec.n * spec.m):
        word = spec.prefix + "".join(body)
        words.append(word)
        inst = decode(word)
        satisfiable = False
        for j, y in enumerate(ys):
            if satisfies(inst, y):
                region_words[j].append(word)
                satisfiable = True
        if satisfiable:
            sat_words.append(word)
    alphabet = SAT_ALPHABET
    return DecisionProblem(
        base=FiniteLanguage.of(alphabet, words),
        target=FiniteLanguage.of(alphabet, sat_words),
        regions=tuple(FiniteLanguage.of(alphabet, ws) for ws in region_words),
    )


def effective_size(inst: CnfInstance) -> int:
    """Minimum number of variable assignments forcing every clause true; n when unsatisfiable.

    A clause is forced once some assigned variable makes one of its
    literals true.  Searched breadth-first by assignment cardinality, so
    the first hit is minimal.
    """
    for k in range(inst.n + 1):
        for vars_combo in itertools.combinations(range(1, inst.n + 1), k):
            for values in itertools.product((0, 1), repeat=k):
                partial = dict(zip(vars_combo, values))
                def forced(clause) -> bool:
                    return any(
                        (lit > 0 and partial.get(lit) == 1) or (lit < 0 and partial.get(-lit) == 0)
                        for lit in clause
                    )
                if all(forced(c) for c in inst.clauses):
                    return k
    return inst.n


def occurrence_size(inst: CnfInstance) -> int:
    """Number of distinct variables with occurrences."""
    return len(inst.occurring_variables())


def is_bewitched(inst: CnfInstance) -> bool:
    """True iff the occurrence count and the effective size differ."""
    return occurrence_size(inst) != effective_size(inst)


def parse_formula(text: str, n: int) -> CnfInstance:
    """Parse the CLI grammar: clauses split by ';', literals by ','; '-' negates; empty segment = empty clause."""
    if text.strip() == "":
        raise ValueError("empty formula text (use ';' separated clauses, e.g. '1,-2;2')")
    clauses = []
    for part in text.split(";"):
        lits = []
        for tok in part.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                lits.append(int(tok))
            except ValueError:
                raise ValueError(f"bad literal {tok!r} in formula {text!r}") from None
        clauses.append(frozenset(lits))
    return CnfInstance.of(n, clauses)


def string_entries(spec: EchelonSpec, prescriptions) -> PartialString:
    """Build a partial word from ((clause, var, code), ...) prescriptions over one echelon."""
    return PartialString.of(
        SAT_ALPHABET, {spec.position(c, v): code for c, v, code in prescriptions}
    )


def consistent_selection_count(n: int, m: int) -> int:
    """Count one-literal-per-clause selections with no variable taken in both signs.

    Independent combinatorial oracle for the reduced logogram size,
    computed by inclusion-exclusion over the complementary literal pairs:
    the outer sum ranges over variable subsets forced to appear in both
    signs, the inner sum counts selections covering those 2s literals.
    """
    total = 0
    for s in range(n + 1):
        inner = sum(
            (-1) ** k * math.comb(2 * s, k) * (2 * n - k) ** m
            for k in range(2 * s + 1)
        )
        total += (-1) ** s * math.comb(n, s) * inner
    return total


def selection_strings(spec: EchelonSpec) -> frozenset[PartialString]:
    """Direct enumeration of the consistent one-literal-per-clause selections (test oracle)."""
    literals = [(v, code) for v in range(1, spec.n + 1) for code in ("1", "2")]
    out = []
    for choice in itertools.product(literals, repeat=spec.m):
        used: dict[int, str] = {}
        consistent = True
        for var, code in choice:
            if used.setdefault(var, code) != code:
                consistent = False
                break
        if consistent:
            out.append(string_entries(spec, ((j + 1, var, code) for j, (var, code) in enumerate(choice))))
    return frozenset(out)
