"""Finite languages and the expansion / cylindrification operators.

A finite language is an explicit word set over one alphabet; mixed lengths
are allowed.  Full length-capped slices stand in for the set of all words
wherever a law quantifies over it: every identity checked here is
echelon-wise, so a capped slice is an exact test bed, not an approximation.

Language file format: header line "alphabet=<symbols>", then one word per
line; '#' starts a comment; blank lines are ignored (the empty word is not
representable in files).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .strings import (
    Alphabet,
    AlphabetMismatch,
    BINARY,
    PartialString,
    TERNARY,
    join_sets,
    reduce_strings,
    word_includes,
)


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured budget."""

    def __init__(self, message: str, size: int, budget: int):
        super().__init__(f"{message}: {size} exceeds budget {budget}")
        self.size = size
        self.budget = budget


@dataclass(frozen=True)
class FiniteLanguage:
    alphabet: Alphabet
    words: frozenset[str]

    def __post_init__(self) -> None:
        for w in self.words:
            for c in w:
                if c not in self.alphabet:
                    raise ValueError(f"word {w!r} uses symbol {c!r} outside {self.alphabet!r}")

    @classmethod
    def of(cls, alphabet: Alphabet, words: Iterable[str]) -> "FiniteLanguage":
        return cls(alphabet, frozenset(words))

    @classmethod
    def empty(cls, alphabet: Alphabet) -> "FiniteLanguage":
        return cls(alphabet, frozenset())

    def __contains__(self, word: object) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self) -> Iterator[str]:
        return iter(self.words)

    def sorted_words(self) -> list[str]:
        return sorted(self.words, key=lambda w: (len(w), w))

    @property
    def max_len(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def _check(self, other: "FiniteLanguage") -> None:
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch(f"mixed alphabets: {self.alphabet!r} vs {other.alphabet!r}")

    def union(self, other: "FiniteLanguage") -> "FiniteLanguage":
        self._check(other)
        return FiniteLanguage(self.alphabet, self.words | other.words)

    def intersection(self, other: "FiniteLanguage") -> "FiniteLanguage":
        self._check(other)
        return FiniteLanguage(self.alphabet, self.words & other.words)

    def difference(self, other: "FiniteLanguage") -> "FiniteLanguage":
        self._check(other)
        return FiniteLanguage(self.alphabet, self.words - other.words)

    def issubset(self, other: "FiniteLanguage") -> bool:
        self._check(other)
        return self.words <= other.words

    def __repr__(self) -> str:
        sample = ",".join(self.sorted_words()[:4])
        extra = "..." if len(self.words) > 4 else ""
        return f"FiniteLanguage({''.join(self.alphabet.symbols)};{{{sample}{extra}}})"


def sigma_exact(alphabet: Alphabet, n: int) -> FiniteLanguage:
    """All words of length exactly n."""
    return FiniteLanguage.of(alphabet, ("".join(t) for t in itertools.product(alphabet.symbols, repeat=n)))


def sigma_upto(alphabet: Alphabet, cap: int) -> FiniteLanguage:
    """All words of length at most cap (includes the empty word)."""
    words: list[str] = []
    for n in range(cap + 1):
        words.extend("".join(t) for t in itertools.product(alphabet.symbols, repeat=n))
    return FiniteLanguage.of(alphabet, words)


def is_full_slice(L: FiniteLanguage, cap: int) -> bool:
    k = len(L.alphabet)
    expected = (k ** (cap + 1) - 1) // (k - 1) if k > 1 else cap + 1
    return len(L) == expected and L.max_len <= cap


def expand_in(H: Iterable[PartialString], L: FiniteLanguage) -> FiniteLanguage:
    """Words of L that include at least one member of H."""
    members = list(H)
    for g in members:
        if g.alphabet != L.alphabet:
            raise AlphabetMismatch(f"string alphabet {g.alphabet!r} differs from language {L.alphabet!r}")
    if not members:
        return FiniteLanguage.empty(L.alphabet)
    return FiniteLanguage(L.alphabet, frozenset(w for w in L.words if any(word_includes(w, g) for g in members)))


def cylindrify(A: FiniteLanguage, L: FiniteLanguage) -> FiniteLanguage:
    """Words of L having some word of A as a prefix."""
    A._check(L)
    prefixes = sorted(A.words, key=len)
    return FiniteLanguage(L.alphabet, frozenset(w for w in L.words if any(w.startswith(p) for p in prefixes)))


def is_cylinder_in(A: FiniteLanguage, E: FiniteLanguage) -> bool:
    """True iff A is a fixed point of cylindrification relative to E; requires A to be a subset of E."""
    if not A.issubset(E):
        raise ValueError("A must be a subset of the reference language E")
    return cylindrify(A, E) == A


def strings_of(
    E: FiniteLanguage,
    domain_positions: Iterable[int] | None = None,
    budget: int = 1_000_000,
) -> frozenset[PartialString]:
    """All substrings of words of E, optionally restricted to candidate positions.

    Equals {g : expand_in({g}, E) is nonempty}; use that membership test
    instead of this enumeration when E is large.
    """
    allowed = None if domain_positions is None else frozenset(domain_positions)
    total = 0
    for w in E.words:
        k = len(w) if allowed is None else sum(1 for p in allowed if p <= len(w))
        total += 1 << k
        if total > budget:
            raise BudgetExceeded("substring enumeration too large", total, budget)
    out: set[PartialString] = set()
    for w in E.words:
        positions = [p for p in range(1, len(w) + 1) if allowed is None or p in allowed]
        for r in range(len(positions) + 1):
            for combo in itertools.combinations(positions, r):
                out.add(PartialString(E.alphabet, tuple((p, w[p - 1]) for p in combo)))
    return frozenset(out)


def occurs_in(g: PartialString, E: FiniteLanguage) -> bool:
    """Membership test for the substring set of E without enumerating it."""
    return any(word_includes(w, g) for w in E.words)


# --- seeded random generators (word length uniform in [0, cap], uniform symbols) ---

def random_language(rng: random.Random, alphabet: Alphabet, cap: int, max_words: int = 24) -> FiniteLanguage:
    count = rng.randint(0, max_words)
    words = set()
    for _ in range(count):
        n = rng.randint(0, cap)
        words.add("".join(rng.choice(alphabet.symbols) for _ in range(n)))
    return FiniteLanguage.of(alphabet, words)


def random_string(rng: random.Random, alphabet: Alphabet, cap: int) -> PartialString:
    entries = [(p, rng.choice(alphabet.symbols)) for p in range(1, cap + 1) if rng.random() < 0.4]
    return PartialString.of(alphabet, entries)


def random_string_set(rng: random.Random, alphabet: Alphabet, cap: int, max_size: int = 5) -> frozenset[PartialString]:
    return frozenset(random_string(rng, alphabet, cap) for _ in range(rng.randint(0, max_size)))


@dataclass
class LawReport:
    """Outcome of a seeded law-checking run."""

    samples: int
    seed: int
    holds: bool = True
    checks: dict[str, int] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    def record(self, law: str, ok: bool, detail: str) -> None:
        self.checks[law] = self.checks.get(law, 0) + 1
        if not ok:
            self.holds = False
            if len(self.failures) < 16:
                self.failures.append(f"{law}: {detail}")

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "holds": self.holds,
            "checks": dict(sorted(self.checks.items())),
            "failures": list(self.failures),
        }


def check_expansion_laws(
    samples: int,
    seed: int,
    alphabets: tuple[Alphabet, ...] = (BINARY, TERNARY),
    cap: int = 6,
) -> LawReport:
    """Seeded randomized check of the closure and expansion laws.

    Per sample, over a random universe L (sometimes a full capped slice):
    cylindrification is extensive, idempotent, monotone, and distributes
    over union; string-set expansion satisfies the intersection law
    (via the set join), the union law, and reduction invariance.
    """
    rng = random.Random(seed)
    report = LawReport(samples=samples, seed=seed)
    for i in range(samples):
        alphabet = alphabets[i % len(alphabets)]
        L = sigma_upto(alphabet, rng.randint(1, min(cap, 4))) if rng.random() < 0.3 else random_language(rng, alphabet, cap)
        words = sorted(L.words)
        B = FiniteLanguage.of(alphabet, (w for w in words if rng.random() < 0.5))
        A = FiniteLanguage.of(alphabet, (w for w in B.words if rng.random() < 0.6))
        tag = f"sample {i}"

        cyl_A, cyl_B = cylindrify(A, L), cylindrify(B, L)
        report.record("extensive", A.issubset(cyl_A), tag)
        report.record("idempotent", cylindrify(cyl_A, L) == cyl_A, tag)
        report.record("monotone", cyl_A.issubset(cyl_B), tag)
        union = cylindrify(A.union(B), L)
        report.record("union-of-words", union == cyl_A.union(cyl_B), tag)

        H = random_string_set(rng, alphabet, cap)
        K = random_string_set(rng, alphabet, cap)
        eH, eK = expand_in(H, L), expand_in(K, L)
        report.record("intersection-of-strings", eH.intersection(eK) == expand_in(join_sets(H, K), L), tag)
        report.record("union-of-strings", expand_in(H | K, L) == eH.union(eK), tag)
        report.record("reduction-invariant", expand_in(reduce_strings(H), L) == eH, tag)
    return report


# --- language files ---

def save_language(L: FiniteLanguage, path: str | Path) -> None:
    lines = [f"alphabet={''.join(L.alphabet.symbols)}"]
    lines.extend(L.sorted_words())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_language(path: str | Path) -> FiniteLanguage:
    alphabet: Alphabet | None = None
    words: list[str] = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("alphabet="):
            alphabet = Alphabet.of(line.removeprefix("alphabet="))
            continue
        if alphabet is None:
            raise ValueError(f"{path}: missing 'alphabet=' header before first word")
        words.append(line)
    if alphabet is None:
        raise ValueError(f"{path}: missing 'alphabet=' header")
    return FiniteLanguage.of(alphabet, words)
