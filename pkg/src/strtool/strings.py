"""Partial words and their algebra.

A partial word ("string") is a finite partial map from 1-based positions to
alphabet symbols.  Ordinary words are the special case where the domain is an
initial segment {1..n}.  Strings are ordered by extension, carry a
compatibility relation, and support join (least common extension), meet
(agreeing restriction), set join, antichain reduction, and a consistency
test that produces a witnessing word.

Text forms:
  * positional: one character per position up to the string's size, with
    '_' marking undefined positions ("1_2"); words contain no '_'.
  * sparse: "pos:sym,pos:sym" for strings with large gaps ("1:1,3:2").
  * the empty string renders as "" and may be written "" or the token "-".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

BLANK = "_"
EMPTY_TOKEN = "-"


class AlphabetMismatch(ValueError):
    """Raised when an operation mixes strings over different alphabets."""


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite symbol set; must contain '0' and '1', never '_'."""

    symbols: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.symbols:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in alphabet {self.symbols!r}")
        for sym in self.symbols:
            if not (isinstance(sym, str) and len(sym) == 1):
                raise ValueError(f"alphabet symbols must be single characters, got {sym!r}")
        if BLANK in self.symbols:
            raise ValueError("the blank marker '_' cannot be an alphabet symbol")
        for required in ("0", "1"):
            if required not in self.symbols:
                raise ValueError(f"alphabet must include {required!r}")

    @classmethod
    def of(cls, symbols: str | Iterable[str]) -> "Alphabet":
        return cls(tuple(symbols))

    @property
    def first(self) -> str:
        return self.symbols[0]

    def __contains__(self, sym: object) -> bool:
        return sym in self.symbols

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __repr__(self) -> str:
        return f"Alphabet({''.join(self.symbols)!r})"


BINARY = Alphabet.of("01")
TERNARY = Alphabet.of("012")


def _check_same_alphabet(a: "PartialString", b: "PartialString") -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"mixed alphabets: {a.alphabet!r} vs {b.alphabet!r}")


@dataclass(frozen=True)
class PartialString:
    """Finite partial map position -> symbol, positions >= 1.

    The size is the maximum position in the domain (0 for the empty
    string), so the positional rendering of a string of size L has exactly
    L characters.
    """

    alphabet: Alphabet
    entries: tuple[tuple[int, str], ...]

    def __post_init__(self) -> None:
        last = 0
        for pos, sym in self.entries:
            if not isinstance(pos, int) or pos < 1:
                raise ValueError(f"positions must be integers >= 1, got {pos!r}")
            if pos <= last:
                raise ValueError("entries must be sorted by strictly increasing position")
            if sym not in self.alphabet:
                raise ValueError(f"symbol {sym!r} not in {self.alphabet!r}")
            last = pos

    @classmethod
    def of(cls, alphabet: Alphabet, entries: Mapping[int, str] | Iterable[tuple[int, str]]) -> "PartialString":
        items = entries.items() if isinstance(entries, Mapping) else entries
        return cls(alphabet, tuple(sorted(items)))

    @classmethod
    def bottom(cls, alphabet: Alphabet) -> "PartialString":
        return cls(alphabet, ())

    @classmethod
    def from_word(cls, alphabet: Alphabet, word: str) -> "PartialString":
        return cls(alphabet, tuple((i + 1, c) for i, c in enumerate(word)))

    @classmethod
    def parse(cls, alphabet: Alphabet, text: str) -> "PartialString":
        """Parse a positional or sparse rendering.

        Positional input is lenient about trailing blanks ("1__" parses the
        same as "1"); the canonical rendering never carries them.
        """
        if text in ("", EMPTY_TOKEN):
            return cls.bottom(alphabet)
        if ":" in text:
            entries = []
            for part in text.split(","):
                pos_text, _, sym = part.partition(":")
                try:
                    pos = int(pos_text)
                except ValueError:
                    raise ValueError(f"bad sparse entry {part!r} in {text!r}") from None
                if len(sym) != 1:
                    raise ValueError(f"bad sparse entry {part!r} in {text!r}")
                entries.append((pos, sym))
            return cls.of(alphabet, entries)
        return cls.of(alphabet, ((i + 1, c) for i, c in enumerate(text) if c != BLANK))

    @cached_property
    def as_dict(self) -> dict[int, str]:
        return dict(self.entries)

    @property
    def size(self) -> int:
        return self.entries[-1][0] if self.entries else 0

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(pos for pos, _ in self.entries)

    @property
    def is_bottom(self) -> bool:
        return not self.entries

    @property
    def is_word(self) -> bool:
        return all(pos == i + 1 for i, (pos, _) in enumerate(self.entries))

    def to_word(self) -> str:
        if not self.is_word:
            raise ValueError(f"{self.render()!r} is not a word: domain is not an initial segment")
        return "".join(sym for _, sym in self.entries)

    def get(self, pos: int) -> str | None:
        return self.as_dict.get(pos)

    def render(self) -> str:
        chars = [BLANK] * self.size
        for pos, sym in self.entries:
            chars[pos - 1] = sym
        return "".join(chars)

    def __len__(self) -> int:
        return len(self.entries)

    # Extension order: f <= g iff g agrees with f on all of f's domain.
    def __le__(self, other: "PartialString") -> bool:
        _check_same_alphabet(self, other)
        d = other.as_dict
        return all(d.get(pos) == sym for pos, sym in self.entries)

    def __ge__(self, other: "PartialString") -> bool:
        return other.__le__(self)

    def __lt__(self, other: "PartialString") -> bool:
        return self != other and self.__le__(other)

    def __gt__(self, other: "PartialString") -> bool:
        return other.__lt__(self)

    def compatible(self, other: "PartialString") -> bool:
        _check_same_alphabet(self, other)
        small, big = (self, other) if len(self.entries) <= len(other.entries) else (other, self)
        d = big.as_dict
        return all(d.get(pos, sym) == sym for pos, sym in small.entries)

    def join(self, other: "PartialString") -> "PartialString | None":
        """Least common extension, or None when incompatible."""
        if not self.compatible(other):
            return None
        merged = dict(self.entries)
        merged.update(other.entries)
        return PartialString.of(self.alphabet, merged)

    def meet(self, other: "PartialString") -> "PartialString":
        """Restriction to the positions where both agree; always defined."""
        _check_same_alphabet(self, other)
        d = other.as_dict
        return PartialString(self.alphabet, tuple((p, s) for p, s in self.entries if d.get(p) == s))

    def __repr__(self) -> str:
        return f"PartialString({self.render()!r})"


def extends(g: PartialString, f: PartialString) -> bool:
    """True iff g is an extension of f (f <= g)."""
    return f <= g


def word_includes(word: str, g: PartialString) -> bool:
    """True iff the word, read as a total string on {1..len}, extends g."""
    n = len(word)
    return all(pos <= n and word[pos - 1] == sym for pos, sym in g.entries)


StringSet = frozenset  # of PartialString over one alphabet


def _common_alphabet(H: Iterable[PartialString], K: Iterable[PartialString] = ()) -> Alphabet | None:
    alphabet: Alphabet | None = None
    for g in itertools.chain(H, K):
        if alphabet is None:
            alphabet = g.alphabet
        elif g.alphabet != alphabet:
            raise AlphabetMismatch(f"mixed alphabets in string set: {alphabet!r} vs {g.alphabet!r}")
    return alphabet


def join_sets(H: frozenset[PartialString], K: frozenset[PartialString]) -> frozenset[PartialString]:
    """All defined joins a+b over pairs; empty operand annihilates."""
    _common_alphabet(H, K)
    if not H or not K:
        return frozenset()
    out = set()
    for a in H:
        for b in K:
            j = a.join(b)
            if j is not None:
                out.add(j)
    return frozenset(out)


def reduce_strings(H: Iterable[PartialString]) -> frozenset[PartialString]:
    """Minimal elements of H under extension (members not properly extending another member)."""
    members = sorted(set(H), key=lambda g: (len(g.entries), g.entries))
    minimal: list[PartialString] = []
    for g in members:
        if not any(m < g for m in minimal):
            minimal.append(g)
    return frozenset(minimal)


def pairwise_compatible(H: Iterable[PartialString]) -> bool:
    members = list(H)
    return all(a.compatible(b) for a, b in itertools.combinations(members, 2))


def consistent_witness(H: frozenset[PartialString]) -> str | None:
    """A word including every member of H, or None if there is none.

    The witness has length max over member sizes, forced entries where H
    prescribes them, and the alphabet's first symbol elsewhere.  A finite H
    has a witness exactly when its members are pairwise compatible.
    """
    alphabet = _common_alphabet(H)
    if alphabet is None:
        return ""
    chars: dict[int, str] = {}
    for g in H:
        for pos, sym in g.entries:
            if chars.setdefault(pos, sym) != sym:
                return None
    length = max((g.size for g in H), default=0)
    return "".join(chars.get(i, alphabet.first) for i in range(1, length + 1))
