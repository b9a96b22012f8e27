"""Brute-force logograms of decision problems.

The logogram of a target set F relative to a base language E is the set of
strings whose presence in an E-word guarantees membership in the prefix
closure of F within E; the reduced logogram keeps its minimal elements.

Engine layout: E is indexed once into per-(position, symbol) bitmasks over
the word list, so a candidate's relative cylinder is an AND of masks.
Candidates are walked position by position, pruning any branch whose
cylinder is already empty, then minimal elements are extracted in a second
pass ordered by domain size.  A deliberately plain enumerator
(`log_rel_naive`) re-derives the same sets by scanning every candidate
against every word with no index, no restriction and no pruning; it is the
correctness oracle for the engine.

Cache files: "logogram-<fingerprint>.txt" with a JSON header line followed
by one rendered string per line, reduced members flagged "R ", remaining
members flagged ". ".  A fingerprint or version mismatch invalidates the
file and the caller recomputes.
"""

from __future__ import annotations

import itertools
import json
import multiprocessing
import time
from dataclasses import dataclass
from hashlib import sha256
from pathlib import Path

from . import __version__
from .languages import BudgetExceeded, FiniteLanguage, cylindrify, expand_in, is_full_slice
from .strings import AlphabetMismatch, PartialString, reduce_strings

DEFAULT_CANDIDATE_BUDGET = 4 ** 12
FULL_KEEP_LIMIT = 50_000


@dataclass(frozen=True)
class DecisionProblem:
    """A base language E, a target F inside it, and optional solution regions covering F."""

    base: FiniteLanguage
    target: FiniteLanguage
    regions: tuple[FiniteLanguage, ...] | None = None

    def __post_init__(self) -> None:
        if self.base.alphabet != self.target.alphabet:
            raise AlphabetMismatch("base and target use different alphabets")
        if not self.target.issubset(self.base):
            raise ValueError("target must be a subset of the base language")
        if self.regions is not None:
            covered: frozenset[str] = frozenset()
            for region in self.regions:
                if not region.issubset(self.target):
                    raise ValueError("every region must be a subset of the target")
                covered |= region.words
            if covered != self.target.words:
                raise ValueError("regions must cover the target exactly")

    @property
    def alphabet(self):
        return self.base.alphabet


class ProblemIndex:
    """Per-(position, symbol) bitmask index over the words of a base language."""

    def __init__(self, base: FiniteLanguage):
        if not base.words:
            raise ValueError("cannot index an empty base language")
        self.language = base
        self.alphabet = base.alphabet
        self.words = tuple(sorted(base.words, key=lambda w: (len(w), w)))
        self.bit = {w: 1 << i for i, w in enumerate(self.words)}
        self.all_mask = (1 << len(self.words)) - 1
        self.max_len = len(self.words[-1])
        self.pos_masks: list[dict[str, int]] = [dict() for _ in range(self.max_len)]
        for w, b in self.bit.items():
            for i, c in enumerate(w):
                masks = self.pos_masks[i]
                masks[c] = masks.get(c, 0) | b
        by_lex = sorted(base.words)
        self.prefix_free = not any(
            by_lex[i + 1].startswith(by_lex[i]) for i in range(len(by_lex) - 1)
        )
        lo, hi = by_lex[0], by_lex[-1]
        shared = 0
        while shared < len(lo) and lo[shared] == hi[shared]:
            shared += 1
        self.shared_prefix_len = shared if len(self.words) > 1 else 0

    def word_mask(self, words) -> int:
        mask = 0
        for w in words:
            mask |= self.bit[w]
        return mask

    def cylinder_mask(self, g: PartialString) -> int:
        mask = self.all_mask
        for pos, sym in g.entries:
            if pos > self.max_len:
                return 0
            mask &= self.pos_masks[pos - 1].get(sym, 0)
            if not mask:
                return 0
        return mask

    def mask_language(self, mask: int) -> FiniteLanguage:
        return FiniteLanguage.of(self.alphabet, (w for w in self.words if self.bit[w] & mask))

    def target_mask(self, target: FiniteLanguage) -> int:
        """Mask of the prefix closure of the target within the base (the target itself when prefix-free)."""
        if self.prefix_free:
            return self.word_mask(target.words)
        return self.word_mask(cylindrify(target, self.language).words)


@dataclass
class LogogramResult:
    full: frozenset[PartialString] | None
    reduced: frozenset[PartialString]
    full_count: int
    candidate_space_size: int
    positions: tuple[int, ...]
    restricted: bool
    expansion: FiniteLanguage
    elapsed: float

    def sorted_reduced(self) -> list[PartialString]:
        return sorted(self.reduced, key=lambda g: (g.size, g.render()))


def _dfs_collect(sym_masks, powers, base, bad_mask, depth, key0, mask0):
    """Enumerate all candidates below a partial assignment; return qualifying keys, count, expansion."""
    keys: list[int] = []
    expansion = 0
    positions_left = len(sym_masks)
    sink = keys.append

    def rec(j: int, key: int, mask: int) -> None:
        nonlocal expansion
        if j == positions_left:
            if mask and not (mask & bad_mask):
                sink(key)
                expansion |= mask
            return
        rec(j + 1, key, mask)
        mult = powers[j]
        row = sym_masks[j]
        for si in range(base - 1):
            m2 = mask & row[si]
            if m2:
                rec(j + 1, key + (si + 1) * mult, m2)

    rec(depth, key0, mask0)
    return keys, len(keys), expansion


_FORK_STATE: dict | None = None


def _subtree_worker(prefix_digits):
    st = _FORK_STATE
    mask = st["all_mask"]
    key = 0
    for j, d in enumerate(prefix_digits):
        if d:
            mask &= st["sym_masks"][j][d - 1]
        key += d * st["powers"][j]
    if not mask:
        return [], 0, 0
    return _dfs_collect(st["sym_masks"], st["powers"], st["base"], st["bad_mask"], len(prefix_digits), key, mask)


def _minimal_key_indices(keys, digit_rows, npos, nsym):
    """Indices of minimal candidates, given per-key digit tuples (0 = undefined)."""
    order = sorted(range(len(keys)), key=lambda i: (sum(1 for d in digit_rows[i] if d), digit_rows[i]))
    undef = [0] * npos
    by_code = [[0] * nsym for _ in range(npos)]
    accepted_bits = 0
    minimal: list[int] = []
    for i in order:
        digits = digit_rows[i]
        incl = accepted_bits
        for j in range(npos):
            d = digits[j]
            incl &= undef[j] if d == 0 else (undef[j] | by_code[j][d - 1])
            if not incl:
                break
        if incl:
            continue
        bit = 1 << len(minimal)
        for j in range(npos):
            d = digits[j]
            if d == 0:
                undef[j] |= bit
            else:
                by_code[j][d - 1] |= bit
        accepted_bits |= bit
        minimal.append(i)
    return minimal


def _key_digits(key: int, npos: int, base: int) -> tuple[int, ...]:
    digits = []
    for _ in range(npos):
        key, d = divmod(key, base)
        digits.append(d)
    return tuple(digits)


def auto_positions(index: ProblemIndex) -> tuple[int, ...]:
    """The candidate positions log_rel would pick for this base by default."""
    return _candidate_positions(index, None, "auto")[0]


def _candidate_positions(index: ProblemIndex, candidate_positions, restrict: str):
    full_range = tuple(range(1, index.max_len + 1))
    if candidate_positions is not None:
        positions = tuple(sorted(set(candidate_positions)))
        if any(p < 1 for p in positions):
            raise ValueError("candidate positions must be >= 1")
        return positions, positions != full_range
    if restrict == "auto" and index.shared_prefix_len > 0:
        return full_range[index.shared_prefix_len:], True
    return full_range, False


def log_rel(
    problem: DecisionProblem,
    candidate_positions=None,
    *,
    budget: int = DEFAULT_CANDIDATE_BUDGET,
    keep_full: bool | None = None,
    workers: int = 1,
    restrict: str = "auto",
    index: ProblemIndex | None = None,
) -> LogogramResult:
    """Relative logogram of problem.target within problem.base, with minimal elements.

    When every base word shares a constant prefix (restrict="auto"), the
    candidate space drops the prefix positions: entries there never change a
    relative cylinder and never appear on minimal members, so the reduced
    set is unaffected; the full set is then reported over the restricted
    positions only.
    """
    start = time.perf_counter()
    if not problem.base.words:
        raise ValueError("base language is empty")
    idx = index if index is not None else ProblemIndex(problem.base)
    positions, restricted = _candidate_positions(idx, candidate_positions, restrict)
    target_mask = idx.target_mask(problem.target)
    return _logogram_over(
        idx, positions, restricted, target_mask, budget=budget, keep_full=keep_full,
        workers=workers, started=start,
    )


def log_abs(
    F: FiniteLanguage,
    universe: FiniteLanguage,
    *,
    budget: int = DEFAULT_CANDIDATE_BUDGET,
    keep_full: bool | None = None,
) -> LogogramResult:
    """Absolute logogram of F evaluated inside a full capped slice."""
    if not is_full_slice(universe, universe.max_len):
        raise ValueError("universe must be a full length-capped slice")
    if not F.issubset(universe):
        raise ValueError("F must be contained in the universe")
    start = time.perf_counter()
    idx = ProblemIndex(universe)
    positions = tuple(range(1, idx.max_len + 1))
    target_mask = idx.word_mask(cylindrify(F, universe).words)
    return _logogram_over(idx, positions, False, target_mask, budget=budget, keep_full=keep_full, started=start)


def _logogram_over(
    idx: ProblemIndex,
    positions: tuple[int, ...],
    restricted: bool,
    target_mask: int,
    *,
    budget: int,
    keep_full: bool | None,
    workers: int = 1,
    started: float | None = None,
) -> LogogramResult:
    start = started if started is not None else time.perf_counter()
    symbols = idx.alphabet.symbols
    base = len(symbols) + 1
    npos = len(positions)
    space = base ** npos
    if space > budget:
        raise BudgetExceeded("candidate space too large", space, budget)

    sym_masks = [
        [idx.pos_masks[p - 1].get(sym, 0) if p <= idx.max_len else 0 for sym in symbols]
        for p in positions
    ]
    powers = [base ** j for j in range(npos)]
    bad_mask = idx.all_mask & ~target_mask

    if workers > 1 and space >= 4096:
        keys, expansion = _parallel_collect(idx, sym_masks, powers, base, bad_mask, workers)
    else:
        keys, _, expansion = _dfs_collect(sym_masks, powers, base, bad_mask, 0, 0, idx.all_mask)

    digit_rows = [_key_digits(k, npos, base) for k in keys]
    minimal_idx = _minimal_key_indices(keys, digit_rows, npos, len(symbols))

    def to_string(digits) -> PartialString:
        return PartialString(
            idx.alphabet,
            tuple((positions[j], symbols[d - 1]) for j, d in enumerate(digits) if d),
        )

    reduced = frozenset(to_string(digit_rows[i]) for i in minimal_idx)
    full_count = len(keys)
    if keep_full is None:
        keep_full = full_count <= FULL_KEEP_LIMIT
    full = frozenset(to_string(row) for row in digit_rows) if keep_full else None
    return LogogramResult(
        full=full,
        reduced=reduced,
        full_count=full_count,
        candidate_space_size=space,
        positions=positions,
        restricted=restricted,
        expansion=idx.mask_language(expansion),
        elapsed=time.perf_counter() - start,
    )


def _parallel_collect(idx, sym_masks, powers, base, bad_mask, workers):
    global _FORK_STATE
    depth = min(2, len(sym_masks))
    chunks = list(itertools.product(range(base), repeat=depth))
    _FORK_STATE = {
        "sym_masks": sym_masks,
        "powers": powers,
        "base": base,
        "bad_mask": bad_mask,
        "all_mask": idx.all_mask,
    }
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=workers) as pool:
            parts = pool.map(_subtree_worker, chunks)
    except (ValueError, OSError):
        keys, _, expansion = _dfs_collect(sym_masks, powers, base, bad_mask, 0, 0, idx.all_mask)
        return keys, expansion
    finally:
        _FORK_STATE = None
    keys: list[int] = []
    expansion = 0
    for part_keys, _, part_exp in parts:
        keys.extend(part_keys)
        expansion |= part_exp
    return keys, expansion


def log_rel_naive(problem: DecisionProblem, candidate_positions=None, budget: int = 4 ** 9):
    """Position-by-position reference enumerator: no index, no restriction, no pruning.

    Tests every candidate over the given positions against every base word.
    Returns (full, reduced) string sets.
    """
    if not problem.base.words:
        raise ValueError("base language is empty")
    alphabet = problem.base.alphabet
    words = sorted(problem.base.words, key=lambda w: (len(w), w))
    positions = tuple(sorted(set(candidate_positions))) if candidate_positions is not None \
        else tuple(range(1, max(len(w) for w in words) + 1))
    space = (len(alphabet.symbols) + 1) ** len(positions)
    if space > budget:
        raise BudgetExceeded("naive candidate space too large", space, budget)
    target_words = cylindrify(problem.target, problem.base).words
    flags = [w in target_words for w in words]

    full: list[PartialString] = []
    for r in range(len(positions) + 1):
        for domain in itertools.combinations(positions, r):
            rows = []
            for w, ok in zip(words, flags):
                proj = tuple(w[p - 1] for p in domain) if all(p <= len(w) for p in domain) else None
                rows.append((proj, ok))
            for codes in itertools.product(alphabet.symbols, repeat=r):
                hit = False
                good = True
                for proj, ok in rows:
                    if proj == codes:
                        hit = True
                        if not ok:
                            good = False
                            break
                if hit and good:
                    full.append(PartialString(alphabet, tuple(zip(domain, codes))))
    full_set = frozenset(full)
    return full_set, reduce_strings(full_set)


def logexp(H: frozenset[PartialString], universe: FiniteLanguage, *, budget: int = DEFAULT_CANDIDATE_BUDGET) -> frozenset[PartialString]:
    """The closure carrying H to the full absolute logogram of its expansion."""
    result = log_abs(expand_in(H, universe), universe, budget=budget, keep_full=True)
    assert result.full is not None
    return result.full


@dataclass
class LogExpReport:
    extensive: bool
    idempotent: bool
    monotone: bool
    holds: bool
    collective_sample: str | None = None
    union_strict: bool | None = None

    def to_json(self) -> dict:
        return {
            "extensive": self.extensive,
            "idempotent": self.idempotent,
            "monotone": self.monotone,
            "holds": self.holds,
            "union_strict": self.union_strict,
            "collective_sample": self.collective_sample,
        }


def logexp_closure_check(
    H: frozenset[PartialString],
    universe: FiniteLanguage,
    partner: frozenset[PartialString] | None = None,
    *,
    budget: int = DEFAULT_CANDIDATE_BUDGET,
) -> LogExpReport:
    """Check the closure laws of LogExp on one string set.

    Extensivity and idempotence are checked on H; monotonicity against H
    plus one extra word-string from the universe.  With a partner set, the
    union LogExp(H | partner) is compared against the union of the separate
    closures and a collective string is reported when the inclusion is
    proper.
    """
    le_h = logexp(H, universe, budget=budget)
    extensive = H <= le_h
    idempotent = logexp(le_h, universe, budget=budget) == le_h
    sorted_words = sorted(universe.words, key=lambda w: (len(w), w), reverse=True)
    extra = PartialString.from_word(universe.alphabet, sorted_words[0]) if sorted_words else None
    bigger = H | {extra} if extra is not None else H
    monotone = le_h <= logexp(bigger, universe, budget=budget)
    report = LogExpReport(extensive=extensive, idempotent=idempotent, monotone=monotone,
                          holds=extensive and idempotent and monotone)
    if partner is not None:
        le_union = logexp(H | partner, universe, budget=budget)
        le_parts = le_h | logexp(partner, universe, budget=budget)
        report.union_strict = le_parts < le_union
        if report.union_strict:
            sample = min(le_union - le_parts, key=lambda g: (g.size, g.render()))
            report.collective_sample = sample.render()
    return report


def verify_logogram_expansion(
    problem: DecisionProblem,
    result: LogogramResult | None = None,
    index: ProblemIndex | None = None,
    **log_kwargs,
) -> bool:
    """True iff expanding the logogram (full and reduced) inside E recovers the prefix closure of F."""
    idx = index if index is not None else ProblemIndex(problem.base)
    if result is None:
        result = log_rel(problem, index=idx, **log_kwargs)
    target = idx.mask_language(idx.target_mask(problem.target))
    exp_full = expand_in(result.full, problem.base) if result.full is not None else result.expansion
    if exp_full != target:
        return False
    return expand_in(result.reduced, problem.base) == target


def cover_of(
    problem: DecisionProblem,
    H: frozenset[PartialString] | None = None,
    result: LogogramResult | None = None,
    **log_kwargs,
) -> list[tuple[PartialString, FiniteLanguage]]:
    """Pairs (g, relative cylinder of g) for g in the reduced logogram or a subset of it."""
    if result is None:
        result = log_rel(problem, **log_kwargs)
    if H is None:
        H = result.reduced
    elif not H <= result.reduced:
        raise ValueError("cover strings must belong to the reduced logogram")
    members = sorted(H, key=lambda g: (g.size, g.render()))
    return [(g, expand_in([g], problem.base)) for g in members]


# --- cache files ---

def problem_fingerprint(problem: DecisionProblem, positions: tuple[int, ...]) -> str:
    h = sha256()
    h.update(("alphabet=" + "".join(problem.alphabet.symbols)).encode())
    h.update(b"\x00base")
    for w in sorted(problem.base.words):
        h.update(b"\x00" + w.encode())
    h.update(b"\x00target")
    for w in sorted(problem.target.words):
        h.update(b"\x00" + w.encode())
    h.update(("\x00positions=" + ",".join(map(str, positions))).encode())
    return h.hexdigest()[:24]


def cache_file(cache_dir: str | Path, fingerprint: str) -> Path:
    return Path(cache_dir) / f"logogram-{fingerprint}.txt"


def save_logogram_cache(result: LogogramResult, problem: DecisionProblem, cache_dir: str | Path) -> Path:
    fingerprint = problem_fingerprint(problem, result.positions)
    header = {
        "schema": 1,
        "problem": fingerprint,
        "tool": __version__,
        "positions": list(result.positions),
        "restricted": result.restricted,
        "candidate_space_size": result.candidate_space_size,
        "full_count": result.full_count,
        "full_stored": result.full is not None,
    }
    lines = [json.dumps(header, sort_keys=True)]
    reduced_sorted = sorted(result.reduced, key=lambda g: (g.size, g.render()))
    lines.extend("R " + g.render() for g in reduced_sorted)
    if result.full is not None:
        extras = sorted(result.full - result.reduced, key=lambda g: (g.size, g.render()))
        lines.extend(". " + g.render() for g in extras)
    path = cache_file(cache_dir, fingerprint)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_logogram_cache(
    problem: DecisionProblem,
    cache_dir: str | Path,
    positions: tuple[int, ...],
) -> LogogramResult | None:
    """Reload a cached logogram; any mismatch or corruption returns None so the caller recomputes."""
    start = time.perf_counter()
    fingerprint = problem_fingerprint(problem, positions)
    path = cache_file(cache_dir, fingerprint)
    if not path.is_file():
        return None
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
        header = json.loads(lines[0])
        if header.get("schema") != 1 or header.get("problem") != fingerprint or header.get("tool") != __version__:
            return None
        if tuple(header.get("positions", ())) != positions:
            return None
        reduced: set[PartialString] = set()
        extras: set[PartialString] = set()
        for line in lines[1:]:
            if line.startswith("R "):
                reduced.add(PartialString.parse(problem.alphabet, line[2:]))
            elif line.startswith(". "):
                extras.add(PartialString.parse(problem.alphabet, line[2:]))
            elif line.strip():
                return None
        full = frozenset(reduced | extras) if header.get("full_stored") else None
        if header.get("full_stored") and len(full) != header.get("full_count"):
            return None
        return LogogramResult(
            full=full,
            reduced=frozenset(reduced),
            full_count=header.get("full_count", len(reduced)),
            candidate_space_size=header.get("candidate_space_size", 0),
            positions=positions,
            restricted=bool(header.get("restricted")),
            expansion=expand_in(reduced, problem.base),
            elapsed=time.perf_counter() - start,
        )
    except (ValueError, KeyError, IndexError, json.JSONDecodeError):
        return None
