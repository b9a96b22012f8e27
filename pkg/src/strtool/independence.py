"""Entanglement, witness classification, and independence properties.

All verifiers work on explicit finite problems.  A reduced-logogram string
is classified by how its relative cylinder sits inside the solution
regions: inside exactly one region it is a proper witness, inside two or
more an improper witness (pseudowizard), inside the target but no single
region a wizard.

Three problem-level properties are checked, each strictly stronger than
the last on finite problems:
  * internal: reduced-logogram strings are pairwise independent (their
    relative cylinders are incomparable);
  * strong: every string has a base word including it and no other
    reduced-logogram string;
  * complete: every pairwise-compatible subset has a base word including
    exactly that subset's join and nothing else from the reduced logogram
    beyond strings the join subsumes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .languages import BudgetExceeded, FiniteLanguage, expand_in
from .logogram import DecisionProblem, LogogramResult, ProblemIndex, log_rel
from .sat import SAT_ALPHABET, EchelonSpec
from .strings import PartialString, word_includes

PROPER_WITNESS = "ProperWitness"
IMPROPER_WITNESS = "ImproperWitness"
WIZARD = "Wizard"


class NotInReducedLogogram(ValueError):
    """The queried string is not a member of the problem's reduced logogram."""


def _check_occurs(g: PartialString, E: FiniteLanguage, name: str) -> None:
    if not any(word_includes(w, g) for w in E.words):
        raise ValueError(f"{name} {g.render()!r} does not occur in the base language")


def entangles(f: PartialString, g: PartialString, E: FiniteLanguage) -> bool:
    """True iff every E-word including f also includes g; both must occur in E."""
    _check_occurs(f, E, "f")
    _check_occurs(g, E, "g")
    return all(word_includes(w, g) for w in E.words if word_includes(w, f))


def pairwise_independent(f: PartialString, g: PartialString, E: FiniteLanguage) -> bool:
    """Neither string entangles the other relative to E."""
    return not entangles(f, g, E) and not entangles(g, f, E)


def entangles_sets(H, K, E: FiniteLanguage) -> bool:
    """True iff every E-word including some member of H includes some member of K.

    Vacuously true for empty H.  Every member of either set must occur in E.
    """
    H, K = frozenset(H), frozenset(K)
    for g in sorted(H | K, key=lambda s: (s.size, s.render())):
        _check_occurs(g, E, "member")
    exp_h = expand_in(H, E)
    exp_k = expand_in(K, E)
    return exp_h.issubset(exp_k)


@dataclass(frozen=True)
class StringVerdict:
    string: PartialString
    kind: str
    containing_regions: tuple[int, ...]  # 1-based region indices

    def to_json(self) -> dict:
        return {
            "string": self.string.render(),
            "kind": self.kind,
            "regions": list(self.containing_regions),
        }


@dataclass
class IndependenceVerdict:
    property: str
    holds: bool
    subsets_checked: int
    partial: bool = False
    counterexample: dict | None = None

    def to_json(self) -> dict:
        out = {
            "property": self.property,
            "holds": self.holds,
            "partial": self.partial,
            "subsets_checked": self.subsets_checked,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


class _MemberIndex:
    """Inclusion masks for a fixed antichain of strings: which members each word includes."""

    def __init__(self, members):
        self.members = sorted(members, key=lambda g: (g.size, g.render()))
        self.all_mask = (1 << len(self.members)) - 1
        positions = sorted({p for g in self.members for p in g.domain})
        self.rows: list[tuple[int, int, dict[str, int]]] = []
        for p in positions:
            undef = 0
            codes: dict[str, int] = {}
            for i, g in enumerate(self.members):
                sym = g.get(p)
                if sym is None:
                    undef |= 1 << i
                else:
                    codes[sym] = codes.get(sym, 0) | (1 << i)
            self.rows.append((p, undef, codes))

    def included_mask(self, word: str) -> int:
        acc = self.all_mask
        n = len(word)
        for p, undef, codes in self.rows:
            sym_mask = codes.get(word[p - 1], 0) if p <= n else 0
            acc &= undef | sym_mask
            if not acc:
                return 0
        return acc


def _reduced(problem: DecisionProblem, result: LogogramResult | None, index: ProblemIndex | None, **log_kwargs):
    idx = index if index is not None else ProblemIndex(problem.base)
    res = result if result is not None else log_rel(problem, index=idx, **log_kwargs)
    return idx, res


def classify_all(
    problem: DecisionProblem,
    result: LogogramResult | None = None,
    index: ProblemIndex | None = None,
    **log_kwargs,
) -> list[StringVerdict]:
    """Classify every reduced-logogram string against the solution regions."""
    if problem.regions is None:
        raise ValueError("problem has no solution regions")
    idx, res = _reduced(problem, result, index, **log_kwargs)
    region_masks = [idx.word_mask(r.words) for r in problem.regions]
    target_mask = idx.word_mask(problem.target.words)
    verdicts = []
    for g in sorted(res.reduced, key=lambda s: (s.size, s.render())):
        cyl = idx.cylinder_mask(g)
        containing = tuple(i + 1 for i, rm in enumerate(region_masks) if not (cyl & ~rm))
        if len(containing) == 1:
            kind = PROPER_WITNESS
        elif containing:
            kind = IMPROPER_WITNESS
        else:
            if cyl & ~target_mask:
                raise ValueError(
                    f"cylinder of {g.render()!r} leaves the target; regions cannot classify it"
                )
            kind = WIZARD
        verdicts.append(StringVerdict(g, kind, containing))
    return verdicts


def classify(
    g: PartialString,
    problem: DecisionProblem,
    result: LogogramResult | None = None,
    index: ProblemIndex | None = None,
    **log_kwargs,
) -> StringVerdict:
    """Classify one string; it must belong to the problem's reduced logogram."""
    idx, res = _reduced(problem, result, index, **log_kwargs)
    if g not in res.reduced:
        raise NotInReducedLogogram(f"{g.render()!r} is not in the reduced logogram")
    for verdict in classify_all(problem, res, idx):
        if verdict.string == g:
            return verdict
    raise AssertionError("unreachable: member not classified")


def internal_independence(
    problem: DecisionProblem,
    result: LogogramResult | None = None,
    index: ProblemIndex | None = None,
    **log_kwargs,
) -> IndependenceVerdict:
    """Pairwise cylinder incomparability across the reduced logogram."""
    idx, res = _reduced(problem, result, index, **log_kwargs)
    members = sorted(res.reduced, key=lambda g: (g.size, g.render()))
    cyls = [idx.cylinder_mask(g) for g in members]
    checked = 0
    for i, j in itertools.combinations(range(len(members)), 2):
        checked += 1
        fwd = not (cyls[i] & ~cyls[j])
        bwd = not (cyls[j] & ~cyls[i])
        if fwd or bwd:
            return IndependenceVerdict(
                property="Internal",
                holds=False,
                subsets_checked=checked,
                counterexample={
                    "strings": [members[i].render(), members[j].render()],
                    "reason": "relative cylinders are comparable",
                },
            )
    return IndependenceVerdict(property="Internal", holds=True, subsets_checked=checked)


def strong_independence(
    problem: DecisionProblem,
    result: LogogramResult | None = None,
    index: ProblemIndex | None = None,
    **log_kwargs,
) -> IndependenceVerdict:
    """Every reduced-logogram string has a base word including it and nothing else from the set."""
    idx, res = _reduced(problem, result, index, **log_kwargs)
    midx = _MemberIndex(res.reduced)
    singles = set()
    for w in idx.words:
        mask = midx.included_mask(w)
        if mask and not (mask & (mask - 1)):
            singles.add(mask)
    for i, g in enumerate(midx.members):
        if (1 << i) not in singles:
            return IndependenceVerdict(
                property="Strong",
                holds=False,
                subsets_checked=i + 1,
                counterexample={
                    "strings": [g.render()],
                    "reason": "no base word includes this string alone",
                },
            )
    return IndependenceVerdict(property="Strong", holds=True, subsets_checked=len(midx.members))


def construct_separator(fs, spec: EchelonSpec) -> str:
    """Encoded word whose body carries exactly the prescriptions of the given strings.

    The body holds a string's code wherever some member prescribes one and
    '0' elsewhere, so the word includes each member; the caller checks that
    nothing unsubsumed rides along.  Raises on incompatible members or
    entries outside the echelon's clause blocks.
    """
    members = list(fs)
    body = ["0"] * (spec.n * spec.m)
    start = spec.n + spec.m + 2
    seen: dict[int, str] = {}
    for g in members:
        if g.alphabet != SAT_ALPHABET:
            raise ValueError("separator strings must use the CNF-code alphabet")
        for pos, sym in g.entries:
            if not (start < pos <= start + spec.n * spec.m):
                raise ValueError(f"position {pos} of {g.render()!r} is outside echelon ({spec.n},{spec.m})")
            if seen.setdefault(pos, sym) != sym:
                raise ValueError(f"incompatible prescriptions at position {pos}")
            body[pos - start - 1] = sym
    word = spec.prefix + "".join(body)
    for g in members:
        if not word_includes(word, g):
            raise AssertionError("separator fails to include an input string")
    return word


def _join_entries(members) -> dict[int, str]:
    joined: dict[int, str] = {}
    for g in members:
        for pos, sym in g.entries:
            if joined.setdefault(pos, sym) != sym:
                raise ValueError("members are not pairwise compatible")
    return joined


def _below(g: PartialString, joined: dict[int, str]) -> bool:
    return all(joined.get(p) == s for p, s in g.entries)


def complete_independence(
    problem: DecisionProblem,
    max_subset: int = 4,
    result: LogogramResult | None = None,
    index: ProblemIndex | None = None,
    echelon: EchelonSpec | None = None,
    subset_budget: int = 10 ** 6,
    **log_kwargs,
) -> IndependenceVerdict:
    """Separating words for pairwise-compatible subsets of the reduced logogram.

    All subset sizes are checked when the number of pairwise-compatible
    subsets fits the budget; otherwise sizes are capped at max_subset and
    the verdict is marked partial.  For echelon problems the canonical
    separator word is tried first, then the base words of the join's
    cylinder are searched.
    """
    if max_subset < 2:
        raise ValueError("max_subset must be at least 2")
    idx, res = _reduced(problem, result, index, **log_kwargs)
    midx = _MemberIndex(res.reduced)
    members = midx.members
    count = len(members)
    neighbors = [0] * count
    for i, j in itertools.combinations(range(count), 2):
        if members[i].compatible(members[j]):
            neighbors[i] |= 1 << j
            neighbors[j] |= 1 << i

    def clique_count(cap: int | None) -> int:
        total = 0
        stack = [(i, neighbors[i] >> (i + 1) << (i + 1), 1) for i in range(count)]
        while stack:
            _, allowed, size = stack.pop()
            total += 1
            if total > subset_budget:
                return total
            if cap is not None and size >= cap:
                continue
            rest = allowed
            while rest:
                low = rest & -rest
                j = low.bit_length() - 1
                rest ^= low
                stack.append((j, allowed & neighbors[j] >> (j + 1) << (j + 1), size + 1))
        return total

    partial = clique_count(None) > subset_budget
    cap = max_subset if partial else None

    word_masks = [midx.included_mask(w) for w in idx.words]
    checked = 0
    worst: tuple | None = None

    def separated(subset: list[int]) -> bool:
        chosen = [members[i] for i in subset]
        joined = _join_entries(chosen)
        need = 0
        for i in subset:
            need |= 1 << i

        def word_ok(mask: int) -> bool:
            if mask & need != need:
                return False
            extra = mask & ~need
            while extra:
                low = extra & -extra
                extra ^= low
                if not _below(members[low.bit_length() - 1], joined):
                    return False
            return True

        if echelon is not None:
            word = construct_separator(chosen, echelon)
            if word in idx.bit and word_ok(midx.included_mask(word)):
                return True
        g = PartialString.of(problem.alphabet, joined)
        cyl = idx.cylinder_mask(g)
        for wi, w in enumerate(idx.words):
            if (idx.bit[w] & cyl) and word_ok(word_masks[wi]):
                return True
        return False

    stack = [([i], neighbors[i] >> (i + 1) << (i + 1)) for i in range(count - 1, -1, -1)]
    while stack:
        subset, allowed = stack.pop()
        checked += 1
        if not separated(subset):
            key = (len(subset), tuple(members[i].render() for i in subset))
            if worst is None or key < worst:
                worst = key
        if cap is None or len(subset) < cap:
            rest = allowed
            picks = []
            while rest:
                low = rest & -rest
                j = low.bit_length() - 1
                rest ^= low
                picks.append(j)
            for j in reversed(picks):
                stack.append((subset + [j], allowed & neighbors[j] >> (j + 1) << (j + 1)))

    verdict = IndependenceVerdict(
        property="Complete",
        holds=worst is None,
        subsets_checked=checked,
        partial=partial,
    )
    if worst is not None:
        verdict.counterexample = {
            "strings": list(worst[1]),
            "reason": "no base word includes exactly this compatible subset",
        }
    return verdict


def completeness_of_subset(
    H,
    problem: DecisionProblem,
    result: LogogramResult | None = None,
    **log_kwargs,
) -> bool:
    """True iff the expansion of H inside the base equals the target."""
    H = frozenset(H)
    if result is None:
        result = log_rel(problem, **log_kwargs)
    if not H <= result.reduced:
        raise ValueError("subset must lie inside the reduced logogram")
    return expand_in(H, problem.base) == problem.target


def irreducible(
    problem: DecisionProblem,
    result: LogogramResult | None = None,
    index: ProblemIndex | None = None,
    **log_kwargs,
) -> bool:
    """True iff removing any one reduced-logogram string breaks completeness."""
    idx, res = _reduced(problem, result, index, **log_kwargs)
    members = sorted(res.reduced, key=lambda g: (g.size, g.render()))
    if not members:
        return len(problem.target.words) == 0
    cyls = [idx.cylinder_mask(g) for g in members]
    target_mask = idx.target_mask(problem.target)
    prefix = [0] * (len(members) + 1)
    for i, c in enumerate(cyls):
        prefix[i + 1] = prefix[i] | c
    suffix = [0] * (len(members) + 1)
    for i in range(len(members) - 1, -1, -1):
        suffix[i] = suffix[i + 1] | cyls[i]
    return all(prefix[i] | suffix[i + 1] != target_mask for i in range(len(members)))


@dataclass(frozen=True)
class WizardFinding:
    string: str
    witnesses: int
    union_holds: bool
    proper: bool
    witness_inside_wizard: bool

    def to_json(self) -> dict:
        return {
            "string": self.string,
            "witnesses": self.witnesses,
            "union_holds": self.union_holds,
            "proper": self.proper,
            "witness_inside_wizard": self.witness_inside_wizard,
        }


@dataclass
class WizardCoverReport:
    holds: bool
    wizard_count: int
    findings: list[WizardFinding] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "wizard_count": self.wizard_count,
            "findings": [f.to_json() for f in self.findings],
        }


def wizard_cover_report(
    problem: DecisionProblem,
    result: LogogramResult | None = None,
    index: ProblemIndex | None = None,
    **log_kwargs,
) -> WizardCoverReport:
    """For each wizard, check its cylinder against the union of intersecting witness cylinders.

    Witnesses are drawn from the union of the region reduced logograms.
    Records whether the union inclusion is proper and whether any witness
    cylinder sits inside the wizard's cylinder.
    """
    if problem.regions is None:
        raise ValueError("problem has no solution regions")
    idx, res = _reduced(problem, result, index, **log_kwargs)
    verdicts = classify_all(problem, res, idx)
    wizards = [v.string for v in verdicts if v.kind == WIZARD]
    report = WizardCoverReport(holds=True, wizard_count=len(wizards))
    if not wizards:
        return report
    witness_pool: set[PartialString] = set()
    for region in problem.regions:
        sub = DecisionProblem(base=problem.base, target=region)
        witness_pool |= log_rel(sub, index=idx, **log_kwargs).reduced
    pool = sorted(witness_pool, key=lambda g: (g.size, g.render()))
    pool_cyls = [idx.cylinder_mask(g) for g in pool]
    for g in sorted(wizards, key=lambda s: (s.size, s.render())):
        cyl = idx.cylinder_mask(g)
        assoc = [c for c in pool_cyls if c & cyl]
        union = 0
        for c in assoc:
            union |= c
        union_holds = not (cyl & ~union)
        finding = WizardFinding(
            string=g.render(),
            witnesses=len(assoc),
            union_holds=union_holds,
            proper=union_holds and union != cyl,
            witness_inside_wizard=any(not (c & ~cyl) for c in assoc),
        )
        report.findings.append(finding)
        report.holds = report.holds and union_holds
    return report


@dataclass
class ShapeFinding:
    string: str
    problems: tuple[str, ...]


@dataclass
class ShapeReport:
    holds: bool
    members: int
    findings: list[ShapeFinding] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "members": self.members,
            "findings": [{"string": f.string, "problems": list(f.problems)} for f in self.findings],
        }


def sat_shape_report(spec: EchelonSpec, result: LogogramResult) -> ShapeReport:
    """Check the expected shape of echelon reduced-logogram strings.

    Expected: entries only on clause-block positions, codes drawn from
    {1,2}, exactly one code per clause, and no variable prescribed in both
    signs across clauses.  Violations become findings, not errors.
    """
    start = spec.n + spec.m + 2
    report = ShapeReport(holds=True, members=len(result.reduced))
    for g in sorted(result.reduced, key=lambda s: (s.size, s.render())):
        problems: list[str] = []
        per_clause: dict[int, int] = {}
        signs: dict[int, str] = {}
        for pos, sym in g.entries:
            if not (start < pos <= start + spec.n * spec.m):
                problems.append(f"entry at position {pos} outside the clause blocks")
                continue
            offset = pos - start - 1
            clause, var = offset // spec.n + 1, offset % spec.n + 1
            per_clause[clause] = per_clause.get(clause, 0) + 1
            if sym not in ("1", "2"):
                problems.append(f"code {sym!r} at clause {clause}, variable {var}")
            elif signs.setdefault(var, sym) != sym:
                problems.append(f"variable {var} prescribed in both signs")
        for clause in range(1, spec.m + 1):
            if per_clause.get(clause, 0) != 1:
                problems.append(f"clause {clause} has {per_clause.get(clause, 0)} prescriptions")
        if problems:
            report.holds = False
            report.findings.append(ShapeFinding(g.render(), tuple(problems)))
    return report


@dataclass(frozen=True)
class EventFamily:
    universe: FiniteLanguage
    events: tuple[FiniteLanguage, ...]

    def __post_init__(self) -> None:
        for E in self.events:
            if not E.issubset(self.universe):
                raise ValueError("every event must be a subset of the universe")


def atomic_constituents(family: EventFamily, bit_budget: int = 16) -> list[FiniteLanguage]:
    """Nonvoid signed intersections of the events, one per realized sign pattern.

    Pattern k assigns event j positively iff bit j of k is set; output is
    ordered by pattern index.
    """
    m = len(family.events)
    if m > bit_budget:
        raise BudgetExceeded("too many events for constituent enumeration", 2 ** m, 2 ** bit_budget)
    buckets: dict[int, set[str]] = {}
    for w in family.universe.words:
        pattern = 0
        for j, E in enumerate(family.events):
            if w in E:
                pattern |= 1 << j
        buckets.setdefault(pattern, set()).add(w)
    return [
        FiniteLanguage.of(family.universe.alphabet, buckets[k])
        for k in sorted(buckets)
    ]


def completely_independent_events(family: EventFamily, bit_budget: int = 16) -> bool:
    """True iff the events realize all 2**m sign patterns."""
    return len(atomic_constituents(family, bit_budget)) == 2 ** len(family.events)


@dataclass(frozen=True)
class RegionRow:
    index: int  # compares regions 1..index against region index+1
    disjoint: bool
    disjoint_unfiltered: bool
    low_entangles_high: bool
    high_entangles_low: bool
    vacuous: bool
    low_size: int
    high_size: int

    def to_json(self) -> dict:
        return {
            "i": self.index,
            "disjoint": self.disjoint,
            "disjoint_unfiltered": self.disjoint_unfiltered,
            "low_entangles_high": self.low_entangles_high,
            "high_entangles_low": self.high_entangles_low,
            "vacuous": self.vacuous,
            "low_size": self.low_size,
            "high_size": self.high_size,
        }


@dataclass
class RegionRelationsReport:
    ignore_bewitched: bool
    holds: bool
    rows: list[RegionRow] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ignore_bewitched": self.ignore_bewitched,
            "holds": self.holds,
            "rows": [r.to_json() for r in self.rows],
        }


def region_relations(
    problem: DecisionProblem,
    ignore_bewitched: bool,
    index: ProblemIndex | None = None,
    **log_kwargs,
) -> RegionRelationsReport:
    """Disjointness and two-way non-entanglement of successive region logograms.

    For each i, the union of the first i region reduced logograms is
    compared with region i+1's.  With ignore_bewitched, strings whose
    cylinders sit in two or more regions (improper witnesses) are removed
    from both sides before the checks; rows where a side then comes out
    empty are flagged vacuous and carry no entanglement either way, since
    set entanglement presupposes occupied sides.  Unfiltered disjointness
    is always recorded alongside.
    """
    if problem.regions is None:
        raise ValueError("problem has no solution regions")
    idx = index if index is not None else ProblemIndex(problem.base)
    region_masks = [idx.word_mask(r.words) for r in problem.regions]

    raw_logograms: list[frozenset[PartialString]] = []
    for region in problem.regions:
        sub = DecisionProblem(base=problem.base, target=region)
        raw_logograms.append(log_rel(sub, index=idx, **log_kwargs).reduced)

    def proper_only(members) -> frozenset[PartialString]:
        kept = []
        for g in members:
            cyl = idx.cylinder_mask(g)
            containing = sum(1 for rm in region_masks if not (cyl & ~rm))
            if containing < 2:
                kept.append(g)
        return frozenset(kept)

    filtered = [proper_only(H) if ignore_bewitched else H for H in raw_logograms]

    def expansion_mask(members) -> int:
        mask = 0
        for g in members:
            mask |= idx.cylinder_mask(g)
        return mask

    report = RegionRelationsReport(ignore_bewitched=ignore_bewitched, holds=True)
    low: frozenset[PartialString] = frozenset()
    low_raw: frozenset[PartialString] = frozenset()
    for i in range(1, len(problem.regions)):
        low = low | filtered[i - 1]
        low_raw = low_raw | raw_logograms[i - 1]
        high = filtered[i]
        disjoint = not (low & high)
        disjoint_unfiltered = not (low_raw & raw_logograms[i])
        vacuous = not low or not high
        if vacuous:
            fwd = bwd = False
        else:
            exp_low, exp_high = expansion_mask(low), expansion_mask(high)
            fwd = not (exp_low & ~exp_high)
            bwd = not (exp_high & ~exp_low)
        row = RegionRow(
            index=i,
            disjoint=disjoint,
            disjoint_unfiltered=disjoint_unfiltered,
            low_entangles_high=fwd,
            high_entangles_low=bwd,
            vacuous=vacuous,
            low_size=len(low),
            high_size=len(high),
        )
        report.rows.append(row)
        report.holds = report.holds and disjoint and not fwd and not bwd
    return report
