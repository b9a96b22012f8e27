"""Command-line front end: logogram computation, verification suites, classification.

Commands:
  strtool logogram  --n N --m M [--reduced] | --base-file E --target-file F
  strtool verify    --suite {closure,logogram,sat,wizards,regions,events,all}
  strtool classify  --n N --m M --string S | --formula "1,3,-4;2,-3" --n 4

Exit codes: 0 pass, 1 verification failure, 2 usage or budget error.

Reports are byte-stable for a fixed config, seed and tool version: JSON
output carries no timings (wall-clock lines go to stderr) and every
collection is emitted in sorted order.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .languages import (
    BINARY,
    BudgetExceeded,
    FiniteLanguage,
    TERNARY,
    check_expansion_laws,
    expand_in,
    load_language,
    random_language,
    random_string_set,
    sigma_exact,
    sigma_upto,
)
from .logogram import (
    DEFAULT_CANDIDATE_BUDGET,
    DecisionProblem,
    ProblemIndex,
    auto_positions,
    load_logogram_cache,
    log_rel,
    log_rel_naive,
    logexp_closure_check,
    problem_fingerprint,
    save_logogram_cache,
    verify_logogram_expansion,
)
from .independence import (
    EventFamily,
    NotInReducedLogogram,
    WIZARD,
    atomic_constituents,
    classify,
    classify_all,
    complete_independence,
    completely_independent_events,
    internal_independence,
    irreducible,
    region_relations,
    sat_shape_report,
    strong_independence,
    wizard_cover_report,
)
from .sat import (
    EchelonSpec,
    consistent_selection_count,
    effective_size,
    enumerate_echelon,
    is_bewitched,
    occurrence_size,
    parse_formula,
)
from .strings import PartialString

TOOL_NAME = "strtool"
SUITES = ("closure", "logogram", "sat", "wizards", "regions", "events", "all")


@dataclass
class CheckResult:
    name: str
    holds: bool
    partial: bool = False
    counts: dict = field(default_factory=dict)
    counterexample: object = None
    details: object = None
    elapsed: float = 0.0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "holds": self.holds,
            "partial": self.partial,
            "counts": self.counts,
            "counterexample": self.counterexample,
            "details": self.details,
        }


@dataclass
class VerificationReport:
    config: dict
    checks: list[CheckResult] = field(default_factory=list)
    result: dict | None = None  # single-result commands (logogram, classify)

    @property
    def passed(self) -> bool:
        return all(c.holds and not c.partial for c in self.checks)

    def to_json(self) -> dict:
        out = {
            "schema": 1,
            "tool": {"name": TOOL_NAME, "version": __version__},
            "config": self.config,
            "checks": [c.to_json() for c in self.checks],
            "pass": self.passed,
        }
        if self.result is not None:
            out["result"] = self.result
        return out

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.holds and not c.partial else ("PARTIAL" if c.holds else "FAIL")
            counts = ", ".join(f"{k}: {v}" for k, v in sorted(c.counts.items()))
            lines.append(f"{status} {c.name}" + (f" ({counts})" if counts else ""))
            if c.counterexample is not None:
                lines.append(f"  counterexample: {json.dumps(c.counterexample, sort_keys=True)}")
        if self.result is not None:
            for k, v in sorted(self.result.items()):
                if isinstance(v, list):
                    lines.append(f"{k}:")
                    lines.extend(f"  {item}" for item in v)
                else:
                    lines.append(f"{k}: {v}")
        if self.checks:
            lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def timed(checks: list[CheckResult], check: CheckResult, started: float) -> None:
    check.elapsed = time.perf_counter() - started
    checks.append(check)


# --- shared fixtures ---

def toy_wizard_problem() -> DecisionProblem:
    """Four binary words of length two; the target misses "00" and splits into singleton regions."""
    E = sigma_exact(BINARY, 2)
    targets = ["01", "10", "11"]
    return DecisionProblem(
        base=E,
        target=FiniteLanguage.of(BINARY, targets),
        regions=tuple(FiniteLanguage.of(BINARY, [w]) for w in targets),
    )


def random_problem(rng: random.Random, alphabet, max_len: int, max_words: int = 16) -> DecisionProblem:
    while True:
        E = random_language(rng, alphabet, max_len, max_words)
        if E.words:
            break
    F = FiniteLanguage.of(alphabet, (w for w in sorted(E.words) if rng.random() < 0.5))
    return DecisionProblem(base=E, target=F)


def constituents_by_intersection(family: EventFamily) -> list[FiniteLanguage]:
    """Reference constituent construction: intersect every signed combination explicitly."""
    out = []
    m = len(family.events)
    for k in range(2 ** m):
        current = family.universe
        for j, E in enumerate(family.events):
            current = current.intersection(E) if (k >> j) & 1 else current.difference(E)
        if current.words:
            out.append(current)
    return out


# --- suites ---

def suite_closure(samples: int, seed: int) -> list[CheckResult]:
    checks: list[CheckResult] = []
    start = time.perf_counter()
    law = check_expansion_laws(samples, seed)
    timed(checks, CheckResult(
        name="closure-laws",
        holds=law.holds,
        counts={"samples": law.samples, "seed": law.seed, **law.checks},
        counterexample=law.failures[0] if law.failures else None,
    ), start)

    start = time.perf_counter()
    rng = random.Random(seed + 1)
    universe = sigma_upto(BINARY, 2)
    rounds = max(20, min(100, samples // 10))
    ok = True
    for _ in range(rounds):
        H = random_string_set(rng, BINARY, 2)
        rep = logexp_closure_check(H, universe)
        ok = ok and rep.holds
    known = logexp_closure_check(
        frozenset({PartialString.parse(BINARY, "0")}),
        universe,
        partner=frozenset({PartialString.parse(BINARY, "1")}),
    )
    ok = ok and known.holds
    timed(checks, CheckResult(
        name="logexp-closure",
        holds=ok and bool(known.union_strict),
        counts={"string_sets": rounds + 1, "union_strict_found": int(bool(known.union_strict))},
        details={"collective_sample": known.collective_sample},
    ), start)
    return checks


def _oracle_agrees(problem: DecisionProblem, naive_budget: int) -> bool:
    naive_full, naive_reduced = log_rel_naive(problem, budget=naive_budget)
    plain = log_rel(problem, restrict="never", keep_full=True)
    if plain.full != naive_full or plain.reduced != naive_reduced:
        return False
    auto = log_rel(problem, restrict="auto", keep_full=True)
    if auto.reduced != naive_reduced:
        return False
    return expand_in(auto.reduced, problem.base) == expand_in(naive_reduced, problem.base)


def suite_logogram(samples: int, seed: int) -> list[CheckResult]:
    checks: list[CheckResult] = []
    rng = random.Random(seed)
    alphabets = (BINARY, TERNARY)

    start = time.perf_counter()
    mismatches = 0
    problems = 0
    for i in range(samples):
        problem = random_problem(rng, alphabets[i % 2], max_len=rng.randint(2, 5))
        problems += 1
        if not _oracle_agrees(problem, naive_budget=4 ** 9):
            mismatches += 1
    for n, m in ((1, 1), (2, 1), (1, 2)):
        problem = enumerate_echelon(EchelonSpec(n, m))
        problems += 1
        if not _oracle_agrees(problem, naive_budget=4 ** 9):
            mismatches += 1
    timed(checks, CheckResult(
        name="logogram-oracle",
        holds=mismatches == 0,
        counts={"problems": problems, "mismatches": mismatches, "seed": seed},
    ), start)

    start = time.perf_counter()
    failures = 0
    for i in range(samples):
        problem = random_problem(rng, alphabets[i % 2], max_len=rng.randint(2, 5))
        if not verify_logogram_expansion(problem):
            failures += 1
    for n, m in ((1, 1), (2, 1), (1, 2), (2, 2)):
        if not verify_logogram_expansion(enumerate_echelon(EchelonSpec(n, m))):
            failures += 1
    timed(checks, CheckResult(
        name="expansion-identity",
        holds=failures == 0,
        counts={"problems": samples + 4, "failures": failures, "seed": seed},
    ), start)
    return checks


def suite_sat(n: int, m: int, max_subset: int, budget: int, workers: int = 1) -> list[CheckResult]:
    checks: list[CheckResult] = []
    spec = EchelonSpec(n, m)
    problem = enumerate_echelon(spec)
    index = ProblemIndex(problem.base)
    result = log_rel(problem, index=index, budget=budget, workers=workers)

    start = time.perf_counter()
    oracle = consistent_selection_count(n, m)
    timed(checks, CheckResult(
        name="sat-count-oracle",
        holds=len(result.reduced) == oracle,
        counts={"reduced": len(result.reduced), "oracle": oracle},
    ), start)

    start = time.perf_counter()
    shape = sat_shape_report(spec, result)
    timed(checks, CheckResult(
        name="sat-shape",
        holds=shape.holds,
        counts={"members": shape.members, "findings": len(shape.findings)},
        details=shape.to_json()["findings"] or None,
    ), start)

    start = time.perf_counter()
    verdicts = classify_all(problem, result, index)
    wizard_count = sum(1 for v in verdicts if v.kind == WIZARD)
    timed(checks, CheckResult(
        name="sat-no-wizards",
        holds=wizard_count == 0,
        counts={
            "wizards": wizard_count,
            "proper": sum(1 for v in verdicts if v.kind == "ProperWitness"),
            "improper": sum(1 for v in verdicts if v.kind == "ImproperWitness"),
        },
        details={"per_string": [v.to_json() for v in verdicts]},
    ), start)

    start = time.perf_counter()
    inner = internal_independence(problem, result, index)
    timed(checks, CheckResult(
        name="sat-internal",
        holds=inner.holds,
        counts={"pairs": inner.subsets_checked},
        counterexample=inner.counterexample,
    ), start)

    start = time.perf_counter()
    strong = strong_independence(problem, result, index)
    timed(checks, CheckResult(
        name="sat-strong",
        holds=strong.holds,
        counts={"members": strong.subsets_checked},
        counterexample=strong.counterexample,
    ), start)

    start = time.perf_counter()
    timed(checks, CheckResult(
        name="independence-implication",
        holds=(not strong.holds) or inner.holds,
        counts={"strong": int(strong.holds), "internal": int(inner.holds)},
    ), start)

    start = time.perf_counter()
    complete = complete_independence(problem, max_subset, result, index, echelon=spec)
    timed(checks, CheckResult(
        name="sat-complete",
        holds=complete.holds,
        partial=complete.partial,
        counts={"subsets": complete.subsets_checked, "max_subset": max_subset},
        counterexample=complete.counterexample,
    ), start)

    start = time.perf_counter()
    timed(checks, CheckResult(
        name="sat-irreducible",
        holds=irreducible(problem, result, index),
        counts={"members": len(result.reduced)},
    ), start)

    start = time.perf_counter()
    timed(checks, CheckResult(
        name="sat-expansion-identity",
        holds=verify_logogram_expansion(problem, result, index),
        counts={"base": len(problem.base), "target": len(problem.target)},
    ), start)
    return checks


def suite_wizards(n: int, m: int, budget: int) -> list[CheckResult]:
    checks: list[CheckResult] = []
    start = time.perf_counter()
    toy = wizard_cover_report(toy_wizard_problem())
    timed(checks, CheckResult(
        name="wizard-cover-toy",
        holds=toy.holds,
        counts={
            "wizards": toy.wizard_count,
            "proper_inclusions": sum(1 for f in toy.findings if f.proper),
        },
        details=toy.to_json()["findings"],
    ), start)

    start = time.perf_counter()
    problem = enumerate_echelon(EchelonSpec(n, m))
    echelon_report = wizard_cover_report(problem, budget=budget)
    timed(checks, CheckResult(
        name="wizard-cover-echelon",
        holds=echelon_report.holds,
        counts={"n": n, "m": m, "wizards": echelon_report.wizard_count},
    ), start)
    return checks


def suite_regions(n: int, m: int, ignore_bewitched: bool, budget: int) -> list[CheckResult]:
    checks: list[CheckResult] = []
    start = time.perf_counter()
    problem = enumerate_echelon(EchelonSpec(n, m))
    report = region_relations(problem, ignore_bewitched, budget=budget)
    timed(checks, CheckResult(
        name="region-relations",
        holds=report.holds,
        counts={
            "n": n,
            "m": m,
            "rows": len(report.rows),
            "vacuous": sum(1 for r in report.rows if r.vacuous),
            "ignore_bewitched": int(ignore_bewitched),
        },
        details=report.to_json()["rows"],
    ), start)
    return checks


def suite_events(samples: int, seed: int) -> list[CheckResult]:
    checks: list[CheckResult] = []
    universe = sigma_exact(BINARY, 2)

    start = time.perf_counter()
    one = EventFamily(universe, (FiniteLanguage.of(BINARY, ["00"]),))
    disjoint = EventFamily(universe, (FiniteLanguage.of(BINARY, ["00"]), FiniteLanguage.of(BINARY, ["01"])))
    venn = EventFamily(universe, (FiniteLanguage.of(BINARY, ["00", "01"]), FiniteLanguage.of(BINARY, ["01", "10"])))
    twin = EventFamily(universe, (FiniteLanguage.of(BINARY, ["00"]), FiniteLanguage.of(BINARY, ["00"])))
    examples_ok = (
        completely_independent_events(one)
        and not completely_independent_events(disjoint)
        and completely_independent_events(venn)
        and len(atomic_constituents(venn)) == 4
        and len(atomic_constituents(twin)) == 2
    )
    timed(checks, CheckResult(
        name="events-examples",
        holds=examples_ok,
        counts={"families": 4},
    ), start)

    start = time.perf_counter()
    rng = random.Random(seed)
    mismatches = 0
    rounds = max(10, min(100, samples))
    for _ in range(rounds):
        base = random_language(rng, BINARY, 3, max_words=10)
        if not base.words:
            continue
        events = tuple(
            FiniteLanguage.of(BINARY, (w for w in sorted(base.words) if rng.random() < 0.5))
            for _ in range(rng.randint(1, 3))
        )
        family = EventFamily(base, events)
        fast = atomic_constituents(family)
        slow = constituents_by_intersection(family)
        if {frozenset(c.words) for c in fast} != {frozenset(c.words) for c in slow}:
            mismatches += 1
    timed(checks, CheckResult(
        name="events-constituents",
        holds=mismatches == 0,
        counts={"families": rounds, "mismatches": mismatches, "seed": seed},
    ), start)
    return checks


def run_suite(cfg: dict) -> VerificationReport:
    suite = cfg["suite"]
    checks: list[CheckResult] = []
    if suite in ("closure", "all"):
        checks.extend(suite_closure(cfg["samples"], cfg["seed"]))
    if suite in ("logogram", "all"):
        checks.extend(suite_logogram(max(10, cfg["samples"] // 4), cfg["seed"]))
    if suite in ("sat", "all"):
        checks.extend(suite_sat(cfg["n"], cfg["m"], cfg["max_subset"], cfg["budget"], cfg["threads"]))
    if suite in ("wizards", "all"):
        checks.extend(suite_wizards(cfg["n"], cfg["m"], cfg["budget"]))
    if suite in ("regions", "all"):
        ignore = True if suite == "all" else cfg["ignore_bewitched"]
        checks.extend(suite_regions(cfg["n"], cfg["m"], ignore, cfg["budget"]))
    if suite in ("events", "all"):
        checks.extend(suite_events(cfg["samples"], cfg["seed"]))
    return VerificationReport(config=cfg, checks=checks)


# --- commands ---

def default_cache_dir() -> Path:
    env = os.environ.get("STRTOOL_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / TOOL_NAME


def _load_problem_files(base_file: str, target_file: str, region_files: list[str]) -> DecisionProblem:
    base = load_language(base_file)
    target = load_language(target_file)
    regions = tuple(load_language(f) for f in region_files) or None
    return DecisionProblem(base=base, target=target, regions=regions)


def cmd_logogram(args: argparse.Namespace) -> tuple[VerificationReport, int]:
    workers = args.threads
    if args.n is not None and args.m is not None:
        spec = EchelonSpec(args.n, args.m)
        space = 4 ** (args.n * args.m)
        if space > args.budget:
            raise BudgetExceeded(f"echelon ({args.n},{args.m}) candidates", space, args.budget)
        problem = enumerate_echelon(spec, budget=args.word_budget)
        positions = spec.body_positions
    elif args.base_file and args.target_file:
        problem = _load_problem_files(args.base_file, args.target_file, args.region_file)
        positions = auto_positions(ProblemIndex(problem.base))
    else:
        raise ValueError("need either --n/--m or --base-file/--target-file")

    cached = False
    result = None
    if not args.no_cache:
        result = load_logogram_cache(problem, args.cache_dir, positions)
        cached = result is not None
    if result is None:
        result = log_rel(
            problem,
            candidate_positions=positions,
            budget=args.budget,
            keep_full=False if args.reduced else None,
            workers=workers,
        )
        if not args.no_cache:
            save_logogram_cache(result, problem, args.cache_dir)

    payload = {
        "fingerprint": problem_fingerprint(problem, positions),
        "candidate_space_size": result.candidate_space_size,
        "full_count": result.full_count,
        "reduced_count": len(result.reduced),
        "restricted": result.restricted,
        "cached": cached,
    }
    if args.reduced:
        payload["reduced"] = [g.render() for g in result.sorted_reduced()]
    report = VerificationReport(config=_config_echo(args), result=payload)
    return report, 0


def cmd_verify(args: argparse.Namespace) -> tuple[VerificationReport, int]:
    cfg = _config_echo(args)
    report = run_suite(cfg)
    return report, 0 if report.passed else 1


def cmd_classify(args: argparse.Namespace) -> tuple[VerificationReport, int]:
    cfg = _config_echo(args)
    if args.formula is not None:
        if args.n is None:
            raise ValueError("--formula requires --n")
        inst = parse_formula(args.formula, args.n)
        payload = {
            "n": inst.n,
            "m": inst.m,
            "size": occurrence_size(inst),
            "effective_size": effective_size(inst),
            "bewitched": is_bewitched(inst),
        }
        return VerificationReport(config=cfg, result=payload), 0
    if args.string is None or args.n is None or args.m is None:
        raise ValueError("need --string with --n/--m, or --formula with --n")
    spec = EchelonSpec(args.n, args.m)
    problem = enumerate_echelon(spec, budget=args.word_budget)
    g = PartialString.parse(problem.alphabet, args.string)
    try:
        verdict = classify(g, problem, budget=args.budget)
    except NotInReducedLogogram as exc:
        payload = {"string": g.render(), "error": str(exc)}
        return VerificationReport(config=cfg, result=payload), 1
    return VerificationReport(config=cfg, result=verdict.to_json()), 0


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"func"}
    out = {"command": args.command, "tool_version": __version__}
    for key, value in sorted(vars(args).items()):
        if key in skip or key == "command":
            continue
        out[key] = str(value) if isinstance(value, Path) else value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--budget", type=int, default=DEFAULT_CANDIDATE_BUDGET,
                       help="candidate-space cap for logogram enumeration")
        p.add_argument("--word-budget", type=int, default=2_000_000,
                       help="word cap for echelon enumeration")
        p.add_argument("--threads", type=int, default=1, help="worker processes for enumeration")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p_log = sub.add_parser("logogram", help="compute a reduced logogram (cached)")
    p_log.add_argument("--n", type=int)
    p_log.add_argument("--m", type=int)
    p_log.add_argument("--base-file")
    p_log.add_argument("--target-file")
    p_log.add_argument("--region-file", action="append", default=[])
    p_log.add_argument("--reduced", "--reduced-only", dest="reduced", action="store_true",
                       help="print the reduced strings and skip storing the full set")
    p_log.add_argument("--cache-dir", type=Path, default=default_cache_dir())
    p_log.add_argument("--no-cache", action="store_true")
    common(p_log)
    p_log.set_defaults(func=cmd_logogram)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("--suite", choices=SUITES, required=True)
    p_ver.add_argument("--n", type=int, default=2)
    p_ver.add_argument("--m", type=int, default=2)
    p_ver.add_argument("--samples", type=int, default=200)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--max-subset", type=int, default=4)
    p_ver.add_argument("--ignore-bewitched", action="store_true")
    common(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_cls = sub.add_parser("classify", help="classify a string or report a formula's sizes")
    p_cls.add_argument("--n", type=int)
    p_cls.add_argument("--m", type=int)
    p_cls.add_argument("--string")
    p_cls.add_argument("--formula")
    common(p_cls)
    p_cls.set_defaults(func=cmd_classify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        report, code = args.func(args)
    except BudgetExceeded as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        print(report.to_text())
    print(f"elapsed: {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
