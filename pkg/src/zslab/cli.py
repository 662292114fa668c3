"""Command-line front end emitting reproducible JSON reports.

Exit codes: 0 success / property holds; 1 a mathematical counterexample or
certificate rejection; 2 usage error; 3 budget exhaustion (a resumable
checkpoint is written when --checkpoint is set).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from pathlib import Path

from .algebra import exists_vanishing_assignment, nonvanishing_witness_search
from .groups import (
    AbelianGroup,
    ElementSet,
    EnumerationBudgetExceeded,
    InvalidElement,
    InvalidGroup,
)
from .invariants import (
    C0_EXHAUSTIVE_MAX_ORDER,
    FormulaUnavailable,
    PreconditionFailed,
    davenport,
    kneser_check,
    lemma_st0_check,
    longest_regular_nonbasis,
    monte_carlo_theorem,
    small_group_pool,
    stabilizer,
    verify_extremal,
)
from .reports import RunConfig, build_report, render_report
from .search import CheckpointError, SearchBudgetExceeded
from .sequences import (
    RetryBudgetExceeded,
    Sequence,
    is_basis,
    is_regular,
    missing_elements,
    sigma_set,
    sigma_sum,
    violating_subgroup,
)

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(ValueError):
    pass


def _default_workers() -> int:
    raw = os.environ.get("ZSLAB_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_common(parser: argparse.ArgumentParser, group: bool = False, seq: bool = False):
    if group:
        parser.add_argument("--group", required=True, help="comma-separated moduli, e.g. 3,15")
    if seq:
        parser.add_argument("--seq", required=True, help="sequence JSON file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=_default_workers())
    parser.add_argument("--budget-seconds", type=float, default=None)
    parser.add_argument("--checkpoint", default=None)
    parser.add_argument("--json", dest="json_path", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zslab",
        description="Zero-sum invariants over finite abelian groups: sumsets, "
        "regularity, Davenport constants, exact c0, vanishing certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("group-info", help="order, exponent, subgroup count"), group=True)
    _add_common(sub.add_parser("sigma", help="subset sums of a sequence"), group=True, seq=True)
    _add_common(sub.add_parser("regular", help="regularity check"), group=True, seq=True)
    _add_common(sub.add_parser("basis", help="additive basis check"), group=True, seq=True)

    p = sub.add_parser("davenport", help="Davenport constant")
    p.add_argument("--mode", choices=["formula", "bruteforce", "both"], default="formula")
    _add_common(p, group=True)

    p = sub.add_parser("c0", help="exact c0 by exhaustive search")
    p.add_argument("--cap", type=int, default=None)
    _add_common(p, group=True)

    p = sub.add_parser("search-extremal", help="longest regular non-basis sequence")
    p.add_argument("--cap", type=int, default=None)
    _add_common(p, group=True)

    p = sub.add_parser("algebra-cover", help="vanishing assignment for a sequence")
    _add_common(p, group=True, seq=True)

    p = sub.add_parser("algebra-dwitness", help="search a nonvanishing witness of given length")
    p.add_argument("--len", dest="length", type=int, required=True)
    _add_common(p, group=True)

    p = sub.add_parser("stabilizer", help="stabilizer of a set of elements")
    p.add_argument("--set", dest="set_spec", required=True, help="JSON array of elements, inline or a file path")
    _add_common(p, group=True)

    p = sub.add_parser("kneser-fuzz", help="random sumset inequality instances")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--max-order", type=int, default=48)
    p.add_argument("--max-sets", type=int, default=4)
    _add_common(p)

    p = sub.add_parser("verify-paper", help="lower-bound construction and stabilizer gate for C3+C3q")
    p.add_argument("--q", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("monte-carlo", help="random regular sequences vs the basis claim")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--length", type=int, default=None)
    p.add_argument("--plant-extremal", action="store_true", help="also feed the extremal sequence through the detector")
    _add_common(p)

    return parser


# -- input loading ------------------------------------------------------------


def _group_of(args) -> AbelianGroup:
    return AbelianGroup.from_literal(args.group)


def _load_sequence(args, group: AbelianGroup) -> Sequence:
    path = Path(args.seq)
    if not path.exists():
        raise UsageError(f"sequence file not found: {path}")
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from exc
    return Sequence.from_json(obj, group=group)


def _load_set(args, group: AbelianGroup) -> ElementSet:
    spec = args.set_spec.strip()
    if spec.startswith("["):
        data = json.loads(spec)
    else:
        path = Path(spec)
        if not path.exists():
            raise UsageError(f"set file not found: {path}")
        data = json.loads(path.read_text())
    return ElementSet.from_elements(group, [group.reduce(c) for c in data])


# -- handlers -------------------------------------------------------------------


def _run_group_info(args, config: RunConfig):
    group = _group_of(args)
    try:
        count = len(group.all_subgroups())
    except EnumerationBudgetExceeded:
        count = None
    result = {
        "group": group.literal,
        "invariant_factors": list(group.invariant_factors),
        "order": group.order,
        "exponent": group.exponent,
        "rank": group.rank,
        "subgroup_count": count,
    }
    return None, result, EXIT_OK


def _run_sigma(args, config: RunConfig):
    group = _group_of(args)
    seq = _load_sequence(args, group)
    if seq.length == 0:
        raise UsageError("sequence is empty; nothing to sum")
    sig = sigma_set(seq)
    result = {
        "group": group.literal,
        "length": seq.length,
        "sum": list(sigma_sum(seq)),
        "sigma_cardinality": sig.cardinality,
        "sigma": [list(g) for g in sig.elements()],
        "is_basis": sig.cardinality == group.order,
    }
    return None, result, EXIT_OK


def _run_regular(args, config: RunConfig):
    group = _group_of(args)
    seq = _load_sequence(args, group)
    bad = violating_subgroup(seq)
    result = {
        "group": group.literal,
        "length": seq.length,
        "regular": bad is None,
        "violating_subgroup": None
        if bad is None
        else {
            "order": bad.order,
            "generators": [list(g) for g in bad.generators],
            "terms_inside": sum(seq.multiplicity[i] for i in bad.member_indices()),
        },
    }
    return None, result, EXIT_OK if bad is None else EXIT_COUNTEREXAMPLE


def _run_basis(args, config: RunConfig):
    group = _group_of(args)
    seq = _load_sequence(args, group)
    miss = missing_elements(seq)
    result = {
        "group": group.literal,
        "length": seq.length,
        "basis": miss.is_empty(),
        "missing_count": miss.cardinality,
        "missing": [list(g) for g in miss.elements()],
    }
    return None, result, EXIT_OK if miss.is_empty() else EXIT_COUNTEREXAMPLE


def _run_davenport(args, config: RunConfig):
    group = _group_of(args)
    formula = bruteforce = None
    if args.mode in ("formula", "both"):
        formula = davenport(group, "formula")
    if args.mode in ("bruteforce", "both"):
        bruteforce = davenport(group, "bruteforce", budget_seconds=args.budget_seconds)
    agree = None if args.mode != "both" else formula == bruteforce
    result = {
        "group": group.literal,
        "mode": args.mode,
        "formula": formula,
        "bruteforce": bruteforce,
        "value": formula if formula is not None else bruteforce,
        "agree": agree,
    }
    claim = "Davenport constant of a rank-2 group is n1 + n2 - 1" if args.mode == "both" else None
    return claim, result, EXIT_OK if agree in (None, True) else EXIT_COUNTEREXAMPLE


def _run_c0(args, config: RunConfig):
    group = _group_of(args)
    if group.order > C0_EXHAUSTIVE_MAX_ORDER:
        raise SearchBudgetExceeded(
            f"group order {group.order} exceeds exhaustive c0 bound {C0_EXHAUSTIVE_MAX_ORDER}"
        )
    report = longest_regular_nonbasis(
        group,
        cap=args.cap,
        workers=args.workers,
        budget_seconds=args.budget_seconds,
        checkpoint_path=args.checkpoint,
    )
    if report.cap_hit or report.value is None:
        raise SearchBudgetExceeded(f"c0 search hit the length cap on {group.literal}")
    result = {
        "group": group.literal,
        "c0": report.value + 1,
        "search": report.to_payload(),
    }
    return "smallest length forcing every regular sequence to be a basis", result, EXIT_OK


def _run_search_extremal(args, config: RunConfig):
    group = _group_of(args)
    report = longest_regular_nonbasis(
        group,
        cap=args.cap,
        workers=args.workers,
        budget_seconds=args.budget_seconds,
        checkpoint_path=args.checkpoint,
    )
    return "longest regular sequence that is not an additive basis", report.to_payload(), EXIT_OK


def _run_algebra_cover(args, config: RunConfig):
    group = _group_of(args)
    seq = _load_sequence(args, group)
    if seq.length == 0:
        raise UsageError("sequence is empty; the empty product never vanishes")
    assignment = exists_vanishing_assignment(seq)
    result = {
        "group": group.literal,
        "length": seq.length,
        "found": assignment is not None,
        "assignment": assignment.to_json() if assignment is not None else None,
        "terms": [list(group.element(i)) for i in seq.indices()],
    }
    return None, result, EXIT_OK


def _run_algebra_dwitness(args, config: RunConfig):
    group = _group_of(args)
    witness = nonvanishing_witness_search(
        group, args.length, budget_seconds=args.budget_seconds
    )
    result = {
        "group": group.literal,
        "length": args.length,
        "found": witness is not None,
        "witness": witness.to_json() if witness is not None else None,
    }
    return "longest product of unit binomials that cannot be forced to vanish", result, EXIT_OK


def _run_stabilizer(args, config: RunConfig):
    group = _group_of(args)
    eset = _load_set(args, group)
    if eset.is_empty():
        raise UsageError("the stabilizer of the empty set is undefined")
    stab = stabilizer(eset)
    result = {
        "group": group.literal,
        "set_cardinality": eset.cardinality,
        "order": stab.order,
        "generators": [list(g) for g in stab.generators],
        "members": [list(g) for g in stab.members.elements()],
    }
    return None, result, EXIT_OK


def _run_kneser_fuzz(args, config: RunConfig):
    rng = random.Random(args.seed)
    pool = small_group_pool(args.max_order)
    violations = []
    for trial in range(args.trials):
        group = rng.choice(pool)
        r = rng.randrange(1, args.max_sets + 1)
        sets = []
        for _ in range(r):
            k = rng.randrange(1, group.order + 1)
            sets.append(ElementSet.from_indices(group, rng.sample(range(group.order), k)))
        rep = kneser_check(sets)
        if not rep.holds:
            violations.append(
                {
                    "trial": trial,
                    "group": group.literal,
                    "sets": [[list(g) for g in s.elements()] for s in sets],
                    "lhs": rep.lhs,
                    "rhs": rep.rhs,
                }
            )
    result = {
        "trials": args.trials,
        "max_order": args.max_order,
        "max_sets": args.max_sets,
        "violations": violations,
        "holds": not violations,
    }
    claim = "iterated sumset size is at least the stabilizer-saturated lower bound"
    return claim, result, EXIT_OK if not violations else EXIT_COUNTEREXAMPLE


def _run_verify_paper(args, config: RunConfig):
    extremal = verify_extremal(args.q)
    st0 = lemma_st0_check(extremal.sequence)
    group = extremal.sequence.group
    dav = davenport(group, "formula")
    ok = extremal.ok and st0.applicable and bool(st0.holds)
    result = {
        "q": args.q,
        "group": extremal.group,
        "lower_bound_length": extremal.length,
        "sequence": extremal.sequence.to_json(),
        "regular": extremal.regular,
        "target": list(extremal.target),
        "target_missing": extremal.target_missing,
        "missing": [list(g) for g in extremal.missing],
        "c0_lower_bound": extremal.c0_lower_bound,
        "davenport_formula": dav,
        "stabilizer_check": st0.to_payload(),
        "ok": ok,
    }
    claim = "a regular non-basis sequence of length 3q+2 over C3+C3q exists, so c0 >= 3q+3"
    return claim, result, EXIT_OK if ok else EXIT_COUNTEREXAMPLE


def _run_monte_carlo(args, config: RunConfig):
    plant = verify_extremal(args.q).sequence if args.plant_extremal else None
    report = monte_carlo_theorem(
        args.q,
        args.trials,
        args.seed,
        length=args.length,
        plant=plant,
        workers=args.workers,
    )
    result = report.to_payload()
    code = EXIT_OK
    if report.counterexamples:
        code = EXIT_COUNTEREXAMPLE
    if plant is not None and not report.planted["is_counterexample"]:
        code = EXIT_COUNTEREXAMPLE  # the detector failed to flag a known non-basis
    claim = "every regular sequence of length 3q+3 over C3+C3q is an additive basis"
    return claim, result, code


_HANDLERS = {
    "group-info": _run_group_info,
    "sigma": _run_sigma,
    "regular": _run_regular,
    "basis": _run_basis,
    "davenport": _run_davenport,
    "c0": _run_c0,
    "search-extremal": _run_search_extremal,
    "algebra-cover": _run_algebra_cover,
    "algebra-dwitness": _run_algebra_dwitness,
    "stabilizer": _run_stabilizer,
    "kneser-fuzz": _run_kneser_fuzz,
    "verify-paper": _run_verify_paper,
    "monte-carlo": _run_monte_carlo,
}


def parse_and_run(argv) -> tuple[int, dict | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code not in (0, None) else EXIT_OK), None
    params = {
        k: v
        for k, v in vars(args).items()
        if k not in {"command", "seed", "workers", "budget_seconds", "checkpoint", "json_path"}
    }
    config = RunConfig(
        command=args.command,
        params=params,
        seed=getattr(args, "seed", 0),
        workers=getattr(args, "workers", 1),
        budget_seconds=getattr(args, "budget_seconds", None),
        checkpoint=getattr(args, "checkpoint", None),
        output=getattr(args, "json_path", None),
    )
    t0 = time.monotonic()
    try:
        claim, result, code = _HANDLERS[args.command](args, config)
    except (
        UsageError,
        InvalidGroup,
        InvalidElement,
        PreconditionFailed,
        FormulaUnavailable,
        CheckpointError,
    ) as exc:
        print(f"zslab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    except (SearchBudgetExceeded, EnumerationBudgetExceeded, RetryBudgetExceeded) as exc:
        print(f"zslab: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET, None
    report = build_report(config, claim, result, time.monotonic() - t0)
    return code, report


def main(argv=None) -> int:
    code, report = parse_and_run(sys.argv[1:] if argv is None else argv)
    if report is not None:
        text = render_report(report)
        out = report["config"].get("output")
        if out:
            Path(out).write_text(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
