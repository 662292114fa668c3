"""Zero-sum invariants and verification harnesses.

Davenport constants (formula and brute force), the exact c0 computation via
pruned exhaustive search over regular sequences, stabilizers and the sumset
inequality check, inverse-theorem enumerations, the lower-bound construction
for C_3 + C_{3q}, certificate checking for the basis lemma, and Monte Carlo
falsification of the c0 value.

Search conventions: multisets are enumerated in canonical form (element
indices non-decreasing); zero terms are never candidates (a zero term is a
regularity violation, and a zero term alone is a zero-sum subsequence).  For
C_p + C_p the first two distinct terms are restricted to automorphism orbit
representatives, which is sound because every orbit has a lex-minimal sorted
representative whose prefixes are lex-minimal too.
"""

from __future__ import annotations

import multiprocessing
import time
from dataclasses import dataclass, field
from itertools import product

from .groups import (
    AbelianGroup,
    Element,
    ElementSet,
    Subgroup,
    iter_bit_indices,
    make_group,
)
from .search import PrefixCheckpoint, SearchBudgetExceeded, Ticker
from .sequences import (
    Sequence,
    is_basis,
    is_regular,
    missing_elements,
    random_regular,
    regularity_tables,
    restrict,
    sigma0_set,
    sigma_bits,
    sigma_set,
)

__all__ = [
    "BasicLemmaCertificate",
    "CertificateResult",
    "CyclicInverseReport",
    "EmptySetError",
    "ExtremalReport",
    "FormulaUnavailable",
    "KneserReport",
    "MonteCarloReport",
    "PreconditionFailed",
    "Rank2InverseReport",
    "SearchReport",
    "St0Report",
    "c0_exact",
    "cyclic_inverse_check",
    "davenport",
    "is_prime",
    "kneser_check",
    "lemma_basic_check",
    "lemma_st0_check",
    "longest_regular_nonbasis",
    "max_regular_length",
    "max_zero_sumfree",
    "monte_carlo_theorem",
    "orbit_constraints",
    "rank2_inverse_check",
    "small_group_pool",
    "stabilizer",
    "verify_extremal",
]

C0_EXHAUSTIVE_MAX_ORDER = 36
DAVENPORT_MAX_ORDER = 36


class EmptySetError(ValueError):
    """Operation undefined for the empty set."""


class FormulaUnavailable(ValueError):
    """No closed-form value is implemented for this group shape."""


class PreconditionFailed(ValueError):
    """Input violates a stated precondition (group shape, length, primality...)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# -- automorphism reduction for C_p + C_p ------------------------------------


def automorphism_index_perms(group: AbelianGroup) -> tuple[tuple[int, ...], ...]:
    """All automorphisms as index permutations.

    Implemented for elementary abelian rank 2 (the invertible 2x2 matrices
    over F_p); every other group gets just the identity, i.e. no reduction.
    """
    cached = group._cache.get("aut_perms")
    if cached is not None:
        return cached
    f = group.invariant_factors
    perms: list[tuple[int, ...]]
    if len(f) == 2 and f[0] == f[1] and is_prime(f[0]):
        p = f[0]
        perms = []
        for a, b, c, d in product(range(p), repeat=4):
            if (a * d - b * c) % p == 0:
                continue
            perm = [0] * group.order
            for i in range(group.order):
                x, y = group.element(i)
                perm[i] = group.index_of(((a * x + b * y) % p, (c * x + d * y) % p))
            perms.append(tuple(perm))
    else:
        perms = [tuple(range(group.order))]
    result = tuple(perms)
    group._cache["aut_perms"] = result
    return result


def orbit_constraints(group: AbelianGroup, reduce_symmetry: bool):
    """(allowed first indices, allowed-second map) for canonical search, or
    (None, None) when no reduction applies.

    First term must be minimal in its automorphism orbit; the second distinct
    term must be minimal in its orbit under the stabilizer of the first.
    """
    if not reduce_symmetry:
        return None, None
    perms = automorphism_index_perms(group)
    if len(perms) == 1:
        return None, None
    cached = group._cache.get("orbit_constraints")
    if cached is not None:
        return cached
    n = group.order
    first = frozenset(
        e for e in range(1, n) if min(perm[e] for perm in perms) == e
    )
    second: dict[int, frozenset[int]] = {}
    for f0 in first:
        stab = [perm for perm in perms if perm[f0] == f0]
        second[f0] = frozenset(
            e for e in range(1, n) if min(perm[e] for perm in stab) == e
        )
    group._cache["orbit_constraints"] = (first, second)
    return first, second


def canonical_multiplicity(group: AbelianGroup, mult, reduce_symmetry: bool = True) -> tuple[int, ...]:
    """Lexicographically smallest multiplicity vector over the automorphism orbit."""
    mult = tuple(mult)
    if not reduce_symmetry:
        return mult
    perms = automorphism_index_perms(group)
    if len(perms) == 1:
        return mult
    best = None
    n = len(mult)
    for perm in perms:
        image = [0] * n
        for i, m in enumerate(mult):
            if m:
                image[perm[i]] = m
        image = tuple(image)
        if best is None or image < best:
            best = image
    return best


# -- reports -------------------------------------------------------------------


@dataclass
class SearchReport:
    """Outcome of an exhaustive search for a witness-bearing invariant."""

    group: str
    invariant: str
    value: int | None
    witness: Sequence | None
    nodes_explored: int
    wall_time_seconds: float
    budget_exhausted: bool = False
    cap_hit: bool = False

    def to_payload(self) -> dict:
        return {
            "group": self.group,
            "invariant": self.invariant,
            "value": self.value,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "nodes_explored": self.nodes_explored,
            "wall_time_seconds": self.wall_time_seconds,
            "budget_exhausted": self.budget_exhausted,
            "cap_hit": self.cap_hit,
        }


# -- Davenport constant ---------------------------------------------------------


def davenport(
    group: AbelianGroup,
    mode: str = "formula",
    *,
    max_order: int = DAVENPORT_MAX_ORDER,
    budget_seconds: float | None = None,
    reduce_symmetry: bool = True,
) -> int:
    """Smallest t such that every length-t sequence has a nonempty zero-sum
    subsequence.  Formula n1 + n2 - 1 for rank <= 2 (rank 1 degenerates to
    C_1 + C_n); brute force is 1 + the longest zero-sumfree length."""
    if mode == "formula":
        if group.rank == 1:
            return group.invariant_factors[0]
        if group.rank == 2:
            return group.invariant_factors[0] + group.invariant_factors[1] - 1
        raise FormulaUnavailable(f"no Davenport formula for rank {group.rank}")
    if mode == "bruteforce":
        if group.order > max_order:
            raise SearchBudgetExceeded(
                f"group order {group.order} exceeds brute-force bound {max_order}"
            )
        report = max_zero_sumfree(
            group, budget_seconds=budget_seconds, reduce_symmetry=reduce_symmetry
        )
        return report.value + 1
    raise ValueError(f"unknown mode {mode!r}")


def max_zero_sumfree(
    group: AbelianGroup,
    *,
    budget_seconds: float | None = None,
    reduce_symmetry: bool = True,
) -> SearchReport:
    """Longest multiset with no nonempty zero-sum sub-multiset, by canonical
    DFS pruning any prefix whose subset sums contain 0."""
    t0 = time.monotonic()
    n = group.order
    full = group.full_mask
    translate = group.translate_bits
    first_allowed, second_map = orbit_constraints(group, reduce_symmetry)
    ticker = Ticker(budget_seconds, what=f"zero-sumfree search over {group.literal}")

    prefix: list[int] = []
    best_len = 0
    best_canon: tuple[int, ...] = (0,) * n
    nodes = 1  # the empty multiset

    def consider():
        nonlocal best_len, best_canon
        length = len(prefix)
        if length < best_len:
            return
        mult = [0] * n
        for e in prefix:
            mult[e] += 1
        c = canonical_multiplicity(group, mult, reduce_symmetry)
        if length > best_len or c < best_canon:
            best_len, best_canon = length, c

    def rec(min_idx: int, sig: int, second_seen: bool):
        nonlocal nodes
        ticker.tick()
        for e in range(min_idx, n):
            if not prefix:
                if first_allowed is not None and e not in first_allowed:
                    continue
            elif not second_seen and e != prefix[0]:
                if second_map is not None and e not in second_map[prefix[0]]:
                    continue
            child_sig = sig | translate(sig | 1, e)
            if child_sig & 1:
                continue  # a zero-sum sub-multiset appeared
            nodes += 1
            prefix.append(e)
            consider()
            rec(e, child_sig, second_seen or (len(prefix) > 1 and e != prefix[0]))
            prefix.pop()

    rec(1, 0, False)
    witness = Sequence(group, best_canon)
    return SearchReport(
        group=group.literal,
        invariant="max_zero_sumfree",
        value=best_len,
        witness=witness,
        nodes_explored=nodes,
        wall_time_seconds=time.monotonic() - t0,
    )


# -- longest regular non-basis / c0 ----------------------------------------------


def _explore_regular_nonbasis(
    group: AbelianGroup,
    unit: tuple[int, ...],
    cap: int,
    second_allowed: frozenset[int] | None,
    reduce_symmetry: bool,
    ticker: Ticker,
) -> dict:
    """DFS below one depth-2 canonical prefix; returns a checkpoint record."""
    limits, ids = regularity_tables(group)
    n = group.order
    full = group.full_mask
    translate = group.translate_bits

    counts = [0] * len(limits)
    prefix = list(unit)
    sig = 0
    for e in prefix:
        for j in ids[e]:
            counts[j] += 1
        sig |= translate(sig | 1, e)
    first = prefix[0]

    best_len = -1
    best_canon: tuple[int, ...] | None = None
    nodes = 0
    cap_hit = False

    def consider(sig_val: int):
        nonlocal best_len, best_canon
        if sig_val == full:
            return
        length = len(prefix)
        if length < best_len:
            return
        mult = [0] * n
        for e in prefix:
            mult[e] += 1
        c = canonical_multiplicity(group, mult, reduce_symmetry)
        if length > best_len or c < best_canon:
            best_len, best_canon = length, c

    def rec(min_idx: int, sig_val: int, second_seen: bool):
        nonlocal nodes, cap_hit
        nodes += 1
        ticker.tick()
        consider(sig_val)
        if (sig_val | 1) == full:
            return  # every extension is a basis
        if len(prefix) >= cap:
            cap_hit = True
            return
        for e in range(min_idx, n):
            if not second_seen and e != first:
                if second_allowed is not None and e not in second_allowed:
                    continue
            blocked = False
            for j in ids[e]:
                if counts[j] == limits[j]:
                    blocked = True
                    break
            if blocked:
                continue
            for j in ids[e]:
                counts[j] += 1
            prefix.append(e)
            rec(e, sig_val | translate(sig_val | 1, e), second_seen or e != first)
            prefix.pop()
            for j in ids[e]:
                counts[j] -= 1

    rec(prefix[-1], sig, len(set(unit)) >= 2)
    return {
        "prefix": list(unit),
        "best_len": best_len,
        "witness": _mult_to_indices(best_canon) if best_canon is not None else None,
        "nodes": nodes,
        "cap_hit": cap_hit,
    }


def _mult_to_indices(mult) -> list[int]:
    out: list[int] = []
    for i, m in enumerate(mult):
        out.extend([i] * m)
    return out


_RNB_STATE: dict = {}


def _rnb_init(literal: str, cap: int, reduce_symmetry: bool, budget_seconds: float | None):
    group = AbelianGroup.from_literal(literal)
    _, second_map = orbit_constraints(group, reduce_symmetry)
    _RNB_STATE.update(
        group=group,
        cap=cap,
        reduce=reduce_symmetry,
        second_map=second_map,
        budget=budget_seconds,
    )


def _rnb_task(unit) -> dict:
    st = _RNB_STATE
    second = st["second_map"][unit[0]] if st["second_map"] is not None else None
    ticker = Ticker(st["budget"], what="regular non-basis search")
    return _explore_regular_nonbasis(
        st["group"], tuple(unit), st["cap"], second, st["reduce"], ticker
    )


def longest_regular_nonbasis(
    group: AbelianGroup,
    cap: int | None = None,
    *,
    workers: int = 1,
    budget_seconds: float | None = None,
    checkpoint_path=None,
    reduce_symmetry: bool = True,
    max_units: int | None = None,
) -> SearchReport:
    """Maximum length of a regular sequence that is not an additive basis.

    Canonical DFS over multisets of nonzero elements; prunes on regularity
    violations (permanent under extension), on saturated subset sums (every
    extension is a basis), and at the length cap (default 2|G|; hitting it
    marks the result Unknown).  Work is split at depth-2 prefixes, which are
    the checkpoint and parallelization units.
    """
    t0 = time.monotonic()
    if cap is None:
        cap = 2 * group.order
    limits, ids = regularity_tables(group)
    first_allowed, second_map = orbit_constraints(group, reduce_symmetry)
    n = group.order
    full = group.full_mask
    translate = group.translate_bits

    config = {
        "command": "longest_regular_nonbasis",
        "group": group.literal,
        "cap": cap,
        "reduce_symmetry": reduce_symmetry,
    }
    ckpt = PrefixCheckpoint(checkpoint_path, config) if checkpoint_path else None

    # Depth <= 1 prefixes are evaluated inline; their depth-2 children are the units.
    best_len = 0
    best_canon: tuple[int, ...] = (0,) * n  # the empty sequence is regular and misses everything
    nodes = 1
    cap_hit = False
    units: list[tuple[int, int]] = []

    for e1 in range(1, n):
        if first_allowed is not None and e1 not in first_allowed:
            continue
        nodes += 1
        sig1 = translate(1, e1)
        if sig1 != full:
            c = canonical_multiplicity(group, _mult_single(n, e1), reduce_symmetry)
            if 1 > best_len or (1 == best_len and c < best_canon):
                best_len, best_canon = 1, c
        if (sig1 | 1) == full:
            continue
        if cap <= 1:
            cap_hit = True
            continue
        allowed2 = second_map[e1] if second_map is not None else None
        for e2 in range(e1, n):
            if e2 != e1 and allowed2 is not None and e2 not in allowed2:
                continue
            ok = True
            seen: dict[int, int] = {}
            for e in (e1, e2):
                for j in ids[e]:
                    seen[j] = seen.get(j, 0) + 1
                    if seen[j] > limits[j]:
                        ok = False
            if ok:
                units.append((e1, e2))

    completed = dict(ckpt.records) if ckpt else {}
    pending = [u for u in units if u not in completed]

    clipped = False
    if max_units is not None and len(pending) > max_units:
        pending = pending[:max_units]
        clipped = True

    records = list(completed.values())
    if workers > 1 and pending:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(
            workers,
            initializer=_rnb_init,
            initargs=(group.literal, cap, reduce_symmetry, budget_seconds),
        ) as pool:
            for rec in pool.imap(_rnb_task, pending, chunksize=1):
                if ckpt:
                    ckpt.append(rec)
                records.append(rec)
    else:
        ticker = Ticker(budget_seconds, what=f"regular non-basis search over {group.literal}")
        for unit in pending:
            second = second_map[unit[0]] if second_map is not None else None
            rec = _explore_regular_nonbasis(group, unit, cap, second, reduce_symmetry, ticker)
            if ckpt:
                ckpt.append(rec)
            records.append(rec)

    if clipped:
        raise SearchBudgetExceeded(
            f"unit budget exhausted after {len(pending)} of {len(units)} units",
            checkpoint_path=str(checkpoint_path) if checkpoint_path else None,
        )

    for rec in records:
        nodes += rec["nodes"]
        cap_hit = cap_hit or rec["cap_hit"]
        if rec["best_len"] < 0:
            continue
        mult = [0] * n
        for e in rec["witness"]:
            mult[e] += 1
        c = tuple(mult)  # explorer output is already orbit-canonical
        if rec["best_len"] > best_len or (rec["best_len"] == best_len and c < best_canon):
            best_len, best_canon = rec["best_len"], c

    witness = Sequence(group, best_canon)
    return SearchReport(
        group=group.literal,
        invariant="longest_regular_nonbasis",
        value=None if cap_hit else best_len,
        witness=witness,
        nodes_explored=nodes,
        wall_time_seconds=time.monotonic() - t0,
        cap_hit=cap_hit,
    )


def _mult_single(n: int, e: int) -> tuple[int, ...]:
    mult = [0] * n
    mult[e] = 1
    return tuple(mult)


def c0_exact(
    group: AbelianGroup,
    *,
    max_order: int = C0_EXHAUSTIVE_MAX_ORDER,
    **kwargs,
) -> int:
    """Smallest t such that every regular sequence of length >= t is a basis.

    Equals the longest regular non-basis length plus one: regularity is
    hereditary under deletion and subset sums only grow under extension, so
    basis-ness at some length persists at all larger lengths.
    """
    if group.order > max_order:
        raise SearchBudgetExceeded(
            f"group order {group.order} exceeds exhaustive c0 bound {max_order}"
        )
    report = longest_regular_nonbasis(group, **kwargs)
    if report.cap_hit or report.value is None:
        raise SearchBudgetExceeded(
            f"c0 search hit the length cap on {group.literal}; result unknown"
        )
    return report.value + 1


def max_regular_length(group: AbelianGroup, *, budget_seconds: float | None = None) -> int:
    """Longest regular sequence at all (basis or not); exhaustive, so only
    sensible for very small groups."""
    limits, ids = regularity_tables(group)
    ticker = Ticker(budget_seconds, what=f"max regular length over {group.literal}")
    counts = [0] * len(limits)
    best = 0

    def rec(min_idx: int, length: int):
        nonlocal best
        ticker.tick()
        best = max(best, length)
        for e in range(min_idx, group.order):
            if any(counts[j] == limits[j] for j in ids[e]):
                continue
            for j in ids[e]:
                counts[j] += 1
            rec(e, length + 1)
            for j in ids[e]:
                counts[j] -= 1

    rec(1, 0)
    return best


# -- stabilizer and the sumset inequality ------------------------------------------


def stabilizer(element_set: ElementSet) -> Subgroup:
    """st(A) = {g : g + A = A}, the largest subgroup fixing A under translation."""
    if element_set.bits == 0:
        raise EmptySetError("stabilizer of the empty set is undefined")
    group = element_set.group
    bits = element_set.bits
    sbits = 0
    for g in range(group.order):
        if group.translate_bits(bits, g) == bits:
            sbits |= 1 << g
    return Subgroup.from_bits(group, sbits, check=True)


@dataclass
class KneserReport:
    lhs: int
    rhs: int
    stabilizer: Subgroup
    holds: bool
    sumset: ElementSet

    def to_payload(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "stabilizer_order": self.stabilizer.order,
            "holds": self.holds,
        }


def kneser_check(sets: list[ElementSet]) -> KneserReport:
    """|A_1 + ... + A_r| >= sum |A_i + H| - (r-1)|H| with H the stabilizer of
    the full sumset.  The inequality is a theorem; holds must come back True."""
    if not sets:
        raise EmptySetError("need at least one set")
    group = sets[0].group
    for a in sets:
        if a.group != group:
            raise ValueError("sets over different groups")
        if a.bits == 0:
            raise EmptySetError("all sets must be nonempty")
    total = sets[0].bits
    for a in sets[1:]:
        total = group.sumset_bits(total, a.bits)
    stab = stabilizer(ElementSet(group, total))
    lhs = total.bit_count()
    rhs = (
        sum(group.sumset_bits(a.bits, stab.bits).bit_count() for a in sets)
        - (len(sets) - 1) * stab.order
    )
    return KneserReport(lhs, rhs, stab, lhs >= rhs, ElementSet(group, total))


# -- inverse-theorem enumerations -----------------------------------------------------


def _iter_regular_fixed_length(
    group: AbelianGroup,
    length: int,
    *,
    reduce_symmetry: bool = False,
    prune_saturated: bool = False,
    ticker: Ticker | None = None,
):
    """Yield (indices, sigma_bits) for every canonical regular multiset of the
    exact length.  prune_saturated skips subtrees whose subset sums already
    cover the group (only sound when just non-basis leaves matter)."""
    limits, ids = regularity_tables(group)
    first_allowed, second_map = orbit_constraints(group, reduce_symmetry)
    n = group.order
    full = group.full_mask
    translate = group.translate_bits
    counts = [0] * len(limits)
    prefix: list[int] = []

    def rec(min_idx: int, sig: int, second_seen: bool):
        if ticker is not None:
            ticker.tick()
        if len(prefix) == length:
            yield tuple(prefix), sig
            return
        if prune_saturated and (sig | 1) == full:
            return
        for e in range(min_idx, n):
            if not prefix:
                if first_allowed is not None and e not in first_allowed:
                    continue
            elif not second_seen and e != prefix[0]:
                if second_map is not None and e not in second_map[prefix[0]]:
                    continue
            blocked = False
            for j in ids[e]:
                if counts[j] == limits[j]:
                    blocked = True
                    break
            if blocked:
                continue
            for j in ids[e]:
                counts[j] += 1
            prefix.append(e)
            yield from rec(e, sig | translate(sig | 1, e), second_seen or (len(prefix) > 1 and e != prefix[0]))
            prefix.pop()
            for j in ids[e]:
                counts[j] -= 1

    yield from rec(1, 0, False)


@dataclass
class Rank2InverseReport:
    p: int
    length: int
    sequences_checked: int
    min_sigma0_size: int
    holds: bool
    violations: list[dict] = field(default_factory=list)

    def to_payload(self) -> dict:
        return {
            "p": self.p,
            "length": self.length,
            "sequences_checked": self.sequences_checked,
            "min_sigma0_size": self.min_sigma0_size,
            "required": self.p * self.p - 1,
            "holds": self.holds,
            "violations": self.violations,
        }


def rank2_inverse_check(
    p: int,
    *,
    reduce_symmetry: bool = True,
    budget_seconds: float | None = None,
) -> Rank2InverseReport:
    """Every regular sequence of length 2p-2 over C_p + C_p has at least
    p^2 - 1 distinct subset sums (counting 0).  Exhaustive over canonical
    representatives; the checked property is automorphism-invariant."""
    if p not in (2, 3, 5):
        raise PreconditionFailed(f"p must be one of 2, 3, 5 (got {p})")
    group = make_group([p, p])
    length = 2 * p - 2
    ticker = Ticker(budget_seconds, what=f"rank-2 inverse check p={p}")
    required = p * p - 1
    checked = 0
    min_size = group.order + 1
    violations: list[dict] = []
    for idxs, sig in _iter_regular_fixed_length(
        group, length, reduce_symmetry=reduce_symmetry, ticker=ticker
    ):
        checked += 1
        size = (sig | 1).bit_count()
        if size < min_size:
            min_size = size
        if size < required:
            violations.append(Sequence.from_indices(group, idxs).to_json())
    return Rank2InverseReport(
        p=p,
        length=length,
        sequences_checked=checked,
        min_sigma0_size=min_size,
        holds=not violations,
        violations=violations,
    )


@dataclass
class CyclicInverseReport:
    n: int
    length: int
    nonbasis: list[Sequence]
    holds: bool

    def to_payload(self) -> dict:
        return {
            "n": self.n,
            "length": self.length,
            "nonbasis_count": len(self.nonbasis),
            "nonbasis": [s.to_json() for s in self.nonbasis],
            "holds": self.holds,
        }


def cyclic_inverse_check(n: int, *, budget_seconds: float | None = None) -> CyclicInverseReport:
    """Regular length-(n-1) sequences over C_n that are not bases are exactly
    the sequences g^(n-1) with g a generator.  Enumerates all of them."""
    if not 2 <= n <= 30:
        raise PreconditionFailed(f"n must be in [2, 30] (got {n})")
    group = make_group([n])
    ticker = Ticker(budget_seconds, what=f"cyclic inverse check n={n}")
    nonbasis: list[Sequence] = []
    ok = True
    for idxs, sig in _iter_regular_fixed_length(
        group, n - 1, prune_saturated=True, ticker=ticker
    ):
        if sig == group.full_mask:
            continue
        seq = Sequence.from_indices(group, idxs)
        nonbasis.append(seq)
        distinct = set(idxs)
        if len(distinct) != 1 or group.order_of(group.element(idxs[0])) != n:
            ok = False
    return CyclicInverseReport(n=n, length=n - 1, nonbasis=nonbasis, holds=ok)


# -- stabilizer triviality gate ---------------------------------------------------------


@dataclass
class St0Report:
    applicable: bool
    reason: str | None
    holds: bool | None
    stabilizer_order: int | None
    length_threshold: int
    threshold_components: dict

    def to_payload(self) -> dict:
        return {
            "applicable": self.applicable,
            "reason": self.reason,
            "holds": self.holds,
            "stabilizer_order": self.stabilizer_order,
            "length_threshold": self.length_threshold,
            "threshold_components": self.threshold_components,
        }


def lemma_st0_check(seq: Sequence) -> St0Report:
    """For a regular sequence of length >= max(|G|/p + p - 2, D(G)) whose
    subset sums miss something, the stabilizer of the subset-sum set must be
    trivial.  Returns not-applicable when the gate fails."""
    group = seq.group
    p = group.smallest_prime
    try:
        dav = davenport(group, "formula")
    except FormulaUnavailable:
        dav = davenport(group, "bruteforce")
    comp = {"index_bound": group.order // p + p - 2, "davenport": dav}
    threshold = max(comp.values())

    def na(reason: str) -> St0Report:
        return St0Report(False, reason, None, None, threshold, comp)

    if not is_regular(seq):
        return na("sequence is not regular")
    if seq.length < threshold:
        return na(f"length {seq.length} below threshold {threshold}")
    sig = sigma_set(seq)
    if sig.bits == group.full_mask:
        return na("subset sums already cover the group")
    stab = stabilizer(sig)
    return St0Report(True, None, stab.is_trivial(), stab.order, threshold, comp)


# -- basis-lemma certificates ------------------------------------------------------------


@dataclass
class BasicLemmaCertificate:
    """Evidence that a regular length-(3q+3) sequence over C_3 + C_{3q} is a basis.

    variant "i":  h_prime with all subset sums of the restricted sequence
                  filling h_prime exactly.
    variant "ii": s_prime, h_prime, shift: subset sums of s_prime cover
                  shift + h_prime and the counting inequality holds.
    variant "iii": no extra data; the torsion-part product must vanish.
    """

    variant: str
    h_prime: Subgroup | None = None
    s_prime: Sequence | None = None
    shift: Element | None = None


@dataclass
class CertificateResult:
    accepted: bool
    variant: str
    reason: str | None
    basis: bool | None
    contradicts_conclusion: bool
    details: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {
            "accepted": self.accepted,
            "variant": self.variant,
            "reason": self.reason,
            "basis": self.basis,
            "contradicts_conclusion": self.contradicts_conclusion,
            "details": self.details,
        }


def _group_shape_3_3q(group: AbelianGroup) -> int:
    f = group.invariant_factors
    if len(f) != 2 or f[0] != 3 or f[1] % 3 != 0:
        raise PreconditionFailed(f"group must be C_3 + C_3q, got {group.literal}")
    q = f[1] // 3
    if q < 5 or not is_prime(q):
        raise PreconditionFailed(f"q must be a prime >= 5, got {q}")
    return q


def lemma_basic_check(seq: Sequence, cert: BasicLemmaCertificate) -> CertificateResult:
    """Check one sufficient condition for sigma(S) = G and, on acceptance,
    confirm the conclusion itself."""
    group = seq.group
    q = _group_shape_3_3q(group)
    ell = 3 * q + 3
    if seq.length != ell:
        raise PreconditionFailed(f"length must be {ell}, got {seq.length}")
    if not is_regular(seq):
        raise PreconditionFailed("sequence must be regular")

    def reject(reason: str, **details) -> CertificateResult:
        return CertificateResult(False, cert.variant, reason, None, False, details)

    def accept(**details) -> CertificateResult:
        basis = is_basis(seq)
        return CertificateResult(True, cert.variant, None, basis, not basis, details)

    if cert.variant == "i":
        if cert.h_prime is None:
            return reject("MissingSubgroup")
        if cert.h_prime.is_trivial():
            return reject("NontrivialityRequired")
        sig0 = sigma0_set(restrict(seq, cert.h_prime))
        if sig0.bits != cert.h_prime.bits:
            return reject(
                "SubsetSumsDoNotFillSubgroup",
                covered=sig0.cardinality,
                subgroup_order=cert.h_prime.order,
            )
        return accept(subgroup_order=cert.h_prime.order)

    if cert.variant == "ii":
        if cert.h_prime is None or cert.s_prime is None or cert.shift is None:
            return reject("MissingCertificateFields")
        if cert.h_prime.is_trivial():
            return reject("NontrivialityRequired")
        if not seq.contains_sub(cert.s_prime):
            return reject("NotASubsequence")
        shift_idx = group.index_of(group.reduce(cert.shift))
        coset = group.translate_bits(cert.h_prime.bits, shift_idx)
        sig0_sp = sigma0_set(cert.s_prime).bits
        if coset & ~sig0_sp:
            return reject("CosetNotCovered")
        rest = seq.remove(cert.s_prime)
        covered = group.sumset_bits(coset, sigma_bits(group, rest.indices()) | 1)
        m_sub = stabilizer(ElementSet(group, covered))
        s_m = restrict(seq, m_sub).length
        overlap = restrict(cert.s_prime, m_sub).length
        union_size = s_m + cert.s_prime.length - overlap
        lhs = (ell - union_size + 1) * m_sub.order
        rhs = 9 * q
        details = {
            "m_order": m_sub.order,
            "index_union_size": union_size,
            "lhs": lhs,
            "rhs": rhs,
        }
        if lhs < rhs:
            return reject("InequalityFails", **details)
        return accept(**details)

    if cert.variant == "iii":
        from .algebra import exists_vanishing_assignment

        torsion3 = 0
        part_q = 0
        for i in range(group.order):
            g = group.element(i)
            if group.scalar_mul(3, g) == group.zero():
                torsion3 |= 1 << i
            if group.scalar_mul(q, g) == group.zero():
                part_q |= 1 << i
        h_sub = Subgroup.from_bits(group, torsion3)
        k_sub = Subgroup.from_bits(group, part_q)
        s_hk = restrict(seq, h_sub).concat(restrict(seq, k_sub))
        if s_hk.length == 0:
            return reject("NoTermsInTorsionParts")
        assignment = exists_vanishing_assignment(s_hk)
        if assignment is None:
            return reject("NoVanishingAssignment", product_length=s_hk.length)
        return accept(
            product_length=s_hk.length,
            assignment=assignment.to_json(),
        )

    raise PreconditionFailed(f"unknown certificate variant {cert.variant!r}")


# -- the extremal construction -----------------------------------------------------------


@dataclass
class ExtremalReport:
    q: int
    group: str
    sequence: Sequence
    length: int
    regular: bool
    target: Element
    target_missing: bool
    missing: list[Element]
    c0_lower_bound: int
    ok: bool

    def to_payload(self) -> dict:
        return {
            "q": self.q,
            "group": self.group,
            "sequence": self.sequence.to_json(),
            "lower_bound_length": self.length,
            "regular": self.regular,
            "target": list(self.target),
            "target_missing": self.target_missing,
            "missing": [list(g) for g in self.missing],
            "c0_lower_bound": self.c0_lower_bound,
            "ok": self.ok,
        }


def verify_extremal(q: int) -> ExtremalReport:
    """Build (0,1)^(3q-2) (1,-1)^4 over C_3 + C_{3q}: length 3q+2, regular,
    and (2, 3q-3) is not a subset sum.  Hence c0 >= 3q+3."""
    if q < 5 or not is_prime(q):
        raise PreconditionFailed(f"q must be a prime >= 5, got {q}")
    group = make_group([3, 3 * q])
    seq = Sequence.from_terms(group, [(0, 1)] * (3 * q - 2) + [(1, -1)] * 4)
    regular = is_regular(seq)
    target = group.reduce((2, 3 * q - 3))
    miss = missing_elements(seq)
    target_missing = target in miss
    return ExtremalReport(
        q=q,
        group=group.literal,
        sequence=seq,
        length=seq.length,
        regular=regular,
        target=target,
        target_missing=target_missing,
        missing=list(miss.elements()),
        c0_lower_bound=3 * q + 3,
        ok=regular and seq.length == 3 * q + 2 and target_missing,
    )


# -- Monte Carlo falsification ------------------------------------------------------------


@dataclass
class MonteCarloReport:
    group: str
    q: int
    length: int
    trials_run: int
    seed: int
    counterexamples: list[dict]
    planted: dict | None
    holds: bool

    def to_payload(self) -> dict:
        return {
            "group": self.group,
            "q": self.q,
            "length": self.length,
            "trials_run": self.trials_run,
            "seed": self.seed,
            "counterexamples": self.counterexamples,
            "planted": self.planted,
            "holds": self.holds,
        }


_MC_STATE: dict = {}


def _mc_init(literal: str, length: int, seed: int):
    group = AbelianGroup.from_literal(literal)
    regularity_tables(group)
    _MC_STATE.update(group=group, length=length, seed=seed)


def _mc_task(bounds: tuple[int, int]) -> list[dict]:
    group = _MC_STATE["group"]
    length = _MC_STATE["length"]
    seed = _MC_STATE["seed"]
    out = []
    for i in range(*bounds):
        seq = random_regular(group, length, seed + i)
        if not is_basis(seq):
            out.append(_counterexample_record(i, seq))
    return out


def _counterexample_record(trial, seq: Sequence) -> dict:
    return {
        "trial": trial,
        "sequence": seq.to_json(),
        "missing": [list(g) for g in missing_elements(seq).elements()],
    }


def monte_carlo_theorem(
    q: int,
    trials: int,
    seed: int,
    *,
    length: int | None = None,
    plant: Sequence | None = None,
    workers: int = 1,
) -> MonteCarloReport:
    """Sample regular sequences of the target length (default 3q+3) over
    C_3 + C_{3q}; every non-basis sample is a counterexample and is reported
    in full.  Trial i uses seed + i, so runs are reproducible and worker
    counts cannot change the payload.  A planted sequence is checked
    alongside the trials to prove the harness can detect a failure."""
    if q < 5 or not is_prime(q):
        raise PreconditionFailed(f"q must be a prime >= 5, got {q}")
    group = make_group([3, 3 * q])
    length = length if length is not None else 3 * q + 3
    counterexamples: list[dict] = []
    if workers > 1 and trials > 0:
        chunk = max(1, trials // (workers * 8))
        bounds = [(i, min(i + chunk, trials)) for i in range(0, trials, chunk)]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers, initializer=_mc_init, initargs=(group.literal, length, seed)) as pool:
            for part in pool.imap(_mc_task, bounds, chunksize=1):
                counterexamples.extend(part)
        counterexamples.sort(key=lambda r: r["trial"])
    else:
        _mc_init(group.literal, length, seed)
        counterexamples = _mc_task((0, trials))
    planted = None
    if plant is not None:
        if plant.group != group:
            raise PreconditionFailed("planted sequence is over the wrong group")
        planted = {
            "is_counterexample": not is_basis(plant),
            "record": _counterexample_record("planted", plant),
        }
    return MonteCarloReport(
        group=group.literal,
        q=q,
        length=length,
        trials_run=trials,
        seed=seed,
        counterexamples=counterexamples,
        planted=planted,
        holds=not counterexamples,
    )


# -- group pool for fuzzing ----------------------------------------------------------------


def small_group_pool(max_order: int) -> list[AbelianGroup]:
    """Every finite abelian group of order <= max_order, one per isomorphism
    class, as invariant-factor chains."""
    groups = []
    for order in range(2, max_order + 1):
        for chain in _divisor_chains(order):
            groups.append(AbelianGroup(chain))
    return groups


def _divisor_chains(order: int) -> list[tuple[int, ...]]:
    """All chains n_1 | n_2 | ... with product = order, each n_i >= 2."""
    out = []
    for n1 in range(2, order + 1):
        if order % n1:
            continue
        rest = order // n1
        if rest == 1:
            out.append((n1,))
            continue
        for tail in _divisor_chains(rest):
            if tail[0] % n1 == 0:
                out.append((n1, *tail))
    return out
