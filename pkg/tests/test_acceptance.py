"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete.  Every criterion is exact (no tolerances); the stated wall-clock
budgets are asserted as well.
"""

import random
import time

from conftest import pooled_group
from oracles import subset_sums_bruteforce, vanishing_assignment_exists_bruteforce
from zslab.algebra import (
    VanishingAssignment,
    VanishingProduct,
    exists_vanishing_assignment,
    find_covered_coset,
    nonvanishing_witness_search,
)
from zslab.cli import parse_and_run
from zslab.groups import ElementSet, make_group
from zslab.invariants import (
    c0_exact,
    cyclic_inverse_check,
    davenport,
    kneser_check,
    lemma_st0_check,
    rank2_inverse_check,
    small_group_pool,
    verify_extremal,
)
from zslab.sequences import Sequence, sigma_set


def _report(num, desc, ok, elapsed, limit):
    status = "PASS" if (ok and elapsed < limit) else "FAIL"
    print(f"ACCEPTANCE {num:02d} [{elapsed:7.2f}s / {limit:.0f}s] {desc}: {status}")
    assert ok, f"criterion {num} failed: {desc}"
    assert elapsed < limit, f"criterion {num} exceeded its {limit}s budget ({elapsed:.1f}s)"


def test_criterion_01_lower_bound_construction():
    ok = True
    t0 = time.monotonic()
    for q in (5, 7, 11, 13):
        t = time.monotonic()
        code, report = parse_and_run(["verify-paper", "--q", str(q)])
        single = time.monotonic() - t
        res = report["result"]
        ok &= code == 0
        ok &= res["lower_bound_length"] == 3 * q + 2
        ok &= res["regular"] is True
        ok &= [2, 3 * q - 3] in res["missing"]
        ok &= single < 1.0
    _report(1, "regular length-(3q+2) sequence misses (2, 3q-3) for q in {5,7,11,13}", ok, time.monotonic() - t0, 4.0)


def test_criterion_02_exact_c0_small():
    t0 = time.monotonic()
    ok = c0_exact(make_group([2, 2])) == 3 and c0_exact(make_group([3, 3])) == 5
    _report(2, "c0(C2+C2) = 3 and c0(C3+C3) = 5", ok, time.monotonic() - t0, 60.0)


def test_criterion_03_exact_c0_c5c5():
    t0 = time.monotonic()
    value = c0_exact(make_group([5, 5]), workers=2)
    _report(3, "c0(C5+C5) = 9 with automorphism reduction", value == 9, time.monotonic() - t0, 1800.0)


def test_criterion_04_davenport_agreement():
    t0 = time.monotonic()
    groups = [g for g in small_group_pool(36) if g.rank <= 2]
    ok = len(groups) >= 12
    for group in groups:
        if group.rank == 2:
            ok &= davenport(group, "bruteforce") == sum(group.invariant_factors) - 1
        else:
            ok &= davenport(group, "bruteforce") == group.order == davenport(group, "formula")
    _report(4, f"Davenport brute force equals n1+n2-1 on all {len(groups)} rank<=2 groups of order <= 36", ok, time.monotonic() - t0, 300.0)


def test_criterion_05_nonvanishing_witness_lengths():
    t0 = time.monotonic()
    c3c3 = make_group([3, 3])
    c2c4 = make_group([2, 4])
    ok = (
        nonvanishing_witness_search(c3c3, 4) is not None
        and nonvanishing_witness_search(c3c3, 5) is None
        and nonvanishing_witness_search(c2c4, 4) is not None
        and nonvanishing_witness_search(c2c4, 5) is None
    )
    _report(5, "length-4 nonvanishing witnesses exist, length-5 never (C3+C3 and C2+C4)", ok, time.monotonic() - t0, 300.0)


def test_criterion_06_monte_carlo_length_18():
    t0 = time.monotonic()
    code, report = parse_and_run(["monte-carlo", "--q", "5", "--trials", "10000", "--seed", "42"])
    res = report["result"]
    ok = code == 0 and res["length"] == 18 and res["trials_run"] == 10000 and res["counterexamples"] == []
    _report(6, "10^4 random regular length-18 sequences over C3+C15 are all bases (seed 42)", ok, time.monotonic() - t0, 300.0)


def test_criterion_07_kneser_fuzz():
    t0 = time.monotonic()
    code, report = parse_and_run(["kneser-fuzz", "--trials", "10000", "--seed", "42", "--max-order", "48"])
    ok = code == 0 and report["result"]["holds"] and report["result"]["trials"] == 10000
    _report(7, "sumset inequality holds on 10^4 random instances (order <= 48, r <= 4)", ok, time.monotonic() - t0, 120.0)


def test_criterion_08_covered_cosets():
    t0 = time.monotonic()
    group = pooled_group((3, 15))
    rng = random.Random(42)
    done = 0
    ok = True
    while done < 1000:
        length = rng.randrange(2, 16)
        seq = Sequence.from_indices(group, [rng.randrange(1, 45) for _ in range(length)])
        kills = tuple(rng.randrange(0, 15) if rng.random() < 0.4 else None for _ in range(length))
        try:
            g0, sub = find_covered_coset(seq, VanishingAssignment(kills))
        except VanishingProduct:
            continue
        done += 1
        coset = group.translate_bits(sub.bits, group.index_of(g0))
        ok &= (coset & ~1) & ~sigma_set(seq).bits == 0
    _report(8, "10^3 random nonzero products over C3+C15: coset always found and contained", ok, time.monotonic() - t0, 300.0)


def test_criterion_09_oracle_equivalence():
    t0 = time.monotonic()
    rng = random.Random(42)
    pool = [g for g in small_group_pool(48)]
    ok = True
    for _ in range(500):
        group = rng.choice(pool)
        length = rng.randrange(0, 16)
        seq = Sequence.from_indices(group, [rng.randrange(0, group.order) for _ in range(length)])
        ok &= set(sigma_set(seq).elements()) == subset_sums_bruteforce(seq)
    small = [g for g in pool if g.exponent <= 6]
    for _ in range(200):
        group = rng.choice(small)
        length = rng.randrange(1, 6)
        seq = Sequence.from_indices(group, [rng.randrange(0, group.order) for _ in range(length)])
        ok &= (exists_vanishing_assignment(seq) is not None) == vanishing_assignment_exists_bruteforce(seq)
    _report(9, "subset sums match 2^n enumeration (500x); cover search matches assignment brute force (200x)", ok, time.monotonic() - t0, 300.0)


def test_criterion_10_inverse_theorems():
    t0 = time.monotonic()
    ok = all(cyclic_inverse_check(n).holds for n in range(2, 13))
    rep = rank2_inverse_check(3)
    ok &= rep.holds and rep.min_sigma0_size >= 8
    _report(10, "cyclic inverse theorem for n <= 12; |sigma0| >= 8 for regular length-4 over C3+C3", ok, time.monotonic() - t0, 600.0)


def test_criterion_11_stabilizer_of_extremal_sums():
    t0 = time.monotonic()
    rep = lemma_st0_check(verify_extremal(5).sequence)
    ok = rep.applicable and rep.holds and rep.stabilizer_order == 1
    _report(11, "st(sigma(S)) is trivial for the q=5 extremal sequence", ok, time.monotonic() - t0, 1.0)
