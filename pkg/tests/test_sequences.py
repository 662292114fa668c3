import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import group_strategy, pooled_group
from oracles import has_zero_sum_subsequence, subset_sums_bruteforce
from zslab.groups import InvalidElement, make_group
from zslab.invariants import max_regular_length
from zslab.sequences import (
    RetryBudgetExceeded,
    Sequence,
    is_basis,
    is_regular,
    missing_elements,
    random_regular,
    restrict,
    sigma0_set,
    sigma_set,
    sigma_sum,
    violating_subgroup,
)


def extremal_sequence(q):
    group = make_group([3, 3 * q])
    return Sequence.from_terms(group, [(0, 1)] * (3 * q - 2) + [(1, -1)] * 4)


def random_sequence(rng, group, length, allow_zero=True):
    lo = 0 if allow_zero else 1
    return Sequence.from_indices(group, [rng.randrange(lo, group.order) for _ in range(length)])


# -- construction ----------------------------------------------------------------


def test_from_terms_reduces_coordinates(c3c15):
    s = Sequence.from_terms(c3c15, [(1, -1), (4, 29)])
    assert s.count((1, 14)) == 2
    assert s.length == 2


def test_multiplicity_vector_validation(c3c15):
    with pytest.raises(InvalidElement):
        Sequence(c3c15, (1,) * 44)
    with pytest.raises(InvalidElement):
        Sequence(c3c15, (-1,) + (0,) * 44)


def test_json_roundtrip_both_forms(c3c15):
    s = Sequence.from_terms(c3c15, [(0, 1), (0, 1), (1, 14)])
    compact = s.to_json()
    assert compact["length"] == 3
    assert Sequence.from_json(compact) == s
    verbose = {"group": "3,15", "terms": [[0, 1], [0, 1], [1, 14]]}
    assert Sequence.from_json(verbose) == s
    with pytest.raises(InvalidElement):
        Sequence.from_json({"group": "3,3", "terms": []}, group=c3c15)
    with pytest.raises(InvalidElement):
        Sequence.from_json({"group": "3,15"})


def test_multiset_algebra(c3c15):
    s = Sequence.from_terms(c3c15, [(0, 1), (0, 1), (1, 0)])
    t = Sequence.from_terms(c3c15, [(0, 1)])
    assert s.contains_sub(t)
    assert s.remove(t).length == 2
    assert s.concat(t).count((0, 1)) == 3
    with pytest.raises(InvalidElement):
        t.remove(s)


# -- sums ---------------------------------------------------------------------------


def test_sigma_sum_examples(c3c15):
    assert sigma_sum(Sequence.empty(c3c15)) == (0, 0)
    assert sigma_sum(Sequence.from_terms(c3c15, [(1, 2), (2, 13)])) == (0, 0)
    g = (1, 2)
    assert sigma_sum(Sequence.from_terms(c3c15, [g] * 7)) == c3c15.scalar_mul(7, g)


def test_sigma_set_single_term(c3c15):
    assert sigma_set(Sequence.from_terms(c3c15, [(1, 2)])).elements() == ((1, 2),)


def test_sigma_set_generator_power_over_cyclic():
    group = make_group([11])
    s = Sequence.from_terms(group, [(1,)] * 10)
    assert sigma_set(s).cardinality == 10
    assert (0,) not in sigma_set(s)


def test_sigma_set_extremal_misses_target():
    s = extremal_sequence(5)
    assert (2, 12) not in sigma_set(s)


def test_sigma0_examples(c3c15):
    assert sigma0_set(Sequence.empty(c3c15)).elements() == ((0, 0),)
    g = (0, 5)  # order 3
    s = Sequence.from_terms(make_group([2, 2]), [(1, 0)])
    assert sigma0_set(s).elements() == ((0, 0), (1, 0))


def test_sigma0_fills_planted_subgroup(c3c15):
    # (0,5) and (0,10) generate the order-3 subgroup; their subset sums plus 0
    # cover it exactly (checked against the mask-walk oracle).
    s = Sequence.from_terms(c3c15, [(0, 5), (0, 10)])
    h = c3c15.cyclic_subgroup((0, 5))
    assert sigma0_set(s).bits == h.bits
    assert subset_sums_bruteforce(s) | {(0, 0)} == set(h.members.elements())


@given(group_strategy(), st.data())
@settings(max_examples=80, deadline=None)
def test_sigma_set_matches_mask_walk_oracle(group, data):
    length = data.draw(st.integers(0, 8))
    idxs = data.draw(st.lists(st.integers(0, group.order - 1), min_size=length, max_size=length))
    seq = Sequence.from_indices(group, idxs)
    assert set(sigma_set(seq).elements()) == subset_sums_bruteforce(seq)


@given(group_strategy(), st.data())
@settings(max_examples=60, deadline=None)
def test_sigma_monotone_under_extension(group, data):
    idxs = data.draw(st.lists(st.integers(0, group.order - 1), max_size=8))
    g = data.draw(st.integers(0, group.order - 1))
    seq = Sequence.from_indices(group, idxs)
    ext = seq.append(group.element(g))
    sig, sig_ext = sigma_set(seq), sigma_set(ext)
    assert sig.bits & ~sig_ext.bits == 0
    shifted = sigma0_set(seq).translate(group.element(g))
    assert sig_ext.bits == sig.bits | shifted.bits


def test_zero_in_sigma_iff_zero_sum_subsequence(rng):
    for _ in range(120):
        group = pooled_group(rng.choice([(8,), (2, 6), (3, 9), (2, 2, 4)]))
        seq = random_sequence(rng, group, rng.randrange(0, 9))
        assert ((0,) * group.rank in sigma_set(seq)) == has_zero_sum_subsequence(seq)


# -- restriction and regularity -----------------------------------------------------


def test_restrict_extremal_to_cyclic_part():
    s = extremal_sequence(5)
    h = s.group.cyclic_subgroup((0, 1))
    r = restrict(s, h)
    assert r.length == 13
    assert r.count((0, 1)) == 13


def test_restrict_whole_and_trivial(c3c15):
    s = Sequence.from_terms(c3c15, [(0, 0), (1, 2), (1, 2)])
    assert restrict(s, c3c15.full_subgroup()) == s
    assert restrict(s, c3c15.trivial_subgroup()).length == 1


@given(group_strategy(), st.data())
@settings(max_examples=40, deadline=None)
def test_restrict_length_is_membership_count(group, data):
    idxs = data.draw(st.lists(st.integers(0, group.order - 1), max_size=10))
    seq = Sequence.from_indices(group, idxs)
    for sub in group.all_subgroups():
        expected = sum(1 for i in idxs if (sub.bits >> i) & 1)
        assert restrict(seq, sub).length == expected


def test_extremal_is_regular():
    for q in (5, 7):
        assert is_regular(extremal_sequence(q))


def test_regularity_violation_is_minimal_order(c3c15):
    s = Sequence.from_terms(c3c15, [(0, 1)] * 15)
    bad = violating_subgroup(s)
    assert bad is not None
    assert bad.order == 15
    assert (0, 1) in bad


def test_empty_sequence_is_regular(c3c15):
    assert is_regular(Sequence.empty(c3c15))


def test_zero_term_violates_at_trivial_subgroup(c3c15):
    s = Sequence.from_terms(c3c15, [(0, 0)])
    bad = violating_subgroup(s)
    assert bad is not None and bad.order == 1


def test_regularity_is_hereditary(rng):
    # every way of deleting terms from a regular sequence stays regular
    group = pooled_group((3, 15))
    for _ in range(40):
        seq = random_regular(group, 14, seed=rng.randrange(10**9))
        idxs = seq.indices()
        rng.shuffle(idxs)
        keep = idxs[: rng.randrange(0, len(idxs))]
        assert is_regular(Sequence.from_indices(group, keep))


# -- basis ------------------------------------------------------------------------


def test_extremal_is_not_a_basis():
    s = extremal_sequence(5)
    assert not is_basis(s)
    assert missing_elements(s).elements() == ((2, 12),)


def test_full_generator_power_is_basis():
    group = make_group([9])
    assert is_basis(Sequence.from_terms(group, [(1,)] * 9))


def test_single_term_is_not_a_basis(c3c15):
    assert not is_basis(Sequence.from_terms(c3c15, [(1, 1)]))


# -- sampling ----------------------------------------------------------------------


def test_random_regular_contract(c3c15):
    s = random_regular(c3c15, 18, seed=1)
    assert s.length == 18
    assert is_regular(s)


def test_random_regular_is_deterministic(c3c15):
    a = random_regular(c3c15, 18, seed=7)
    b = random_regular(c3c15, 18, seed=7)
    assert a == b
    assert a != random_regular(c3c15, 18, seed=8)


def test_random_regular_retry_budget(c3c3):
    # No regular sequence of length 9 exists over C3+C3: the exhaustive
    # maximum is 8 (4 proper nontrivial subgroups, at most 2 terms each).
    assert max_regular_length(c3c3) == 8
    with pytest.raises(RetryBudgetExceeded):
        random_regular(c3c3, 9, seed=0, max_restarts=2000)
