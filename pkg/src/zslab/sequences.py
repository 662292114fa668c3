"""Sequences (multisets) over a finite abelian group and their subset sums.

A sequence is stored as a multiplicity vector indexed by element index; term
order never matters for any operation here.  Subset-sum sets are computed by
the incremental bitset recurrence  A <- A | (g + (A | {0}))  per term, which
costs a few big-int operations per term.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .groups import (
    AbelianGroup,
    Element,
    ElementSet,
    InvalidElement,
    Subgroup,
    iter_bit_indices,
    make_group,
)

__all__ = [
    "RetryBudgetExceeded",
    "Sequence",
    "is_basis",
    "is_regular",
    "missing_elements",
    "random_regular",
    "restrict",
    "sigma0_set",
    "sigma_set",
    "sigma_sum",
    "violating_subgroup",
]

RANDOM_REGULAR_RESTARTS = 10**6


class RetryBudgetExceeded(RuntimeError):
    """random_regular gave up after the configured number of restarts."""


@dataclass(frozen=True)
class Sequence:
    """Multiset of group elements with a multiplicity vector of length |G|."""

    group: AbelianGroup
    multiplicity: tuple[int, ...]

    def __post_init__(self):
        if len(self.multiplicity) != self.group.order:
            raise InvalidElement(
                f"multiplicity vector has length {len(self.multiplicity)}, "
                f"expected {self.group.order}"
            )
        if any(m < 0 for m in self.multiplicity):
            raise InvalidElement("multiplicities must be non-negative")

    # -- construction -------------------------------------------------------

    @classmethod
    def empty(cls, group: AbelianGroup) -> "Sequence":
        return cls(group, (0,) * group.order)

    @classmethod
    def from_terms(cls, group: AbelianGroup, terms) -> "Sequence":
        """Terms are coordinate tuples; coordinates are reduced mod the factors."""
        mult = [0] * group.order
        for t in terms:
            mult[group.index_of(group.reduce(t))] += 1
        return cls(group, tuple(mult))

    @classmethod
    def from_indices(cls, group: AbelianGroup, indices) -> "Sequence":
        mult = [0] * group.order
        for i in indices:
            if not 0 <= i < group.order:
                raise InvalidElement(f"index {i} out of range")
            mult[i] += 1
        return cls(group, tuple(mult))

    @classmethod
    def from_multiplicity_map(cls, group: AbelianGroup, counts: dict) -> "Sequence":
        mult = [0] * group.order
        for key, count in counts.items():
            i = int(key)
            if not 0 <= i < group.order:
                raise InvalidElement(f"index {i} out of range")
            if int(count) < 0:
                raise InvalidElement("multiplicities must be non-negative")
            mult[i] += int(count)
        return cls(group, tuple(mult))

    @classmethod
    def from_json(cls, obj: dict, group: AbelianGroup | None = None) -> "Sequence":
        """Accepts {"group", "terms": [[..], ..]} or {"group", "multiplicity": {idx: n}}."""
        if "group" in obj:
            parsed = make_group([int(t) for t in str(obj["group"]).split(",")])
            if group is not None and parsed != group:
                raise InvalidElement(
                    f"sequence group {obj['group']!r} does not match {group.literal!r}"
                )
            group = parsed
        if group is None:
            raise InvalidElement("sequence JSON needs a 'group' field")
        if "terms" in obj:
            return cls.from_terms(group, obj["terms"])
        if "multiplicity" in obj:
            return cls.from_multiplicity_map(group, obj["multiplicity"])
        raise InvalidElement("sequence JSON needs 'terms' or 'multiplicity'")

    def to_json(self) -> dict:
        """Compact form: multiplicity map plus length."""
        return {
            "group": self.group.literal,
            "multiplicity": {str(i): m for i, m in enumerate(self.multiplicity) if m},
            "length": self.length,
        }

    # -- views ---------------------------------------------------------------

    @property
    def length(self) -> int:
        return sum(self.multiplicity)

    def __len__(self):
        return self.length

    def indices(self) -> list[int]:
        """Element indices with repetition, ascending (the canonical term order)."""
        out = []
        for i, m in enumerate(self.multiplicity):
            out.extend([i] * m)
        return out

    def terms(self) -> list[Element]:
        return [self.group.element(i) for i in self.indices()]

    def support_bits(self) -> int:
        bits = 0
        for i, m in enumerate(self.multiplicity):
            if m:
                bits |= 1 << i
        return bits

    def count(self, element) -> int:
        return self.multiplicity[self.group.index_of(element)]

    # -- multiset algebra ------------------------------------------------------

    def append(self, element) -> "Sequence":
        i = self.group.index_of(self.group.reduce(element))
        mult = list(self.multiplicity)
        mult[i] += 1
        return Sequence(self.group, tuple(mult))

    def concat(self, other: "Sequence") -> "Sequence":
        self._same_group(other)
        return Sequence(self.group, tuple(a + b for a, b in zip(self.multiplicity, other.multiplicity)))

    def contains_sub(self, other: "Sequence") -> bool:
        self._same_group(other)
        return all(a >= b for a, b in zip(self.multiplicity, other.multiplicity))

    def remove(self, other: "Sequence") -> "Sequence":
        """S with the sub-multiset deleted (the quotient S . other^-1)."""
        if not self.contains_sub(other):
            raise InvalidElement("not a sub-multiset")
        return Sequence(self.group, tuple(a - b for a, b in zip(self.multiplicity, other.multiplicity)))

    def _same_group(self, other: "Sequence") -> None:
        if self.group != other.group:
            raise InvalidElement("sequences over different groups")


# -- subset sums ---------------------------------------------------------------


def sigma_sum(seq: Sequence) -> Element:
    """The sum of all terms (zero for the empty sequence)."""
    g = seq.group
    total = g.zero()
    for i, m in enumerate(seq.multiplicity):
        if m:
            total = g.add(total, g.scalar_mul(m, g.element(i)))
    return total


def sigma_bits(group: AbelianGroup, indices) -> int:
    """Bitset of sums over nonempty sub-multisets, fed one term at a time."""
    acc = 0
    for i in indices:
        acc |= group.translate_bits(acc | 1, i)
    return acc


def sigma_set(seq: Sequence) -> ElementSet:
    """All sums of nonempty subsequences."""
    return ElementSet(seq.group, sigma_bits(seq.group, seq.indices()))


def sigma0_set(seq: Sequence) -> ElementSet:
    """sigma_set with the zero element added."""
    return ElementSet(seq.group, sigma_bits(seq.group, seq.indices()) | 1)


def restrict(seq: Sequence, subgroup: Subgroup) -> Sequence:
    """Sub-multiset of the terms lying in the subgroup."""
    mult = list(seq.multiplicity)
    bits = subgroup.bits
    return Sequence(seq.group, tuple(m if (bits >> i) & 1 else 0 for i, m in enumerate(mult)))


def _restricted_length(seq: Sequence, bits: int) -> int:
    return sum(m for i, m in enumerate(seq.multiplicity) if (bits >> i) & 1)


def violating_subgroup(seq: Sequence) -> Subgroup | None:
    """The regularity violation of minimal order, or None if the sequence is regular.

    Ties are broken by the lexicographically smallest member index tuple; this
    is the order all_subgroups already returns.
    """
    for h in seq.group.proper_subgroups():
        if _restricted_length(seq, h.bits) > h.order - 1:
            return h
    return None


def is_regular(seq: Sequence) -> bool:
    """At most |H|-1 terms inside every proper subgroup H."""
    return violating_subgroup(seq) is None


def is_basis(seq: Sequence) -> bool:
    """Whether every group element is the sum of some nonempty subsequence."""
    return sigma_bits(seq.group, seq.indices()) == seq.group.full_mask


def missing_elements(seq: Sequence) -> ElementSet:
    return sigma_set(seq).complement()


# -- sampling --------------------------------------------------------------------


def regularity_tables(group: AbelianGroup):
    """(limits, ids-per-element) for the proper nontrivial subgroups, cached.

    limits[j] = |H_j| - 1 and ids[e] lists the subgroups containing element e.
    The trivial subgroup is handled separately: any zero term is a violation.
    """
    cached = group._cache.get("regularity_tables")
    if cached is not None:
        return cached
    proper = [h for h in group.proper_subgroups() if h.order > 1]
    limits = [h.order - 1 for h in proper]
    ids: list[tuple[int, ...]] = []
    for e in range(group.order):
        ids.append(tuple(j for j, h in enumerate(proper) if (h.bits >> e) & 1))
    tables = (limits, ids)
    group._cache["regularity_tables"] = tables
    return tables


def _indices_regular(group: AbelianGroup, idxs) -> bool:
    limits, ids = regularity_tables(group)
    counts = [0] * len(limits)
    for e in idxs:
        if e == 0:
            return False
        for j in ids[e]:
            counts[j] += 1
            if counts[j] > limits[j]:
                return False
    return True


def random_regular(
    group: AbelianGroup,
    length: int,
    seed: int,
    max_restarts: int = RANDOM_REGULAR_RESTARTS,
) -> Sequence:
    """Rejection-sample a regular sequence: draw nonzero terms uniformly,
    restart whenever regularity fails.  Deterministic for a given seed."""
    if length < 0:
        raise InvalidElement("length must be non-negative")
    rng = random.Random(seed)
    n = group.order
    for _ in range(max_restarts):
        idxs = [rng.randrange(1, n) for _ in range(length)]
        if _indices_regular(group, idxs):
            return Sequence.from_indices(group, idxs)
    raise RetryBudgetExceeded(
        f"no regular sequence of length {length} over {group.literal} "
        f"after {max_restarts} restarts"
    )
