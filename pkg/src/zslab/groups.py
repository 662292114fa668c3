"""Finite abelian groups in invariant-factor form, with int-bitset element sets.

Elements are coordinate tuples reduced modulo the invariant factors.  Every
element also carries a mixed-radix index in [0, order), least significant
coordinate first, and subsets of the group are stored as plain Python ints
used as bitsets over those indices.  Translating a bitset by a group element
is a handful of masked shifts (one block rotation per nonzero coordinate),
which keeps sumset and subset-sum arithmetic at a few big-int operations per
call even inside deep search loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm, prod

__all__ = [
    "AbelianGroup",
    "Element",
    "ElementSet",
    "EnumerationBudgetExceeded",
    "InvalidElement",
    "InvalidGroup",
    "SUBGROUP_ENUMERATION_BOUND",
    "Subgroup",
    "invariant_factors_of",
    "iter_bit_indices",
    "make_group",
]

Element = tuple  # coordinate tuple, one entry per invariant factor

SUBGROUP_ENUMERATION_BOUND = 10_000


class InvalidGroup(ValueError):
    """Moduli list does not describe a nontrivial finite abelian group."""


class InvalidElement(ValueError):
    """Coordinates or index outside the group."""


class EnumerationBudgetExceeded(RuntimeError):
    """Subgroup-lattice enumeration refused: group order above the configured bound."""


def iter_bit_indices(bits: int):
    """Yield the indices of set bits, ascending."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def _prime_power_parts(m: int) -> list[tuple[int, int]]:
    """(prime, prime power) components of m, e.g. 360 -> [(2,8),(3,9),(5,5)]."""
    parts = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            q = 1
            while m % d == 0:
                q *= d
                m //= d
            parts.append((d, q))
        d += 1
    if m > 1:
        parts.append((m, m))
    return parts


def invariant_factors_of(moduli) -> tuple[int, ...]:
    """Normalize a list of cyclic orders into the divisor chain n_1 | ... | n_r.

    The k-th largest prime-power component of each prime goes into the
    k-th-from-last invariant factor.
    """
    by_prime: dict[int, list[int]] = {}
    for m in moduli:
        for p, q in _prime_power_parts(m):
            by_prime.setdefault(p, []).append(q)
    rank = max((len(v) for v in by_prime.values()), default=0)
    factors_desc = []
    for k in range(rank):
        f = 1
        for powers in by_prime.values():
            powers.sort(reverse=True)
            if k < len(powers):
                f *= powers[k]
        factors_desc.append(f)
    return tuple(reversed(factors_desc))


def make_group(moduli, enumeration_bound: int = SUBGROUP_ENUMERATION_BOUND) -> "AbelianGroup":
    """Build the direct sum of C_m for m in moduli, in invariant-factor form.

    Entries equal to 1 are dropped; an empty or all-1 list is rejected.
    """
    try:
        parsed = [int(m) for m in moduli]
    except (TypeError, ValueError) as exc:
        raise InvalidGroup(f"moduli must be integers, got {moduli!r}") from exc
    if not parsed:
        raise InvalidGroup("empty moduli list")
    if any(m < 1 for m in parsed):
        raise InvalidGroup(f"moduli must be >= 1, got {parsed}")
    parsed = [m for m in parsed if m > 1]
    if not parsed:
        raise InvalidGroup("trivial group (all moduli equal to 1)")
    return AbelianGroup(invariant_factors_of(parsed), enumeration_bound=enumeration_bound)


class AbelianGroup:
    """The group ⊕ C_{n_i} with n_1 | n_2 | ... | n_r and mixed-radix element codec."""

    def __init__(self, invariant_factors, enumeration_bound: int = SUBGROUP_ENUMERATION_BOUND):
        factors = tuple(int(n) for n in invariant_factors)
        if not factors or any(n < 2 for n in factors):
            raise InvalidGroup(f"invariant factors must all be >= 2, got {factors}")
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise InvalidGroup(f"not a divisibility chain: {factors}")
        self.invariant_factors = factors
        self.rank = len(factors)
        self.order = prod(factors)
        self.exponent = factors[-1]
        self.enumeration_bound = enumeration_bound
        bases = []
        b = 1
        for n in factors:
            bases.append(b)
            b *= n
        self._bases = tuple(bases)
        self.full_mask = (1 << self.order) - 1
        self._rot_ops: dict[int, tuple] = {}
        self._subgroups: tuple[Subgroup, ...] | None = None
        self._cache: dict = {}  # cross-module memo space (tables, automorphisms, ...)

    # -- identity ---------------------------------------------------------

    def __repr__(self):
        return f"AbelianGroup({list(self.invariant_factors)})"

    def __eq__(self, other):
        return isinstance(other, AbelianGroup) and self.invariant_factors == other.invariant_factors

    def __hash__(self):
        return hash(self.invariant_factors)

    @classmethod
    def from_literal(cls, text: str) -> "AbelianGroup":
        """Parse the CLI literal form, e.g. "3,15"."""
        items = [t.strip() for t in str(text).split(",") if t.strip() != ""]
        if not items:
            raise InvalidGroup(f"empty group literal {text!r}")
        try:
            moduli = [int(t) for t in items]
        except ValueError as exc:
            raise InvalidGroup(f"bad group literal {text!r}") from exc
        return make_group(moduli)

    @property
    def literal(self) -> str:
        return ",".join(str(n) for n in self.invariant_factors)

    @property
    def smallest_prime(self) -> int:
        """Smallest prime dividing the order (= smallest prime factor of n_1)."""
        n = self.invariant_factors[0]
        d = 2
        while d * d <= n:
            if n % d == 0:
                return d
            d += 1
        return n

    # -- element codec ----------------------------------------------------

    def zero(self) -> Element:
        return (0,) * self.rank

    def reduce(self, coords) -> Element:
        """Reduce arbitrary integer coordinates modulo the invariant factors."""
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise InvalidElement(f"expected {self.rank} coordinates, got {coords}")
        return tuple(int(c) % n for c, n in zip(coords, self.invariant_factors))

    def index_of(self, coords) -> int:
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise InvalidElement(f"expected {self.rank} coordinates, got {coords}")
        idx = 0
        for c, n, b in zip(coords, self.invariant_factors, self._bases):
            c = int(c)
            if not 0 <= c < n:
                raise InvalidElement(f"coordinate {c} out of range [0,{n}) in {coords}")
            idx += c * b
        return idx

    def element(self, index: int) -> Element:
        index = int(index)
        if not 0 <= index < self.order:
            raise InvalidElement(f"index {index} out of range [0,{self.order})")
        coords = []
        for n in self.invariant_factors:
            index, c = divmod(index, n)
            coords.append(c)
        return tuple(coords)

    def elements(self):
        """All elements in index order."""
        for i in range(self.order):
            yield self.element(i)

    # -- arithmetic ---------------------------------------------------------

    def add(self, g: Element, h: Element) -> Element:
        return tuple((a + b) % n for a, b, n in zip(g, h, self.invariant_factors))

    def neg(self, g: Element) -> Element:
        return tuple((-a) % n for a, n in zip(g, self.invariant_factors))

    def sub(self, g: Element, h: Element) -> Element:
        return tuple((a - b) % n for a, b, n in zip(g, h, self.invariant_factors))

    def scalar_mul(self, c: int, g: Element) -> Element:
        return tuple((c * a) % n for a, n in zip(g, self.invariant_factors))

    def order_of(self, g: Element) -> int:
        return lcm(*(n // gcd(n, a) for a, n in zip(g, self.invariant_factors)))

    def pairing(self, g: Element, chi: Element) -> int:
        """Exponent k in [0, exponent) such that chi(g) is the k-th power of a
        fixed primitive exponent-th root of unity.  Bilinear in both slots."""
        e = self.exponent
        self.index_of(g)
        self.index_of(chi)
        return sum((e // n) * a * b for a, b, n in zip(g, chi, self.invariant_factors)) % e

    # -- bitset machinery ---------------------------------------------------

    def _rot(self, index: int):
        ops = self._rot_ops.get(index)
        if ops is None:
            coords = self.element(index)
            built = []
            for i, c in enumerate(coords):
                if c == 0:
                    continue
                block = self._bases[i]
                period = block * self.invariant_factors[i]
                s = c * block
                t = period - s
                reps = self.order // period
                tile = ((1 << (reps * period)) - 1) // ((1 << period) - 1)
                mask_lo = ((1 << t) - 1) * tile
                mask_hi = (((1 << s) - 1) << t) * tile
                built.append((mask_lo, s, mask_hi, t))
            ops = tuple(built)
            self._rot_ops[index] = ops
        return ops

    def translate_bits(self, bits: int, index: int) -> int:
        """Bitset of {x + g : x in bits} where g is the element with this index."""
        for mask_lo, s, mask_hi, t in self._rot(index):
            bits = ((bits & mask_lo) << s) | ((bits & mask_hi) >> t)
        return bits

    def sumset_bits(self, a_bits: int, b_bits: int) -> int:
        """Bitset of {x + y : x in a, y in b}."""
        if a_bits.bit_count() < b_bits.bit_count():
            a_bits, b_bits = b_bits, a_bits
        acc = 0
        for i in iter_bit_indices(b_bits):
            acc |= self.translate_bits(a_bits, i)
        return acc

    def closure_bits(self, generator_indices) -> int:
        """Bitset of the subgroup generated by the given element indices."""
        bits = 1
        for gi in generator_indices:
            while True:
                nb = bits | self.translate_bits(bits, gi)
                if nb == bits:
                    break
                bits = nb
        return bits

    # -- subgroups ----------------------------------------------------------

    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, 1, 1, ())

    def full_subgroup(self) -> "Subgroup":
        return Subgroup.from_bits(self, self.full_mask)

    def cyclic_subgroup(self, g: Element) -> "Subgroup":
        bits = self.closure_bits([self.index_of(g)])
        return Subgroup(self, bits, bits.bit_count(), (g,) if g != self.zero() else ())

    def subgroup_from_generators(self, generators) -> "Subgroup":
        idxs = [self.index_of(g) for g in generators]
        return Subgroup.from_bits(self, self.closure_bits(idxs))

    def join(self, *subgroups: "Subgroup") -> "Subgroup":
        gens: list[int] = []
        for h in subgroups:
            if h.group is not self and h.group != self:
                raise InvalidElement("subgroup join across different groups")
            gens.extend(self.index_of(g) for g in h.generators)
        return Subgroup.from_bits(self, self.closure_bits(gens))

    def all_subgroups(self) -> tuple["Subgroup", ...]:
        """Every subgroup, found by join-closure from the cyclic subgroups.

        Deterministic order: ascending (order, member index tuple).
        """
        if self._subgroups is not None:
            return self._subgroups
        if self.order > self.enumeration_bound:
            raise EnumerationBudgetExceeded(
                f"group order {self.order} exceeds enumeration bound {self.enumeration_bound}"
            )
        known: dict[int, Subgroup] = {}
        for i in range(self.order):
            bits = self.closure_bits([i])
            if bits not in known:
                known[bits] = Subgroup.from_bits(self, bits)
        frontier = list(known.values())
        while frontier:
            fresh = []
            snapshot = list(known.values())
            for h in frontier:
                for k in snapshot:
                    jb = self.closure_bits(
                        [self.index_of(g) for g in h.generators + k.generators]
                    )
                    if jb not in known:
                        sub = Subgroup.from_bits(self, jb)
                        known[jb] = sub
                        fresh.append(sub)
            frontier = fresh
        subs = sorted(known.values(), key=lambda s: (s.order, s.member_indices()))
        self._subgroups = tuple(subs)
        return self._subgroups

    def proper_subgroups(self) -> tuple["Subgroup", ...]:
        return tuple(h for h in self.all_subgroups() if h.order < self.order)


@dataclass(frozen=True)
class ElementSet:
    """A subset of a group, stored as an int bitset over element indices."""

    group: AbelianGroup
    bits: int

    @classmethod
    def empty(cls, group: AbelianGroup) -> "ElementSet":
        return cls(group, 0)

    @classmethod
    def full(cls, group: AbelianGroup) -> "ElementSet":
        return cls(group, group.full_mask)

    @classmethod
    def from_elements(cls, group: AbelianGroup, elements) -> "ElementSet":
        bits = 0
        for g in elements:
            bits |= 1 << group.index_of(g)
        return cls(group, bits)

    @classmethod
    def from_indices(cls, group: AbelianGroup, indices) -> "ElementSet":
        bits = 0
        for i in indices:
            if not 0 <= i < group.order:
                raise InvalidElement(f"index {i} out of range")
            bits |= 1 << i
        return cls(group, bits)

    @property
    def cardinality(self) -> int:
        return self.bits.bit_count()

    def __len__(self):
        return self.cardinality

    def __contains__(self, item) -> bool:
        idx = item if isinstance(item, int) else self.group.index_of(item)
        return bool((self.bits >> idx) & 1)

    def __or__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.group, self.bits | other.bits)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.group, self.bits & other.bits)

    def indices(self) -> tuple[int, ...]:
        return tuple(iter_bit_indices(self.bits))

    def elements(self) -> tuple[Element, ...]:
        return tuple(self.group.element(i) for i in iter_bit_indices(self.bits))

    def complement(self) -> "ElementSet":
        return ElementSet(self.group, self.group.full_mask & ~self.bits)

    def translate(self, g: Element) -> "ElementSet":
        return ElementSet(self.group, self.group.translate_bits(self.bits, self.group.index_of(g)))

    def issubset(self, other: "ElementSet") -> bool:
        return self.bits & ~other.bits == 0

    def is_empty(self) -> bool:
        return self.bits == 0


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its member bitset, with a small generating set."""

    group: AbelianGroup
    bits: int
    order: int
    generators: tuple[Element, ...]

    @classmethod
    def from_bits(cls, group: AbelianGroup, bits: int, check: bool = False) -> "Subgroup":
        """Derive order and a greedy generating set from a member bitset.

        With check=True the bitset is verified to be closed (raises ValueError
        otherwise); the greedy span always equals the input for honest
        subgroups, so the check is a full-closure certificate.
        """
        if not bits & 1:
            raise ValueError("subgroup bitset must contain the zero element")
        span = 1
        gens: list[Element] = []
        for idx in iter_bit_indices(bits):
            if not (span >> idx) & 1:
                gens.append(group.element(idx))
                span = group.closure_bits([group.index_of(g) for g in gens])
        if span != bits:
            raise ValueError("bitset is not closed under the group operation")
        if check:
            cls._verify_closed(group, bits)
        return cls(group, bits, bits.bit_count(), tuple(gens))

    @staticmethod
    def _verify_closed(group: AbelianGroup, bits: int) -> None:
        if group.order % bits.bit_count():
            raise ValueError("subgroup order does not divide the group order")
        for i in iter_bit_indices(bits):
            if group.translate_bits(bits, i) != bits:
                raise ValueError(f"not closed under adding element {group.element(i)}")
            if not (bits >> group.index_of(group.neg(group.element(i)))) & 1:
                raise ValueError(f"not closed under negation at {group.element(i)}")

    @property
    def members(self) -> ElementSet:
        return ElementSet(self.group, self.bits)

    def member_indices(self) -> tuple[int, ...]:
        return tuple(iter_bit_indices(self.bits))

    def __contains__(self, item) -> bool:
        idx = item if isinstance(item, int) else self.group.index_of(item)
        return bool((self.bits >> idx) & 1)

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_proper(self) -> bool:
        return self.order < self.group.order

    def __repr__(self):
        gens = ",".join(str(list(g)) for g in self.generators)
        return f"Subgroup(order={self.order}, gens=[{gens}])"
