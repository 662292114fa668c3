"""Group algebra F[G] over a prime field that splits G.

The splitting field is realized as F_l with l prime, l = 1 (mod exponent),
so a primitive exponent-th root of unity w exists and the character
transform identifies F_l[G] with F_l^{|G|}.  The vanishing question for
products of binomials (X^g - a) reduces to a character-cover condition:

    prod_i (X^{g_i} - a_i) = 0   iff   every character chi is killed by some
    position i, i.e. a_i = w^{pairing(g_i, chi)}.

Hence each a_i may be assumed to be either a power of w ("kill" some
residue class of characters) or any unit that is no root of unity ("free",
kills nothing).  This reduction is what the cover search below decides; the
outcome does not depend on the choice of field because it only involves the
pairing.  A returned assignment is always re-verified by an actual
convolution product in F_l[G].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import AbelianGroup, Element, Subgroup, iter_bit_indices
from .search import SearchBudgetExceeded, Ticker
from .sequences import Sequence, sigma_bits

__all__ = [
    "CosetNotFound",
    "GroupAlgebra",
    "GroupAlgebraElement",
    "SplittingField",
    "SplittingFieldNotFound",
    "VanishingAssignment",
    "VanishingProduct",
    "ZeroElement",
    "exists_vanishing_assignment",
    "find_covered_coset",
    "group_algebra",
    "l_alpha",
    "make_splitting_field",
    "nonvanishing_witness_search",
]

FIELD_SEARCH_BOUND = 10**6


class SplittingFieldNotFound(RuntimeError):
    """No prime l = 1 (mod exponent) below the search bound."""


class ZeroElement(ValueError):
    """Operation undefined for the zero algebra element."""


class VanishingProduct(ValueError):
    """The supplied assignment makes the product vanish, so no coset exists."""


class CosetNotFound(RuntimeError):
    """No covered coset was found for a nonzero product; this signals a bug."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class SplittingField:
    """F_l with a primitive exponent-th root of unity.

    free_unit is the smallest unit that is not an exponent-th root of unity,
    or None when the unit group is exactly the roots (l = exponent + 1); such
    a field still decides vanishing, it just cannot materialize "free" slots.
    """

    modulus: int
    root: int
    exponent: int
    free_unit: int | None

    def root_power(self, k: int) -> int:
        return pow(self.root, k % self.exponent, self.modulus)

    def is_root_of_unity(self, a: int) -> bool:
        return pow(a % self.modulus, self.exponent, self.modulus) == 1


def make_splitting_field(
    group_or_exponent,
    require_free_unit: bool = False,
    search_bound: int = FIELD_SEARCH_BOUND,
) -> SplittingField:
    """Smallest prime l = 1 (mod exponent) and the smallest primitive root of
    unity w of that order mod l.

    With require_free_unit=True, primes whose unit group is exactly the roots
    of unity are skipped, so that non-root values exist.
    """
    exponent = (
        group_or_exponent.exponent
        if isinstance(group_or_exponent, AbelianGroup)
        else int(group_or_exponent)
    )
    if exponent < 2:
        raise ValueError("exponent must be >= 2")
    ps = _prime_divisors(exponent)
    ell = exponent + 1
    while ell <= search_bound:
        if _is_prime(ell) and not (require_free_unit and ell - 1 == exponent):
            w = None
            for cand in range(2, ell):
                if pow(cand, exponent, ell) == 1 and all(
                    pow(cand, exponent // p, ell) != 1 for p in ps
                ):
                    w = cand
                    break
            if w is not None:
                free = None
                for cand in range(2, ell):
                    if pow(cand, exponent, ell) != 1:
                        free = cand
                        break
                return SplittingField(ell, w, exponent, free)
        ell += exponent
    raise SplittingFieldNotFound(
        f"no usable prime = 1 mod {exponent} below {search_bound}"
    )


class GroupAlgebra:
    """F_l[G] with cached addition and character tables."""

    def __init__(self, group: AbelianGroup, field: SplittingField | None = None):
        self.group = group
        self.field = field if field is not None else make_splitting_field(group)
        if self.field.exponent != group.exponent:
            raise ValueError("field exponent does not match the group")
        n = group.order
        coords = np.array([group.element(i) for i in range(n)], dtype=np.int64)
        factors = np.array(group.invariant_factors, dtype=np.int64)
        bases = np.array(group._bases, dtype=np.int64)
        # add_perm[u] is the index permutation v -> u + v
        self.add_perm = (
            ((coords[:, None, :] + coords[None, :, :]) % factors) @ bases
        ).astype(np.int64)
        weights = group.exponent // factors
        # pair[g, chi] = pairing(g, chi); symmetric
        self.pair = ((coords * weights) @ coords.T) % group.exponent
        root_powers = np.array(
            [pow(self.field.root, k, self.field.modulus) for k in range(group.exponent)],
            dtype=np.int64,
        )
        # char[chi, g] = w^pairing(g, chi)
        self.char = root_powers[self.pair]

    # -- constructors -----------------------------------------------------

    def element(self, coeffs) -> "GroupAlgebraElement":
        arr = np.asarray(coeffs, dtype=np.int64) % self.field.modulus
        if arr.shape != (self.group.order,):
            raise ValueError("coefficient vector has the wrong length")
        return GroupAlgebraElement(self, arr)

    def zero(self) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self, np.zeros(self.group.order, dtype=np.int64))

    def one(self) -> "GroupAlgebraElement":
        return self.x_power(self.group.zero())

    def x_power(self, g: Element) -> "GroupAlgebraElement":
        arr = np.zeros(self.group.order, dtype=np.int64)
        arr[self.group.index_of(g)] = 1
        return GroupAlgebraElement(self, arr)

    def indicator(self, subgroup: Subgroup) -> "GroupAlgebraElement":
        arr = np.zeros(self.group.order, dtype=np.int64)
        for i in iter_bit_indices(subgroup.bits):
            arr[i] = 1
        return GroupAlgebraElement(self, arr)

    def binomial(self, g: Element, a: int) -> "GroupAlgebraElement":
        """X^g - a."""
        m = self.field.modulus
        arr = np.zeros(self.group.order, dtype=np.int64)
        arr[self.group.index_of(g)] += 1
        arr[0] = (arr[0] - int(a)) % m
        return GroupAlgebraElement(self, arr)

    # -- ring operations ----------------------------------------------------

    def multiply(self, a: "GroupAlgebraElement", b: "GroupAlgebraElement") -> "GroupAlgebraElement":
        """Convolution product; O(|G|^2) on the nonzero support of a."""
        m = self.field.modulus
        out = np.zeros(self.group.order, dtype=np.int64)
        bc = b.coeffs
        for u in np.flatnonzero(a.coeffs):
            out[self.add_perm[u]] += int(a.coeffs[u]) * bc
        return GroupAlgebraElement(self, out % m)

    def spectrum(self, a: "GroupAlgebraElement") -> np.ndarray:
        """Values at all characters: spectrum[chi] = sum_g a_g w^pairing(g,chi)."""
        return (self.char @ a.coeffs) % self.field.modulus

    def product_of_binomials(self, seq: Sequence, values) -> "GroupAlgebraElement":
        """prod (X^{g_i} - a_i) over the sorted term list, via convolutions."""
        acc = self.one()
        for idx, a in zip(seq.indices(), values):
            acc = self.multiply(acc, self.binomial(self.group.element(idx), a))
        return acc


def group_algebra(group: AbelianGroup) -> GroupAlgebra:
    """The cached F_l[G] for the smallest splitting prime."""
    alg = group._cache.get("group_algebra")
    if alg is None:
        alg = GroupAlgebra(group)
        group._cache["group_algebra"] = alg
    return alg


@dataclass(frozen=True)
class GroupAlgebraElement:
    algebra: GroupAlgebra
    coeffs: np.ndarray

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def __eq__(self, other):
        return (
            isinstance(other, GroupAlgebraElement)
            and self.algebra is other.algebra
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return self.algebra.multiply(self, other)


@dataclass(frozen=True)
class VanishingAssignment:
    """Per-position unit choices for a product of binomials.

    kills[i] is the exponent k meaning a_i = w^k, or None for a "free" slot
    whose value may be any unit that is not a root of unity (it kills no
    character).  Positions refer to the sorted term list of the sequence.
    """

    kills: tuple[int | None, ...]

    @property
    def has_free(self) -> bool:
        return any(k is None for k in self.kills)

    def concrete_values(self, field: SplittingField, strict_free: bool = False) -> list[int]:
        """Unit values in F_l.  Free slots take the canonical non-root unit;
        when the field has none, 1 is substituted (extra kills never resurrect
        a vanishing product), unless strict_free is set."""
        values = []
        for k in self.kills:
            if k is not None:
                values.append(field.root_power(k))
            elif field.free_unit is not None:
                values.append(field.free_unit)
            elif strict_free:
                raise ValueError(
                    f"field F_{field.modulus} has no unit outside the roots of unity"
                )
            else:
                values.append(1)
        return values

    def to_json(self) -> list[dict]:
        out = []
        for i, k in enumerate(self.kills):
            if k is None:
                out.append({"pos": i, "free": True})
            else:
                out.append({"pos": i, "kill_exponent": int(k)})
        return out


def _character_kill_masks(alg: GroupAlgebra, elt_index: int) -> dict[int, int]:
    """For one term g: exponent k -> bitmask of characters with pairing(g, .) = k."""
    key = ("kill_masks", elt_index)
    cached = alg.group._cache.get(key)
    if cached is not None:
        return cached
    masks: dict[int, int] = {}
    col = alg.pair[elt_index]
    for chi, k in enumerate(col):
        masks[int(k)] = masks.get(int(k), 0) | (1 << chi)
    alg.group._cache[key] = masks
    return masks


def exists_vanishing_assignment(
    seq: Sequence, algebra: GroupAlgebra | None = None
) -> VanishingAssignment | None:
    """An assignment of units making prod (X^{g_i} - a_i) = 0, or None.

    Backtracking cover search: branch on which position kills the lowest
    uncovered character.  (Any unset position can kill any character with
    exactly one exponent, so candidate counts are uniform and the
    minimum-remaining-values rule degenerates to the smallest character
    index.)  A found assignment is re-verified by convolution.
    """
    if seq.length == 0:
        raise ValueError("sequence must be nonempty")
    alg = algebra if algebra is not None else group_algebra(seq.group)
    positions = seq.indices()
    distinct = sorted(set(positions))
    avail = {g: positions.count(g) for g in distinct}
    masks = {g: _character_kill_masks(alg, g) for g in distinct}
    pair = alg.pair
    n = seq.group.order
    full = (1 << n) - 1

    chosen: list[tuple[int, int]] = []

    def search(uncovered: int) -> bool:
        if uncovered == 0:
            return True
        if all(c == 0 for c in avail.values()):
            return False
        chi = (uncovered & -uncovered).bit_length() - 1
        for g in distinct:
            if avail[g] == 0:
                continue
            k = int(pair[g, chi])
            avail[g] -= 1
            chosen.append((g, k))
            if search(uncovered & ~masks[g][k]):
                return True
            chosen.pop()
            avail[g] += 1
        return False

    if not search(full):
        return None

    kills: list[int | None] = [None] * len(positions)
    used: set[int] = set()
    for g, k in chosen:
        for pos, e in enumerate(positions):
            if e == g and pos not in used:
                kills[pos] = k
                used.add(pos)
                break
    assignment = VanishingAssignment(tuple(kills))
    product = alg.product_of_binomials(seq, assignment.concrete_values(alg.field))
    if not product.is_zero():
        raise RuntimeError(
            "internal error: cover search produced a non-vanishing assignment"
        )
    return assignment


def l_alpha(alpha: GroupAlgebraElement) -> Subgroup:
    """Elements g such that alpha * (X^g - a) = 0 for some unit a.

    These are exactly the g whose pairing is constant on the spectral support
    of alpha; the constant c gives a = w^c.  The result is verified to be a
    subgroup.
    """
    if alpha.is_zero():
        raise ZeroElement("L_alpha is undefined for the zero element")
    alg = alpha.algebra
    support = np.flatnonzero(alg.spectrum(alpha))
    sub = alg.pair[np.ix_(support, np.arange(alg.group.order))]
    constant = (sub == sub[0:1, :]).all(axis=0)
    bits = 0
    for g in np.flatnonzero(constant):
        bits |= 1 << int(g)
    return Subgroup.from_bits(alg.group, bits, check=True)


def _algebra_for_assignment(group: AbelianGroup, assignment: VanishingAssignment) -> GroupAlgebra:
    """Free slots need a unit outside the roots of unity; upgrade the prime
    if the default field has none."""
    if not assignment.has_free:
        return group_algebra(group)
    alg = group_algebra(group)
    if alg.field.free_unit is not None:
        return alg
    upgraded = group._cache.get("group_algebra_free")
    if upgraded is None:
        upgraded = GroupAlgebra(group, make_splitting_field(group, require_free_unit=True))
        group._cache["group_algebra_free"] = upgraded
    return upgraded


def find_covered_coset(
    seq: Sequence, assignment: VanishingAssignment
) -> tuple[Element, Subgroup]:
    """For a nonzero product alpha = prod (X^{g_i} - a_i): a coset g0 + H with
    H = L_alpha such that (g0 + H) \\ {0} lies inside sigma(S), and such that
    sigma(S h) contains all of g0 + H for every h in H.

    Scans the |G|/|H| cosets in index order and returns the first that
    satisfies both containments; raises CosetNotFound (a genuine bug or
    counterexample) if none does.
    """
    if len(assignment.kills) != seq.length:
        raise ValueError("assignment length does not match the sequence")
    group = seq.group
    alg = _algebra_for_assignment(group, assignment)
    alpha = alg.product_of_binomials(seq, assignment.concrete_values(alg.field, strict_free=True))
    if alpha.is_zero():
        raise VanishingProduct("the product vanishes for this assignment")
    sub = l_alpha(alpha)
    sig = sigma_bits(group, seq.indices())
    seen = 0
    for rep in range(group.order):
        if (seen >> rep) & 1:
            continue
        coset = group.translate_bits(sub.bits, rep)
        seen |= coset
        if (coset & ~1) & ~sig:
            continue
        ok = True
        for h in iter_bit_indices(sub.bits):
            sig_h = sig | group.translate_bits(sig | 1, h)
            if coset & ~sig_h:
                ok = False
                break
        if ok:
            g0 = group.element((coset & -coset).bit_length() - 1)
            return g0, sub
    raise CosetNotFound(
        f"no covered coset for |H|={sub.order} over {group.literal}; "
        f"sequence={seq.to_json()} assignment={assignment.to_json()}"
    )


def nonvanishing_witness_search(
    group: AbelianGroup,
    length: int,
    *,
    reduce_symmetry: bool = True,
    budget_seconds: float | None = None,
    checkpoint_path=None,
) -> Sequence | None:
    """A sequence of the given length admitting no vanishing assignment, or
    None after exhausting canonical (non-decreasing index) multisets.

    Witnesses are downward closed (a factor of a nonzero product is nonzero),
    so only prefixes that are themselves witnesses are extended.  Sequences
    containing 0 are skipped: X^0 - 1 = 0 kills the whole product.  For
    C_p + C_p the first two distinct terms are restricted to automorphism
    orbit representatives.  Work is split per first element, which is the
    checkpoint unit when a path is configured.
    """
    from .invariants import orbit_constraints  # local import to avoid a cycle
    from .search import PrefixCheckpoint

    if length < 0:
        raise ValueError("length must be non-negative")
    if length == 0:
        return Sequence.empty(group)
    alg = group_algebra(group)
    first_allowed, second_allowed = orbit_constraints(group, reduce_symmetry)
    ticker = Ticker(budget_seconds, what=f"dwitness over {group.literal}")
    config = {
        "command": "nonvanishing_witness_search",
        "group": group.literal,
        "length": length,
        "reduce_symmetry": reduce_symmetry,
    }
    ckpt = PrefixCheckpoint(checkpoint_path, config) if checkpoint_path else None

    prefix: list[int] = []

    def rec(min_idx: int, second_seen: bool) -> Sequence | None:
        ticker.tick()
        if len(prefix) == length:
            return Sequence.from_indices(group, prefix)
        for e in range(min_idx, group.order):
            if not second_seen and e != prefix[0]:
                if second_allowed is not None and e not in second_allowed[prefix[0]]:
                    continue
            prefix.append(e)
            cand = Sequence.from_indices(group, prefix)
            if exists_vanishing_assignment(cand, alg) is None:
                found = rec(e, second_seen or e != prefix[0])
                if found is not None:
                    return found
            prefix.pop()
        return None

    for e1 in range(1, group.order):
        if first_allowed is not None and e1 not in first_allowed:
            continue
        if ckpt is not None and (e1,) in ckpt.records:
            stored = ckpt.records[(e1,)]["found"]
            if stored is not None:
                return Sequence.from_indices(group, stored)
            continue
        found = None
        prefix.clear()
        prefix.append(e1)
        if exists_vanishing_assignment(Sequence.from_indices(group, prefix), alg) is None:
            found = rec(e1, False)
        prefix.clear()
        if ckpt is not None:
            ckpt.append(
                {"prefix": [e1], "found": found.indices() if found is not None else None}
            )
        if found is not None:
            return found
    return None
