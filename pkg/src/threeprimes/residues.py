"""Arithmetic over Z_m and its unit group: residue sets, triple sumsets,
the Cauchy-Davenport-Chowla bound, and weight functions with exact
rational values.

Residue sets carry a dual representation: a sorted element tuple always,
plus a 64-bit occupancy mask when the modulus fits in one machine word.
Sumsets use the mask (shift-or over a 2m-bit window, folded mod m) when
available and fall back to set arithmetic otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DomainError

MASK_LIMIT = 64


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (desk-scale n)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        while n % d == 0:
            n //= d
        d += 1
    return True


def euler_phi(n: int) -> int:
    result = n
    d = 2
    while d * d <= n:
        if n % d == 0:
            result -= result // d
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        result -= result // n
    return result


def units(m: int) -> tuple[int, ...]:
    """All x in [1, m) with gcd(x, m) = 1. No parity constraint here;
    reduced_residues() adds the documented odd-squarefree precondition."""
    if m < 2:
        raise DomainError(f"modulus must be at least 2, got {m}")
    return tuple(x for x in range(1, m) if math.gcd(x, m) == 1)


@dataclass(frozen=True)
class ResidueSet:
    """A subset of Z_m. Elements canonical in [0, m), sorted, distinct."""

    modulus: int
    elements: tuple[int, ...]
    mask: int | None = field(default=None, compare=False)

    def __post_init__(self):
        m = self.modulus
        if m < 2:
            raise DomainError(f"modulus must be at least 2, got {m}")
        if any(not (0 <= x < m) for x in self.elements):
            raise DomainError("elements must lie in [0, m)")
        if len(set(self.elements)) != len(self.elements):
            raise DomainError("elements must be distinct")
        if tuple(sorted(self.elements)) != self.elements:
            object.__setattr__(self, "elements", tuple(sorted(self.elements)))
        if m <= MASK_LIMIT:
            mask = 0
            for x in self.elements:
                mask |= 1 << x
            if self.mask is not None and self.mask != mask:
                raise DomainError("mask disagrees with element list")
            object.__setattr__(self, "mask", mask)
        else:
            object.__setattr__(self, "mask", None)

    @classmethod
    def from_elements(cls, modulus: int, elements: Iterable[int]) -> "ResidueSet":
        return cls(modulus, tuple(sorted({x % modulus for x in elements})))

    @classmethod
    def from_mask(cls, modulus: int, mask: int) -> "ResidueSet":
        if modulus > MASK_LIMIT:
            raise DomainError(f"mask representation requires m <= {MASK_LIMIT}")
        elems = tuple(x for x in range(modulus) if (mask >> x) & 1)
        return cls(modulus, elems)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x % self.modulus in set(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def unit_density(self) -> Fraction:
        """|A| / phi(m): density within the unit group Z_m*."""
        return Fraction(len(self.elements), euler_phi(self.modulus))

    def complement_in(self, universe: "ResidueSet") -> tuple[int, ...]:
        return tuple(x for x in universe.elements if x not in set(self.elements))

    def dilate(self, u: int) -> "ResidueSet":
        """The set u*A mod m."""
        return ResidueSet.from_elements(self.modulus, (u * x for x in self.elements))

    def is_full(self) -> bool:
        return len(self.elements) == self.modulus


def reduced_residues(m: int) -> ResidueSet:
    """Z_m* for odd squarefree m >= 3 (the regime of the local propositions)."""
    if m < 3:
        raise DomainError(f"modulus must be at least 3, got {m}")
    if m % 2 == 0:
        raise DomainError(f"modulus must be odd, got {m}")
    if not is_squarefree(m):
        raise DomainError(f"modulus must be squarefree, got {m}")
    return ResidueSet(m, units(m))


def _fold(window: int, m: int) -> int:
    """Reduce a 2m-bit occupancy window to an m-bit mask mod m."""
    low = window & ((1 << m) - 1)
    return low | (window >> m)


def _mask_sumset(x_mask: int, y_mask: int, m: int) -> int:
    acc = 0
    for s in range(m):
        if (y_mask >> s) & 1:
            acc |= x_mask << s
    return _fold(acc, m)


def triple_sumset(a: ResidueSet, b: ResidueSet, c: ResidueSet) -> ResidueSet:
    """{x + y + z mod m : x in A, y in B, z in C}; empty if any input is."""
    m = a.modulus
    if b.modulus != m or c.modulus != m:
        raise DomainError(
            f"modulus mismatch: {a.modulus}, {b.modulus}, {c.modulus}"
        )
    if not (a.elements and b.elements and c.elements):
        return ResidueSet(m, ())
    if m <= MASK_LIMIT:
        ab = _mask_sumset(a.mask, b.mask, m)
        abc = _mask_sumset(ab, c.mask, m)
        return ResidueSet.from_mask(m, abc)
    ab = {(x + y) % m for x in a.elements for y in b.elements}
    abc = {(s + z) % m for s in ab for z in c.elements}
    return ResidueSet(m, tuple(sorted(abc)))


def triple_sumset_listwise(a: ResidueSet, b: ResidueSet, c: ResidueSet) -> ResidueSet:
    """Set-arithmetic path regardless of modulus size; oracle for the mask path."""
    m = a.modulus
    if b.modulus != m or c.modulus != m:
        raise DomainError("modulus mismatch")
    if not (a.elements and b.elements and c.elements):
        return ResidueSet(m, ())
    ab = {(x + y) % m for x in a.elements for y in b.elements}
    abc = {(s + z) % m for s in ab for z in c.elements}
    return ResidueSet(m, tuple(sorted(abc)))


def cauchy_davenport_check(a: ResidueSet, b: ResidueSet, c: ResidueSet, p: int) -> bool:
    """|A+B+C| >= min(|A|+|B|+|C|-2, p) for nonempty subsets of Z_p, p prime."""
    if not is_prime(p):
        raise DomainError(f"modulus must be prime, got {p}")
    if a.modulus != p or b.modulus != p or c.modulus != p:
        raise DomainError("sets must live in Z_p")
    if not (a.elements and b.elements and c.elements):
        raise DomainError("sets must be nonempty")
    s = triple_sumset(a, b, c)
    return len(s) >= min(len(a) + len(b) + len(c) - 2, p)


EXTREMAL_RESIDUES_MOD15 = (1, 2, 4, 7, 13)


def extremal_set_mod15() -> ResidueSet:
    """The obstruction set {1,2,4,7,13} mod 15; density exactly 5/8 in Z_15*,
    and its triple sumset misses the class 14 mod 15."""
    return ResidueSet(15, EXTREMAL_RESIDUES_MOD15)


class WeightFunction:
    """A map from the reduced residues mod m to exact rationals in [0, 1]."""

    __slots__ = ("modulus", "values")

    def __init__(self, modulus: int, values: Mapping[int, Fraction | int]):
        dom = units(modulus)
        vals = {int(r): Fraction(v) for r, v in values.items()}
        if set(vals) != set(dom):
            raise DomainError(
                f"domain must be exactly the reduced residues mod {modulus}"
            )
        for r, v in vals.items():
            if not (0 <= v <= 1):
                raise DomainError(f"weight f({r}) = {v} outside [0, 1]")
        self.modulus = modulus
        self.values = vals

    @classmethod
    def constant(cls, modulus: int, value) -> "WeightFunction":
        v = Fraction(value)
        return cls(modulus, {r: v for r in units(modulus)})

    @classmethod
    def from_grid(cls, modulus: int, numerators: Mapping[int, int], g: int) -> "WeightFunction":
        return cls(modulus, {r: Fraction(n, g) for r, n in numerators.items()})

    def __call__(self, r: int) -> Fraction:
        return self.values[r % self.modulus]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WeightFunction)
            and self.modulus == other.modulus
            and self.values == other.values
        )

    def residues(self) -> tuple[int, ...]:
        return tuple(sorted(self.values))

    def support(self) -> tuple[int, ...]:
        return tuple(r for r in sorted(self.values) if self.values[r] > 0)

    def average(self) -> Fraction:
        vals = list(self.values.values())
        return Fraction(sum(vals), len(vals))

    def class_average(self, residue: int, q: int = 3) -> Fraction:
        """Average of f over reduced residues r with r = residue (mod q)."""
        sel = [v for r, v in self.values.items() if r % q == residue % q]
        if not sel:
            raise DomainError(f"no reduced residues fall in class {residue} mod {q}")
        return Fraction(sum(sel), len(sel))
