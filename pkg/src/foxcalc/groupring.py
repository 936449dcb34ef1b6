"""The integral group ring Z(G) of a finite group, realised as Z^|G|.

Ideals, filtration terms and their products are all kept as ``Lattice``
objects in the ambient space Z^|G|, indexed by element id.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .exactla import FgAbGroup, Lattice, mod_m
from .groups import FiniteGroup, GroupSeries, Subgroup


class ParentMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# raw vector arithmetic


def basis_vector(group: FiniteGroup, g: int, coeff: int = 1) -> list[int]:
    v = [0] * group.n
    v[g] = coeff
    return v


def minus_one_vector(group: FiniteGroup, g: int) -> list[int]:
    v = [0] * group.n
    v[g] += 1
    v[0] -= 1
    return v


def convolve(group: FiniteGroup, x: Sequence[int], y: Sequence[int]) -> list[int]:
    """Product of two group ring elements given as coefficient vectors."""
    table = group.table
    out = [0] * group.n
    ys = [(h, b) for h, b in enumerate(y) if b]
    for g, a in enumerate(x):
        if not a:
            continue
        row = table[g]
        for h, b in ys:
            out[row[h]] += a * b
    return out


def left_translate(group: FiniteGroup, g: int, v: Sequence[int]) -> list[int]:
    """g . v"""
    row = group.table[g]
    out = [0] * group.n
    for h, c in enumerate(v):
        if c:
            out[row[h]] += c
    return out


def right_translate(group: FiniteGroup, v: Sequence[int], g: int) -> list[int]:
    """v . g"""
    t = group.table
    out = [0] * group.n
    for h, c in enumerate(v):
        if c:
            out[t[h][g]] += c
    return out


def augmentation(v: Sequence[int]) -> int:
    return sum(v)


def push_forward(v: Sequence[int], which: Sequence[int], size: int) -> list[int]:
    """Image of v under the ring map Z(G) -> Z(G/N) given by a coset index map."""
    out = [0] * size
    for g, c in enumerate(v):
        if c:
            out[which[g]] += c
    return out


def lift_back(v: Sequence[int], reps: Sequence[int], n: int) -> list[int]:
    """A preimage in Z(G) of v in Z(G/N), using the chosen coset representatives."""
    out = [0] * n
    for q, c in enumerate(v):
        if c:
            out[reps[q]] += c
    return out


# ---------------------------------------------------------------------------
# ring elements


@dataclass(frozen=True)
class RingElem:
    group: FiniteGroup
    coeffs: tuple[int, ...]

    @classmethod
    def of(cls, group: FiniteGroup, g: int, coeff: int = 1) -> "RingElem":
        return cls(group, tuple(basis_vector(group, g, coeff)))

    @classmethod
    def zero(cls, group: FiniteGroup) -> "RingElem":
        return cls(group, (0,) * group.n)

    def _same(self, other: "RingElem"):
        if not isinstance(other, RingElem):
            raise TypeError("expected a RingElem")
        if other.group is not self.group:
            raise ParentMismatch("ring elements from different group rings")

    def __add__(self, other: "RingElem") -> "RingElem":
        self._same(other)
        return RingElem(self.group, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "RingElem") -> "RingElem":
        self._same(other)
        return RingElem(self.group, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "RingElem":
        return RingElem(self.group, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return RingElem(self.group, tuple(other * a for a in self.coeffs))
        self._same(other)
        return RingElem(self.group, tuple(convolve(self.group, self.coeffs, other.coeffs)))

    def __rmul__(self, k: int) -> "RingElem":
        return self * k

    def augment(self) -> int:
        return sum(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self):
        terms = [f"{c}*{self.group.labels[g]}" for g, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"


def elem_minus_one(group: FiniteGroup, g: int) -> RingElem:
    return RingElem(group, tuple(minus_one_vector(group, g)))


def ring_add(x: RingElem, y: RingElem) -> RingElem:
    return x + y


def ring_mul(x: RingElem, y: RingElem) -> RingElem:
    return x * y


def augment(x: RingElem) -> int:
    return x.augment()


# ---------------------------------------------------------------------------
# ideals


def whole_ring(group: FiniteGroup) -> Lattice:
    return Lattice.full(group.n)


def aug_ideal(k: Subgroup) -> Lattice:
    """Span of k - 1 for k in K, inside Z(G)."""
    g = k.group
    return Lattice(g.n, [minus_one_vector(g, x) for x in k.elements if x != 0])


def sided_ideal(kind: str, n: Subgroup) -> Lattice:
    """Z(G)I(N) (kind 'left') or I(N)Z(G) (kind 'right')."""
    group = n.group
    vecs = []
    for x in n.elements:
        if x == 0:
            continue
        base = minus_one_vector(group, x)
        for g in range(group.n):
            if kind == "left":
                vecs.append(left_translate(group, g, base))
            elif kind == "right":
                vecs.append(right_translate(group, base, g))
            else:
                raise ValueError(f"unknown side {kind!r}")
    return Lattice(group.n, vecs)


def lattice_product(group: FiniteGroup, a: Lattice, b: Lattice) -> Lattice:
    """The additive span of all products x*y, x in A, y in B (pairwise basis products)."""
    if a.dim != group.n or b.dim != group.n:
        raise ParentMismatch("lattice does not live in this group ring")
    return Lattice(group.n, [convolve(group, x, y) for x in a.basis for y in b.basis])


def product_of(group: FiniteGroup, *lattices: Lattice) -> Lattice:
    out = lattices[0]
    for nxt in lattices[1:]:
        out = lattice_product(group, out, nxt)
    return out


def ideal_power(group: FiniteGroup, ideal: Lattice, n: int) -> Lattice:
    """The n-fold product ideal * ... * ideal (the whole ring for n = 0)."""
    if n == 0:
        return whole_ring(group)
    out = ideal
    for _ in range(n - 1):
        out = lattice_product(group, out, ideal)
    return out


# ---------------------------------------------------------------------------
# filtrations induced by an N-series


class Filtration:
    """The ideals F^n of Z(G) attached to an N-series.

    F^n is the span of products (a_1 - 1)...(a_r - 1) with a_i in the
    k_i-th series term and k_1 + ... + k_r >= n.  It is built by the recursion

        F^n = sum_{k=1..n} span{(a - 1) v : a in S_k, v in F^(n-k)},

    obtained by splitting off the first factor of a weighted product (a
    product whose weight exceeds n is still a product of weight >= n, and
    F^0 = Z(G) absorbs the trailing factors).  Terms are cached once built.
    """

    def __init__(self, series: GroupSeries, n_max: int = 4):
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        self.series = series
        self.group = series.group
        self.n_max = n_max
        self._terms: dict[int, Lattice] = {0: whole_ring(self.group)}

    def __getitem__(self, n: int) -> Lattice:
        if n < 0:
            raise IndexError("filtration degrees are non-negative")
        if n > self.n_max:
            raise IndexError(f"degree {n} exceeds the configured maximum {self.n_max}")
        if n not in self._terms:
            group = self.group
            vecs = []
            for k in range(1, n + 1):
                lower = self[n - k]
                for a in self.series[k].elements:
                    if a == 0:
                        continue
                    am1 = minus_one_vector(group, a)
                    vecs.extend(convolve(group, am1, v) for v in lower.basis)
            self._terms[n] = Lattice(group.n, vecs)
        return self._terms[n]

    def term(self, n: int) -> Lattice:
        return self[n]


def filtration(series: GroupSeries, n: int, n_max: int = 4) -> Lattice:
    return Filtration(series, max(n_max, n))[n]


def fox_module(filt: Filtration, n: int, j: Lattice) -> Lattice:
    """F^(n-1) J, the numerator of the n-th generalized Fox quotient."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return lattice_product(filt.group, filt[n - 1], j)


# ---------------------------------------------------------------------------
# induced subgroups


@dataclass(frozen=True)
class UnitCoset:
    elements: frozenset[int]
    is_subgroup: bool

    def labels(self, group: FiniteGroup) -> list[str]:
        return [group.labels[g] for g in sorted(self.elements)]


def unit_coset_subgroup(group: FiniteGroup, m: Lattice) -> UnitCoset:
    """G intersected with 1 + M, plus a closure check on the resulting set."""
    elems = frozenset(g for g in range(group.n) if minus_one_vector(group, g) in m)
    closed = 0 in elems and all(group.mul(a, group.inv(b)) in elems for a in elems for b in elems)
    return UnitCoset(elems, closed)


def mod_m_quotients(result: FgAbGroup, m: int) -> FgAbGroup:
    """Pass from a Z-answer to coefficients Z/m by tensoring with Z/m."""
    if m < 2:
        raise ValueError("modulus must be at least 2")
    return mod_m(result, m)


def span_of(group: FiniteGroup, vectors: Iterable[Sequence[int]]) -> Lattice:
    return Lattice(group.n, vectors)
