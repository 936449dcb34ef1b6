"""Exact integer linear algebra.

Matrices are plain lists of rows of Python ints, so nothing ever overflows.
On top of the Hermite and Smith normal forms this module provides lattices
(submodules of Z^n kept in a canonical echelon basis) and finitely generated
abelian groups given by generators and relations, together with homomorphisms,
kernels, images, cokernels, tensor products, Tor and exterior squares.

Conventions: vectors are row vectors and matrices act on the right, so a
homomorphism with matrix M sends a coordinate vector c to c*M and row i of M
is the image of generator i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

Matrix = list[list[int]]


class DimensionError(ValueError):
    pass


class NotASubmodule(ValueError):
    pass


class IllDefinedMap(ValueError):
    """A matrix does not send the domain relations into the codomain relations."""


# ---------------------------------------------------------------------------
# small matrix helpers


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], inner: int | None = None, cols: int | None = None) -> Matrix:
    if inner is None:
        inner = len(b)
    if cols is None:
        cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k, x in enumerate(row):
            if x:
                bk = b[k]
                for j in range(cols):
                    y = bk[j]
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out


def vecmat(v: Sequence[int], m: Sequence[Sequence[int]], cols: int) -> list[int]:
    acc = [0] * cols
    for k, x in enumerate(v):
        if x:
            row = m[k]
            for j in range(cols):
                y = row[j]
                if y:
                    acc[j] += x * y
    return acc


def transpose(m: Sequence[Sequence[int]], cols: int | None = None) -> Matrix:
    if not m:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*m)]


def kron(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], a_cols: int, b_cols: int) -> Matrix:
    out = []
    for ra in a:
        for rb in b:
            row = [0] * (a_cols * b_cols)
            for p, x in enumerate(ra):
                if x:
                    base = p * b_cols
                    for q, y in enumerate(rb):
                        if y:
                            row[base + q] = x * y
            out.append(row)
    return out


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Integer determinant via fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


# ---------------------------------------------------------------------------
# Hermite normal form


def hnf(m: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form.

    Returns (H, U) with U unimodular and U*M = H.  H is in row echelon form,
    pivots are positive and the entries above a pivot lie in [0, pivot).
    Zero rows of H sit at the bottom, so H has the same shape as M.
    """
    rows = [list(r) for r in m]
    nrows = len(rows)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    u = identity(nrows)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        for i in range(r, nrows):
            if rows[i][c] != 0:
                if i != r:
                    rows[r], rows[i] = rows[i], rows[r]
                    u[r], u[i] = u[i], u[r]
                break
        else:
            continue
        for i in range(r + 1, nrows):
            b = rows[i][c]
            if b == 0:
                continue
            a = rows[r][c]
            if b % a == 0:
                q = b // a
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                continue
            g, s, t = _xgcd(a, b)
            ag, bg = a // g, b // g
            ri, rr = rows[i], rows[r]
            rows[r] = [s * x + t * y for x, y in zip(rr, ri)]
            rows[i] = [ag * y - bg * x for x, y in zip(rr, ri)]
            ui, ur = u[i], u[r]
            u[r] = [s * x + t * y for x, y in zip(ur, ui)]
            u[i] = [ag * y - bg * x for x, y in zip(ur, ui)]
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
            u[r] = [-x for x in u[r]]
        p = rows[r][c]
        for i in range(r):
            q = rows[i][c] // p
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return rows, u


def echelon_basis(vectors: Iterable[Sequence[int]], dim: int) -> tuple[tuple[int, ...], ...]:
    """Canonical HNF basis (nonzero rows only) of the span of ``vectors``.

    Vectors are inserted one at a time with Euclidean reduction against the
    pivot rows found so far; this keeps the working set at most ``dim`` rows
    even when thousands of generators are supplied.
    """
    piv: dict[int, list[int]] = {}
    for vec in vectors:
        if len(vec) != dim:
            raise DimensionError(f"vector of length {len(vec)} in ambient dimension {dim}")
        v = list(vec)
        c = 0
        while True:
            while c < dim and v[c] == 0:
                c += 1
            if c == dim:
                break
            w = piv.get(c)
            if w is None:
                if v[c] < 0:
                    v = [-x for x in v]
                piv[c] = v
                break
            while v[c] != 0:
                q = v[c] // w[c]
                if q:
                    v = [x - q * y for x, y in zip(v, w)]
                if v[c] != 0:
                    v, w = w, v
                    if w[c] < 0:
                        w = [-x for x in w]
            piv[c] = w
    cols = sorted(piv)
    basis = [piv[c] for c in cols]
    for k, c in enumerate(cols):
        row = basis[k]
        p = row[c]
        for i in range(k):
            q = basis[i][c] // p
            if q:
                basis[i] = [x - q * y for x, y in zip(basis[i], row)]
    return tuple(tuple(r) for r in basis)


def left_kernel(m: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Basis of {x : x*M = 0}, a saturated sublattice of Z^rows."""
    h, u = hnf(m, ncols)
    return [u[i] for i, row in enumerate(h) if not any(row)]


# ---------------------------------------------------------------------------
# Smith normal form


def _snf_full(m: Sequence[Sequence[int]], nrows: int, ncols: int):
    a = [list(r) for r in m]
    u = identity(nrows)
    v = identity(ncols)
    vinv = identity(ncols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]
        # inverse operation on rows of V^-1: row_src += q * row_dst
        vinv[src] = [x + q * y for x, y in zip(vinv[src], vinv[dst])]

    t = 0
    limit = min(nrows, ncols)
    while t < limit:
        best = None
        for i in range(t, nrows):
            row = a[i]
            for j in range(t, ncols):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nrows):
                if a[i][t]:
                    add_row(i, t, a[i][t] // p)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, ncols):
                if a[t][j]:
                    add_col(j, t, a[t][j] // p)
                    if a[t][j]:
                        dirty = True
            if dirty:
                best = (abs(p), t, t)
                for i in range(t + 1, nrows):
                    if a[i][t] and abs(a[i][t]) < best[0]:
                        best = (abs(a[i][t]), i, t)
                for j in range(t + 1, ncols):
                    if a[t][j] and abs(a[t][j]) < best[0]:
                        best = (abs(a[t][j]), t, j)
                if best[1] != t:
                    swap_rows(t, best[1])
                if best[2] != t:
                    swap_cols(t, best[2])
                continue
            bad = None
            for i in range(t + 1, nrows):
                for j in range(t + 1, ncols):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v, vinv


def snf(m: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form: returns (S, U, V) with U*M*V = S.

    S is diagonal with nonnegative entries d1 | d2 | ... (zeros last); U and V
    are unimodular.
    """
    nrows = len(m)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    s, u, v, _ = _snf_full(m, nrows, ncols)
    return s, u, v


def smith_divisors(m: Sequence[Sequence[int]], ncols: int | None = None) -> list[int]:
    s, _, _ = snf(m, ncols)
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0))]


# ---------------------------------------------------------------------------
# lattices


class Lattice:
    """A sublattice of Z^dim stored by its canonical HNF basis."""

    __slots__ = ("dim", "basis", "_pivots")

    def __init__(self, dim: int, vectors: Iterable[Sequence[int]] = (), *, canonical: bool = False):
        self.dim = dim
        if canonical:
            self.basis = tuple(tuple(v) for v in vectors)
        else:
            self.basis = echelon_basis(vectors, dim)
        self._pivots = tuple(next(i for i, x in enumerate(r) if x) for r in self.basis)

    @classmethod
    def full(cls, dim: int) -> "Lattice":
        return cls(dim, identity(dim), canonical=True)

    @classmethod
    def zero(cls, dim: int) -> "Lattice":
        return cls(dim, (), canonical=True)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.dim == other.dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.dim, self.basis))

    def __repr__(self):
        return f"Lattice(dim={self.dim}, rank={self.rank})"

    def _check(self, other: "Lattice"):
        if self.dim != other.dim:
            raise DimensionError(f"ambient dimensions {self.dim} and {other.dim} differ")

    def __add__(self, other: "Lattice") -> "Lattice":
        self._check(other)
        if not other.basis:
            return self
        if not self.basis:
            return other
        return Lattice(self.dim, self.basis + other.basis)

    def __and__(self, other: "Lattice") -> "Lattice":
        self._check(other)
        if not self.basis or not other.basis:
            return Lattice.zero(self.dim)
        stacked = [list(r) for r in self.basis] + [list(r) for r in other.basis]
        kernel = left_kernel(stacked, self.dim)
        a = self.rank
        vecs = [vecmat(x[:a], self.basis, self.dim) for x in kernel]
        return Lattice(self.dim, vecs)

    def coords(self, v: Sequence[int]) -> list[int] | None:
        """Coefficients of v in the basis, or None when v is not in the lattice."""
        if len(v) != self.dim:
            raise DimensionError(f"vector of length {len(v)} in ambient dimension {self.dim}")
        w = list(v)
        out = []
        for row, c in zip(self.basis, self._pivots):
            for k in range(c):
                if w[k]:
                    return None
            q, r = divmod(w[c], row[c])
            if r:
                return None
            out.append(q)
            if q:
                w = [x - q * y for x, y in zip(w, row)]
        if any(w):
            return None
        return out

    def __contains__(self, v) -> bool:
        return self.coords(v) is not None

    def __le__(self, other: "Lattice") -> bool:
        self._check(other)
        return all(other.coords(r) is not None for r in self.basis)

    def scaled(self, k: int) -> "Lattice":
        return Lattice(self.dim, [[k * x for x in r] for r in self.basis])


def lattice_sum(a: Lattice, b: Lattice) -> Lattice:
    return a + b


def lattice_intersect(a: Lattice, b: Lattice) -> Lattice:
    return a & b


def lattice_member(v: Sequence[int], a: Lattice) -> bool:
    return v in a


# ---------------------------------------------------------------------------
# finitely generated abelian groups


def _canonical_torsion(divs: Iterable[int]) -> tuple[list[int], int]:
    """Invariant factors (>1) and free rank of Z/d1 + Z/d2 + ... (d = 0 means Z)."""
    divs = list(divs)
    diag = [[d if i == j else 0 for j in range(len(divs))] for i, d in enumerate(divs)]
    s = smith_divisors(diag, len(divs)) if divs else []
    return [d for d in s if d > 1], sum(1 for d in s if d == 0)


class FgAbGroup:
    """Finitely generated abelian group Z^ngens / (row span of relations)."""

    def __init__(self, ngens: int, relations: Iterable[Sequence[int]] = (), labels: Sequence[str] | None = None):
        self.ngens = ngens
        rels = []
        for r in relations:
            if len(r) != ngens:
                raise DimensionError(f"relation of length {len(r)} for {ngens} generators")
            if any(r):
                rels.append(list(r))
        self.relations = rels
        self.labels = list(labels) if labels is not None else None

    @classmethod
    def cyclic_sum(cls, divisors: Sequence[int], labels=None) -> "FgAbGroup":
        """Z/d1 + Z/d2 + ...; a divisor 0 stands for a copy of Z."""
        n = len(divisors)
        rels = [[d if i == j else 0 for j in range(n)] for i, d in enumerate(divisors) if d]
        return cls(n, rels, labels)

    @classmethod
    def trivial(cls) -> "FgAbGroup":
        return cls(0)

    @cached_property
    def _smith(self):
        n = self.ngens
        if not self.relations:
            return [0] * n, identity(n), identity(n)
        s, _, v, vinv = _snf_full(self.relations, len(self.relations), n)
        diag = [s[i][i] if i < len(s) else 0 for i in range(n)]
        return diag, v, vinv

    @cached_property
    def relation_lattice(self) -> Lattice:
        return Lattice(self.ngens, self.relations)

    @property
    def diagonal(self) -> list[int]:
        return self._smith[0]

    @property
    def transform(self) -> Matrix:
        return self._smith[1]

    @property
    def transform_inverse(self) -> Matrix:
        return self._smith[2]

    @cached_property
    def _live(self) -> list[int]:
        return [i for i, d in enumerate(self.diagonal) if d != 1]

    @cached_property
    def torsion(self) -> list[int]:
        return [d for d in self.diagonal if d > 1]

    @cached_property
    def free_rank(self) -> int:
        return sum(1 for d in self.diagonal if d == 0)

    def invariants(self) -> tuple[tuple[int, ...], int]:
        return tuple(self.torsion), self.free_rank

    def describe(self) -> dict:
        return {"torsion": list(self.torsion), "free_rank": self.free_rank}

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int | None:
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return not self.torsion and not self.free_rank

    def reduce(self, c: Sequence[int]) -> tuple[int, ...]:
        """Normal form of a coordinate vector in invariant-factor coordinates."""
        if len(c) != self.ngens:
            raise DimensionError(f"coordinate vector of length {len(c)} for {self.ngens} generators")
        diag, v, _ = self._smith
        out = []
        for p in self._live:
            x = 0
            for k, ck in enumerate(c):
                if ck:
                    y = v[k][p]
                    if y:
                        x += ck * y
            d = diag[p]
            out.append(x % d if d else x)
        return tuple(out)

    def is_zero(self, c: Sequence[int]) -> bool:
        return not any(self.reduce(c))

    def equal(self, a: Sequence[int], b: Sequence[int]) -> bool:
        return self.is_zero([x - y for x, y in zip(a, b)])

    def invariant_generators(self) -> list[tuple[int, list[int]]]:
        """Pairs (d, coords) for the cyclic summands: coords generate a Z/d (d = 0 for Z)."""
        diag, _, vinv = self._smith
        return [(diag[p], list(vinv[p])) for p in self._live]

    def element_order(self, c: Sequence[int]) -> int | None:
        r = self.reduce(c)
        out = 1
        for x, p in zip(r, self._live):
            d = self.diagonal[p]
            if d == 0:
                if x:
                    return None
                continue
            if x:
                k = d // gcd(d, x)
                out = out * k // gcd(out, k)
        return out

    def zero(self) -> list[int]:
        return [0] * self.ngens

    def pruned(self) -> tuple["FgAbGroup", "AbMap", "AbMap"]:
        """An isomorphic group on its invariant-factor generators, with both isomorphisms."""
        target = FgAbGroup.cyclic_sum([self.diagonal[p] for p in self._live])
        down = AbMap(self, target, [list(self.reduce(self.gen(i))) for i in range(self.ngens)], check=False)
        up = AbMap(target, self, [c for _, c in self.invariant_generators()], check=False)
        return target, down, up

    def gen(self, i: int) -> list[int]:
        v = [0] * self.ngens
        v[i] = 1
        return v

    def elem(self, coords: Sequence[int]) -> "AbElement":
        return AbElement(self, tuple(coords))

    def __repr__(self):
        return f"FgAbGroup(torsion={self.torsion}, free_rank={self.free_rank}, ngens={self.ngens})"


def isomorphic(a: FgAbGroup, b: FgAbGroup) -> bool:
    return a.invariants() == b.invariants()


@dataclass(frozen=True)
class AbElement:
    parent: FgAbGroup
    coords: tuple[int, ...]

    def __add__(self, other: "AbElement") -> "AbElement":
        return AbElement(self.parent, tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __neg__(self):
        return AbElement(self.parent, tuple(-x for x in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return AbElement(self.parent, tuple(k * x for x in self.coords))

    def __eq__(self, other):
        return (
            isinstance(other, AbElement)
            and other.parent is self.parent
            and self.parent.equal(self.coords, other.coords)
        )

    def __hash__(self):
        return hash(self.parent.reduce(self.coords))

    def is_zero(self) -> bool:
        return self.parent.is_zero(self.coords)


@dataclass(frozen=True)
class TorGenerator:
    """Generator <x, k, y> of Tor(A, B): k*x = 0 in A and k*y = 0 in B."""

    x: AbElement
    k: int
    y: AbElement


def direct_sum(*groups: FgAbGroup) -> FgAbGroup:
    n = sum(g.ngens for g in groups)
    rels = []
    off = 0
    for g in groups:
        for r in g.relations:
            rels.append([0] * off + list(r) + [0] * (n - off - g.ngens))
        off += g.ngens
    return FgAbGroup(n, rels)


def invariants_of_sum(*groups: FgAbGroup) -> tuple[tuple[int, ...], int]:
    divs = []
    free = 0
    for g in groups:
        divs.extend(g.torsion)
        free += g.free_rank
    tors, _ = _canonical_torsion(divs)
    return tuple(tors), free


# ---------------------------------------------------------------------------
# homomorphisms


class AbMap:
    """Homomorphism given by the images of the domain generators."""

    def __init__(self, domain: FgAbGroup, codomain: FgAbGroup, matrix: Sequence[Sequence[int]], *, check: bool = True, name: str = ""):
        if len(matrix) != domain.ngens or any(len(r) != codomain.ngens for r in matrix):
            raise DimensionError(
                f"map matrix shape does not match {domain.ngens} -> {codomain.ngens} generators"
            )
        self.domain = domain
        self.codomain = codomain
        self.matrix = [list(r) for r in matrix]
        self.name = name
        if check:
            bad = self.failing_relation()
            if bad is not None:
                raise IllDefinedMap(f"map {name or '?'} sends domain relation {bad} outside the codomain relations")

    def failing_relation(self) -> list[int] | None:
        for r in self.domain.relations:
            if not self.codomain.is_zero(self(r)):
                return r
        return None

    def __call__(self, c: Sequence[int]) -> list[int]:
        return vecmat(c, self.matrix, self.codomain.ngens)

    def then(self, other: "AbMap", check: bool = False) -> "AbMap":
        """Composite: first self, then other."""
        return AbMap(self.domain, other.codomain, matmul(self.matrix, other.matrix, cols=other.codomain.ngens), check=check)

    def agrees_with(self, other: "AbMap") -> bool:
        return all(
            self.codomain.equal(self.matrix[i], other.matrix[i]) for i in range(self.domain.ngens)
        )

    @cached_property
    def image_lattice(self) -> Lattice:
        """Im(f) plus the codomain relations, in codomain generator coordinates."""
        return Lattice(self.codomain.ngens, list(self.matrix) + self.codomain.relations)

    @cached_property
    def kernel_lattice(self) -> Lattice:
        """Preimage of the codomain relation lattice, in domain coordinates."""
        n, m = self.domain.ngens, self.codomain.ngens
        if n == 0:
            return Lattice.zero(0)
        rel = self.codomain.relation_lattice.basis
        stacked = [list(r) for r in self.matrix] + [list(r) for r in rel]
        if m == 0:
            return Lattice.full(n)
        kern = left_kernel(stacked, m)
        return Lattice(n, [x[:n] for x in kern] + self.domain.relations)

    def kernel(self) -> tuple[FgAbGroup, "AbMap"]:
        q = LatticeQuotient(self.kernel_lattice, self.domain.relation_lattice)
        return q.group, AbMap(q.group, self.domain, [list(r) for r in self.kernel_lattice.basis], check=False)

    def image(self) -> tuple[FgAbGroup, "AbMap"]:
        q = LatticeQuotient(self.image_lattice, self.codomain.relation_lattice)
        return q.group, AbMap(q.group, self.codomain, [list(r) for r in self.image_lattice.basis], check=False)

    def cokernel(self) -> tuple[FgAbGroup, "AbMap"]:
        m = self.codomain.ngens
        c = FgAbGroup(m, self.codomain.relations + self.matrix)
        return c, AbMap(self.codomain, c, identity(m), check=False)

    def preimage(self, y: Sequence[int]) -> list[int] | None:
        """Some x with f(x) = y in the codomain, or None if y is not in the image."""
        n, m = self.domain.ngens, self.codomain.ngens
        if m == 0:
            return [0] * n
        stacked = [list(r) for r in self.matrix] + [list(r) for r in self.codomain.relation_lattice.basis]
        if not stacked:
            return [0] * n if not any(y) else None
        h, u = hnf(stacked, m)
        rows = [i for i, r in enumerate(h) if any(r)]
        c = Lattice(m, [h[i] for i in rows], canonical=True).coords(y)
        if c is None:
            return None
        x = [0] * len(stacked)
        for k, i in zip(c, rows):
            if k:
                x = [a + k * b for a, b in zip(x, u[i])]
        return x[:n]

    def is_injective(self) -> bool:
        return self.kernel_lattice == self.domain.relation_lattice

    def is_surjective(self) -> bool:
        return self.image_lattice == Lattice.full(self.codomain.ngens)

    def is_iso(self) -> bool:
        return self.is_surjective() and self.is_injective()

    def __repr__(self):
        return f"AbMap({self.name or ''} {self.domain.ngens}->{self.codomain.ngens})"


def map_kernel(f: AbMap):
    return f.kernel()


def map_image(f: AbMap):
    return f.image()


def map_cokernel(f: AbMap):
    return f.cokernel()


def is_iso(f: AbMap) -> bool:
    return f.is_iso()


def identity_map(a: FgAbGroup) -> AbMap:
    return AbMap(a, a, identity(a.ngens), check=False)


def zero_map(a: FgAbGroup, b: FgAbGroup) -> AbMap:
    return AbMap(a, b, zeros(a.ngens, b.ngens), check=False)


def subgroup_lattice(a: FgAbGroup, elements: Iterable[Sequence[int]]) -> Lattice:
    """Subgroup generated by ``elements`` plus the relations, in generator coordinates."""
    return Lattice(a.ngens, [list(e) for e in elements] + a.relations)


class LatticeQuotient:
    """The group big/small for lattices small <= big, with a coset coordinate map."""

    def __init__(self, big: Lattice, small: Lattice):
        if big.dim != small.dim:
            raise DimensionError("ambient dimensions differ")
        rels = []
        for r in small.basis:
            c = big.coords(r)
            if c is None:
                raise NotASubmodule("the smaller lattice is not contained in the bigger one")
            rels.append(c)
        self.big = big
        self.small = small
        self.group = FgAbGroup(big.rank, rels)

    def coords(self, v: Sequence[int]) -> list[int]:
        c = self.big.coords(v)
        if c is None:
            raise NotASubmodule("vector does not lie in the numerator lattice")
        return c

    def contains(self, v: Sequence[int]) -> bool:
        return self.big.coords(v) is not None


def quotient_group(big: Lattice, small: Lattice) -> tuple[FgAbGroup, callable]:
    q = LatticeQuotient(big, small)
    return q.group, q.coords


# ---------------------------------------------------------------------------
# tensor, Tor, exterior square


def tensor(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    """A (x) B; generator a_i (x) b_j has index i*ngens(B) + j."""
    na, nb = a.ngens, b.ngens
    rels = []
    for r in a.relations:
        for j in range(nb):
            row = [0] * (na * nb)
            for i, x in enumerate(r):
                if x:
                    row[i * nb + j] = x
            rels.append(row)
    for s in b.relations:
        for i in range(na):
            row = [0] * (na * nb)
            base = i * nb
            for j, y in enumerate(s):
                if y:
                    row[base + j] = y
            rels.append(row)
    return FgAbGroup(na * nb, rels)


def tensor_elements(x: Sequence[int], y: Sequence[int]) -> list[int]:
    """Coordinates of x (x) y in the generator basis of tensor(A, B)."""
    nb = len(y)
    out = [0] * (len(x) * nb)
    for i, a in enumerate(x):
        if a:
            base = i * nb
            for j, b in enumerate(y):
                if b:
                    out[base + j] = a * b
    return out


def tensor_maps(f: AbMap, g: AbMap, domain: FgAbGroup | None = None, codomain: FgAbGroup | None = None, check: bool = False) -> AbMap:
    dom = domain if domain is not None else tensor(f.domain, g.domain)
    cod = codomain if codomain is not None else tensor(f.codomain, g.codomain)
    m = kron(f.matrix, g.matrix, f.codomain.ngens, g.codomain.ngens)
    return AbMap(dom, cod, m, check=check)


def tor(a: FgAbGroup, b: FgAbGroup) -> tuple[FgAbGroup, list[TorGenerator]]:
    """Tor_1(A, B) as a sum of Z/gcd(d_i, e_j) over pairs of torsion summands.

    The summand for (d_i, e_j) with g = gcd is generated by
    <(d_i/g) x_i, g, (e_j/g) y_j>, with x_i, y_j the invariant-factor generators.
    """
    divs = []
    gens = []
    for d, x in a.invariant_generators():
        if d == 0:
            continue
        for e, y in b.invariant_generators():
            if e == 0:
                continue
            g = gcd(d, e)
            if g == 1:
                continue
            divs.append(g)
            gens.append(
                TorGenerator(
                    AbElement(a, tuple((d // g) * t for t in x)),
                    g,
                    AbElement(b, tuple((e // g) * t for t in y)),
                )
            )
    return FgAbGroup.cyclic_sum(divs), gens


def exterior_square(a: FgAbGroup) -> tuple[FgAbGroup, AbMap]:
    """A wedge A = (A (x) A) / <x (x) x>, with the projection from A (x) A."""
    t = tensor(a, a)
    n = a.ngens
    rels = list(t.relations)
    for i in range(n):
        for j in range(i, n):
            row = [0] * (n * n)
            row[i * n + j] += 1
            row[j * n + i] += 1 if i != j else 0
            rels.append(row)
    w = FgAbGroup(n * n, rels)
    return w, AbMap(t, w, identity(n * n), check=False)


def wedge_index(i: int, j: int, n: int) -> int:
    """Generator index of a_i wedge a_j in exterior_square (same as a_i (x) a_j)."""
    return i * n + j


def mod_m(a: FgAbGroup, m: int) -> FgAbGroup:
    """A (x) Z/m."""
    if m < 2:
        raise ValueError("modulus must be at least 2")
    return FgAbGroup(a.ngens, a.relations + [[m if i == j else 0 for j in range(a.ngens)] for i in range(a.ngens)])
