"""Graded Lie rings of N-series and the degree <= 3 enveloping approximation.

A ``FoxContext`` bundles a group G, an N-series of G and a subgroup H.  The
H side always uses the lower central series of H.  From the context we build
the abelian sections involved (G^AB = G/G_(2), L_2 = G_(2)/G_(3), H^ab, H_2/H_3,
H_3/H_4), the commutator and tensor-commutator maps, a presentation of the
degree 3 bimodule U_3 and the maps theta_n into the Fox quotients.

All abelian sections are presented in invariant-factor form; elements are
integer coordinate vectors.  Tensor products of sections use the flat
row-major index of ``exactla.tensor``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .exactla import (
    AbMap,
    FgAbGroup,
    Lattice,
    exterior_square,
    tensor,
    tensor_elements,
    tor,
)
from .groupring import Filtration, aug_ideal, convolve, lattice_product, minus_one_vector
from .groups import (
    AbelianSection,
    FiniteGroup,
    GroupError,
    GroupSeries,
    Subgroup,
    intersect,
    lower_central_series,
)
from .tensorh import DiagramSquare, RingQuotient, fox_quotient, map_into


class NoBracketPreimage(ArithmeticError):
    pass


class NoPowerSolution(ArithmeticError):
    pass


def binom2(k: int) -> int:
    """k choose 2, also for negative k."""
    return k * (k - 1) // 2


def _unit(n: int, i: int) -> list[int]:
    v = [0] * n
    v[i] = 1
    return v


def _add(a: list[int], b: Sequence[int], k: int = 1) -> list[int]:
    if k:
        for i, x in enumerate(b):
            if x:
                a[i] += k * x
    return a


# ---------------------------------------------------------------------------
# graded Lie rings


class GradedLieRing:
    """L_n = S_n / S_(n+1) for n = 1, 2, 3 with the two bracket maps."""

    def __init__(self, group: FiniteGroup, series: GroupSeries):
        self.group = group
        self.series = series
        self.sections = {n: AbelianSection(group, series[n], series[n + 1]) for n in (1, 2, 3)}
        l1, l2, l3 = (self.sections[n] for n in (1, 2, 3))
        rows11 = [l2.coords(group.comm(a, b)) for a in l1.lifts for b in l1.lifts]
        rows12 = [l3.coords(group.comm(a, b)) for a in l1.lifts for b in l2.lifts]
        self.b11 = AbMap(tensor(l1.target, l1.target), l2.target, rows11, name="bracket11")
        self.b12 = AbMap(tensor(l1.target, l2.target), l3.target, rows12, name="bracket12")

    def L(self, n: int) -> FgAbGroup:
        return self.sections[n].target

    def bracket11(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        return self.b11(tensor_elements(x, y))

    def bracket12(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        return self.b12(tensor_elements(x, y))

    def brackets_match_commutators(self) -> bool:
        """Brackets of classes agree with commutators of arbitrary representatives."""
        g = self.group
        l1, l2, l3 = (self.sections[n] for n in (1, 2, 3))
        s1, s2 = self.series[1].elements, self.series[2].elements
        for a in s1:
            ca = l1.coords(a)
            for b in s1:
                if tuple(l2.target.reduce(self.bracket11(ca, l1.coords(b)))) != l2.coords(g.comm(a, b)):
                    return False
            for b in s2:
                if tuple(l3.target.reduce(self.bracket12(ca, l2.coords(b)))) != l3.coords(g.comm(a, b)):
                    return False
        return True

    def antisymmetry_and_jacobi(self) -> bool:
        l1, l2, l3 = (self.L(n) for n in (1, 2, 3))
        n1 = l1.ngens
        for i in range(n1):
            x = _unit(n1, i)
            if not l2.is_zero(self.bracket11(x, x)):
                return False
            for j in range(n1):
                y = _unit(n1, j)
                s = [a + b for a, b in zip(self.bracket11(x, y), self.bracket11(y, x))]
                if not l2.is_zero(s):
                    return False
                for k in range(n1):
                    z = _unit(n1, k)
                    total = [0] * l3.ngens
                    _add(total, self.bracket12(x, self.bracket11(y, z)))
                    _add(total, self.bracket12(y, self.bracket11(z, x)))
                    _add(total, self.bracket12(z, self.bracket11(x, y)))
                    if not l3.is_zero(total):
                        return False
        return True


def graded_lie(group: FiniteGroup, series: GroupSeries, depth: int = 3) -> GradedLieRing:
    if depth != 3:
        raise ValueError("only depth 3 is supported")
    series.validate()
    return GradedLieRing(group, series)


# ---------------------------------------------------------------------------
# commutator maps


def c2_map(ab: AbelianSection, l2: AbelianSection) -> AbMap:
    """(K/K_(2)) wedge (K/K_(2)) -> K_(2)/K_(3), a wedge b -> [a, b]."""
    w, _ = exterior_square(ab.target)
    g = ab.group
    rows = [l2.coords(g.comm(a, b)) for a in ab.lifts for b in ab.lifts]
    return AbMap(w, l2.target, rows, name="c2")


def l2_map(a: FgAbGroup) -> AbMap:
    """A wedge A -> A (x) A, x wedge y -> x (x) y - y (x) x."""
    w, _ = exterior_square(a)
    n = a.ngens
    rows = []
    for i in range(n):
        for j in range(n):
            r = [0] * (n * n)
            r[i * n + j] += 1
            r[j * n + i] -= 1
            rows.append(r)
    return AbMap(w, tensor(a, a), rows, name="l2")


def l33_map(a: FgAbGroup) -> AbMap:
    """x (x) y (x) z -> xyz - xzy - yzx + zyx, the tensor expansion of [x, [y, z]]."""
    n = a.ngens
    t3 = tensor(tensor(a, a), a)

    def idx(i, j, k):
        return (i * n + j) * n + k

    rows = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                r = [0] * (n ** 3)
                r[idx(i, j, k)] += 1
                r[idx(i, k, j)] -= 1
                r[idx(j, k, i)] -= 1
                r[idx(k, j, i)] += 1
                rows.append(r)
    return AbMap(t3, t3, rows, name="l33")


def c33_map(ab: AbelianSection, l3: AbelianSection) -> AbMap:
    """x (x) y (x) z -> [x, [y, z]] in H_3/H_4."""
    g = ab.group
    t3 = tensor(tensor(ab.target, ab.target), ab.target)
    rows = []
    for x in ab.lifts:
        for y in ab.lifts:
            for z in ab.lifts:
                rows.append(l3.coords(g.comm(x, g.comm(y, z))))
    return AbMap(t3, l3.target, rows, name="c33")


# ---------------------------------------------------------------------------
# the context


class FoxContext:
    """(G, N-series of G, subgroup H) with every section and map derived from it."""

    def __init__(self, group: FiniteGroup, series: GroupSeries, h: Subgroup, n_max: int = 4):
        self.group = group
        self.series = series
        self.h = h
        self.hseries = lower_central_series(group, depth=5, within=h)
        self.filt = Filtration(series, n_max)
        g, s, hs = group, series, self.hseries
        self.gab = AbelianSection(g, s[1], s[2])
        self.l2g = AbelianSection(g, s[2], s[3])
        self.hab = AbelianSection(g, hs[1], hs[2])
        self.l2h = AbelianSection(g, hs[2], hs[3])
        self.l3h = AbelianSection(g, hs[3], hs[4])
        self.ng = self.gab.rank
        self.nh = self.hab.rank
        self.n2 = self.l2g.rank
        for x in self.hab.lifts:
            if x not in h:
                raise GroupError("abelianization lift outside H")

    # maps between sections -------------------------------------------------
    @cached_property
    def iota(self) -> AbMap:
        return AbMap(self.hab.target, self.gab.target, [self.gab.coords(x) for x in self.hab.lifts], name="iota")

    def iota_vec(self, y: Sequence[int]) -> list[int]:
        return self.iota(y)

    @cached_property
    def c2g(self) -> AbMap:
        return c2_map(self.gab, self.l2g)

    @cached_property
    def c2h(self) -> AbMap:
        return c2_map(self.hab, self.l2h)

    @cached_property
    def l2_g(self) -> AbMap:
        return l2_map(self.gab.target)

    @cached_property
    def l2_h(self) -> AbMap:
        return l2_map(self.hab.target)

    @cached_property
    def l2_gh(self) -> AbMap:
        """(iota (x) id) after l_2 on H^ab."""
        nh, ng = self.nh, self.ng
        rows = []
        for r in self.l2_h.matrix:
            out = [0] * (ng * nh)
            for p in range(nh):
                for q in range(nh):
                    c = r[p * nh + q]
                    if c:
                        _add(out, tensor_elements(self.iota.matrix[p], _unit(nh, q)), c)
            rows.append(out)
        return AbMap(self.l2_h.domain, tensor(self.gab.target, self.hab.target), rows, name="l2GH")

    @cached_property
    def c33(self) -> AbMap:
        return c33_map(self.hab, self.l3h)

    @cached_property
    def l33(self) -> AbMap:
        return l33_map(self.hab.target)

    @cached_property
    def ker_c2h(self) -> Lattice:
        return self.c2h.kernel_lattice

    @cached_property
    def ker_l2gh(self) -> Lattice:
        return self.l2_gh.kernel_lattice

    @cached_property
    def ker_c33(self) -> Lattice:
        return self.c33.kernel_lattice

    # the degree 3 presentation ---------------------------------------------
    @cached_property
    def u3(self) -> "U3Pres":
        return U3Pres(self)

    # group ring side -------------------------------------------------------
    @cached_property
    def ih(self) -> Lattice:
        return aug_ideal(self.h)

    def fox(self, n: int) -> RingQuotient:
        return fox_quotient(self.filt, n, self.h)

    @cached_property
    def q1(self) -> RingQuotient:
        return self.fox(1)

    @cached_property
    def q2(self) -> RingQuotient:
        return self.fox(2)

    @cached_property
    def q3(self) -> RingQuotient:
        return self.fox(3)

    def m1(self, g: int) -> list[int]:
        return minus_one_vector(self.group, g)

    def ring_product(self, *elems: int) -> list[int]:
        out = self.m1(elems[0])
        for e in elems[1:]:
            out = convolve(self.group, out, self.m1(e))
        return out

    # degree 1 and 2 ----------------------------------------------------------
    @cached_property
    def u1(self) -> FgAbGroup:
        return self.hab.target

    @cached_property
    def u2(self) -> FgAbGroup:
        base = tensor(self.gab.target, self.hab.target)
        extra = [self.l2_gh(v) for v in self.ker_c2h.basis]
        return FgAbGroup(base.ngens, base.relations + extra)

    @cached_property
    def theta1(self) -> AbMap:
        return map_into(self.u1, self.q1, [self.m1(h) for h in self.hab.lifts], name="theta1")

    @cached_property
    def theta2(self) -> AbMap:
        vecs = [self.ring_product(g, h) for g in self.gab.lifts for h in self.hab.lifts]
        return map_into(self.u2, self.q2, vecs, name="theta2")

    @cached_property
    def theta3(self) -> AbMap:
        u = self.u3
        vecs = [self.ring_product(w, h) for w in self.l2g.lifts for h in self.hab.lifts]
        vecs += [
            self.ring_product(g1, g2, h)
            for g1 in self.gab.lifts
            for g2 in self.gab.lifts
            for h in self.hab.lifts
        ]
        return map_into(u.group, self.q3, vecs, name="theta3")

    def theta(self, n: int) -> AbMap:
        return {1: self.theta1, 2: self.theta2, 3: self.theta3}[n]

    @cached_property
    def ker_theta3(self) -> Lattice:
        return self.theta3.kernel_lattice


# ---------------------------------------------------------------------------
# the degree 3 presentation


class U3Pres:
    """U_3 on generators BLK-A = L_2 (x) H^ab and BLK-B = G^AB (x) G^AB (x) H^ab."""

    def __init__(self, ctx: FoxContext):
        self.ctx = ctx
        ng, nh, n2 = ctx.ng, ctx.nh, ctx.n2
        self.size_a = n2 * nh
        self.size_b = ng * ng * nh
        self.ngens = self.size_a + self.size_b
        rels: list[list[int]] = []
        block_a = tensor(ctx.l2g.target, ctx.hab.target)
        block_b = tensor(tensor(ctx.gab.target, ctx.gab.target), ctx.hab.target)
        rels += [list(r) + [0] * self.size_b for r in block_a.relations]
        rels += [[0] * self.size_a + list(r) for r in block_b.relations]
        self.tensor_relation_count = len(rels)
        # c_2 (x) id against l_2 (x) id on (G^AB wedge G^AB) (x) H^ab
        for i in range(ng):
            for j in range(ng):
                w = ctx.c2g.matrix[i * ng + j]
                for k in range(nh):
                    ek = _unit(nh, k)
                    row = self.blk_a(w, ek)
                    _add(row, self.blk_b(_unit(ng, i), _unit(ng, j), ek), -1)
                    _add(row, self.blk_b(_unit(ng, j), _unit(ng, i), ek), 1)
                    rels.append(row)
        # G^AB (x) (iota (x) id) l_2 Ker(c_2^H)
        for z in ctx.ker_c2h.basis:
            lz = ctx.l2_h(z)
            for i in range(ng):
                rels.append(self.from_hab_pair(_unit(ng, i), lz))
        # (iota (x) iota (x) id) l_33 Ker(c_33^H)
        for t in ctx.ker_c33.basis:
            rels.append(self.from_hab_triple(ctx.l33(t)))
        self.relations = rels
        self.group = FgAbGroup(self.ngens, rels)

    # coordinates ---------------------------------------------------------
    def zero(self) -> list[int]:
        return [0] * self.ngens

    def blk_a(self, w: Sequence[int], h: Sequence[int]) -> list[int]:
        return tensor_elements(w, h) + [0] * self.size_b

    def blk_b(self, x: Sequence[int], y: Sequence[int], z: Sequence[int]) -> list[int]:
        return [0] * self.size_a + tensor_elements(tensor_elements(x, y), z)

    def from_hab_pair(self, g: Sequence[int], pair: Sequence[int]) -> list[int]:
        """g (x) iota(a) (x) b extended linearly over an element of H^ab (x) H^ab."""
        nh = self.ctx.nh
        out = self.zero()
        for p in range(nh):
            for q in range(nh):
                c = pair[p * nh + q]
                if c:
                    _add(out, self.blk_b(g, self.ctx.iota.matrix[p], _unit(nh, q)), c)
        return out

    def from_hab_triple(self, triple: Sequence[int]) -> list[int]:
        """iota(a) (x) iota(b) (x) c extended linearly over (H^ab)^(x)3."""
        nh = self.ctx.nh
        io = self.ctx.iota.matrix
        out = self.zero()
        for p in range(nh):
            for q in range(nh):
                for r in range(nh):
                    c = triple[(p * nh + q) * nh + r]
                    if c:
                        _add(out, self.blk_b(io[p], io[q], _unit(nh, r)), c)
        return out

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.group.reduce(v)

    def is_zero(self, v: Sequence[int]) -> bool:
        return self.group.is_zero(v)

    def span(self, elements) -> Lattice:
        return Lattice(self.ngens, [list(e) for e in elements] + self.relations)

    @cached_property
    def relation_lattice(self) -> Lattice:
        return self.group.relation_lattice


def u3_build(group: FiniteGroup, series: GroupSeries, h: Subgroup) -> U3Pres:
    return FoxContext(group, series, h).u3


# ---------------------------------------------------------------------------
# rewriting through brackets


class Rewriter:
    """nu_12 and nu_03: rewrite bracket elements of L(H) into U_3 coordinates."""

    def __init__(self, ctx: FoxContext):
        self.ctx = ctx
        self.u = ctx.u3
        self._c2 = {}
        self._c3 = {}

    def c2_preimage(self, w: Sequence[int]) -> list[int]:
        key = tuple(self.ctx.l2h.target.reduce(w))
        if key not in self._c2:
            z = self.ctx.c2h.preimage(list(w))
            if z is None:
                raise NoBracketPreimage(f"{list(w)} is not a sum of brackets in H_2/H_3")
            self._c2[key] = z
        return self._c2[key]

    def c33_preimage(self, w: Sequence[int]) -> list[int]:
        key = tuple(self.ctx.l3h.target.reduce(w))
        if key not in self._c3:
            t = self.ctx.c33.preimage(list(w))
            if t is None:
                raise NoBracketPreimage(f"{list(w)} is not a sum of triple brackets in H_3/H_4")
            self._c3[key] = t
        return self._c3[key]

    def nu12(self, g: Sequence[int], w: Sequence[int], preimage: Sequence[int] | None = None) -> list[int]:
        """g (x) w for g in G^AB and w in H_2/H_3, written as g (x) iota(a) (x) b - g (x) iota(b) (x) a."""
        z = preimage if preimage is not None else self.c2_preimage(w)
        return self.u.from_hab_pair(g, self.ctx.l2_h(z))

    def nu03(self, w: Sequence[int], preimage: Sequence[int] | None = None) -> list[int]:
        """1 (x) w for w in H_3/H_4, written through the tensor expansion of a triple bracket."""
        t = preimage if preimage is not None else self.c33_preimage(w)
        return self.u.from_hab_triple(self.ctx.l33(t))


def nu12_rewrite(ctx: FoxContext, g: Sequence[int], w: Sequence[int]) -> list[int]:
    return Rewriter(ctx).nu12(g, w)


def nu03_rewrite(ctx: FoxContext, w: Sequence[int]) -> list[int]:
    return Rewriter(ctx).nu03(w)


# ---------------------------------------------------------------------------
# delta_1


def delta1_element(ctx: FoxContext, rw: Rewriter, g: int, k: int, h: int) -> list[int]:
    """The image of <gG_(2), k, hH_2> for lifts g in G, h in H with g^k in G_(2), h^k in H_2."""
    grp = ctx.group
    gk, hk = grp.power(g, k), grp.power(h, k)
    if gk not in ctx.series[2] or hk not in ctx.hseries[2]:
        raise GroupError("invalid torsion symbol: powers leave the second terms")
    u = ctx.u3
    gb, hb = list(ctx.gab.coords(g)), list(ctx.hab.coords(h))
    out = rw.nu12(gb, ctx.l2h.coords(hk))
    _add(out, u.blk_a(ctx.l2g.coords(gk), hb), -1)
    c = binom2(k)
    if c:
        _add(out, u.blk_b(gb, gb, hb), c)
        _add(out, u.blk_b(gb, ctx.iota(hb), hb), -c)
    return out


@dataclass
class Delta1:
    tor_group: FgAbGroup
    symbols: list  # (g, k, h) lifts
    images: list[list[int]]
    lattice: Lattice


def delta1(ctx: FoxContext, rw: Rewriter | None = None) -> Delta1:
    rw = rw or Rewriter(ctx)
    tg, gens = tor(ctx.gab.target, ctx.hab.target)
    symbols, images = [], []
    for t in gens:
        g = ctx.gab.element(t.x.coords)
        h = ctx.hab.element(t.y.coords)
        symbols.append((g, t.k, h))
        images.append(delta1_element(ctx, rw, g, t.k, h))
    return Delta1(tg, symbols, images, ctx.u3.span(images))


# ---------------------------------------------------------------------------
# delta_2


@dataclass
class PowerSolution:
    g_prime: int
    g: int


def _solve_power(ctx: FoxContext, target: int, d: int, order: Sequence[int] | None = None) -> PowerSolution:
    """Find g' in G_(2) and g with target = g' g^d; first hit in ``order`` (default: id order)."""
    grp = ctx.group
    s2 = ctx.series[2]
    for g in order if order is not None else range(grp.n):
        gp = grp.mul(target, grp.inv(grp.power(g, d)))
        if gp in s2:
            return PowerSolution(gp, g)
    raise NoPowerSolution("no decomposition g' g^d; the wedge element is not in Ker(l_2^GH)")


def wedge_coefficients(x: Sequence[int], r: int) -> dict[tuple[int, int], int]:
    """a_ij (i < j) with x = sum a_ij e_i wedge e_j, from coordinates on all e_i wedge e_j."""
    return {(i, j): x[i * r + j] - x[j * r + i] for i in range(r) for j in range(i + 1, r)}


def delta2_element(
    ctx: FoxContext,
    rw: Rewriter,
    x: Sequence[int],
    gamma_once: bool = True,
    order: Sequence[int] | None = None,
) -> list[int]:
    """A representative of delta_2(x) for x in Ker(l_2^GH) n Ker(c_2^H), in wedge coordinates.

    ``gamma_once`` selects how often the term 1 (x) gamma H_4 is subtracted:
    once, or once per summand k (r times).
    """
    grp = ctx.group
    u = ctx.u3
    r = ctx.nh
    hs = ctx.hab.lifts
    ds = ctx.hab.divisors
    a = wedge_coefficients(x, r)
    gamma = 0
    for (i, j), aij in sorted(a.items()):
        if aij:
            gamma = grp.mul(gamma, grp.power(grp.comm(hs[i], hs[j]), aij))
    if gamma not in ctx.hseries[3]:
        raise GroupError("gamma is not in H_3; the wedge element is not in Ker(c_2^H)")
    out = u.zero()
    for k in range(r):
        alpha = [a[(l, k)] if l < k else (0 if l == k else -a[(k, l)]) for l in range(r)]
        target = 0
        for l in range(r):
            target = grp.mul(target, grp.power(hs[l], alpha[l]))
        sol = _solve_power(ctx, target, ds[k], order)
        ek = _unit(r, k)
        gk = list(ctx.gab.coords(sol.g))
        _add(out, u.blk_a(ctx.l2g.coords(sol.g_prime), ek))
        _add(out, rw.nu12(gk, ctx.l2h.coords(grp.power(hs[k], ds[k]))))
        c = binom2(ds[k])
        if c:
            _add(out, u.blk_b(gk, gk, ek), c)
            _add(out, u.blk_b(gk, ctx.iota(ek), ek), -c)
        for l in range(r):
            cl = binom2(alpha[l])
            if cl:
                il = ctx.iota.matrix[l]
                _add(out, u.blk_b(il, il, ek), -cl)
        for p in range(r):
            for q in range(p + 1, r):
                c = alpha[p] * alpha[q]
                if c:
                    _add(out, u.blk_b(ctx.iota.matrix[p], ctx.iota.matrix[q], ek), -c)
    times = 1 if gamma_once else r
    _add(out, rw.nu03(ctx.l3h.coords(gamma)), -times)
    return out


@dataclass
class Delta2:
    domain: Lattice  # Ker(l_2^GH) n Ker(c_2^H) in wedge coordinates
    images: list[list[int]]
    lattice: Lattice  # Im(delta_1) + Im(delta_2) + relations


def delta2(ctx: FoxContext, d1: Delta1 | None = None, rw: Rewriter | None = None, gamma_once: bool = True, order=None) -> Delta2:
    rw = rw or Rewriter(ctx)
    d1 = d1 or delta1(ctx, rw)
    dom = ctx.ker_l2gh & ctx.ker_c2h
    images = [delta2_element(ctx, rw, x, gamma_once, order) for x in dom.basis]
    return Delta2(dom, images, ctx.u3.span(d1.images + images))


# ---------------------------------------------------------------------------
# R_3 and the reduced quotient


@dataclass
class HeightTuple:
    elements: tuple[int, ...]
    lcs_weights: tuple[int, ...]
    series_weights: tuple[int, ...]
    n: int

    def satisfied(self) -> bool:
        total = sum(self.series_weights)
        return all(total - l + k >= self.n for k, l in zip(self.lcs_weights, self.series_weights))


def _weight(series: GroupSeries, x: int, cap: int = 8) -> int:
    w = 1
    while w < cap and x in series[w + 1]:
        w += 1
    return w


def height_tuple(ctx: FoxContext, elements: Sequence[int], n: int) -> HeightTuple:
    ks = tuple(_weight(ctx.hseries, x) for x in elements)
    ls = tuple(_weight(ctx.series, x) for x in elements)
    return HeightTuple(tuple(elements), ks, ls, n)


@dataclass
class R3Family:
    generators: list[int]  # generators s_i of H n G_(2)
    pairs: list[tuple[int, int]]
    constraint: Lattice  # coefficient vectors b on pairs with prod [s_i, s_j]^b in H_3
    images: list[list[int]]
    wedges: list[list[int]]  # sum b_ij s_i wedge s_j, in wedge coordinates


def r3_relations(ctx: FoxContext, rw: Rewriter | None = None) -> R3Family:
    rw = rw or Rewriter(ctx)
    grp = ctx.group
    u = ctx.u3
    inter = intersect(ctx.h, ctx.series[2])
    gens = inter.generating_set()
    pairs = [(i, j) for i in range(len(gens)) for j in range(i + 1, len(gens))]
    comms = [grp.comm(gens[i], gens[j]) for i, j in pairs]
    l2t = ctx.l2h.target
    if pairs:
        cond = AbMap(FgAbGroup(len(pairs)), l2t, [ctx.l2h.coords(c) for c in comms], check=False)
        constraint = cond.kernel_lattice
    else:
        constraint = Lattice.zero(0)
    images, wedges = [], []
    for b in constraint.basis:
        prod = 0
        for c, e in zip(comms, b):
            if e:
                prod = grp.mul(prod, grp.power(c, e))
        if prod not in ctx.hseries[3]:
            raise GroupError("commutator product outside H_3")
        out = rw.nu03(ctx.l3h.coords(prod))
        wedge = [0] * (ctx.nh * ctx.nh)
        for (i, j), e in zip(pairs, b):
            if not e:
                continue
            si, sj = gens[i], gens[j]
            _add(out, u.blk_a(ctx.l2g.coords(si), ctx.hab.coords(sj)), -e)
            _add(out, u.blk_a(ctx.l2g.coords(sj), ctx.hab.coords(si)), e)
            _add(wedge, tensor_elements(ctx.hab.coords(si), ctx.hab.coords(sj)), e)
        images.append(out)
        wedges.append(wedge)
    return R3Family(gens, pairs, constraint, images, wedges)


def u3bar(ctx: FoxContext, family: R3Family | None = None) -> FgAbGroup:
    family = family or r3_relations(ctx)
    u = ctx.u3
    return FgAbGroup(u.ngens, u.relations + family.images)


# ---------------------------------------------------------------------------
# the H = G description


@dataclass
class Cor65Sets:
    u1_images: list[list[int]]
    u2_images: list[list[int]]
    lattice: Lattice


def cor65_sets(ctx: FoxContext, rw: Rewriter | None = None) -> Cor65Sets:
    """Generators of U_1 + U_2 inside U_3(G, G).

    U_1 is spanned by one element per (a, b, k) with a^k in G_(2), b^k in G_2,
    k over one full period 1..2e of the formula (e = exponent of G).  U_2 is
    the image of a linear map on integer combinations of atoms (pairs a, b in
    G_(2), or triples (c, d, k)) whose commutator product lies in G_3; the
    admissible combinations are found as a lattice intersection.
    """
    grp = ctx.group
    if ctx.h != grp.whole:
        raise GroupError("this description needs H = G")
    rw = rw or Rewriter(ctx)
    u = ctx.u3
    s2 = ctx.series[2]
    g2 = ctx.hseries[2]
    period = 2 * grp.exponent
    seen: set[tuple[int, ...]] = set()
    u1 = []
    for a in range(grp.n):
        for b in range(grp.n):
            for k in range(1, period + 1):
                if grp.power(a, k) in s2 and grp.power(b, k) in g2:
                    v = delta1_element(ctx, rw, a, k, b)
                    key = u.reduce(v)
                    if key not in seen:
                        seen.add(key)
                        u1.append(v)
    # U_2: atoms (phi0, psi) with psi in G_2/G_4
    sec24 = AbelianSection(grp, g2, ctx.hseries[4])
    n24 = sec24.rank
    atoms: dict[tuple, list[int]] = {}

    def add_atom(phi0: list[int], psi: int):
        key = u.reduce(phi0) + tuple(sec24.coords(psi))
        if key not in atoms:
            atoms[key] = phi0 + list(sec24.coords(psi))

    for a in s2.elements:
        for b in s2.elements:
            phi0 = u.blk_a(ctx.l2g.coords(a), ctx.hab.coords(b))
            _add(phi0, u.blk_a(ctx.l2g.coords(b), ctx.hab.coords(a)), -1)
            add_atom(phi0, grp.comm(a, b))
    for c in range(grp.n):
        for d in range(grp.n):
            for k in range(1, period + 1):
                ck, dk = grp.power(c, k), grp.power(d, k)
                if ck not in s2 or dk not in s2:
                    continue
                cb, db_g, db_h = list(ctx.gab.coords(c)), list(ctx.gab.coords(d)), list(ctx.hab.coords(d))
                phi0 = u.blk_a(ctx.l2g.coords(ck), db_h)
                _add(phi0, u.blk_a(ctx.l2g.coords(dk), ctx.hab.coords(c)), -1)
                bc = binom2(k)
                if bc:
                    _add(phi0, u.blk_b(cb, db_g, db_h), bc)
                    _add(phi0, u.blk_b(cb, cb, db_h), -bc)
                add_atom(phi0, grp.comm(c, dk))
    dim = u.ngens + n24
    rel24 = [[0] * u.ngens + [sec24.divisors[i] if i == j else 0 for j in range(n24)] for i in range(n24)]
    relu = [list(r) + [0] * n24 for r in u.relations]
    graph = Lattice(dim, list(atoms.values()) + rel24 + relu)
    # combinations whose commutator product lies in G_3: last block in the G_3/G_4 part
    g3_coords = [list(sec24.coords(x)) for x in ctx.hseries[3].generating_set()]
    allowed = Lattice(dim, [_unit(dim, i) for i in range(u.ngens)] + [[0] * u.ngens + c for c in g3_coords] + rel24)
    admissible = graph & allowed
    u2 = []
    for v in admissible.basis:
        head, tail = list(v[: u.ngens]), v[u.ngens:]
        gelem = sec24.element(tail)
        if gelem not in ctx.hseries[3]:
            raise GroupError("admissible combination outside G_3")
        _add(head, rw.nu03(ctx.l3h.coords(gelem)), -1)
        u2.append(head)
    return Cor65Sets(u1, u2, u.span(u1 + u2))


# ---------------------------------------------------------------------------
# the degree 2 square relative to a normal subgroup K


@dataclass
class Fox2Square:
    """H^ab wedge H^ab with maps into (G/KG_(2)) (x) H^ab, H_2/H_3 and I(G)I(H)/(I(K)I(H) + F^2 I(H)).

    ``units`` is the set of g with g - 1 in I(K)I(H) + F^2 I(H).
    """

    square: DiagramSquare
    hab: AbelianSection
    l2h: AbelianSection
    target: RingQuotient
    units: frozenset[int]
    quotient_section: AbelianSection  # G/KG_(2)


def fox2_square(group: FiniteGroup, series: GroupSeries, h: Subgroup, k_sub: Subgroup, check: bool = True) -> Fox2Square:
    from .groups import product_subgroup
    from .groupring import unit_coset_subgroup

    filt = Filtration(series, 2)
    hs = lower_central_series(group, depth=4, within=h)
    hab = AbelianSection(group, hs[1], hs[2])
    l2h = AbelianSection(group, hs[2], hs[3])
    kg2 = product_subgroup(k_sub, series[2])
    gk = AbelianSection(group, group.whole, kg2)
    ih = aug_ideal(h)
    small = lattice_product(group, aug_ideal(k_sub), ih) + lattice_product(group, filt[2], ih)
    target = RingQuotient(group, lattice_product(group, aug_ideal(group.whole), ih), small)
    nh, nk = hab.rank, gk.rank
    iota_k = [gk.coords(x) for x in hab.lifts]
    l2 = l2_map(hab.target)
    rows = []
    for r in l2.matrix:
        out = [0] * (nk * nh)
        for p in range(nh):
            for q in range(nh):
                c = r[p * nh + q]
                if c:
                    _add(out, tensor_elements(iota_k[p], _unit(nh, q)), c)
        rows.append(out)
    top = AbMap(l2.domain, tensor(gk.target, hab.target), rows, check=check, name="l2GH")
    left = c2_map(hab, l2h)
    right = map_into(
        top.codomain,
        target,
        [convolve(group, minus_one_vector(group, x), minus_one_vector(group, y)) for x in gk.lifts for y in hab.lifts],
        name="mu2",
        check=check,
    )
    bottom = map_into(l2h.target, target, [minus_one_vector(group, x) for x in l2h.lifts], name="d2", check=check)
    units = unit_coset_subgroup(group, small).elements
    return Fox2Square(DiagramSquare(top, left, right, bottom, name="fox2"), hab, l2h, target, units, gk)
