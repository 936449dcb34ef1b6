"""Modules over Z(H) cut out of Z(G), tensor products over H, and diagram checkers."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Sequence

from .exactla import (
    AbMap,
    FgAbGroup,
    IllDefinedMap,
    Lattice,
    LatticeQuotient,
    direct_sum,
    identity,
    tensor,
    tensor_elements,
)
from .groupring import (
    Filtration,
    aug_ideal,
    convolve,
    lattice_product,
    left_translate,
    lift_back as lift_back_vector,
    minus_one_vector,
    push_forward,
    right_translate,
    unit_coset_subgroup,
)
from .groups import (
    AbelianSection,
    FiniteGroup,
    GroupError,
    GroupSeries,
    Subgroup,
    cosets,
    product_subgroup,
    quotient_group as group_quotient,
)


class HMismatch(ValueError):
    pass


class NonCommutingSquare(ValueError):
    pass


class NotComposable(ValueError):
    pass


# ---------------------------------------------------------------------------
# subquotients of the group ring


class RingQuotient:
    """big/small for lattices in Z(G), presented on invariant-factor generators.

    ``coords`` sends a vector of ``big`` to coordinates in ``group``;
    ``representative`` goes back to a vector of ``big``.
    """

    def __init__(self, group: FiniteGroup, big: Lattice, small: Lattice):
        self.ring = group
        self.big = big
        self.small = small
        self._quot = LatticeQuotient(big, small)
        self.raw = self._quot.group
        self.group, self._down, self._up = self.raw.pruned()

    def coords(self, v: Sequence[int]) -> list[int]:
        return self._down(self._quot.coords(v))

    def contains(self, v: Sequence[int]) -> bool:
        return self._quot.contains(v)

    def representative(self, c: Sequence[int]) -> list[int]:
        raw = self._up(c)
        out = [0] * self.big.dim
        for k, row in zip(raw, self.big.basis):
            if k:
                out = [a + k * b for a, b in zip(out, row)]
        return out

    def generator_vectors(self) -> list[list[int]]:
        return [self.representative(self.group.gen(i)) for i in range(self.group.ngens)]

    def invariants(self):
        return self.group.invariants()


def map_into(domain: FgAbGroup, target: RingQuotient, vectors: Sequence[Sequence[int]], name: str = "", check: bool = True) -> AbMap:
    """The map sending domain generator i to the class of vectors[i]."""
    return AbMap(domain, target.group, [target.coords(v) for v in vectors], check=check, name=name)


def induced_by_inclusion(source: RingQuotient, target: RingQuotient, name: str = "", check: bool = True) -> AbMap:
    return map_into(source.group, target, source.generator_vectors(), name=name, check=check)


# ---------------------------------------------------------------------------
# H-modules


class HModuleQuotient:
    """big/small inside Z(Gamma) with H acting by left or right multiplication.

    ``image`` sends an element id of H (in ``acting.group``) to the element of
    the ring group that acts; it defaults to the identity, and is the coset
    map when the ring is Z(G/N).
    """

    def __init__(
        self,
        ring: FiniteGroup,
        big: Lattice,
        small: Lattice,
        acting: Subgroup,
        side: str = "left",
        image: Callable[[int], int] | None = None,
        check: bool = True,
    ):
        if side not in ("left", "right"):
            raise ValueError(f"unknown side {side!r}")
        self.ring = ring
        self.acting = acting
        self.side = side
        self._image = image or (lambda h: h)
        self.quotient = RingQuotient(ring, big, small)
        self.underlying = self.quotient.group
        self.gens = acting.generating_set()
        if check:
            self._check_stable()
        self.actions = {h: self.action_map(h) for h in self.gens}

    def act_vector(self, h: int, v: Sequence[int]) -> list[int]:
        g = self._image(h)
        if self.side == "left":
            return left_translate(self.ring, g, v)
        return right_translate(self.ring, v, g)

    def _check_stable(self):
        q = self.quotient
        for h in self.gens:
            for lat, what in ((q.big, "numerator"), (q.small, "denominator")):
                for v in lat.basis:
                    if self.act_vector(h, v) not in lat:
                        raise IllDefinedMap(f"{what} lattice is not stable under the action of element {h}")

    def action_map(self, h: int) -> AbMap:
        q = self.quotient
        rows = [q.coords(self.act_vector(h, v)) for v in q.generator_vectors()]
        return AbMap(self.underlying, self.underlying, rows, name=f"act({h})")

    def coords(self, v: Sequence[int]) -> list[int]:
        return self.quotient.coords(v)

    def verify_action(self, max_order: int = 64) -> bool:
        """Check that the matrices compose like the group elements do."""
        elems = sorted(self.acting.elements) if self.acting.order <= max_order else self.gens
        mats = {h: self.action_map(h) for h in elems}
        grp = self.acting.group
        for g in self.gens:
            for h in elems:
                gh = grp.mul(g, h)
                if gh not in mats:
                    mats[gh] = self.action_map(gh)
                if self.side == "left":
                    comp = mats[h].then(mats[g])
                else:
                    comp = mats[g].then(mats[h])
                if not comp.agrees_with(mats[gh]):
                    return False
        return True

    def is_trivial_action(self) -> bool:
        ident = identity(self.underlying.ngens)
        return all(
            AbMap(self.underlying, self.underlying, ident, check=False).agrees_with(m)
            for m in self.actions.values()
        )


def _same_acting(a: HModuleQuotient, b: HModuleQuotient):
    if a.acting.group is not b.acting.group or a.acting.elements != b.acting.elements:
        raise HMismatch("modules are over different subgroups")


def tensor_over_H(a: HModuleQuotient, b: HModuleQuotient) -> tuple[FgAbGroup, Callable[[Sequence[int], Sequence[int]], list[int]]]:
    """A (x)_H B for a right module A and a left module B.

    Returns the group and a function sending (coords of a, coords of b) to the
    coordinates of a (x) b.
    """
    if a.side != "right" or b.side != "left":
        raise HMismatch("need a right module on the left and a left module on the right")
    _same_acting(a, b)
    plain = tensor(a.underlying, b.underlying)
    na, nb = a.underlying.ngens, b.underlying.ngens
    rels = list(plain.relations)
    if not (a.is_trivial_action() and b.is_trivial_action()):
        for h in a.gens:
            ma, mb = a.actions[h].matrix, b.actions[h].matrix
            for i in range(na):
                ei = [1 if t == i else 0 for t in range(na)]
                for j in range(nb):
                    ej = [1 if t == j else 0 for t in range(nb)]
                    x = tensor_elements(ma[i], ej)
                    y = tensor_elements(ei, mb[j])
                    rels.append([p - q for p, q in zip(x, y)])
    group = FgAbGroup(na * nb, rels)
    return group, tensor_elements


def coinvariants(j: HModuleQuotient) -> FgAbGroup:
    """J / I(H)J computed from the action matrices."""
    u = j.underlying
    rels = list(u.relations)
    for m in j.actions.values():
        for i in range(u.ngens):
            row = list(m.matrix[i])
            row[i] -= 1
            rels.append(row)
    return FgAbGroup(u.ngens, rels)


# ---------------------------------------------------------------------------
# diagram checkers


@dataclass
class DiagramSquare:
    """A --top--> B, A --left--> C, B --right--> D, C --bottom--> D."""

    top: AbMap
    left: AbMap
    right: AbMap
    bottom: AbMap
    name: str = ""

    def commutes(self) -> list[int] | None:
        """None when the square commutes, else the first offending generator of A."""
        a = self.top.then(self.right)
        b = self.left.then(self.bottom)
        d = self.right.codomain
        for i in range(self.top.domain.ngens):
            if not d.equal(a.matrix[i], b.matrix[i]):
                return [1 if t == i else 0 for t in range(self.top.domain.ngens)]
        return None


@dataclass
class PushoutReport:
    ok: bool
    pushout: tuple
    corner: tuple
    kernel: tuple
    cokernel: tuple

    def witness(self) -> dict:
        return {
            "pushout_invariants": self.pushout,
            "corner_invariants": self.corner,
            "kernel_invariants": self.kernel,
            "cokernel_invariants": self.cokernel,
        }


def pushout_check(sq: DiagramSquare) -> PushoutReport:
    """Compare the corner D with the universal pushout (B + C)/graph of A."""
    bad = sq.commutes()
    if bad is not None:
        raise NonCommutingSquare(f"square {sq.name or '?'} does not commute on generator {bad}")
    b, c, d = sq.top.codomain, sq.left.codomain, sq.right.codomain
    nb, nc = b.ngens, c.ngens
    base = direct_sum(b, c)
    rels = list(base.relations)
    for i in range(sq.top.domain.ngens):
        rels.append(list(sq.top.matrix[i]) + [-x for x in sq.left.matrix[i]])
    p = FgAbGroup(nb + nc, rels)
    induced = AbMap(p, d, list(sq.right.matrix) + list(sq.bottom.matrix), name="pushout->corner")
    kern, _ = induced.kernel()
    cok, _ = induced.cokernel()
    ok = induced.is_iso()
    return PushoutReport(ok, p.invariants(), d.invariants(), kern.invariants(), cok.invariants())


def exactness_check(maps: Sequence[AbMap]) -> list[bool]:
    """Exactness at each interior node: Im(f_i) = Ker(f_(i+1))."""
    out = []
    for f, g in zip(maps, maps[1:]):
        if f.codomain.ngens != g.domain.ngens or f.codomain.relation_lattice != g.domain.relation_lattice:
            raise NotComposable(f"maps {f.name or '?'} and {g.name or '?'} are not composable")
        out.append(f.image_lattice == g.kernel_lattice)
    return out


def decomposition_check(lhs: FgAbGroup, summands: Sequence[FgAbGroup]) -> bool:
    return lhs.invariants() == direct_sum(*summands).invariants() if summands else lhs.is_trivial()


# ---------------------------------------------------------------------------
# named maps


def augmentation_quotient(group: FiniteGroup) -> RingQuotient:
    ideal = aug_ideal(group.whole)
    return RingQuotient(group, ideal, lattice_product(group, ideal, ideal))


def phi_map(group: FiniteGroup, section: AbelianSection | None = None) -> AbMap:
    """G^ab -> I/I^2, aG_2 -> a - 1."""
    from .groups import abelianize

    section = section or abelianize(group)
    target = augmentation_quotient(group)
    return map_into(section.target, target, [minus_one_vector(group, a) for a in section.lifts], name="phi")


def psi_map(group: FiniteGroup, n: Subgroup) -> AbMap:
    """I(G)/I(N)Z(G) -> I(G/N) induced by the projection."""
    from .groupring import sided_ideal

    quot, which = group_quotient(group, n)
    source = RingQuotient(group, aug_ideal(group.whole), sided_ideal("right", n))
    target = RingQuotient(quot, aug_ideal(quot.whole), Lattice.zero(quot.n))
    vecs = [push_forward(v, which, quot.n) for v in source.generator_vectors()]
    return map_into(source.group, target, vecs, name="psi")


def fox_quotient(filt: Filtration, n: int, h: Subgroup) -> RingQuotient:
    """F^(n-1) I(H) / F^n I(H)."""
    ih = aug_ideal(h)
    g = filt.group
    return RingQuotient(g, lattice_product(g, filt[n - 1], ih), lattice_product(g, filt[n], ih))


def zeta_map(filt: Filtration, n: int, h: Subgroup) -> AbMap:
    """Q_(n-1)(G) (x) H^ab -> Q_n(G, H), x (x) hH_2 -> x(h - 1)."""
    from .groups import commutator_subgroup

    g = filt.group
    source = RingQuotient(g, filt[n - 1], filt[n])
    hab = AbelianSection(g, h, commutator_subgroup(h, h))
    target = fox_quotient(filt, n, h)
    dom = tensor(source.group, hab.target)
    vecs = []
    for x in source.generator_vectors():
        for lift in hab.lifts:
            vecs.append(convolve(g, x, minus_one_vector(g, lift)))
    return map_into(dom, target, vecs, name=f"zeta_{n}")


def named_map(kind: str, **context) -> AbMap:
    builders = {"phi": phi_map, "psi": psi_map, "zeta": zeta_map}
    if kind not in builders:
        raise KeyError(f"unknown map {kind!r}; known: {sorted(builders)}")
    return builders[kind](**context)


# ---------------------------------------------------------------------------
# corollaries with self-contained checks


def image_series(series: GroupSeries, quot: FiniteGroup, which: Sequence[int]) -> GroupSeries:
    terms = [Subgroup(quot, {which[x] for x in s.elements}) for s in series.terms]
    return GroupSeries(quot, terms, series.kind + "-image")


def relative_fox_polynomial(filt: Filtration, n: int, normal: Subgroup, h: Subgroup) -> RingQuotient:
    """I(G)I(H) / (Z(G)I(N)I(H) + F^n I(H))."""
    from .groupring import sided_ideal

    g = filt.group
    ih = aug_ideal(h)
    big = lattice_product(g, aug_ideal(g.whole), ih)
    small = lattice_product(g, sided_ideal("left", normal), ih) + lattice_product(g, filt[n], ih)
    return RingQuotient(g, big, small)


def norm_element(group: FiniteGroup, t: int) -> list[int]:
    v = [0] * group.n
    x = 0
    while True:
        v[x] += 1
        x = group.mul(x, t)
        if x == 0:
            return v


def cor24_cyclic(series: GroupSeries, normal: Subgroup, t: int, n: int) -> tuple[FgAbGroup, FgAbGroup]:
    """Both sides of the norm-element description for H = <t> cyclic.

    Left: the relative Fox polynomial group from lattices in Z(G).
    Right: P_(n-1)(G/N) / P_(n-1)(G/N) Nbar(t), computed in Z(G/N).
    """
    g = series.group
    h = g.subgroup([t])
    filt = Filtration(series, max(n, 1))
    lhs = relative_fox_polynomial(filt, n, normal, h).group
    quot, which = group_quotient(g, normal)
    qfilt = Filtration(image_series(series, quot, which), max(n, 1))
    iq = aug_ideal(quot.whole)
    # image of 1 + t + ... + t^(m-1); this is not the norm of the image of t
    # when a power of t already lies in N
    nbar = push_forward(norm_element(g, t), which, quot.n)
    times_norm = Lattice(quot.n, [convolve(quot, x, nbar) for x in iq.basis])
    rhs = RingQuotient(quot, iq, qfilt[n] + times_norm).group
    return lhs, rhs


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def power_coset_set(group: FiniteGroup, normal: Subgroup, k: int) -> frozenset[int]:
    """The set N G^k = {x g^k}."""
    powers = {group.power(g, k) for g in range(group.n)}
    return frozenset(group.mul(x, p) for x in normal.elements for p in powers)


def coinvariant_torsion_exponent(j: Lattice, ihj: Lattice) -> int:
    """Exponent of the torsion part of J/I(H)J (1 if torsion-free)."""
    out = 1
    for d in LatticeQuotient(j, ihj).group.torsion:
        out = out * d // gcd(out, d)
    return out


def kernel_j_vectors(group: FiniteGroup, h: Subgroup, kg2: Subgroup, j: Lattice, ihj: Lattice) -> list[list[int]]:
    """The elements (h - 1)x with h in H n K G_(2) G^k and kx in I(H)J, for some k.

    Only k dividing bound = lcm(exponent of G, torsion exponent of J/I(H)J)
    are visited: the set G^k of k-th powers equals G^gcd(k, exp G), and the x
    with kx in I(H)J are the same for k and gcd(k, bound), so both conditions
    only see gcd(k, bound).  k = 0 gives I(H n K G_(2))J, which is already on
    the other side.  For each k the admissible x are lifts of the k-torsion of
    J/I(H)J.
    """
    raw = LatticeQuotient(j, ihj)
    bound = group_exponent_lcm(group.exponent, coinvariant_torsion_exponent(j, ihj))
    n = raw.group.ngens
    out = []
    for k in _divisors(bound):
        allowed = power_coset_set(group, kg2, k)
        hs = [x for x in h.elements if x in allowed and x != 0]
        if not hs:
            continue
        times_k = AbMap(raw.group, raw.group, [[k if a == b else 0 for b in range(n)] for a in range(n)], check=False)
        xs = []
        for c in times_k.kernel_lattice.basis:
            v = [0] * group.n
            for coef, row in zip(c, j.basis):
                if coef:
                    v = [a + coef * b for a, b in zip(v, row)]
            xs.append(v)
        for x in hs:
            hm1 = minus_one_vector(group, x)
            out.extend(convolve(group, hm1, v) for v in xs)
    return out


def cor35_lattices(filt: Filtration, h: Subgroup, k_sub: Subgroup, j: Lattice) -> tuple[Lattice, Lattice]:
    """Both sides of the intersection identity for I(H)J, with U enumerated."""
    from .groups import intersect

    g = filt.group
    ihj = lattice_product(g, aug_ideal(h), j)
    lhs = ihj & (lattice_product(g, aug_ideal(k_sub), j) + lattice_product(g, filt[2], j))
    kg2 = product_subgroup(k_sub, filt.series[2])
    rhs = lattice_product(g, aug_ideal(intersect(h, kg2)), j) + lattice_product(
        g, lattice_product(g, aug_ideal(h), aug_ideal(h)), j
    )
    rhs = rhs + Lattice(g.n, kernel_j_vectors(g, h, kg2, j, ihj))
    return lhs, rhs


def group_exponent_lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def cor35_intersection(filt: Filtration, h: Subgroup, k_sub: Subgroup, j: Lattice) -> bool:
    lhs, rhs = cor35_lattices(filt, h, k_sub, j)
    return lhs == rhs


def cor32_subgroup(group: FiniteGroup, h: Subgroup, j: Lattice) -> tuple[frozenset[int], frozenset[int]]:
    """G n (1 + I(G)J) and H n (1 + I(H)J), as element sets."""
    big = unit_coset_subgroup(group, lattice_product(group, aug_ideal(group.whole), j)).elements
    small = unit_coset_subgroup(group, lattice_product(group, aug_ideal(h), j)).elements
    return big, small & frozenset(h.elements)


# ---------------------------------------------------------------------------
# the degree 2 sequence and the degree 3 square


def coset_representatives(which: Sequence[int]) -> list[int]:
    """Smallest element of each class of a coset index map."""
    reps: dict[int, int] = {}
    for g, q in enumerate(which):
        if q not in reps:
            reps[q] = g
    return [reps[q] for q in range(len(reps))]


def lifts_within(section: AbelianSection, subset: Sequence[int]) -> list[int]:
    """Replace each lift of ``section`` by an element of ``subset`` in the same class."""
    by_class: dict[tuple, int] = {}
    for x in sorted(subset):
        by_class.setdefault(section.coords(x), x)
    out = []
    for lift in section.lifts:
        key = section.coords(lift)
        if key not in by_class:
            raise GroupError("the subset does not meet every class of the section")
        out.append(by_class[key])
    return out


@dataclass
class Fox2Diagram:
    """Middle square and bottom row of the second Fox quotient sequence.

    top:    (HKG_(2)/KG_(2)) (x) J_H -> (G/KG_(2)) (x) J_H      (iota (x) id)
    left:   (HKG_(2)/KG_(2)) (x) J_H -> I(H)J / (I(H n KG_(2))J + I^2(H)J)
    right:  (G/KG_(2)) (x) J_H -> I(G)J / (I(K)J + F^2 J)
    bottom: the inclusion-induced map j between the two quotients
    pi:     I(G)J / (I(K)J + F^2 J) -> (G/HKG_(2)) (x) J_H
    with J_H = J/I(H)J.
    """

    top: AbMap
    left: AbMap
    right: AbMap
    bottom: AbMap
    pi: AbMap
    source: RingQuotient
    target: RingQuotient
    coinv: RingQuotient
    sections: tuple
    kg2: Subgroup

    @property
    def square(self) -> DiagramSquare:
        return DiagramSquare(self.top, self.left, self.right, self.bottom, name="fox2")


def fox2_diagram(filt: Filtration, h: Subgroup, k_sub: Subgroup, j: Lattice, check: bool = True) -> Fox2Diagram:
    from .groups import intersect

    g = filt.group
    kg2 = product_subgroup(k_sub, filt.series[2])
    hkg2 = product_subgroup(h, kg2)
    sec_top = AbelianSection(g, hkg2, kg2)
    sec_mid = AbelianSection(g, g.whole, kg2)
    sec_bot = AbelianSection(g, g.whole, hkg2)
    ih = aug_ideal(h)
    ihj = lattice_product(g, ih, j)
    coinv = RingQuotient(g, j, ihj)
    jh = coinv.group
    jvecs = coinv.generator_vectors()
    source = RingQuotient(
        g,
        ihj,
        lattice_product(g, aug_ideal(intersect(h, kg2)), j) + lattice_product(g, lattice_product(g, ih, ih), j),
    )
    target = RingQuotient(
        g,
        lattice_product(g, aug_ideal(g.whole), j),
        lattice_product(g, aug_ideal(k_sub), j) + lattice_product(g, filt[2], j),
    )
    a = tensor(sec_top.target, jh)
    b = tensor(sec_mid.target, jh)
    e = tensor(sec_bot.target, jh)
    hlifts = lifts_within(sec_top, h.elements)
    nj = jh.ngens
    units = [[1 if t == i else 0 for t in range(nj)] for i in range(nj)]
    top = AbMap(a, b, [tensor_elements(sec_mid.coords(x), u) for x in hlifts for u in units], check=check, name="iota(x)id")
    left = map_into(a, source, [convolve(g, minus_one_vector(g, x), v) for x in hlifts for v in jvecs], name="muH", check=check)
    right = map_into(b, target, [convolve(g, minus_one_vector(g, x), v) for x in sec_mid.lifts for v in jvecs], name="muG", check=check)
    bottom = induced_by_inclusion(source, target, name="j", check=check)

    reps, which = cosets(g, h)

    def project(v: Sequence[int]) -> list[int]:
        # v in Z(G)J splits over the left cosets tH as sum_t t.x_t with x_t in J
        out = [0] * e.ngens
        for idx, t in enumerate(reps):
            part = [0] * g.n
            for x, c in enumerate(v):
                if c and which[x] == idx:
                    part[x] = c
            if not any(part):
                continue
            x_t = left_translate(g, g.inv(t), part)
            cj = coinv.coords(x_t)
            contrib = tensor_elements(sec_bot.coords(t), cj)
            out = [p + q for p, q in zip(out, contrib)]
        return out

    pi = AbMap(target.group, e, [project(v) for v in target.generator_vectors()], check=check, name="pi(x)id")
    return Fox2Diagram(top, left, right, bottom, pi, source, target, coinv, (sec_top, sec_mid, sec_bot), kg2)


@dataclass
class Fox3Square:
    """The square for the third relative Fox polynomial group.

    The corner P_2(H) wedge P_2(H) is replaced by the free abelian group on
    symbols s(a, b), a < b in a set S of elements of H whose classes a - 1
    generate P_2(H) = I(H)/I^3(H).  Since this cover maps onto the wedge
    square, the pushout and the image c_3(Ker l_3) are unchanged.
    """

    square: DiagramSquare
    symbols: list[tuple[int, int]]
    lower: AbelianSection  # H_2/H_4
    target: RingQuotient
    tensor_group: FgAbGroup


def _generating_elements(quot: RingQuotient, elements: Sequence[int], group: FiniteGroup) -> list[int]:
    n = quot.group.ngens
    rels = quot.group.relations
    chosen: list[int] = []
    span = Lattice(n, rels)
    full = Lattice.full(n)
    for x in sorted(elements):
        if span == full:
            break
        if x == 0:
            continue
        c = quot.coords(minus_one_vector(group, x))
        if c in span:
            continue
        chosen.append(x)
        span = span + Lattice(n, [c])
    return chosen


def fox3_square(filt: Filtration, normal: Subgroup, h: Subgroup, check: bool = True) -> Fox3Square:
    from .groups import lower_central_series

    g = filt.group
    if filt.n_max < 3:
        raise ValueError("the degree 3 square needs filtration terms up to 3")
    quot, which = group_quotient(g, normal)
    reps = coset_representatives(which)
    qfilt = Filtration(image_series(filt.series, quot, which), 3)
    left_mod = HModuleQuotient(quot, aug_ideal(quot.whole), qfilt[3], h, "right", image=which.__getitem__, check=check)
    ih = aug_ideal(h)
    ih3 = lattice_product(g, lattice_product(g, ih, ih), ih)
    right_mod = HModuleQuotient(g, ih, ih3, h, "left", check=check)
    tgroup, _ = tensor_over_H(left_mod, right_mod)
    hs = lower_central_series(g, depth=5, within=h)
    lower = AbelianSection(g, hs[2], hs[4])
    target = relative_fox_polynomial(filt, 3, normal, h)

    gens = _generating_elements(right_mod.quotient, h.elements, g)
    symbols = [(a, b) for i, a in enumerate(gens) for b in gens[i + 1:]]
    cover = FgAbGroup(len(symbols))

    def q_vec(x: int) -> list[int]:
        return minus_one_vector(quot, which[x])

    def pl(v: Sequence[int]) -> list[int]:
        return left_mod.coords(v)

    def pr(x: int) -> list[int]:
        return right_mod.coords(minus_one_vector(g, x))

    l3_rows = []
    c3_rows = []
    for a, b in symbols:
        va, vb = q_vec(a), q_vec(b)
        bracket = [p - q for p, q in zip(convolve(quot, va, vb), convolve(quot, vb, va))]
        ra, rb = pr(a), pr(b)
        row = tensor_elements(pl(va), rb)
        row = [p - q for p, q in zip(row, tensor_elements(pl(vb), ra))]
        row = [p - q for p, q in zip(row, tensor_elements(pl(bracket), [x + y for x, y in zip(ra, rb)]))]
        l3_rows.append(row)
        c3_rows.append(lower.coords(g.comm(a, b)))
    l3 = AbMap(cover, tgroup, l3_rows, check=check, name="l3")
    c3 = AbMap(cover, lower.target, c3_rows, check=check, name="c3")
    mu_rows = []
    for x in left_mod.quotient.generator_vectors():
        lx = lift_back_vector(x, reps, g.n)
        for y in right_mod.quotient.generator_vectors():
            mu_rows.append(target.coords(convolve(g, lx, y)))
    mu3 = AbMap(tgroup, target.group, mu_rows, check=check, name="mu3")
    d3 = map_into(lower.target, target, [minus_one_vector(g, x) for x in lower.lifts], name="d3", check=check)
    return Fox3Square(DiagramSquare(l3, c3, mu3, d3, name="fox3"), symbols, lower, target, tgroup)
