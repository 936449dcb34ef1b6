"""Verification suites run over a corpus of (group, series, subgroup) instances.

Every suite is split into independent units (one per instance and parameter
choice).  A unit recomputes both sides of an identity by separate routes and
returns a ``CheckRecord``; the runner merges records in canonical key order,
so reports do not depend on the number of worker processes.

Maps that the negative controls corrupt are routed through ``Workspace.tamper``
under a fixed name; the untampered runs pass them through unchanged.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .corpus import ResolvedEntry, resolve_corpus
from .exactla import AbMap, FgAbGroup, IllDefinedMap, Lattice, exterior_square, tensor, tensor_elements
from .groupring import (
    Filtration,
    aug_ideal,
    convolve,
    ideal_power,
    lattice_product,
    minus_one_vector,
    unit_coset_subgroup,
    whole_ring,
)
from .groups import (
    AbelianSection,
    DEFAULT_MAX_ORDER,
    FiniteGroup,
    Subgroup,
    center,
    commutator_subgroup,
    is_normal,
    quotient_group,
)
from .lie import (
    FoxContext,
    GradedLieRing,
    Rewriter,
    cor65_sets,
    delta1,
    delta2,
    delta2_element,
    fox2_square,
    r3_relations,
)
from .tensorh import (
    DiagramSquare,
    HModuleQuotient,
    NonCommutingSquare,
    RingQuotient,
    coinvariants,
    cor24_cyclic,
    cor32_subgroup,
    cor35_intersection,
    decomposition_check,
    exactness_check,
    fox2_diagram,
    fox3_square,
    image_series,
    kernel_j_vectors,
    lift_back_vector,
    pushout_check,
    tensor_over_H,
    zeta_map,
)

Tamper = Callable[[str, AbMap], AbMap]

SUITES = (
    "coinvariants",
    "fox2-pushout",
    "fox2-sequence",
    "decomposition",
    "norm-element",
    "approximation",
    "third-kernel",
    "r3-relations",
    "h-equals-g",
    "fox3-pushout",
    "tensor-lemma",
    "lie-ring",
    "negative-controls",
)

# suites whose units only depend on (G, H), not on the chosen series
SERIES_FREE = {"coinvariants", "decomposition", "tensor-lemma"}

TENSOR_LEMMA_MAX_ORDER = 16


def invariants(group: FgAbGroup) -> dict:
    return {"torsion": list(group.torsion), "free_rank": group.free_rank}


@dataclass
class CheckRecord:
    suite: str
    instance: str
    status: str  # pass | fail | skip
    groups: dict[str, dict] = field(default_factory=dict)
    parts: dict[str, bool] = field(default_factory=dict)
    witness: dict | None = None
    note: str = ""
    wall: float = 0.0

    def payload(self) -> dict:
        """Everything except the wall time, for byte-identical reports."""
        out = {
            "suite": self.suite,
            "instance": self.instance,
            "status": self.status,
            "groups": self.groups,
            "parts": self.parts,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class Unit:
    suite: str
    entry: int
    series: str
    subgroup: str
    params: tuple = ()

    @property
    def key(self) -> str:
        extra = "".join(f"|{k}={v}" for k, v in self.params)
        return f"{self.suite}|{self.entry:03d}|{self.series}|H=<{self.subgroup}>{extra}"

    def param(self, name: str, default=None):
        return dict(self.params).get(name, default)


def corrupt_entry(m: AbMap, i: int, j: int, delta: int = 1) -> AbMap:
    """A copy of ``m`` with one matrix entry shifted; not validated."""
    rows = [list(r) for r in m.matrix]
    rows[i][j] += delta
    return AbMap(m.domain, m.codomain, rows, check=False, name=m.name)


class Workspace:
    """Resolved corpus plus caches shared by the units of one process."""

    def __init__(self, resolved: list[ResolvedEntry], tamper: Tamper | None = None):
        self.resolved = resolved
        self.tamper_hook = tamper
        self._filt: dict = {}
        self._ctx: dict = {}

    def entry(self, unit: Unit) -> ResolvedEntry:
        return self.resolved[unit.entry]

    def group(self, unit: Unit) -> FiniteGroup:
        return self.entry(unit).group

    def subgroup(self, unit: Unit) -> Subgroup:
        return self.entry(unit).subgroups[unit.subgroup]

    def series(self, unit: Unit):
        return self.entry(unit).series[unit.series]

    def filtration(self, unit: Unit, n_max: int = 4) -> Filtration:
        key = (unit.entry, unit.series)
        if key not in self._filt:
            self._filt[key] = Filtration(self.series(unit), n_max)
        return self._filt[key]

    def context(self, unit: Unit, subgroup: str | None = None) -> FoxContext:
        name = unit.subgroup if subgroup is None else subgroup
        key = (unit.entry, unit.series, name)
        if key not in self._ctx:
            e = self.entry(unit)
            h = e.group.whole if name == "*" else e.subgroups[name]
            self._ctx[key] = FoxContext(e.group, e.series[unit.series], h)
        return self._ctx[key]

    def tamper(self, name: str, m: AbMap) -> AbMap:
        return self.tamper_hook(name, m) if self.tamper_hook else m


class CheckFailure(Exception):
    """Raised inside a unit to stop with a failing part and a witness."""

    def __init__(self, part: str, witness: dict):
        super().__init__(part)
        self.part = part
        self.witness = witness


def require_well_defined(m: AbMap):
    bad = m.failing_relation()
    if bad is not None:
        raise CheckFailure(f"{m.name}_well_defined", {"map": m.name, "relation": list(bad)})


def first_mismatch(m: AbMap, samples: Iterable[tuple[Sequence[int], Sequence[int], object]]):
    """The label of the first sample (x, expected, label) with m(x) != expected."""
    for x, want, label in samples:
        if not m.codomain.equal(m(list(x)), list(want)):
            return label
    return None


def lattice_of_images(f: AbMap, vectors: Iterable[Sequence[int]]) -> Lattice:
    return Lattice(f.codomain.ngens, [f(list(v)) for v in vectors] + f.codomain.relations)


# ---------------------------------------------------------------------------
# planning


def _normal_names(e: ResolvedEntry) -> list[str]:
    return sorted(e.normals)


def _k_choices(e: ResolvedEntry) -> list[str]:
    return ["1", "center", "H"]


def _j_choices() -> list[str]:
    return ["I(H)", "I2(H)"]


def _is_cyclic(h: Subgroup) -> bool:
    return any(h.group.element_order(x) == h.order for x in h.elements) if h.order > 1 else True


def _is_abelian(h: Subgroup) -> bool:
    g = h.group
    gens = h.generating_set()
    return all(g.comm(a, b) == 0 for a in gens for b in gens)


def plan(resolved: list[ResolvedEntry], suites: Sequence[str]) -> list[Unit]:
    units: list[Unit] = []
    for idx, e in enumerate(resolved):
        first_series = next(iter(e.series))
        for suite in suites:
            if suite == "negative-controls":
                continue
            series_names = [first_series] if suite in SERIES_FREE else list(e.series)
            for s in series_names:
                if suite == "h-equals-g" or suite == "lie-ring":
                    units.append(Unit(suite, idx, s, "*"))
                    continue
                for hname in e.subgroups:
                    base = dict(suite=suite, entry=idx, series=s, subgroup=hname)
                    if suite in ("coinvariants", "decomposition", "tensor-lemma"):
                        for j in _j_choices():
                            units.append(Unit(**base, params=(("J", j),)))
                    elif suite == "fox2-pushout":
                        for k in _k_choices(e):
                            units.append(Unit(**base, params=(("K", k),)))
                    elif suite == "fox2-sequence":
                        for k in _k_choices(e):
                            for j in _j_choices():
                                units.append(Unit(**base, params=(("K", k), ("J", j))))
                    elif suite == "norm-element":
                        for nname in _normal_names(e):
                            for n in (2, 3):
                                units.append(Unit(**base, params=(("N", nname), ("n", n))))
                    elif suite == "fox3-pushout":
                        for nname in _normal_names(e):
                            units.append(Unit(**base, params=(("N", nname),)))
                    else:
                        units.append(Unit(**base))
    if "negative-controls" in suites:
        units.extend(negative_control_units(resolved))
    return sorted(units, key=lambda u: u.key)


def describe_unit(ws: Workspace, unit: Unit) -> str:
    e = ws.entry(unit)
    text = f"{e.name}|{unit.series}|H=<{unit.subgroup or '1'}>"
    for k, v in unit.params:
        if k == "N":
            v = f"<{v or '1'}>"
        text += f"|{k}={v}"
    return text


# ---------------------------------------------------------------------------
# the units


def _j_lattice(h: Subgroup, which: str) -> Lattice:
    ih = aug_ideal(h)
    return ih if which == "I(H)" else lattice_product(h.group, ih, ih)


def _k_subgroup(e: ResolvedEntry, h: Subgroup, which: str) -> Subgroup:
    g = e.group
    return {"1": g.trivial, "center": center(g), "H": h}[which]


def unit_coinvariants(ws: Workspace, unit: Unit, rec: CheckRecord):
    g, h = ws.group(unit), ws.subgroup(unit)
    j = _j_lattice(h, unit.param("J"))
    lhs = RingQuotient(g, lattice_product(g, whole_ring(g), j), lattice_product(g, aug_ideal(g.whole), j)).group
    jmod = HModuleQuotient(g, j, Lattice.zero(g.n), h, "left")
    rhs = coinvariants(jmod)
    rec.groups.update(lhs=invariants(lhs), coinvariants=invariants(rhs))
    rec.parts["first_quotient"] = lhs.invariants() == rhs.invariants()
    big, small = cor32_subgroup(g, h, j)
    rec.parts["unit_subgroup"] = big == small
    if big != small:
        rec.witness = {"in_G": sorted(big), "in_H": sorted(small)}


def unit_fox2_pushout(ws: Workspace, unit: Unit, rec: CheckRecord):
    e = ws.entry(unit)
    g, h = e.group, ws.subgroup(unit)
    k = _k_subgroup(e, h, unit.param("K"))
    sq = fox2_square(g, ws.series(unit), h, k)
    top, left, right, bottom = (ws.tamper(m.name, m) for m in (sq.square.top, sq.square.left, sq.square.right, sq.square.bottom))
    for m in (top, left, right, bottom):
        require_well_defined(m)
    square = DiagramSquare(top, left, right, bottom, name="fox2")
    rep = pushout_check(square)
    rec.groups.update(corner=invariants(right.codomain), wedge=invariants(top.domain), lower=invariants(left.codomain))
    rec.parts["pushout"] = rep.ok
    if not rep.ok:
        rec.witness = rep.witness()
    hab, l2h, target = sq.hab, sq.l2h, sq.target
    gk_coords = sq.quotient_section.coords
    # element-level formulas, over all elements rather than the lifts used to build the maps
    hel = sorted(h.elements)
    wedge = lambda a, b: tensor_elements(hab.coords(a), hab.coords(b))
    samples_top = (
        (wedge(a, b), [x - y for x, y in zip(tensor_elements(gk_coords(a), hab.coords(b)), tensor_elements(gk_coords(b), hab.coords(a)))], (a, b))
        for a in hel for b in hel
    )
    samples_left = ((wedge(a, b), l2h.coords(g.comm(a, b)), (a, b)) for a in hel for b in hel)
    samples_right = (
        (tensor_elements(gk_coords(x), hab.coords(y)), target.coords(convolve(g, minus_one_vector(g, x), minus_one_vector(g, y))), (x, y))
        for x in range(g.n) for y in hel
    )
    samples_bottom = ((l2h.coords(x), target.coords(minus_one_vector(g, x)), x) for x in sorted(l2h.top.elements))
    for name, m, samples in (("l2GH", top, samples_top), ("c2", left, samples_left), ("mu2", right, samples_right), ("d2", bottom, samples_bottom)):
        bad = first_mismatch(m, samples)
        rec.parts[f"{name}_formula"] = bad is None
        if bad is not None and rec.witness is None:
            rec.witness = {"map": name, "element": list(bad) if isinstance(bad, tuple) else bad}
    # the subgroup identity
    kern_d2 = bottom.kernel_lattice
    from_kernel = {x for x in l2h.top.elements if list(l2h.coords(x)) in kern_d2}
    rec.parts["units_are_kernel"] = set(sq.units) == from_kernel
    image = lattice_of_images(left, top.kernel_lattice.basis)
    rec.parts["kernel_is_image"] = kern_d2 == image
    if rec.witness is None and not rec.parts["units_are_kernel"]:
        rec.witness = {"units": sorted(sq.units), "kernel_elements": sorted(from_kernel)}


def unit_fox2_sequence(ws: Workspace, unit: Unit, rec: CheckRecord):
    e = ws.entry(unit)
    g, h = e.group, ws.subgroup(unit)
    k = _k_subgroup(e, h, unit.param("K"))
    j = _j_lattice(h, unit.param("J"))
    filt = ws.filtration(unit)
    d = fox2_diagram(filt, h, k, j)
    top, left, right, bottom, pi = (ws.tamper(m.name, m) for m in (d.top, d.left, d.right, d.bottom, d.pi))
    for m in (top, left, right, bottom, pi):
        require_well_defined(m)
    sec_top, sec_mid, sec_bot = d.sections
    rec.groups.update(
        source=invariants(d.source.group),
        target=invariants(d.target.group),
        coinvariants=invariants(d.coinv.group),
        cokernel_side=invariants(pi.codomain),
    )
    rep = pushout_check(DiagramSquare(top, left, right, bottom, name="fox2-middle"))
    rec.parts["pushout"] = rep.ok
    if not rep.ok:
        rec.witness = rep.witness()
    exact = exactness_check([bottom, pi])
    rec.parts["exact_middle"] = exact[0]
    rec.parts["exact_right"] = pi.is_surjective()
    # Ker(j) against the listed generators (h - 1)x
    ihj = lattice_product(g, aug_ideal(h), j)
    listed = [d.source.coords(v) for v in kernel_j_vectors(g, h, d.kg2, j, ihj)]
    rec.parts["kernel_j"] = bottom.kernel_lattice == Lattice(d.source.group.ngens, listed + d.source.group.relations)
    # element-level formulas
    jbasis = [list(v) for v in j.basis]
    jc = [d.coinv.coords(v) for v in jbasis]
    hel = sorted(h.elements)
    units_j = [[1 if t == i else 0 for t in range(d.coinv.group.ngens)] for i in range(d.coinv.group.ngens)]
    formulas = {
        "iota": (top, ((tensor_elements(sec_top.coords(x), u), tensor_elements(sec_mid.coords(x), u), x) for x in hel for u in units_j)),
        "muH": (
            left,
            ((tensor_elements(sec_top.coords(x), c), d.source.coords(convolve(g, minus_one_vector(g, x), v)), x) for x in hel for v, c in zip(jbasis, jc)),
        ),
        "muG": (
            right,
            ((tensor_elements(sec_mid.coords(x), c), d.target.coords(convolve(g, minus_one_vector(g, x), v)), x) for x in range(g.n) for v, c in zip(jbasis, jc)),
        ),
        "j": (bottom, ((d.source.coords(v), d.target.coords(v), i) for i, v in enumerate(d.source.big.basis))),
        "pi": (
            pi,
            ((d.target.coords(convolve(g, minus_one_vector(g, x), v)), tensor_elements(sec_bot.coords(x), c), x) for x in range(g.n) for v, c in zip(jbasis, jc)),
        ),
    }
    for name, (m, samples) in formulas.items():
        bad = first_mismatch(m, samples)
        rec.parts[f"{name}_formula"] = bad is None
        if bad is not None and rec.witness is None:
            rec.witness = {"map": name, "sample": bad}
    # the split case
    split_lhs = sec_mid.target.invariants()
    from .exactla import direct_sum

    split_rhs = direct_sum(sec_top.target, sec_bot.target).invariants()
    if split_lhs == split_rhs:
        rec.parts["split_decomposition"] = decomposition_check(d.target.group, [d.source.group, pi.codomain])
    else:
        rec.note = "abelian sequence does not split; decomposition not applicable"
    rec.parts["intersection"] = cor35_intersection(filt, h, k, j)


def unit_decomposition(ws: Workspace, unit: Unit, rec: CheckRecord):
    g, h = ws.group(unit), ws.subgroup(unit)
    jname = unit.param("J")
    j = _j_lattice(h, jname)
    ig, ih = aug_ideal(g.whole), aug_ideal(h)
    ihj = lattice_product(g, ih, j)
    coinv = RingQuotient(g, j, ihj).group
    lhs = RingQuotient(g, lattice_product(g, ig, j), lattice_product(g, lattice_product(g, ig, ih), j)).group
    first = RingQuotient(g, ihj, lattice_product(g, lattice_product(g, ih, ih), j)).group
    relative = RingQuotient(g, ig, lattice_product(g, whole_ring(g), ih)).group
    rec.groups.update(lhs=invariants(lhs), first=invariants(first), relative_tensor=invariants(tensor(relative, coinv)))
    rec.parts["subgroup_split"] = decomposition_check(lhs, [first, tensor(relative, coinv)])
    if not is_normal(h):
        rec.note = "H is not normal; only the general splitting applies"
        return
    hg = commutator_subgroup(h, g.whole)
    small = lattice_product(g, lattice_product(g, ih, ig), j) + lattice_product(g, lattice_product(g, aug_ideal(hg), whole_ring(g)), j)
    lhs_n = RingQuotient(g, lattice_product(g, ig, j), small).group
    hbar = AbelianSection(g, h, hg).target
    quot, _ = quotient_group(g, h)
    aug_quot = FgAbGroup(quot.n - 1)
    # left summand as the kernel side of the split sequence, computed from lattices
    left_side = RingQuotient(g, ihj, lattice_product(g, aug_ideal(hg), j) + lattice_product(g, lattice_product(g, ih, ih), j)).group
    abelian_side = tensor(hbar, coinv)
    rec.groups.update(normal_lhs=invariants(lhs_n), normal_left=invariants(left_side), abelian_tensor=invariants(abelian_side))
    rec.parts["normal_split"] = decomposition_check(lhs_n, [left_side, tensor(aug_quot, coinv)])
    if left_side.invariants() != abelian_side.invariants():
        rec.note = "the left summand differs from H/[H,G] (x) J/I(H)J here; the multiplication map between them is not injective"
    if jname == "I(H)":
        ihigih = lattice_product(g, lattice_product(g, ih, ig), ih)
        a = unit_coset_subgroup(g, ihigih + lattice_product(g, aug_ideal(hg), ih)).elements
        b = unit_coset_subgroup(g, ihigih + lattice_product(g, lattice_product(g, aug_ideal(hg), whole_ring(g)), ih)).elements
        c3 = lattice_product(g, lattice_product(g, ih, ih), ih)
        c = unit_coset_subgroup(g, lattice_product(g, aug_ideal(hg), ih) + c3).elements & frozenset(h.elements)
        rec.parts["units_first"] = a == b
        rec.parts["units_second"] = b == c
        if a != b or b != c:
            rec.witness = {"first": sorted(a), "second": sorted(b), "third": sorted(c)}


def unit_norm_element(ws: Workspace, unit: Unit, rec: CheckRecord):
    e = ws.entry(unit)
    g, h = e.group, ws.subgroup(unit)
    normal = e.normals[unit.param("N")]
    n = unit.param("n")
    series = ws.series(unit)
    applicable = False
    if h.order > 1 and _is_cyclic(h):
        applicable = True
        t = min(x for x in h.elements if g.element_order(x) == h.order)
        lhs, rhs = cor24_cyclic(series, normal, t, n)
        rec.groups.update(relative=invariants(lhs), norm_quotient=invariants(rhs))
        rec.parts["norm_element"] = lhs.invariants() == rhs.invariants()
    if _is_abelian(h):
        applicable = True
        filt = ws.filtration(unit)
        quot, which = quotient_group(g, normal)
        qfilt = Filtration(image_series(series, quot, which), n)
        left_mod = HModuleQuotient(quot, aug_ideal(quot.whole), qfilt[n], h, "right", image=which.__getitem__)
        ih = aug_ideal(h)
        right_mod = HModuleQuotient(g, ih, ideal_power(g, ih, n), h, "left")
        tgroup, _ = tensor_over_H(left_mod, right_mod)
        target = _relative_polynomial(filt, n, normal, h)
        reps: dict[int, int] = {}
        for x, q in enumerate(which):
            reps.setdefault(q, x)
        rep_list = [reps[q] for q in range(quot.n)]
        mu_rows = []
        for x in left_mod.quotient.generator_vectors():
            lx = lift_back_vector(x, rep_list, g.n)
            for y in right_mod.quotient.generator_vectors():
                mu_rows.append(target.coords(convolve(g, lx, y)))
        mu = AbMap(tgroup, target.group, mu_rows, name="muG")
        hsec = AbelianSection(g, h, g.trivial)
        wedge, _ = exterior_square(hsec.target)
        lam_rows = []
        for a in hsec.lifts:
            for b in hsec.lifts:
                pa, pb = left_mod.coords(minus_one_vector(quot, which[a])), left_mod.coords(minus_one_vector(quot, which[b]))
                ra, rb = right_mod.coords(minus_one_vector(g, a)), right_mod.coords(minus_one_vector(g, b))
                lam_rows.append([x - y for x, y in zip(tensor_elements(pa, rb), tensor_elements(pb, ra))])
        lam = AbMap(wedge, tgroup, lam_rows, name="lambda")
        rec.groups.update(tensor_over_h=invariants(tgroup), relative_polynomial=invariants(target.group))
        rec.parts["abelian_exact"] = exactness_check([lam, mu])[0] and mu.is_surjective()
    if not applicable:
        rec.status = "skip"
        rec.note = "H is neither cyclic nor abelian"


def _relative_polynomial(filt: Filtration, n: int, normal: Subgroup, h: Subgroup) -> RingQuotient:
    from .tensorh import relative_fox_polynomial

    return relative_fox_polynomial(filt, n, normal, h)


def unit_approximation(ws: Workspace, unit: Unit, rec: CheckRecord):
    ctx = ws.context(unit)
    filt = ws.filtration(unit)
    h = ws.subgroup(unit)
    rec.groups.update(u1=invariants(ctx.u1), q1=invariants(ctx.q1.group), u2=invariants(ctx.u2), q2=invariants(ctx.q2.group))
    rec.parts["theta1_iso"] = ctx.theta1.is_iso()
    rec.parts["theta2_iso"] = ctx.theta2.is_iso()
    for n in (2, 3):
        rec.parts[f"zeta{n}_onto"] = zeta_map(filt, n, h).is_surjective()


def _theta3_samples(ctx: FoxContext):
    g, u = ctx.group, ctx.u3
    for w in sorted(ctx.l2g.top.elements):
        for x in ctx.hab.lifts:
            yield u.blk_a(ctx.l2g.coords(w), ctx.hab.coords(x)), ctx.q3.coords(ctx.ring_product(w, x)), ("a", w, x)
    gl, hl = ctx.gab.lifts, ctx.hab.lifts
    for a in range(g.n):
        for b in gl:
            for x in hl:
                yield u.blk_b(ctx.gab.coords(a), ctx.gab.coords(b), ctx.hab.coords(x)), ctx.q3.coords(ctx.ring_product(a, b, x)), ("b1", a, b, x)
                yield u.blk_b(ctx.gab.coords(b), ctx.gab.coords(a), ctx.hab.coords(x)), ctx.q3.coords(ctx.ring_product(b, a, x)), ("b2", b, a, x)
    for x in sorted(ctx.h.elements):
        for a in gl:
            for b in gl:
                yield u.blk_b(ctx.gab.coords(a), ctx.gab.coords(b), ctx.hab.coords(x)), ctx.q3.coords(ctx.ring_product(a, b, x)), ("b3", a, b, x)


def unit_third_kernel(ws: Workspace, unit: Unit, rec: CheckRecord):
    ctx = ws.context(unit)
    theta3 = ws.tamper("theta3", ctx.theta3)
    require_well_defined(theta3)
    rw = Rewriter(ctx)
    d1 = delta1(ctx, rw)
    d2 = delta2(ctx, d1, rw)
    kern = theta3.kernel_lattice
    rec.groups.update(u3=invariants(ctx.u3.group), q3=invariants(ctx.q3.group), tor=invariants(d1.tor_group))
    rec.parts["theta3_onto"] = theta3.is_surjective()
    rec.parts["kernel_is_delta_images"] = kern == d2.lattice
    bad = first_mismatch(theta3, _theta3_samples(ctx))
    rec.parts["theta3_formula"] = bad is None
    if not rec.parts["kernel_is_delta_images"]:
        extra = [list(v) for v in kern.basis if v not in d2.lattice]
        missing = [list(v) for v in d2.lattice.basis if v not in kern]
        rec.witness = {"kernel_not_in_images": extra[:3], "images_not_in_kernel": missing[:3]}
    elif bad is not None:
        rec.witness = {"map": "theta3", "sample": list(bad)}


def unit_r3_relations(ws: Workspace, unit: Unit, rec: CheckRecord):
    ctx = ws.context(unit)
    rw = Rewriter(ctx)
    d1 = delta1(ctx, rw)
    fam = r3_relations(ctx, rw)
    q3 = ctx.q3.group
    rec.parts["theta3_kills_r3"] = all(q3.is_zero(ctx.theta3(v)) for v in fam.images)
    ok = True
    for img, wedge in zip(fam.images, fam.wedges):
        total = [a + b for a, b in zip(delta2_element(ctx, rw, wedge), img)]
        if total not in d1.lattice:
            ok = False
            rec.witness = {"wedge": wedge}
            break
    rec.parts["delta2_matches_r3"] = ok
    reduced = FgAbGroup(ctx.u3.ngens, ctx.u3.relations + fam.images)
    induced = AbMap(reduced, q3, ctx.theta3.matrix, name="theta3bar")
    kern, _ = induced.kernel()
    rec.groups.update(reduced=invariants(reduced), kernel=invariants(kern), r3_count={"torsion": [], "free_rank": len(fam.images)})
    rec.parts["reduced_kernel_finite"] = kern.is_finite()


def unit_h_equals_g(ws: Workspace, unit: Unit, rec: CheckRecord):
    ctx = ws.context(unit, "*")
    rw = Rewriter(ctx)
    d1 = delta1(ctx, rw)
    sets = cor65_sets(ctx, rw)
    u = ctx.u3
    rec.parts["u1_is_delta1"] = u.span(sets.u1_images) == d1.lattice
    rec.parts["u1_u2_is_kernel"] = sets.lattice == ctx.ker_theta3
    quotient = FgAbGroup(u.ngens, u.relations + sets.u1_images + sets.u2_images)
    induced = AbMap(quotient, ctx.q3.group, ctx.theta3.matrix, name="theta3")
    rec.groups.update(quotient=invariants(quotient), q3=invariants(ctx.q3.group))
    rec.parts["theta3_iso"] = induced.is_iso()


def unit_fox3_pushout(ws: Workspace, unit: Unit, rec: CheckRecord):
    e = ws.entry(unit)
    g, h = e.group, ws.subgroup(unit)
    normal = e.normals[unit.param("N")]
    filt = ws.filtration(unit)
    f = fox3_square(filt, normal, h)
    sq = f.square
    top, left, right, bottom = (ws.tamper(m.name, m) for m in (sq.top, sq.left, sq.right, sq.bottom))
    for m in (top, left, right, bottom):
        require_well_defined(m)
    rep = pushout_check(DiagramSquare(top, left, right, bottom, name="fox3"))
    rec.groups.update(corner=invariants(right.codomain), tensor_over_h=invariants(top.codomain), lower=invariants(left.codomain))
    rec.parts["pushout"] = rep.ok
    if not rep.ok:
        rec.witness = rep.witness()
    kern_d3 = bottom.kernel_lattice
    units = unit_coset_subgroup(g, f.target.small).elements
    from_kernel = {x for x in f.lower.top.elements if list(f.lower.coords(x)) in kern_d3}
    rec.parts["units_are_kernel"] = set(units) == from_kernel
    rec.parts["kernel_is_image"] = kern_d3 == lattice_of_images(left, top.kernel_lattice.basis)
    if rec.witness is None and not rec.parts["units_are_kernel"]:
        rec.witness = {"units": sorted(units), "kernel_elements": sorted(from_kernel)}


def unit_tensor_lemma(ws: Workspace, unit: Unit, rec: CheckRecord):
    g, h = ws.group(unit), ws.subgroup(unit)
    if g.n > TENSOR_LEMMA_MAX_ORDER:
        rec.status = "skip"
        rec.note = f"group order above {TENSOR_LEMMA_MAX_ORDER}"
        return
    j = _j_lattice(h, unit.param("J"))
    ring = HModuleQuotient(g, whole_ring(g), Lattice.zero(g.n), h, "right")
    jmod = HModuleQuotient(g, j, Lattice.zero(g.n), h, "left")
    tgroup, _ = tensor_over_H(ring, jmod)
    direct = RingQuotient(g, lattice_product(g, whole_ring(g), j), Lattice.zero(g.n)).group
    rec.groups.update(tensor_over_h=invariants(tgroup), product=invariants(direct))
    rec.parts["multiplication_iso"] = tgroup.invariants() == direct.invariants()


def unit_lie_ring(ws: Workspace, unit: Unit, rec: CheckRecord):
    lie = GradedLieRing(ws.group(unit), ws.series(unit))
    rec.groups.update({f"L{n}": invariants(lie.L(n)) for n in (1, 2, 3)})
    rec.parts["brackets_match_commutators"] = lie.brackets_match_commutators()
    rec.parts["antisymmetry_jacobi"] = lie.antisymmetry_and_jacobi()


UNIT_RUNNERS = {
    "coinvariants": unit_coinvariants,
    "fox2-pushout": unit_fox2_pushout,
    "fox2-sequence": unit_fox2_sequence,
    "decomposition": unit_decomposition,
    "norm-element": unit_norm_element,
    "approximation": unit_approximation,
    "third-kernel": unit_third_kernel,
    "r3-relations": unit_r3_relations,
    "h-equals-g": unit_h_equals_g,
    "fox3-pushout": unit_fox3_pushout,
    "tensor-lemma": unit_tensor_lemma,
    "lie-ring": unit_lie_ring,
}


def run_unit(ws: Workspace, unit: Unit) -> CheckRecord:
    if unit.suite == "negative-controls":
        return run_negative_control(ws, unit)
    rec = CheckRecord(unit.suite, describe_unit(ws, unit), "pass")
    start = time.perf_counter()
    try:
        UNIT_RUNNERS[unit.suite](ws, unit, rec)
    except CheckFailure as exc:
        rec.parts[exc.part] = False
        rec.witness = exc.witness
    except (IllDefinedMap, NonCommutingSquare) as exc:
        rec.parts["consistent"] = False
        rec.witness = {"error": type(exc).__name__, "message": str(exc)}
    rec.wall = time.perf_counter() - start
    if rec.status != "skip":
        rec.status = "pass" if rec.parts and all(rec.parts.values()) else "fail"
    return rec


# ---------------------------------------------------------------------------
# negative controls

# (suite, entry name, series, subgroup, params, map names to corrupt)
NEGATIVE_CONTROLS = [
    ("fox2-pushout", "Q8", "gamma", "*", (("K", "1"),), ("l2GH", "c2", "mu2", "d2")),
    ("fox2-sequence", "D4", "gamma", "r", (("K", "1"), ("J", "I(H)")), ("iota(x)id", "muH", "muG", "j", "pi(x)id")),
    ("fox2-pushout", "D4", "gamma", "*", (("K", "center"),), ("l2GH", "c2", "mu2", "d2")),
    ("fox2-sequence", "Heis3", "gamma", "x,z", (("K", "1"), ("J", "I(H)")), ("iota(x)id", "muH", "muG", "j", "pi(x)id")),
    ("third-kernel", "C2xC4", "gamma", "*", (), ("theta3",)),
    ("third-kernel", "D8", "gamma", "*", (), ("theta3",)),
]


def negative_control_units(resolved: list[ResolvedEntry]) -> list[Unit]:
    names = {e.name: i for i, e in enumerate(resolved)}
    out = []
    for suite, ename, series, sub, params, maps in NEGATIVE_CONTROLS:
        if ename not in names:
            continue
        idx = names[ename]
        e = resolved[idx]
        if series not in e.series or sub not in e.subgroups:
            continue
        for m in maps:
            out.append(Unit("negative-controls", idx, series, sub, (("suite", suite), ("map", m)) + params))
    return out


def run_negative_control(ws: Workspace, unit: Unit) -> CheckRecord:
    """Corrupt every entry of one map in turn; every corruption must make the check fail."""
    target_suite = unit.param("suite")
    map_name = unit.param("map")
    inner_params = tuple((k, v) for k, v in unit.params if k not in ("suite", "map"))
    inner = Unit(target_suite, unit.entry, unit.series, unit.subgroup, inner_params)
    rec = CheckRecord("negative-controls", f"{target_suite}:{map_name}:{describe_unit(ws, inner)}", "pass")
    start = time.perf_counter()
    clean = run_unit(Workspace(ws.resolved), inner)
    shape: list[int] = []

    def probe(name: str, m: AbMap) -> AbMap:
        if name == map_name:
            shape[:] = [m.domain.ngens, m.codomain.ngens]
        return m

    run_unit(Workspace(ws.resolved, probe), inner)
    rows, cols = shape or (0, 0)
    survived = []
    caught: dict[str, int] = {}
    for i in range(rows):
        for j in range(cols):
            def hook(name: str, m: AbMap, i=i, j=j) -> AbMap:
                return corrupt_entry(m, i, j) if name == map_name else m

            res = run_unit(Workspace(ws.resolved, hook), inner)
            if res.status != "fail" or res.witness is None:
                survived.append([i, j])
            else:
                part = next(p for p, ok in res.parts.items() if not ok)
                caught[part] = caught.get(part, 0) + 1
    total = rows * cols
    rec.groups["corruptions"] = {"torsion": [], "free_rank": total}
    rec.parts["clean_run_passes"] = clean.status == "pass"
    rec.parts["map_found"] = total > 0
    rec.parts["every_corruption_fails"] = not survived
    if survived:
        rec.witness = {"surviving_entries": survived[:10]}
    rec.note = "first failing part: " + ", ".join(f"{p}={c}" for p, c in sorted(caught.items()))
    rec.wall = time.perf_counter() - start
    rec.status = "pass" if all(rec.parts.values()) else "fail"
    return rec


# ---------------------------------------------------------------------------
# running


_WORKER: Workspace | None = None


def _init_worker(entries: list[dict], max_order: int, base_dir: str):
    global _WORKER
    _WORKER = Workspace(resolve_corpus(entries, max_order, base_dir))


def _run_in_worker(unit: Unit) -> CheckRecord:
    assert _WORKER is not None
    return run_unit(_WORKER, unit)


def run_suites(
    entries: list[dict],
    suites: Sequence[str],
    max_order: int = DEFAULT_MAX_ORDER,
    base_dir: str = ".",
    jobs: int = 1,
    resolved: list[ResolvedEntry] | None = None,
) -> list[CheckRecord]:
    resolved = resolved if resolved is not None else resolve_corpus(entries, max_order, base_dir)
    units = plan(resolved, suites)
    if jobs <= 1:
        ws = Workspace(resolved)
        records = [run_unit(ws, u) for u in units]
    else:
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(entries, max_order, base_dir)) as pool:
            records = list(pool.map(_run_in_worker, units, chunksize=4))
    return records
