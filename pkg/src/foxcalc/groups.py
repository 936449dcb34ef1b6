"""Finite groups given by explicit multiplication tables.

Elements are the integers 0..n-1 and 0 is always the identity.  Subgroups are
sorted element tuples; series are descending chains of subgroups that are
padded with their last term.  The commutator convention is [a, b] = a b a^-1 b^-1.
"""

from __future__ import annotations

import itertools
import json
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from .exactla import FgAbGroup

DEFAULT_MAX_ORDER = 512


class GroupError(ValueError):
    pass


class InvalidTable(GroupError):
    pass


class OrderBoundExceeded(GroupError):
    pass


class NotNormal(GroupError):
    pass


class FiniteGroup:
    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence[str] | None = None, *, check: bool = True, name: str = ""):
        self.table = [list(r) for r in table]
        self.n = len(self.table)
        self.name = name
        self.labels = list(labels) if labels is not None else [str(i) for i in range(self.n)]
        if len(self.labels) != self.n:
            raise InvalidTable(f"{len(self.labels)} labels for a table of order {self.n}")
        if check:
            self._validate()
        self.inverse = [row.index(0) for row in self.table]

    # -- validation -------------------------------------------------------
    def _validate(self):
        n, t, lab = self.n, self.table, self.labels
        if n == 0:
            raise InvalidTable("empty table")
        for i, row in enumerate(t):
            if len(row) != n:
                raise InvalidTable(f"row {i} has {len(row)} entries, expected {n}")
            for x in row:
                if not isinstance(x, int) or not 0 <= x < n:
                    raise InvalidTable(f"row {i} contains {x!r}, not an element index in 0..{n - 1}")
        for x in range(n):
            if t[0][x] != x or t[x][0] != x:
                raise InvalidTable(
                    f"identity law fails for ({lab[0]}, {lab[x]}): index 0 must be the identity"
                )
        for x in range(n):
            if 0 not in t[x]:
                raise InvalidTable(f"inverse law fails: {lab[x]} has no right inverse")
            y = t[x].index(0)
            if t[y][x] != 0:
                raise InvalidTable(f"inverse law fails for ({lab[x]}, {lab[y]}): right inverse is not a left inverse")
        gens = range(n) if n <= 128 else self._magma_generators()
        # For large tables Light's test: checking (x g) y = x (g y) for g in a
        # generating set suffices once identity and inverses are present.
        for b in gens:
            tb = t[b]
            for a in range(n):
                ab = t[a][b]
                ta = t[a]
                tab = t[ab]
                for c in range(n):
                    if tab[c] != ta[tb[c]]:
                        raise InvalidTable(
                            f"associativity fails for ({lab[a]}, {lab[b]}, {lab[c]}): "
                            f"({lab[a]}{lab[b]}){lab[c]} = {lab[tab[c]]} but {lab[a]}({lab[b]}{lab[c]}) = {lab[ta[tb[c]]]}"
                        )

    def _magma_generators(self) -> list[int]:
        gens: list[int] = []
        reached = {0}
        for x in range(1, self.n):
            if x in reached:
                continue
            gens.append(x)
            reached.add(x)
            frontier = list(reached)
            while frontier:
                new = []
                for a in frontier:
                    for g in gens:
                        for y in (self.table[a][g], self.table[g][a]):
                            if y not in reached:
                                reached.add(y)
                                new.append(y)
                frontier = new
        return gens

    # -- arithmetic -------------------------------------------------------
    @property
    def order(self) -> int:
        return self.n

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def comm(self, a: int, b: int) -> int:
        t, iv = self.table, self.inverse
        return t[t[t[a][b]][iv[a]]][iv[b]]

    def conj(self, a: int, g: int) -> int:
        """g a g^-1."""
        t = self.table
        return t[t[g][a]][self.inverse[g]]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverse[a], -k
        out, base = 0, a
        while k:
            if k & 1:
                out = self.table[out][base]
            base = self.table[base][base]
            k >>= 1
        return out

    def product(self, elems: Iterable[int]) -> int:
        out = 0
        for x in elems:
            out = self.table[out][x]
        return out

    @cached_property
    def element_orders(self) -> list[int]:
        out = []
        for a in range(self.n):
            k, x = 1, a
            while x != 0:
                x = self.table[x][a]
                k += 1
            out.append(k)
        return out

    def element_order(self, a: int) -> int:
        return self.element_orders[a]

    @cached_property
    def exponent(self) -> int:
        e = 1
        for k in self.element_orders:
            e = e * k // gcd(e, k)
        return e

    def label(self, a: int) -> str:
        return self.labels[a]

    def index_of(self, label: str) -> int:
        label = label.strip()
        if label.startswith("#") and label[1:].isdigit():
            i = int(label[1:])
            if 0 <= i < self.n:
                return i
        try:
            return self.labels.index(label)
        except ValueError:
            raise GroupError(f"unknown element label {label!r}") from None

    # -- subgroups --------------------------------------------------------
    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, range(self.n), self.generators)

    @cached_property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, [0], [])

    @cached_property
    def generators(self) -> list[int]:
        return small_generating_set(self, range(self.n))

    def subgroup(self, gens: Iterable[int]) -> "Subgroup":
        return closure(self, gens)

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.n) for b in range(a))

    def to_json(self) -> dict:
        return {"order": self.n, "labels": self.labels, "table": self.table}

    def __repr__(self):
        return f"FiniteGroup({self.name or 'order ' + str(self.n)})"


class Subgroup:
    __slots__ = ("group", "elements", "gens", "_set")

    def __init__(self, group: FiniteGroup, elements: Iterable[int], gens: Iterable[int] | None = None):
        self.group = group
        self.elements = tuple(sorted(set(elements)))
        self._set = frozenset(self.elements)
        self.gens = list(gens) if gens is not None else None

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._set

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.group is self.group and other.elements == self.elements

    def __hash__(self):
        return hash(self.elements)

    def __le__(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def generating_set(self) -> list[int]:
        if self.gens is None:
            self.gens = small_generating_set(self.group, self.elements)
        return self.gens

    def labels(self) -> list[str]:
        return [self.group.labels[x] for x in self.elements]

    def is_closed(self) -> bool:
        g = self.group
        return 0 in self._set and all(g.mul(a, b) in self._set for a in self.elements for b in self.elements)

    def as_group(self) -> tuple[FiniteGroup, list[int]]:
        """This subgroup as a standalone group; returns it with new-id -> old-id."""
        old = list(self.elements)  # 0 comes first since it is the smallest id
        pos = {x: i for i, x in enumerate(old)}
        g = self.group
        table = [[pos[g.mul(a, b)] for b in old] for a in old]
        return FiniteGroup(table, [g.labels[x] for x in old], check=False), old

    def __repr__(self):
        return f"Subgroup(order={self.order})"


def small_generating_set(group: FiniteGroup, elements: Iterable[int]) -> list[int]:
    """Greedy generating set: scan elements by decreasing order, keep those not yet reached."""
    elems = sorted(set(elements), key=lambda x: (-group.element_order(x), x))
    gens: list[int] = []
    reached = {0}
    for x in elems:
        if x in reached:
            continue
        gens.append(x)
        reached = set(closure(group, gens).elements)
    return gens


def closure(group: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    gens = [g for g in dict.fromkeys(gens) if g != 0]
    reached = {0}
    frontier = [0]
    t = group.table
    while frontier:
        new = []
        for a in frontier:
            ta = t[a]
            for g in gens:
                y = ta[g]
                if y not in reached:
                    reached.add(y)
                    new.append(y)
        frontier = new
    return Subgroup(group, reached, gens)


subgroup_closure = closure


def commutator_subgroup(a: Subgroup, b: Subgroup) -> Subgroup:
    g = a.group
    comms = {g.comm(x, y) for x in a.elements for y in b.elements}
    return closure(g, sorted(comms))


def product_set(a: Subgroup, b: Subgroup) -> frozenset[int]:
    g = a.group
    return frozenset(g.mul(x, y) for x in a.elements for y in b.elements)


def product_subgroup(a: Subgroup, b: Subgroup) -> Subgroup:
    """Subgroup generated by A and B (equals AB when one of them is normal)."""
    return closure(a.group, list(a.generating_set()) + list(b.generating_set()))


def intersect(a: Subgroup, b: Subgroup) -> Subgroup:
    return Subgroup(a.group, a._set & b._set)


def normal_closure(group: FiniteGroup, gens: Iterable[int], within: Subgroup | None = None) -> Subgroup:
    """Smallest subgroup containing gens and normalized by ``within`` (default: G)."""
    conj_by = (within or group.whole).generating_set()
    s = closure(group, gens)
    while True:
        extra = {group.conj(x, g) for x in s.generating_set() for g in conj_by}
        if all(x in s for x in extra):
            return s
        s = closure(group, list(s.generating_set()) + sorted(extra))


def is_normal(s: Subgroup, within: Subgroup | None = None) -> bool:
    g = s.group
    conj_by = (within or g.whole).generating_set()
    return all(g.conj(x, c) in s for x in s.generating_set() for c in conj_by)


def center(group: FiniteGroup) -> Subgroup:
    t = group.table
    gens = group.generators
    return Subgroup(group, [z for z in range(group.n) if all(t[z][g] == t[g][z] for g in gens)])


def power_subgroup(group: FiniteGroup, k: int) -> Subgroup:
    """The subgroup G^k generated by all k-th powers."""
    return closure(group, sorted({group.power(x, k) for x in range(group.n)}))


# ---------------------------------------------------------------------------
# series


class GroupSeries:
    """Descending chain S_1 >= S_2 >= ... padded with its last term."""

    def __init__(self, group: FiniteGroup, terms: Sequence[Subgroup], kind: str = "custom"):
        terms = list(terms)
        if not terms:
            raise GroupError("a series needs at least one term")
        while len(terms) > 1 and terms[-1] == terms[-2]:
            terms.pop()
        self.group = group
        self.terms = terms
        self.kind = kind

    def __getitem__(self, i: int) -> Subgroup:
        """1-based access S_i; indices past the stored chain give the last term."""
        if i < 1:
            raise IndexError("series terms are numbered from 1")
        return self.terms[min(i, len(self.terms)) - 1]

    def term(self, i: int) -> Subgroup:
        return self[i]

    def __len__(self):
        return len(self.terms)

    def top(self) -> Subgroup:
        return self.terms[0]

    def is_descending(self) -> bool:
        return all(b <= a for a, b in zip(self.terms, self.terms[1:]))

    def n_series_violation(self) -> tuple[int, int] | None:
        """First (i, j) with [S_i, S_j] not inside S_{i+j}, or None."""
        m = len(self.terms)
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                target = self[i + j]
                si, sj = self[i], self[j]
                g = self.group
                if any(g.comm(x, y) not in target for x in si.elements for y in sj.elements):
                    return i, j
        return None

    def is_n_series(self) -> bool:
        return self.is_descending() and self.n_series_violation() is None

    def validate(self) -> "GroupSeries":
        if not self.is_descending():
            raise GroupError("series is not descending")
        bad = self.n_series_violation()
        if bad is not None:
            raise GroupError(f"not an N-series: [S_{bad[0]}, S_{bad[1]}] is not inside S_{bad[0] + bad[1]}")
        return self

    def transport(self, new_group: FiniteGroup, old_ids: Sequence[int], kind: str | None = None) -> "GroupSeries":
        """Move a series whose terms lie in a subgroup onto that subgroup viewed as a group."""
        pos = {x: i for i, x in enumerate(old_ids)}
        terms = [Subgroup(new_group, [pos[x] for x in s.elements]) for s in self.terms]
        return GroupSeries(new_group, terms, kind or self.kind)

    def describe(self) -> list[int]:
        return [s.order for s in self.terms]


def lower_central_series(group: FiniteGroup, depth: int = 8, within: Subgroup | None = None) -> GroupSeries:
    """gamma_1 = H, gamma_(i+1) = [gamma_i, H] for H = ``within`` (default: the whole group)."""
    if depth < 1:
        raise GroupError("depth must be at least 1")
    top = within if within is not None else group.whole
    terms = [top]
    while len(terms) < depth:
        nxt = commutator_subgroup(terms[-1], top)
        if nxt == terms[-1]:
            break
        terms.append(nxt)
    return GroupSeries(group, terms, "lower-central")


def induced_series(series: GroupSeries, h: Subgroup, depth: int | None = None) -> GroupSeries:
    depth = depth or len(series) + 1
    terms = [intersect(h, series[i]) for i in range(1, depth + 1)]
    return GroupSeries(series.group, terms, "intersected")


def action_series(k: Subgroup, gamma: Subgroup | None = None, depth: int = 8) -> GroupSeries:
    """K_(1) = K, K_(i) = [K_(i-1), Gamma] for K normal in Gamma."""
    gamma = gamma or k.group.whole
    if not is_normal(k, gamma):
        raise NotNormal("the subgroup is not normal in the acting group")
    terms = [k]
    while len(terms) < depth:
        nxt = commutator_subgroup(terms[-1], gamma)
        if nxt == terms[-1]:
            break
        terms.append(nxt)
    return GroupSeries(k.group, terms, "action")


# ---------------------------------------------------------------------------
# quotients and abelian sections


def cosets(group: FiniteGroup, n: Subgroup) -> tuple[list[int], list[int]]:
    """Left cosets gN: returns (representatives sorted, element -> coset index)."""
    which = [-1] * group.n
    reps = []
    t = group.table
    for g in range(group.n):
        if which[g] >= 0:
            continue
        idx = len(reps)
        reps.append(g)
        tg = t[g]
        for x in n.elements:
            which[tg[x]] = idx
    return reps, which


def quotient_group(group: FiniteGroup, n: Subgroup) -> tuple[FiniteGroup, list[int]]:
    """G/N with the smallest element of each coset as its representative."""
    if not is_normal(n):
        raise NotNormal("quotient by a subgroup that is not normal")
    reps, which = cosets(group, n)
    table = [[which[group.mul(a, b)] for b in reps] for a in reps]
    labels = [group.labels[r] for r in reps]
    return FiniteGroup(table, labels, check=False, name=f"{group.name}/N"), which


class AbelianSection:
    """The abelian group top/bottom (bottom normal in top, quotient abelian).

    The target is presented in invariant-factor form Z/d_1 + ... + Z/d_t with
    d_1 | d_2 | ..., and ``lifts[k]`` is an element of ``top`` mapping to the
    k-th standard generator.
    """

    def __init__(self, group: FiniteGroup, top: Subgroup, bottom: Subgroup):
        if not bottom <= top:
            raise GroupError("bottom subgroup is not inside the top subgroup")
        self.group, self.top, self.bottom = group, top, bottom
        t = group.table
        which: dict[int, int] = {}
        reps: list[int] = []
        for g in top.elements:
            if g in which:
                continue
            idx = len(reps)
            reps.append(g)
            for x in bottom.elements:
                which[t[g][x]] = idx
        if len(which) != top.order:
            raise GroupError("bottom subgroup is not normal in top")
        for a in top.generating_set():
            for b in top.generating_set():
                if which.get(group.comm(a, b)) != 0:
                    raise GroupError("section is not abelian")
        gens = [g for g in top.generating_set() if which[g] != 0]
        r = len(gens)
        coords: dict[int, list[int]] = {0: [0] * r}
        rels = []
        frontier = [0]
        while frontier:
            new = []
            for cid in frontier:
                base = coords[cid]
                rep = reps[cid]
                for i, g in enumerate(gens):
                    y = which[t[rep][g]]
                    v = list(base)
                    v[i] += 1
                    if y in coords:
                        rel = [a - b for a, b in zip(v, coords[y])]
                        if any(rel):
                            rels.append(rel)
                    else:
                        coords[y] = v
                        new.append(y)
            frontier = new
        pres = FgAbGroup(r, rels)
        self.divisors = [d for d, _ in pres.invariant_generators()]
        if any(d == 0 for d in self.divisors):
            raise GroupError("finite section with free part")
        self.target = FgAbGroup.cyclic_sum(self.divisors)
        self._which = which
        self._coset_coords = {cid: pres.reduce(v) for cid, v in coords.items()}
        self.lifts = []
        for k, (d, vec) in enumerate(pres.invariant_generators()):
            x = 0
            for g, e in zip(gens, vec):
                x = t[x][group.power(g, e)]
            self.lifts.append(x)
            want = tuple(1 if j == k else 0 for j in range(len(self.divisors)))
            if self.coords(x) != want:
                raise AssertionError("lift does not map to its invariant generator")

    @property
    def rank(self) -> int:
        return len(self.divisors)

    def coords(self, g: int) -> tuple[int, ...]:
        return self._coset_coords[self._which[g]]

    def contains(self, g: int) -> bool:
        return g in self._which

    def element(self, c: Sequence[int]) -> int:
        """A representative in ``top`` of the class with coordinates c."""
        x = 0
        for lift, e in zip(self.lifts, c):
            x = self.group.mul(x, self.group.power(lift, e))
        return x

    def is_homomorphism(self, pairs: Iterable[tuple[int, int]] | None = None) -> bool:
        g = self.group
        if pairs is None:
            pairs = itertools.product(self.top.elements, repeat=2)
        for a, b in pairs:
            ca, cb, cab = self.coords(a), self.coords(b), self.coords(g.mul(a, b))
            if tuple((x + y) % d for x, y, d in zip(ca, cb, self.divisors)) != cab:
                return False
        return True


def abelianize(group: FiniteGroup, modulo: Subgroup | None = None) -> AbelianSection:
    if modulo is None:
        modulo = commutator_subgroup(group.whole, group.whole)
    return AbelianSection(group, group.whole, modulo)


# ---------------------------------------------------------------------------
# presets


def _check_bound(order: int, max_order: int):
    if order > max_order:
        raise OrderBoundExceeded(f"group order {order} exceeds the bound {max_order}")


def _power_label(sym: str, k: int) -> str:
    if k == 0:
        return ""
    return sym if k == 1 else f"{sym}^{k}"


def cyclic(n: int, sym: str = "a", max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group needs n >= 1")
    _check_bound(n, max_order)
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    labels = ["1"] + [_power_label(sym, k) for k in range(1, n)]
    return FiniteGroup(table, labels, check=n <= 128, name=f"C{n}")


def dihedral(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n: r^i s^j stored at index i + n*j."""
    if n < 1:
        raise GroupError("dihedral group needs n >= 1")
    _check_bound(2 * n, max_order)

    def idx(i, j):
        return (i % n) + n * (j % 2)

    table = []
    for a in range(2 * n):
        i, j = a % n, a // n
        row = []
        for b in range(2 * n):
            k, l = b % n, b // n
            row.append(idx(i + (k if j == 0 else -k), j + l))
        table.append(row)
    labels = []
    for a in range(2 * n):
        i, j = a % n, a // n
        lab = _power_label("r", i) + ("s" if j else "")
        labels.append(lab or "1")
    return FiniteGroup(table, labels, check=2 * n <= 128, name=f"D{n}")


def quaternion8() -> FiniteGroup:
    # unit quaternions as (sign, axis) with axis 0 = 1, 1 = i, 2 = j, 3 = k
    mult = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    elems = [(1, 0), (-1, 0), (1, 1), (-1, 1), (1, 2), (-1, 2), (1, 3), (-1, 3)]
    pos = {e: i for i, e in enumerate(elems)}
    table = []
    for s1, a1 in elems:
        row = []
        for s2, a2 in elems:
            s, a = mult[(a1, a2)]
            row.append(pos[(s * s1 * s2, a)])
        table.append(row)
    names = ["1", "i", "j", "k"]
    labels = [("" if s > 0 else "-") + names[a] for s, a in elems]
    return FiniteGroup(table, labels, name="Q8")


def _cycle_label(p: Sequence[int]) -> str:
    seen = set()
    parts = []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        x = p[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = p[x]
        parts.append("(" + "".join(str(c + 1) for c in cyc) + ")")
    return "".join(parts) or "1"


def _permutation_group(perms: list[tuple[int, ...]], name: str) -> FiniteGroup:
    perms = sorted(perms)
    ident = tuple(range(len(perms[0])))
    perms.remove(ident)
    perms.insert(0, ident)
    pos = {p: i for i, p in enumerate(perms)}
    # (p q)(x) = p(q(x))
    table = [[pos[tuple(p[q[x]] for x in range(len(p)))] for q in perms] for p in perms]
    return FiniteGroup(table, [_cycle_label(p) for p in perms], name=name)


def _is_even(p: Sequence[int]) -> bool:
    inversions = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inversions % 2 == 0


def symmetric(n: int) -> FiniteGroup:
    if not 1 <= n <= 4:
        raise GroupError("symmetric preset supports 1 <= n <= 4")
    return _permutation_group(list(itertools.permutations(range(n))), f"S{n}")


def alternating(n: int) -> FiniteGroup:
    if not 1 <= n <= 4:
        raise GroupError("alternating preset supports 1 <= n <= 4")
    return _permutation_group([p for p in itertools.permutations(range(n)) if _is_even(p)], f"A{n}")


def heisenberg(p: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over Z/p; x^a y^b z^c at index a + p*b + p^2*c."""
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise GroupError("heisenberg preset needs a prime p")
    _check_bound(p ** 3, max_order)

    def unpack(e):
        return e % p, (e // p) % p, e // (p * p)

    def pack(a, b, c):
        return a % p + p * (b % p) + p * p * (c % p)

    n = p ** 3
    table = []
    for e in range(n):
        a, b, c = unpack(e)
        row = []
        for f in range(n):
            a2, b2, c2 = unpack(f)
            row.append(pack(a + a2, b + b2, c + c2 + a * b2))
        table.append(row)
    labels = []
    for e in range(n):
        a, b, c = unpack(e)
        labels.append((_power_label("x", a) + _power_label("y", b) + _power_label("z", c)) or "1")
    return FiniteGroup(table, labels, check=n <= 128, name=f"Heis{p}")


def direct_product(g1: FiniteGroup, g2: FiniteGroup, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """G1 x G2 with (a, b) at index a * |G2| + b."""
    n1, n2 = g1.n, g2.n
    _check_bound(n1 * n2, max_order)
    table = []
    for a in range(n1):
        for b in range(n2):
            table.append([g1.mul(a, c) * n2 + g2.mul(b, d) for c in range(n1) for d in range(n2)])
    labels = []
    for a in range(n1):
        for b in range(n2):
            parts = [lab for lab, idx in ((g1.labels[a], a), (g2.labels[b], b)) if idx]
            labels.append("".join(parts) or "1")
    if len(set(labels)) != len(labels):
        labels = [f"({g1.labels[a]};{g2.labels[b]})" for a in range(n1) for b in range(n2)]
    return FiniteGroup(table, labels, check=False, name=f"{g1.name}x{g2.name}")


_ALIASES = {"Q8": "quaternion8"}


def _parse_factor(text: str) -> tuple[str, list[int]]:
    text = text.strip()
    text = _ALIASES.get(text, text)
    if ":" in text:
        name, _, rest = text.partition(":")
        params = [int(x) for x in rest.split(":") if x]
        return name.lower(), params
    short = {"C": "cyclic", "D": "dihedral", "S": "symmetric", "A": "alternating"}
    if text.startswith("Heis") and text[4:].isdigit():
        return "heisenberg", [int(text[4:])]
    if text[:1] in short and text[1:].isdigit():
        return short[text[:1]], [int(text[1:])]
    return text.lower(), []


def build_preset(spec: str, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Build a group from a preset string.

    Accepted forms: ``cyclic:n``, ``dihedral:n`` (order 2n), ``quaternion8``,
    ``symmetric:n`` and ``alternating:n`` (n <= 4), ``heisenberg:p``, short
    names ``C6``, ``D4``, ``Q8``, ``S3``, ``A4``, ``Heis3``, and direct
    products joined by ``x`` such as ``C2xC4`` or ``cyclic:2xdihedral:3``.
    """
    factors = [f for f in spec.split("x") if f]
    if not factors:
        raise GroupError(f"empty preset {spec!r}")
    letters = iter("abcdefgh")
    groups = []
    for f in factors:
        name, params = _parse_factor(f)
        try:
            if name == "cyclic":
                (n,) = params
                g = cyclic(n, next(letters) if len(factors) > 1 else "a", max_order)
            elif name == "dihedral":
                (n,) = params
                g = dihedral(n, max_order)
            elif name in ("quaternion8", "quaternion"):
                if params not in ([], [8]):
                    raise GroupError("only the quaternion group of order 8 is available")
                g = quaternion8()
            elif name == "symmetric":
                (n,) = params
                g = symmetric(n)
            elif name == "alternating":
                (n,) = params
                g = alternating(n)
            elif name == "heisenberg":
                (p,) = params
                g = heisenberg(p, max_order)
            else:
                raise GroupError(f"unknown preset {f!r}")
        except ValueError as exc:
            if isinstance(exc, GroupError):
                raise
            raise GroupError(f"invalid parameters in preset {f!r}") from None
        groups.append(g)
    out = groups[0]
    for g in groups[1:]:
        out = direct_product(out, g, max_order)
    _check_bound(out.n, max_order)
    out.name = spec
    return out


def load_table(path: str, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Read a group table file: JSON with ``order``, optional ``labels`` and ``table``."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidTable(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidTable(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    return group_from_data(data, max_order, name=path)


def group_from_data(data: dict, max_order: int = DEFAULT_MAX_ORDER, name: str = "") -> FiniteGroup:
    if not isinstance(data, dict) or "table" not in data:
        raise InvalidTable("group table data needs a 'table' field")
    table = data["table"]
    order = data.get("order", len(table))
    if not isinstance(table, list) or order != len(table):
        raise InvalidTable(f"declared order {order} does not match {len(table) if isinstance(table, list) else '?'} table rows")
    _check_bound(order, max_order)
    labels = data.get("labels")
    if labels is not None and len(set(labels)) != len(labels):
        raise InvalidTable("labels are not distinct")
    return FiniteGroup(table, labels, name=name)


def parse_subgroup(group: FiniteGroup, text: str | Sequence[str] | None) -> Subgroup:
    """Subgroup generated by comma separated labels (``#i`` selects element id i)."""
    if text is None:
        return group.whole
    if isinstance(text, str):
        items = [t for t in text.split(",") if t.strip()]
    else:
        items = list(text)
    return closure(group, [group.index_of(t) for t in items])
