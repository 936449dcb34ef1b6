import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foxcalc.exactla import (
    AbMap,
    DimensionError,
    FgAbGroup,
    IllDefinedMap,
    Lattice,
    determinant,
    exterior_square,
    hnf,
    isomorphic,
    left_kernel,
    matmul,
    mod_m,
    smith_divisors,
    snf,
    tensor,
    tor,
)

import oracles


def _nonzero_divisors(m, ncols):
    return [d for d in smith_divisors(m, ncols) if d]


def test_snf_matches_determinantal_divisors_on_random_matrices():
    rng = random.Random(20261017)
    for _ in range(500):
        m, c = oracles.random_matrix(rng)
        assert _nonzero_divisors(m, c) == oracles.determinantal_invariants(m, c), m


def test_snf_matches_sympy_on_a_subset():
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import invariant_factors

    rng = random.Random(7)
    for _ in range(60):
        m, c = oracles.random_matrix(rng, max_dim=5)
        ours = _nonzero_divisors(m, c)
        theirs = [abs(int(x)) for x in invariant_factors(sympy.Matrix(m), domain=sympy.ZZ) if x]
        assert ours == theirs


def test_snf_transforms_are_consistent():
    rng = random.Random(11)
    for _ in range(100):
        m, c = oracles.random_matrix(rng)
        s, u, v = snf(m, c)
        assert oracles.matmul(oracles.matmul(u, m), v) == s
        assert abs(determinant(u)) == 1
        assert abs(determinant(v)) == 1
        diag = [s[i][i] for i in range(min(len(m), c))]
        nz = [d for d in diag if d]
        assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
        assert all(s[i][j] == 0 for i in range(len(m)) for j in range(c) if i != j)


def _is_hnf(h, ncols):
    last = -1
    seen_zero = False
    pivots = []
    for row in h:
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            seen_zero = True
            continue
        if seen_zero:
            return False
        p = nz[0]
        if p <= last or row[p] <= 0:
            return False
        pivots.append((len(pivots), p))
        last = p
    for r, p in pivots:
        for above in range(r):
            if not 0 <= h[above][p] < h[r][p]:
                return False
    return True


def test_hnf_is_echelon_and_unique_under_unimodular_change():
    rng = random.Random(3)
    for _ in range(200):
        m, c = oracles.random_matrix(rng)
        h, u = hnf(m, c)
        assert _is_hnf(h, c)
        assert oracles.matmul(u, m) == h
        assert abs(determinant(u)) == 1
        w = oracles.random_unimodular(rng, len(m))
        h2, _ = hnf(oracles.matmul(w, m), c)
        assert h2 == h


def test_determinant_matches_bareiss():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(1, 6)
        m = [[rng.randint(-20, 20) for _ in range(n)] for _ in range(n)]
        assert determinant(m) == oracles.det_bareiss(m)


def test_left_kernel_annihilates():
    rng = random.Random(9)
    for _ in range(100):
        m, c = oracles.random_matrix(rng)
        ker = left_kernel(m, c)
        for row in ker:
            assert oracles.matmul([row], m) == [[0] * c]
        rank = len(oracles.determinantal_invariants(m, c))
        assert len(ker) == len(m) - rank


def _elementary_of(group):
    torsion, free = group.invariants()
    return oracles.elementary(torsion, free)


def _group_of(orders):
    return FgAbGroup.cyclic_sum(orders)


def test_tensor_tor_wedge_match_closed_forms():
    sums = oracles.small_cyclic_sums()
    groups = [_group_of(s) for s in sums]
    for a, ga in zip(sums, groups):
        assert _elementary_of(exterior_square(ga)[0]) == oracles.closed_wedge(a)
        for b, gb in zip(sums, groups):
            assert _elementary_of(tensor(ga, gb)) == oracles.closed_tensor(a, b), (a, b)
            assert _elementary_of(tor(ga, gb)[0]) == oracles.closed_tor(a, b), (a, b)


def test_tensor_with_trivial_and_coprime():
    assert tensor(_group_of([2]), _group_of([3])).is_trivial()
    assert tensor(FgAbGroup.trivial(), _group_of([5])).is_trivial()
    assert tensor(_group_of([0]), _group_of([6])).invariants() == ((6,), 0)


def test_tensor_of_non_diagonal_presentation():
    # Z^2 / <(2, 4), (0, 6)> is Z/2 + Z/6
    a = FgAbGroup(2, [[2, 4], [0, 6]])
    assert a.invariants() == ((2, 6), 0)
    assert tensor(a, a).invariants() == ((2, 2, 2, 6), 0)
    assert tor(a, _group_of([4]))[0].invariants() == ((2, 2), 0)


def test_mod_m():
    assert mod_m(_group_of([0, 6]), 4).invariants() == ((2, 4), 0)
    with pytest.raises(ValueError):
        mod_m(_group_of([3]), 1)


def test_isomorphic_ignores_presentation():
    assert isomorphic(_group_of([2, 3]), _group_of([6]))
    assert not isomorphic(_group_of([2, 2]), _group_of([4]))


def test_abmap_rejects_ill_defined_matrix():
    z2, z4 = _group_of([2]), _group_of([4])
    with pytest.raises(IllDefinedMap):
        AbMap(z2, z4, [[1]])
    f = AbMap(z2, z4, [[2]])
    assert f.is_injective() and not f.is_surjective()
    coker, _ = f.cokernel()
    assert coker.invariants() == ((2,), 0)


def test_abmap_kernel_and_image():
    z = _group_of([0])
    z6 = _group_of([6])
    f = AbMap(z, z6, [[2]])
    ker, _ = f.kernel()
    img, _ = f.image()
    assert ker.invariants() == ((), 1)
    assert img.invariants() == ((3,), 0)
    assert f.preimage([4]) is not None
    assert f.preimage([1]) is None


def test_composition_through_trivial_group():
    z2 = _group_of([2])
    zero = FgAbGroup.trivial()
    f = AbMap(z2, zero, [[]])
    g = AbMap(zero, z2, [])
    h = f.then(g)
    assert h.matrix == [[0]]


def test_lattice_rejects_wrong_length():
    with pytest.raises(DimensionError):
        Lattice(2, [[1, 2, 3]])


vectors = st.lists(st.integers(-6, 6), min_size=3, max_size=3)
lattices = st.lists(vectors, max_size=4).map(lambda vs: Lattice(3, vs))


@settings(max_examples=60, deadline=None)
@given(lattices, lattices)
def test_lattice_sum_and_intersection_are_bounds(a, b):
    s, i = a + b, a & b
    assert a <= s and b <= s
    assert i <= a and i <= b
    assert a + b == b + a
    assert a & b == b & a


@settings(max_examples=60, deadline=None)
@given(lattices, vectors)
def test_lattice_membership_agrees_with_coords(a, v):
    c = a.coords(v)
    if c is None:
        assert v not in a
    else:
        rebuilt = [sum(k * row[j] for k, row in zip(c, a.basis)) for j in range(3)]
        assert rebuilt == v


@settings(max_examples=60, deadline=None)
@given(lattices)
def test_lattice_is_canonical(a):
    shuffled = list(reversed(a.basis)) + [[2 * x for x in r] for r in a.basis]
    assert Lattice(3, shuffled) == a


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=1, max_size=3), st.lists(st.integers(0, 12), min_size=1, max_size=3))
def test_tensor_is_symmetric(a, b):
    ga, gb = _group_of(a), _group_of(b)
    assert isomorphic(tensor(ga, gb), tensor(gb, ga))


def test_matmul_shapes():
    assert matmul([[1, 2]], [[3], [4]]) == [[11]]
    assert matmul([], [[1, 2]], cols=2) == []
