"""Brute-force reference computations used by the tests.

Nothing here calls the HNF/SNF code under test: invariant factors come from
determinantal divisors, group-level facts from exhaustive enumeration, and
closed forms for tensor, Tor and exterior squares of cyclic sums are compared
through elementary divisors.
"""
from __future__ import annotations

import itertools
import random
from math import gcd


def det_bareiss(m):
    """Exact determinant by fraction-free elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
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


def determinantal_invariants(m, ncols):
    """Nonzero invariant factors of an integer matrix from gcds of k x k minors."""
    rows = len(m)
    divisors = [1]
    for k in range(1, min(rows, ncols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(ncols), k):
                g = gcd(g, det_bareiss([[m[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[i] // divisors[i - 1] for i in range(1, len(divisors))]


def random_matrix(rng: random.Random, max_dim=6, bound=20):
    r, c = rng.randint(1, max_dim), rng.randint(1, max_dim)
    return [[rng.randint(-bound, bound) for _ in range(c)] for _ in range(r)], c


def random_unimodular(rng: random.Random, n, steps=12):
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        k = rng.randint(-3, 3)
        u[i] = [a + k * b for a, b in zip(u[i], u[j])]
    return u


def matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


# ---------------------------------------------------------------------------
# cyclic sums


def prime_powers(n):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append(q)
        p += 1
    if n > 1:
        out.append(n)
    return out


def elementary(orders, free=0):
    """Multiset of prime-power cyclic factors (plus free rank) of a sum of Z/n's."""
    pp = []
    for n in orders:
        if n > 1:
            pp.extend(prime_powers(n))
    return sorted(pp), free


def closed_tensor(a, b):
    """a, b are lists of cyclic orders, 0 meaning Z."""
    orders, free = [], 0
    for x in a:
        for y in b:
            if x == 0 and y == 0:
                free += 1
            else:
                orders.append(gcd(x, y))
    return elementary(orders, free)


def closed_tor(a, b):
    return elementary([gcd(x, y) for x in a for y in b if x and y])


def closed_wedge(a):
    orders, free = [], 0
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            if a[i] == 0 and a[j] == 0:
                free += 1
            else:
                orders.append(gcd(a[i], a[j]))
    return elementary(orders, free)


def small_cyclic_sums(max_divisor=12, max_factors=3):
    """Invariant-factor chains d_1 | d_2 | ... with at most max_factors terms, plus Z and Z + Z/2."""
    out = [[]]
    chains = [[d] for d in range(2, max_divisor + 1)]
    frontier = chains
    for _ in range(max_factors - 1):
        nxt = [c + [d] for c in frontier for d in range(c[-1], max_divisor + 1) if d % c[-1] == 0]
        chains += nxt
        frontier = nxt
    out += chains
    out += [[0], [2, 0]]
    return out


# ---------------------------------------------------------------------------
# groups by enumeration


def generated(table, gens):
    elems = {0}
    frontier = [0]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = table[x][g]
                if y not in elems:
                    elems.add(y)
                    new.append(y)
        frontier = new
    return elems


def commutator(table, inv, a, b):
    return table[table[table[a][b]][inv[a]]][inv[b]]


def commutator_closure(group, a_set, b_set):
    t = group.table
    inv = [t[x].index(0) for x in range(group.n)]
    comms = {commutator(t, inv, a, b) for a in a_set for b in b_set}
    return generated(t, comms)


def brute_center(group):
    t = group.table
    return {x for x in range(group.n) if all(t[x][y] == t[y][x] for y in range(group.n))}


# ---------------------------------------------------------------------------
# group ring by enumeration


def ring_product(group, x, y):
    out = [0] * group.n
    for g, a in enumerate(x):
        if a:
            for h, b in enumerate(y):
                if b:
                    out[group.table[g][h]] += a * b
    return out


def minus_one(group, g):
    v = [0] * group.n
    v[g] += 1
    v[0] -= 1
    return v


def series_weight(series, x, cap=6):
    """Largest k <= cap with x in the k-th term; 0 when x is outside the first term."""
    if x not in series[1]:
        return 0
    w = 1
    while w < cap and x in series[w + 1]:
        w += 1
    return w


def brute_filtration_vectors(series, n, trailing=True):
    """Products (a_1 - 1)...(a_r - 1) g with summed series weights >= n, r <= n.

    With ``trailing`` the products are multiplied on the right by every g in
    G, giving the right ideal they generate; when the first series term is the
    whole group the bare products already span it.
    """
    group = series.group
    if n == 0:
        return [[int(i == g) for i in range(group.n)] for g in range(group.n)]
    weights = {x: series_weight(series, x, cap=n + 1) for x in range(1, group.n)}
    usable = [x for x in range(1, group.n) if weights[x]]
    tails = range(group.n) if trailing else [0]
    vecs = []
    for r in range(1, n + 1):
        for tup in itertools.product(usable, repeat=r):
            if sum(weights[x] for x in tup) < n:
                continue
            v = minus_one(group, tup[0])
            for x in tup[1:]:
                v = ring_product(group, v, minus_one(group, x))
            for g in tails:
                vecs.append(ring_product(group, v, [int(i == g) for i in range(group.n)]))
    return vecs
