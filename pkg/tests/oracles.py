"""Slow, obviously-correct reference implementations used only by tests."""

import itertools
import math
from collections import deque
from fractions import Fraction

import numpy as np


def bfs_distances(n, generators, source):
    """Graph distances from ``source`` (tuple) under right multiplication by generators."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for g in generators:
            y = tuple(x[g[i]] for i in range(n))
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def adjacent_transpositions(n):
    out = []
    for i in range(n - 1):
        g = list(range(n))
        g[i], g[i + 1] = g[i + 1], g[i]
        out.append(tuple(g))
    return out


def all_transpositions(n):
    out = []
    for i, j in itertools.combinations(range(n), 2):
        g = list(range(n))
        g[i], g[j] = g[j], g[i]
        out.append(tuple(g))
    return out


def lis_brute(values):
    best = 0
    n = len(values)
    for mask in range(1 << n):
        sub = [values[i] for i in range(n) if mask >> i & 1]
        if all(a < b for a, b in zip(sub, sub[1:])):
            best = max(best, len(sub))
    return best


def fisher_yates_law(n):
    """Exact law of the swap-based shuffle, by walking its whole draw tree."""
    law = {}
    ranges = [range(i + 1) for i in range(n - 1, 0, -1)]
    for draws in itertools.product(*ranges):
        a = list(range(n))
        for r, j in enumerate(draws):
            i = n - 1 - r
            a[i], a[j] = a[j], a[i]
        key = tuple(a)
        law[key] = law.get(key, 0) + Fraction(1, math.factorial(n))
    return law


def lse(xs):
    m = max(xs)
    return m + math.log(math.fsum(math.exp(x - m) for x in xs))


def stop_ref(lw, eps):
    return max(lw[0], lw[-1]) <= math.log(eps) + lse(lw) + 1e-12


def substop_ref(lw, eps):
    if len(lw) < 2:
        return False
    half = len(lw) // 2
    return stop_ref(lw, eps) or substop_ref(lw[:half], eps) or substop_ref(lw[half:], eps)


def orbit_ref(lw_of_index, bits, eps):
    """Doubling loop on an index -> log-weight function; returns (a, b, reason)."""
    a = b = 0
    for j, bit in enumerate(bits):
        nj = 2**j
        ext = list(range(b + 1, b + nj + 1)) if bit else list(range(a - nj, a))
        if substop_ref([lw_of_index(k) for k in ext], eps):
            return a, b, "SubStop"
        a, b = min(a, ext[0]), max(b, ext[-1])
        if stop_ref([lw_of_index(k) for k in range(a, b + 1)], eps):
            return a, b, "Stop"
    return a, b, "MaxLen"


def beta0_index_law(M, eps):
    """Exact signed-index law at beta = 0 by enumerating all bit strings."""
    law = {}
    for bits in itertools.product((0, 1), repeat=M):
        a, b, _ = orbit_ref(lambda k: 0.0, bits, eps)
        for k in range(a, b + 1):
            law[k] = law.get(k, 0) + Fraction(1, 2**M * (b - a + 1))
    return law


def cayley_distance_ref(a, b):
    """Transposition count by explicit cycle sorting of a^-1 b."""
    n = len(a)
    inv_a = [0] * n
    for i, v in enumerate(a):
        inv_a[v] = i
    c = [inv_a[b[i]] for i in range(n)]
    swaps = 0
    for i in range(n):
        while c[i] != i:
            j = c[i]
            c[i], c[j] = c[j], c[i]
            swaps += 1
    return swaps


def chi_square_p(counts, probs):
    from scipy import stats
    counts = np.asarray(counts, dtype=float)
    expected = np.asarray(probs, dtype=float) * counts.sum()
    return float(stats.chisquare(counts, expected).pvalue)
