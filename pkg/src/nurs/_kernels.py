"""Jitted inner loops shared by the public modules.

Everything here works on 0-based ``int32`` one-line arrays. Nothing in this
module is public API; callers validate inputs first.
"""

import numpy as np
from numba import njit

KENDALL, L1, L2, HAMMING, CAYLEY, ULAM = 0, 1, 2, 3, 4, 5

REASON_STOP, REASON_SUBSTOP, REASON_MAXLEN = 0, 1, 2


@njit(cache=True)
def inverse(a):
    out = np.empty_like(a)
    for i in range(a.shape[0]):
        out[a[i]] = i
    return out


@njit(cache=True)
def cycle_count(a):
    n = a.shape[0]
    seen = np.zeros(n, dtype=np.bool_)
    c = 0
    for i in range(n):
        if not seen[i]:
            c += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = a[j]
    return c


@njit(cache=True)
def cycle_lengths(a):
    """Cycle lengths, ordered by the smallest label of each cycle."""
    n = a.shape[0]
    seen = np.zeros(n, dtype=np.bool_)
    out = np.empty(n, dtype=np.int64)
    c = 0
    for i in range(n):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = a[j]
                length += 1
            out[c] = length
            c += 1
    return out[:c]


@njit(cache=True)
def cycle_length_of(a, label):
    length = 1
    j = a[label]
    while j != label:
        j = a[j]
        length += 1
    return length


@njit(cache=True)
def fixed_points(a):
    c = 0
    for i in range(a.shape[0]):
        if a[i] == i:
            c += 1
    return c


@njit(cache=True)
def power(a, k):
    """a^k by rotating each cycle k mod its length; O(n) for any k."""
    n = a.shape[0]
    out = np.empty_like(a)
    seen = np.zeros(n, dtype=np.bool_)
    buf = np.empty(n, dtype=np.int64)
    for i in range(n):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            buf[length] = j
            j = a[j]
            length += 1
        shift = k % length
        for r in range(length):
            out[buf[r]] = buf[(r + shift) % length]
    return out


@njit(cache=True)
def inversion_count(a):
    # Fenwick tree over values, scanning right to left.
    n = a.shape[0]
    tree = np.zeros(n + 1, dtype=np.int64)
    inv = 0
    for pos in range(n - 1, -1, -1):
        v = a[pos]
        i = v
        s = 0
        while i > 0:
            s += tree[i]
            i -= i & (-i)
        inv += s
        i = v + 1
        while i <= n:
            tree[i] += 1
            i += i & (-i)
    return inv


@njit(cache=True)
def lis_length(a):
    n = a.shape[0]
    tails = np.empty(n, dtype=np.int64)
    size = 0
    for i in range(n):
        v = a[i]
        lo, hi = 0, size
        while lo < hi:
            mid = (lo + hi) // 2
            if tails[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        tails[lo] = v
        if lo == size:
            size += 1
    return size


@njit(cache=True)
def energy(kind, x, s0, s0inv):
    n = x.shape[0]
    if kind == KENDALL:
        return inversion_count(x[s0inv])
    if kind == L1:
        e = 0
        for i in range(n):
            d = np.int64(x[i]) - np.int64(s0[i])
            e += d if d >= 0 else -d
        return e
    if kind == L2:
        e = 0
        for i in range(n):
            d = np.int64(x[i]) - np.int64(s0[i])
            e += d * d
        return e
    if kind == HAMMING:
        e = 0
        for i in range(n):
            if x[i] != s0[i]:
                e += 1
        return e
    if kind == CAYLEY:
        return n - cycle_count(x[s0inv])
    # Ulam: n - LIS(s0 o x^-1)
    return n - lis_length(s0[inverse(x)])


@njit(cache=True)
def energies(kind, xs, s0, s0inv):
    out = np.empty(xs.shape[0], dtype=np.int64)
    for r in range(xs.shape[0]):
        out[r] = energy(kind, xs[r], s0, s0inv)
    return out


@njit(cache=True)
def cycle_counts(xs):
    out = np.empty(xs.shape[0], dtype=np.int64)
    for r in range(xs.shape[0]):
        out[r] = cycle_count(xs[r])
    return out


@njit(cache=True)
def _merge_stats(m1, s1, m2, s2):
    m = m1 if m1 >= m2 else m2
    return m, s1 * np.exp(m1 - m) + s2 * np.exp(m2 - m)


@njit(cache=True)
def _block_stats(lw, lo, size):
    """(max, sum of exp(lw - max)) over lw[lo:lo+size] by pairwise halving.

    Power-of-two blocks are always reduced along the dyadic tree, so a block
    gets bit-identical statistics however the orbit containing it was built.
    """
    if size == 1:
        return lw[lo], 1.0
    if size & (size - 1):
        m = lw[lo]
        for t in range(lo + 1, lo + size):
            if lw[t] > m:
                m = lw[t]
        s = 0.0
        for t in range(lo, lo + size):
            s += np.exp(lw[t] - m)
        return m, s
    half = size // 2
    m1, s1 = _block_stats(lw, lo, half)
    m2, s2 = _block_stats(lw, lo + half, half)
    return _merge_stats(m1, s1, m2, s2)


@njit(cache=True)
def _stop_from_stats(lw, lo, hi, m, s, eps):
    edge = lw[lo] if lw[lo] >= lw[hi - 1] else lw[hi - 1]
    return np.exp(edge - m) <= eps * s


@njit(cache=True)
def stop(lw, lo, hi, eps):
    """No-underrun test on lw[lo:hi], max-shifted before exponentiating."""
    m, s = _block_stats(lw, lo, hi - lo)
    return _stop_from_stats(lw, lo, hi, m, s, eps)


@njit(cache=True)
def _substop_stats(lw, lo, size, eps, tm, ts):
    """SubStop over the power-of-two block lw[lo:lo+size].

    Fills tm/ts with per-level block statistics bottom-up and returns
    (hit, root_max, root_sum).
    """
    for t in range(size):
        tm[t] = lw[lo + t]
        ts[t] = 1.0
    hit = False
    width = 1
    count = size
    while count > 1:
        count //= 2
        width *= 2
        for r in range(count):
            m, s = _merge_stats(tm[2 * r], ts[2 * r], tm[2 * r + 1], ts[2 * r + 1])
            tm[r] = m
            ts[r] = s
            if not hit and _stop_from_stats(lw, lo + r * width, lo + (r + 1) * width, m, s, eps):
                hit = True
    return hit, tm[0], ts[0]


@njit(cache=True)
def substop(lw, lo, hi, eps):
    """True iff lw[lo:hi] or any dyadic block of it of length >= 2 stops."""
    size = hi - lo
    tm = np.empty(size)
    ts = np.empty(size)
    hit, _, _ = _substop_stats(lw, lo, size, eps, tm, ts)
    return hit


@njit(cache=True)
def _lw_of(x, hot, beta, kind, s0, s0inv):
    return -beta * energy(kind, x, s0, s0inv) if hot else 0.0


@njit(cache=True)
def build_orbit(sigma, rho, rho_inv, bits, eps, beta, kind, s0, s0inv):
    """Replay the doubling loop for fixed (rho, bits).

    Returns (a, b, reason, doublings, log_weights[a..b]).
    """
    m_max = bits.shape[0]
    full = 1 << m_max
    n = sigma.shape[0]
    base = full  # index k lives at slot k + base
    lw = np.zeros(2 * full + 1)
    tm = np.empty(full)
    ts = np.empty(full)
    hot = beta != 0.0
    lw[base] = _lw_of(sigma, hot, beta, kind, s0, s0inv)
    orbit_m = lw[base]
    orbit_s = 1.0
    left = sigma.copy()
    right = sigma.copy()
    cur = np.empty(n, dtype=sigma.dtype)
    nxt = np.empty(n, dtype=sigma.dtype)
    a = 0
    b = 0
    reason = REASON_MAXLEN
    doublings = 0
    for j in range(m_max):
        nj = 1 << j
        forward = bits[j] == 1
        step = rho if forward else rho_inv
        cur[:] = right if forward else left
        # write the extension straight into its final slots
        lo = base + b + 1 if forward else base + a - nj
        for r in range(nj):
            for t in range(n):
                nxt[t] = cur[step[t]]
            cur, nxt = nxt, cur
            slot = lo + r if forward else lo + nj - 1 - r
            lw[slot] = _lw_of(cur, hot, beta, kind, s0, s0inv)
        hit, ext_m, ext_s = _substop_stats(lw, lo, nj, eps, tm, ts)
        if hit:
            reason = REASON_SUBSTOP
            break
        if forward:
            orbit_m, orbit_s = _merge_stats(orbit_m, orbit_s, ext_m, ext_s)
            b += nj
            right[:] = cur
        else:
            orbit_m, orbit_s = _merge_stats(ext_m, ext_s, orbit_m, orbit_s)
            a -= nj
            left[:] = cur
        doublings += 1
        if _stop_from_stats(lw, base + a, base + b + 1, orbit_m, orbit_s, eps):
            reason = REASON_STOP
            break
    return a, b, reason, doublings, lw[base + a:base + b + 1].copy()


@njit(cache=True)
def fisher_yates(draws):
    """Apply Fisher-Yates swaps; draws[r] is uniform on {0..n-1-r}."""
    n = draws.shape[0] + 1
    out = np.arange(n).astype(np.int32)
    for r in range(n - 1):
        i = n - 1 - r
        j = draws[r]
        tmp = out[i]
        out[i] = out[j]
        out[j] = tmp
    return out


@njit(cache=True)
def categorical(lw, u):
    m = lw[0]
    for t in range(1, lw.shape[0]):
        if lw[t] > m:
            m = lw[t]
    c = np.empty(lw.shape[0])
    s = 0.0
    for t in range(lw.shape[0]):
        s += np.exp(lw[t] - m)
        c[t] = s
    target = u * s
    for t in range(lw.shape[0]):
        if target < c[t]:
            return t
    return lw.shape[0] - 1


# -- jitted direction samplers and chain runner ---------------------------------

LAW_UNIFORM, LAW_BLOCK, LAW_LOCAL, LAW_SHIFTABLE, LAW_TRANSPOSITION = 0, 1, 2, 3, 4
KERNEL_NURS, KERNEL_BARKER = 0, 1
SHIFTABLE_MAX_TRIES = 10_000


@njit(cache=True)
def _shuffle_range(rng, out, lo, size):
    """out[lo:lo+size] <- lo + uniform permutation of {0..size-1}."""
    for t in range(size):
        out[lo + t] = lo + t
    for i in range(size - 1, 0, -1):
        j = rng.integers(0, i + 1)
        tmp = out[lo + i]
        out[lo + i] = out[lo + j]
        out[lo + j] = tmp


@njit(cache=True)
def _random_pair(rng, n):
    i = rng.integers(0, n)
    j = rng.integers(0, n - 1)
    if j >= i:
        j += 1
    return (i, j) if i < j else (j, i)


@njit(cache=True)
def _all_odd(a, seen):
    seen[:] = False
    for i in range(a.shape[0]):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = a[j]
            length += 1
        if length % 2 == 0:
            return False
    return True


@njit(cache=True)
def sample_direction(rng, law, param, n, rho, work, counts):
    """Fill rho with one direction draw. counts[0..1] track odd-cycle tries/accepts.

    Returns False only if the odd-cycle rejection sampler exhausts its retries.
    """
    if law == LAW_UNIFORM:
        _shuffle_range(rng, rho, 0, n)
    elif law == LAW_BLOCK:
        u = rng.integers(0, param)
        for start in range(0, n, param):
            _shuffle_range(rng, work, start, min(param, n - start))
        for t in range(n):
            rho[t] = (work[(t - u) % n] + u) % n
    elif law == LAW_LOCAL:
        s = rng.integers(0, n)
        for t in range(n):
            rho[t] = t
        for r in range(param):
            rho[(s + r) % n] = (s + (r + 1) % param) % n
    elif law == LAW_TRANSPOSITION:
        i, j = _random_pair(rng, n)
        for t in range(n):
            rho[t] = t
        rho[i] = j
        rho[j] = i
    else:
        i, j = _random_pair(rng, n)
        m = n - 2
        rest = np.empty(m, dtype=np.int64)
        c = 0
        for t in range(n):
            if t != i and t != j:
                rest[c] = t
                c += 1
        seen = np.empty(m, dtype=np.bool_)
        ok = False
        for _ in range(SHIFTABLE_MAX_TRIES):
            counts[0] += 1
            _shuffle_range(rng, work, 0, m)
            if _all_odd(work[:m], seen):
                counts[1] += 1
                ok = True
                break
        if not ok:
            return False
        for t in range(n):
            rho[t] = t
        for t in range(m):
            rho[rest[t]] = rest[work[t]]
        rho[i] = j
        rho[j] = i
    return True


@njit(cache=True)
def _transition(rng, x, y, rho, work, bits, counts, law, param, eps, beta, kind, s0, s0inv,
                kernel):
    """One transition from x into y. Returns (ok, k, orbit_len, reason, doublings)."""
    n = x.shape[0]
    m_max = bits.shape[0]
    if not sample_direction(rng, law, param, n, rho, work, counts):
        return False, 0, 0, 0, 0
    if kernel == KERNEL_NURS:
        for j in range(m_max):
            bits[j] = rng.integers(0, 2)
        a, b, reason, doublings, lw = build_orbit(x, rho, inverse(rho), bits, eps, beta,
                                                  kind, s0, s0inv)
        k = a + categorical(lw, rng.random())
        p = power(rho, k)
        for t in range(n):
            y[t] = x[p[t]]
        return True, k, b - a + 1, reason, doublings
    for t in range(n):
        y[t] = x[rho[t]]
    z = beta * (energy(kind, y, s0, s0inv) - energy(kind, x, s0, s0inv))
    if z > 700.0:
        z = 700.0
    k = 1 if rng.random() < 1.0 / (1.0 + np.exp(z)) else 0
    if k == 0:
        y[:] = x
    return True, k, 2, REASON_MAXLEN, 1


@njit(cache=True)
def run_chain(rng, x0, law, param, eps, m_max, beta, kind, s0, s0inv, iters, burnin,
              kernel, keep_states):
    """Run iters transitions and record the last iters - burnin of them.

    Returns the final state, a (kept, 9) int64 record block with columns
    iter, signed_index, orbit_len, reason, doublings, energy, fixed_points,
    cycle_len_1, lis, the (kept, n) state block (empty unless keep_states), the
    odd-cycle counters and an ok flag.
    """
    n = x0.shape[0]
    kept = iters - burnin
    rec = np.empty((kept, 9), dtype=np.int64)
    states = np.empty((kept if keep_states else 0, n), dtype=np.int32)
    counts = np.zeros(2, dtype=np.int64)
    x = x0.copy()
    y = np.empty(n, dtype=np.int32)
    rho = np.empty(n, dtype=np.int32)
    work = np.empty(n, dtype=np.int32)
    bits = np.empty(m_max, dtype=np.int8)
    for it in range(1, iters + 1):
        ok, k, length, reason, doublings = _transition(rng, x, y, rho, work, bits, counts, law,
                                                       param, eps, beta, kind, s0, s0inv, kernel)
        if not ok:
            return x, rec[:0], states[:0], counts, False
        x[:] = y
        r = it - burnin - 1
        if r >= 0:
            rec[r, 0] = it
            rec[r, 1] = k
            rec[r, 2] = length
            rec[r, 3] = reason
            rec[r, 4] = doublings
            rec[r, 5] = energy(kind, x, s0, s0inv)
            rec[r, 6] = fixed_points(x)
            rec[r, 7] = cycle_length_of(x, 0)
            rec[r, 8] = lis_length(x)
            if keep_states:
                states[r] = x
    return x, rec, states, counts, True


@njit(cache=True)
def repeat_transition(rng, x, law, param, eps, m_max, beta, kind, s0, s0inv, count, kernel):
    """count independent transitions from the same x; returns lexicographic ranks of the targets."""
    n = x.shape[0]
    out = np.empty(count, dtype=np.int64)
    counts = np.zeros(2, dtype=np.int64)
    y = np.empty(n, dtype=np.int32)
    rho = np.empty(n, dtype=np.int32)
    work = np.empty(n, dtype=np.int32)
    bits = np.empty(m_max, dtype=np.int8)
    for r in range(count):
        ok, _, _, _, _ = _transition(rng, x, y, rho, work, bits, counts, law, param, eps, beta,
                                     kind, s0, s0inv, kernel)
        if not ok:
            return out[:r]
        out[r] = lex_rank(y)
    return out


# -- exact transition-matrix enumeration -----------------------------------------

@njit(cache=True)
def lex_rank(a):
    """Rank of a in the lexicographic order of S_n (0-based)."""
    n = a.shape[0]
    r = 0
    for i in range(n):
        smaller = 0
        for j in range(i + 1, n):
            if a[j] < a[i]:
                smaller += 1
        r = r * (n - i) + smaller
    return r


@njit(cache=True)
def _neumaier_add(s, c, i, j, v):
    t = s[i, j] + v
    if abs(s[i, j]) >= abs(v):
        c[i, j] += (s[i, j] - t) + v
    else:
        c[i, j] += (v - t) + s[i, j]
    s[i, j] = t


@njit(cache=True)
def _normalized(lw):
    m = lw[0]
    for t in range(1, lw.shape[0]):
        if lw[t] > m:
            m = lw[t]
    p = np.exp(lw - m)
    return p / p.sum()


@njit(cache=True)
def nurs_matrix(states, rhos, probs, m_max, eps, beta, kind, s0, s0inv):
    """Dense NURS kernel over lexicographically ordered states, by enumeration of (rho, bits)."""
    size, n = states.shape
    s = np.zeros((size, size))
    c = np.zeros((size, size))
    bits = np.empty(m_max, dtype=np.int8)
    n_bits = 1 << m_max
    y = np.empty(n, dtype=np.int32)
    for src in range(size):
        x = states[src]
        for atom in range(rhos.shape[0]):
            rho = rhos[atom]
            rho_inv = inverse(rho)
            for mask in range(n_bits):
                for j in range(m_max):
                    bits[j] = (mask >> j) & 1
                a, b, _, _, lw = build_orbit(x, rho, rho_inv, bits, eps, beta, kind, s0, s0inv)
                p = _normalized(lw)
                scale = probs[atom] / n_bits
                cur = x[power(rho, a)]
                for t in range(b - a + 1):
                    _neumaier_add(s, c, src, lex_rank(cur), scale * p[t])
                    for q in range(n):
                        y[q] = cur[rho[q]]
                    cur[:] = y
    return s + c


@njit(cache=True)
def full_orbit_matrix(states, rhos, probs, lengths, beta, kind, s0, s0inv):
    """Kernel that picks r in {0..L-1} with weight w(sigma o rho^r), L = lengths[atom]."""
    size, n = states.shape
    s = np.zeros((size, size))
    c = np.zeros((size, size))
    for src in range(size):
        x = states[src]
        for atom in range(rhos.shape[0]):
            rho = rhos[atom]
            length = lengths[atom]
            orbit = np.empty((length, n), dtype=np.int32)
            lw = np.empty(length)
            cur = x.copy()
            for r in range(length):
                orbit[r] = cur
                lw[r] = -beta * energy(kind, cur, s0, s0inv)
                cur = cur[rho]
            p = _normalized(lw)
            for r in range(length):
                _neumaier_add(s, c, src, lex_rank(orbit[r]), probs[atom] * p[r])
    return s + c


@njit(cache=True)
def barker_matrix(states, rhos, probs, beta, kind, s0, s0inv):
    size, n = states.shape
    s = np.zeros((size, size))
    c = np.zeros((size, size))
    for src in range(size):
        x = states[src]
        ex = energy(kind, x, s0, s0inv)
        for atom in range(rhos.shape[0]):
            y = x[rhos[atom]]
            z = beta * (energy(kind, y, s0, s0inv) - ex)
            move = 1.0 / (1.0 + np.exp(z)) if z < 700.0 else 0.0
            _neumaier_add(s, c, src, lex_rank(y), probs[atom] * move)
            _neumaier_add(s, c, src, src, probs[atom] * (1.0 - move))
    return s + c


# -- coupling helpers -----------------------------------------------------------

@njit(cache=True)
def cayley_distance(a, b):
    """n - cyc(a o b^-1)."""
    return a.shape[0] - cycle_count(a[inverse(b)])


@njit(cache=True)
def cross_diameter(sigma, etas, lengths, taus):
    """max d_Cay(sigma eta^s, sigma tau eta^t) over etas, taus and s, t < ord(eta)."""
    n = sigma.shape[0]
    best = 0
    for e in range(etas.shape[0]):
        length = lengths[e]
        pw = np.empty((length, n), dtype=np.int32)
        for q in range(n):
            pw[0, q] = q
        for s in range(1, length):
            pw[s] = pw[s - 1][etas[e]]
        left = np.empty((length, n), dtype=np.int32)
        for s in range(length):
            left[s] = sigma[pw[s]]
        for k in range(taus.shape[0]):
            for t in range(length):
                right_inv = inverse(sigma[taus[k][pw[t]]])
                for s in range(length):
                    d = n - cycle_count(left[s][right_inv])
                    if d > best:
                        best = d
    return best


@njit(cache=True)
def sample_directions(rng, law, param, n, count):
    """count draws of the in-runner direction sampler, plus odd-cycle counters."""
    out = np.empty((count, n), dtype=np.int32)
    work = np.empty(n, dtype=np.int32)
    counts = np.zeros(2, dtype=np.int64)
    for r in range(count):
        if not sample_direction(rng, law, param, n, out[r], work, counts):
            return out[:r], counts
    return out, counts
