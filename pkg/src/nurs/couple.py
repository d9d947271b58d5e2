"""Shift couplings for the full-orbit shiftable kernel and contraction checks.

An edge is a pair (sigma, sigma o tau_ij). Both chains share the random pair
(I, J) and the direction eta. When (I, J) = (i, j) the second orbit is the
first one shifted by m = ord(eta) / 2, so the two chains can be made to
coincide. Otherwise the two windows are indexed in lockstep from the two
endpoints and the selected indices are joined by a maximal coupling.

Cayley distance is invariant under left translation, so quantities of the
form d(sigma a, sigma b) are computed at sigma = id.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from . import _kernels as K
from .direction import sample_shiftable, shiftable_set
from .metric import DistanceKind, MallowsModel, brute_local_jump, table_local_jump
from .perm import Permutation, cycle_stats, fisher_yates, order, transposition
from .rng import make_rng

OMEGA_MAX_N = 8
DIAMETER_MAX_N = 7


@dataclass(frozen=True)
class EdgePair:
    """The edge (sigma, sigma o tau_ij) with 1-based i < j."""

    sigma: Permutation
    i: int
    j: int

    def __post_init__(self):
        if not 1 <= self.i < self.j <= self.sigma.n:
            raise ValueError(f"need 1 <= i < j <= n, got ({self.i}, {self.j}) with n={self.sigma.n}")

    @property
    def other(self) -> Permutation:
        return self.sigma * transposition(self.sigma.n, self.i, self.j)


@dataclass(frozen=True)
class ContractionReport:
    beta: float
    n: int
    empirical_mean_dist: float
    std_error: float
    delta_bound: float
    samples: int
    delta_bound_brute: float
    local_jump_table: float
    local_jump_brute: float
    cross_diameter: int
    aligned_fraction: float
    kind: str
    edge: str

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.std_error < 0:
            raise ValueError("std_error must be non-negative")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def omega_ij_enumerate(n: int, i: int, j: int) -> list[Permutation]:
    if n > OMEGA_MAX_N:
        raise ValueError(f"n={n} exceeds the enumeration limit {OMEGA_MAX_N}")
    return shiftable_set(n, i, j)


def shiftable_pair(eta: Permutation) -> tuple[int, int] | None:
    """The (I, J) with eta in Omega_IJ, or None if eta is not shiftable."""
    cycles = cycle_stats(eta).cycles
    even = [c for c in cycles if len(c) % 2 == 0]
    if len(even) != 1 or len(even[0]) != 2:
        return None
    i, j = sorted(even[0])
    return i, j


def _require_pair(eta: Permutation, i: int, j: int) -> None:
    if shiftable_pair(eta) != (i, j):
        raise ValueError(f"{eta!r} is not in Omega_{i}{j}")


def aligned_shift_check(sigma: Permutation, i: int, j: int, eta: Permutation) -> bool:
    """sigma o tau_ij o eta^t == sigma o eta^(t+m) for t = 0..2m-1."""
    _require_pair(eta, i, j)
    length = order(eta)
    m = length // 2
    x = sigma.array
    tau = transposition(sigma.n, i, j).array
    pw = [np.arange(sigma.n, dtype=np.int32)]
    for _ in range(length + m - 1):
        pw.append(pw[-1][eta.array])
    return all(np.array_equal(x[tau[pw[t]]], x[pw[t + m]]) for t in range(length))


def mismatch_unit_check(sigma: Permutation, i: int, j: int, eta: Permutation) -> bool:
    """d_Cay(sigma o eta^t, sigma o tau_ij o eta^t) == 1 for t = 0..ord(eta)-1."""
    pair = shiftable_pair(eta)
    if pair is None or pair == (i, j):
        raise ValueError(f"{eta!r} must lie in Omega_IJ for some (I, J) != ({i}, {j})")
    x = sigma.array
    tau = transposition(sigma.n, i, j).array
    p = np.arange(sigma.n, dtype=np.int32)
    for _ in range(order(eta)):
        if K.cayley_distance(x[p], x[tau[p]]) != 1:
            return False
        p = p[eta.array]
    return True


def _as_laws(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError(f"laws must share one index set, got shapes {p.shape} and {q.shape}")
    return p, q


def orbit_tv(p, q) -> float:
    """1 - sum_t min(p_t, q_t)."""
    p, q = _as_laws(p, q)
    return max(0.0, 1.0 - math.fsum(np.minimum(p, q)))


def tanh_bound(beta: float, local_jump: float, k: float) -> float:
    if min(beta, local_jump, k) < 0:
        raise ValueError("beta, local_jump and k must be non-negative")
    return math.tanh(beta * local_jump * k)


def _coupling_parts(p, q):
    overlap = np.minimum(p, q)
    tv = max(0.0, 1.0 - overlap.sum())
    return tv, overlap, p - overlap, q - overlap


def _draw(weights, u):
    c = np.cumsum(weights)
    return np.minimum(np.searchsorted(c, u * c[-1], side="right"), len(weights) - 1)


def _maximal_coupling_many(p, q, rng, count):
    tv, overlap, rp, rq = _coupling_parts(p, q)
    split = rng.random(count) < tv
    t = np.empty(count, dtype=np.int64)
    t2 = np.empty(count, dtype=np.int64)
    same = ~split
    if same.any():
        t[same] = t2[same] = _draw(overlap, rng.random(int(same.sum())))
    if split.any():
        k = int(split.sum())
        t[split] = _draw(rp, rng.random(k))
        t2[split] = _draw(rq, rng.random(k))
    return t, t2


def maximal_coupling(p, q, rng: np.random.Generator) -> tuple[int, int]:
    """(t, t') with marginals p, q and P(t != t') = TV(p, q)."""
    p, q = _as_laws(p, q)
    t, t2 = _maximal_coupling_many(p, q, rng, 1)
    return int(t[0]), int(t2[0])


def _all_shiftable(n):
    etas, lengths = [], []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        for eta in shiftable_set(n, i, j):
            etas.append(eta.array)
            lengths.append(order(eta))
    return np.stack(etas), np.array(lengths, dtype=np.int64)


def _all_transpositions(n):
    return np.stack([transposition(n, i, j).array
                     for i, j in itertools.combinations(range(1, n + 1), 2)])


def cross_orbit_diameter_at(sigma: Permutation) -> int:
    """max d_Cay(sigma eta^s, sigma tau eta^t) over shiftable eta, transpositions tau, s, t."""
    n = sigma.n
    if not 2 <= n <= DIAMETER_MAX_N:
        raise ValueError(f"n={n} outside the enumeration range [2, {DIAMETER_MAX_N}]")
    etas, lengths = _all_shiftable(n)
    return int(K.cross_diameter(sigma.array, etas, lengths, _all_transpositions(n)))


def cross_orbit_diameter(n: int, rng: np.random.Generator | None = None, checks: int = 5) -> int:
    """D_cross at sigma = id, after confirming that ``checks`` random sigma agree."""
    d = cross_orbit_diameter_at(Permutation.from_array(np.arange(n, dtype=np.int32)))
    rng = rng if rng is not None else make_rng(n)
    for _ in range(checks):
        sigma = fisher_yates(rng, n)
        if cross_orbit_diameter_at(sigma) != d:
            raise AssertionError(f"cross-orbit diameter depends on sigma at n={n}")
    return d


@lru_cache(maxsize=None)
def _diameter(n: int) -> int:
    return cross_orbit_diameter(n) if n <= DIAMETER_MAX_N else n - 1


def delta_beta(n: int, beta: float, local_jump: float, cross_diameter: float) -> float:
    if n < 2:
        raise ValueError("n must be at least 2")
    return (1.0 - 2.0 / (n * (n - 1))) * (1.0 + (cross_diameter - 1.0) * math.tanh(beta * local_jump))


def _window_law(model, states):
    lw = model.log_weights(states)
    w = np.exp(lw - lw.max())
    return w / w.sum()


def paired_window_laws(model: MallowsModel, sigma: Permutation, i: int, j: int,
                       eta: Permutation) -> tuple[np.ndarray, np.ndarray]:
    """Index laws on the full windows from sigma and sigma o tau_ij, in lockstep."""
    tau = transposition(sigma.n, i, j).array
    x = sigma.array
    pw = [np.arange(sigma.n, dtype=np.int32)]
    for _ in range(order(eta) - 1):
        pw.append(pw[-1][eta.array])
    pw = np.stack(pw)
    return _window_law(model, x[pw]), _window_law(model, x[tau[pw]])


def llr_tv_check(p, q) -> tuple[float, float, bool]:
    """(TV, max |log(q/p)|, TV <= tanh(max |log(q/p)| / 2))."""
    p, q = _as_laws(p, q)
    tv = orbit_tv(p, q)
    with np.errstate(divide="ignore"):
        radius = float(np.abs(np.log(q) - np.log(p)).max())
    return tv, radius, tv <= math.tanh(radius / 2.0) + 1e-15


def random_paired_windows(model: MallowsModel, count: int, rng: np.random.Generator):
    """Yield (sigma, i, j, eta, p, q) for uniform sigma, edge and shiftable eta."""
    n = model.n
    for _ in range(count):
        sigma = fisher_yates(rng, n)
        i, j = sorted(int(v) + 1 for v in rng.choice(n, size=2, replace=False))
        _, _, eta = sample_shiftable(rng, n)
        p, q = paired_window_laws(model, sigma, i, j, eta)
        yield sigma, i, j, eta, p, q


def edge_contraction_experiment(edge: EdgePair, model: MallowsModel, samples: int,
                                rng: np.random.Generator) -> ContractionReport:
    """One-step shift coupling from the edge; reports E[d_Cay(U, V)] against delta(beta)."""
    n = model.n
    if n > OMEGA_MAX_N:
        raise ValueError(f"n={n} exceeds the enumeration limit {OMEGA_MAX_N}")
    if edge.sigma.n != n:
        raise ValueError("edge and model sizes differ")
    if samples < 1:
        raise ValueError("samples must be positive")
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    # |Omega_IJ| is the same for every pair, so (I, J) then eta is uniform over all atoms
    atoms = [(pair, eta) for pair in pairs for eta in shiftable_set(n, *pair)]
    picks = np.bincount(rng.integers(0, len(atoms), samples), minlength=len(atoms))
    x = edge.sigma.array
    y = edge.other.array
    total = 0.0
    total_sq = 0.0
    aligned = 0
    for (pair, eta), count in zip(atoms, picks):
        if count == 0:
            continue
        if pair == (edge.i, edge.j):
            aligned += int(count)
            continue
        pw = [np.arange(n, dtype=np.int32)]
        for _ in range(order(eta) - 1):
            pw.append(pw[-1][eta.array])
        pw = np.stack(pw)
        us, vs = x[pw], y[pw]
        t, t2 = _maximal_coupling_many(_window_law(model, us), _window_law(model, vs), rng, int(count))
        dist = np.array([[K.cayley_distance(u, v) for v in vs] for u in us], dtype=float)
        d = dist[t, t2]
        total += d.sum()
        total_sq += (d * d).sum()
    mean = float(total / samples)
    var = max(0.0, total_sq / samples - mean * mean)
    std_error = math.sqrt(var / (samples - 1)) if samples > 1 else 0.0
    jump = table_local_jump(model.kind, n)
    jump_brute = brute_local_jump(model.kind, n) if n <= 7 else float("nan")
    d_cross = _diameter(n)
    return ContractionReport(
        beta=float(model.beta),
        n=n,
        empirical_mean_dist=mean,
        std_error=std_error,
        delta_bound=delta_beta(n, model.beta, jump, d_cross),
        samples=samples,
        delta_bound_brute=delta_beta(n, model.beta, jump_brute, d_cross),
        local_jump_table=jump,
        local_jump_brute=jump_brute,
        cross_diameter=int(d_cross),
        aligned_fraction=aligned / samples,
        kind=DistanceKind(model.kind).value,
        edge=f"{edge.sigma};{edge.i},{edge.j}",
    )
