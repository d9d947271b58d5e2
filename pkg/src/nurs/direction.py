"""State-independent direction laws for orbit construction.

None of the samplers here take a chain state, so each law is trivially
orbit-equivariant.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .perm import LABEL_DTYPE, Permutation, all_permutations, fisher_yates_array

SHIFTABLE_MAX_TRIES = K.SHIFTABLE_MAX_TRIES


@dataclass(frozen=True)
class SupportAtom:
    rho: Permutation
    prob: float


class OddCycleRejectionStats:
    """Running acceptance counts for the all-odd-cycle rejection sampler."""

    def __init__(self):
        self.tries = 0
        self.accepted = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.tries if self.tries else float("nan")


def sample_uniform(rng: np.random.Generator, n: int) -> Permutation:
    return Permutation.from_array(fisher_yates_array(rng, n))


def block_label_sets(n: int, B: int, offset: int) -> list[list[int]]:
    """1-based original labels of each block for a given rotation offset."""
    blocks = []
    for start in range(0, n, B):
        rotated = range(start, min(start + B, n))
        blocks.append([(t + offset) % n + 1 for t in rotated])
    return blocks


def _check_size(what, name, value, n):
    if not 2 <= value <= n:
        raise ValueError(f"{what} must satisfy 2 <= {name} <= n, got {name}={value}, n={n}")


def _block_shuffle_array(rng, n, B, offset=None):
    _check_size("block size", "B", B, n)
    U = int(rng.integers(0, B)) if offset is None else offset
    pi = np.empty(n, dtype=np.int64)
    for start in range(0, n, B):
        size = min(B, n - start)
        pi[start:start + size] = start + fisher_yates_array(rng, size)
    # rho(t) = rot(pi(rot^-1(t))) with rot(t) = (t + U) mod n, 0-based
    t = np.arange(n)
    rho = (pi[(t - U) % n] + U) % n
    return rho.astype(LABEL_DTYPE)


def sample_block_shuffle(rng: np.random.Generator, n: int, B: int, offset: int | None = None) -> Permutation:
    """Independent uniform shuffles on consecutive blocks of a rotated labeling.

    ``offset`` pins the rotation U instead of drawing it; the final short block
    (when B does not divide n) is shuffled uniformly like the others.
    """
    return Permutation.from_array(_block_shuffle_array(rng, n, B, offset))


def _local_cycle_array(n, ell, start):
    rho = np.arange(n, dtype=LABEL_DTYPE)
    idx = (start + np.arange(ell)) % n
    rho[idx] = np.roll(idx, -1)
    return rho


def sample_local_cycle(rng: np.random.Generator, n: int, ell: int) -> Permutation:
    """The ell-cycle (i, i+1, ..., i+ell-1) with wrap-around and uniform start i."""
    _check_size("cycle length", "ell", ell, n)
    return Permutation.from_array(_local_cycle_array(n, ell, int(rng.integers(0, n))))


def _random_pair(rng, n):
    i, j = rng.choice(n, size=2, replace=False)
    return (int(i), int(j)) if i < j else (int(j), int(i))


def _all_odd_cycles(a):
    return bool(np.all(K.cycle_lengths(a) % 2 == 1))


def sample_shiftable(rng: np.random.Generator, n: int, stats: OddCycleRejectionStats | None = None):
    """Draw (i, j, eta) with eta = tau_ij o h and h all-odd-cycle on the other labels.

    Returns 1-based ``i < j``. ``h`` is uniform among admissible elements by
    rejection from a uniform shuffle of the complement labels.
    """
    if n < 2:
        raise ValueError("shiftable directions need n >= 2")
    i, j = _random_pair(rng, n)
    rest = np.array([t for t in range(n) if t != i and t != j], dtype=np.int64)
    for _ in range(SHIFTABLE_MAX_TRIES):
        h_local = fisher_yates_array(rng, n - 2) if n > 2 else np.zeros(0, dtype=LABEL_DTYPE)
        if stats is not None:
            stats.tries += 1
        if h_local.shape[0] == 0 or _all_odd_cycles(h_local):
            if stats is not None:
                stats.accepted += 1
            break
    else:
        raise RuntimeError(f"odd-cycle rejection sampler failed {SHIFTABLE_MAX_TRIES} times")
    eta = np.arange(n, dtype=LABEL_DTYPE)
    eta[rest] = rest[h_local]
    eta[i], eta[j] = j, i
    return i + 1, j + 1, Permutation.from_array(eta)


def sample_bare_transposition(rng: np.random.Generator, n: int) -> Permutation:
    if n < 2:
        raise ValueError("transpositions need n >= 2")
    i, j = _random_pair(rng, n)
    rho = np.arange(n, dtype=LABEL_DTYPE)
    rho[i], rho[j] = j, i
    return Permutation.from_array(rho)


def odd_cycle_elements(labels: list[int], n: int) -> list[np.ndarray]:
    """All h on S_n fixing everything outside ``labels`` (0-based) with all cycles odd."""
    labels = np.asarray(labels, dtype=np.int64)
    out = []
    for local in itertools.permutations(range(len(labels))):
        local = np.asarray(local, dtype=LABEL_DTYPE)
        if len(labels) == 0 or _all_odd_cycles(local):
            h = np.arange(n, dtype=LABEL_DTYPE)
            h[labels] = labels[local]
            out.append(h)
    return out


def shiftable_set(n: int, i: int, j: int) -> list[Permutation]:
    """Omega_ij for 1-based i < j: tau_ij o h over all admissible h."""
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= n, got ({i}, {j}) with n={n}")
    rest = [t for t in range(n) if t not in (i - 1, j - 1)]
    out = []
    for h in odd_cycle_elements(rest, n):
        eta = h.copy()
        eta[i - 1], eta[j - 1] = j - 1, i - 1
        out.append(Permutation.from_array(eta))
    return out


# -- law objects ---------------------------------------------------------------

@dataclass(frozen=True)
class UniformSn:
    def jit_spec(self, n):
        return K.LAW_UNIFORM, 0

    def sample_array(self, rng, n):
        return fisher_yates_array(rng, n)

    def __str__(self):
        return "uniform"


@dataclass(frozen=True)
class BlockShuffle:
    B: int

    def jit_spec(self, n):
        _check_size("block size", "B", self.B, n)
        return K.LAW_BLOCK, self.B

    def sample_array(self, rng, n):
        return _block_shuffle_array(rng, n, self.B)

    def __str__(self):
        return f"block:{self.B}"


@dataclass(frozen=True)
class LocalCycle:
    ell: int

    def jit_spec(self, n):
        _check_size("cycle length", "ell", self.ell, n)
        return K.LAW_LOCAL, self.ell

    def sample_array(self, rng, n):
        _check_size("cycle length", "ell", self.ell, n)
        return _local_cycle_array(n, self.ell, int(rng.integers(0, n)))

    def __str__(self):
        return f"local:{self.ell}"


@dataclass(frozen=True)
class Shiftable:
    def jit_spec(self, n):
        if n < 2:
            raise ValueError("shiftable directions need n >= 2")
        return K.LAW_SHIFTABLE, 0

    def sample_array(self, rng, n):
        return sample_shiftable(rng, n)[2].array

    def __str__(self):
        return "shiftable"


@dataclass(frozen=True)
class BareTransposition:
    def jit_spec(self, n):
        if n < 2:
            raise ValueError("transpositions need n >= 2")
        return K.LAW_TRANSPOSITION, 0

    def sample_array(self, rng, n):
        return sample_bare_transposition(rng, n).array

    def __str__(self):
        return "transposition"


DirectionLaw = UniformSn | BlockShuffle | LocalCycle | Shiftable | BareTransposition


def parse_direction(spec: str) -> DirectionLaw:
    """Parse ``uniform``, ``block:B``, ``local:L``, ``shiftable`` or ``transposition``."""
    head, _, arg = spec.partition(":")
    try:
        if head == "uniform" and not arg:
            return UniformSn()
        if head == "shiftable" and not arg:
            return Shiftable()
        if head == "transposition" and not arg:
            return BareTransposition()
        if head == "block":
            return BlockShuffle(int(arg))
        if head == "local":
            return LocalCycle(int(arg))
    except ValueError:
        pass
    raise ValueError(f"bad direction spec {spec!r}")


def sample(law: DirectionLaw, rng: np.random.Generator, n: int) -> Permutation:
    return Permutation.from_array(law.sample_array(rng, n))


def _merge(arrays_probs):
    acc: dict[bytes, list] = {}
    for a, p in arrays_probs:
        key = a.tobytes()
        if key in acc:
            acc[key][1].append(p)
        else:
            acc[key] = [a, [p]]
    return [SupportAtom(Permutation.from_array(a), math.fsum(ps)) for a, ps in acc.values()]


def enumerate_support(law: DirectionLaw, n: int) -> list[SupportAtom]:
    """Exact support of a law on S_n; duplicate directions are merged."""
    if isinstance(law, UniformSn) and n <= 6:
        states = all_permutations(n)
        return [SupportAtom(Permutation.from_array(a), 1.0 / len(states)) for a in states]
    if isinstance(law, BareTransposition) and 2 <= n <= 8:
        pairs = list(itertools.combinations(range(n), 2))
        atoms = []
        for i, j in pairs:
            rho = np.arange(n, dtype=LABEL_DTYPE)
            rho[i], rho[j] = j, i
            atoms.append((rho, 1.0 / len(pairs)))
        return _merge(atoms)
    if isinstance(law, Shiftable) and 2 <= n <= 6:
        pairs = list(itertools.combinations(range(1, n + 1), 2))
        atoms = []
        for i, j in pairs:
            omega = shiftable_set(n, i, j)
            atoms.extend((eta.array, 1.0 / (len(pairs) * len(omega))) for eta in omega)
        return _merge(atoms)
    if isinstance(law, LocalCycle) and 2 <= law.ell <= n <= 10_000:
        return _merge((_local_cycle_array(n, law.ell, s), 1.0 / n) for s in range(n))
    raise ValueError(f"cannot enumerate the support of {law} on n={n}")
