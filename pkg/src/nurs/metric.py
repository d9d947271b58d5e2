"""Permutation distances, Mallows energies and brute-force constants."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .perm import Permutation, all_permutations, identity

EXACT_MAX_N = 8
BRUTE_JUMP_MAX_N = 7


class DistanceKind(enum.Enum):
    KENDALL = "kendall"
    L1 = "l1"
    L2 = "l2"
    HAMMING = "hamming"
    CAYLEY = "cayley"
    ULAM = "ulam"

    @property
    def code(self) -> int:
        return _CODES[self]

    @classmethod
    def parse(cls, name: str) -> "DistanceKind":
        try:
            return cls(name)
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown distance {name!r}; expected one of {choices}") from None


_CODES = {
    DistanceKind.KENDALL: K.KENDALL,
    DistanceKind.L1: K.L1,
    DistanceKind.L2: K.L2,
    DistanceKind.HAMMING: K.HAMMING,
    DistanceKind.CAYLEY: K.CAYLEY,
    DistanceKind.ULAM: K.ULAM,
}


@dataclass(frozen=True)
class MallowsModel:
    """P(sigma) proportional to exp(-beta * d(sigma, sigma0))."""

    n: int
    beta: float
    kind: DistanceKind
    sigma0: Permutation = None
    _s0: np.ndarray = field(init=False, repr=False, compare=False)
    _s0inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.beta >= 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        kind = self.kind if isinstance(self.kind, DistanceKind) else DistanceKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        s0 = self.sigma0 if self.sigma0 is not None else identity(self.n)
        if s0.n != self.n:
            raise ValueError(f"sigma0 has size {s0.n}, model has n={self.n}")
        object.__setattr__(self, "sigma0", s0)
        object.__setattr__(self, "_s0", s0.array)
        object.__setattr__(self, "_s0inv", K.inverse(s0.array))

    def energies(self, states: np.ndarray) -> np.ndarray:
        """Integer energies of a (rows, n) block of 0-based states."""
        states = np.ascontiguousarray(states, dtype=np.int32).reshape(-1, self.n)
        return K.energies(self.kind.code, states, self._s0, self._s0inv)

    def log_weights(self, states: np.ndarray) -> np.ndarray:
        return -self.beta * self.energies(states).astype(float)


@dataclass(frozen=True)
class ExactPmf:
    ordering: np.ndarray  # (n!, n) 0-based, lexicographic
    probs: np.ndarray

    def index(self) -> dict[bytes, int]:
        return {row.tobytes(): i for i, row in enumerate(self.ordering)}


def energy(model: MallowsModel, sigma: Permutation) -> int:
    if sigma.n != model.n:
        raise ValueError(f"size mismatch: model n={model.n}, sigma n={sigma.n}")
    return int(K.energy(model.kind.code, sigma.array, model._s0, model._s0inv))


def log_weight(model: MallowsModel, sigma: Permutation) -> float:
    return -model.beta * float(energy(model, sigma))


def _log_normalize(lw: np.ndarray) -> np.ndarray:
    m = lw.max()
    p = np.exp(lw - m)
    return p / math.fsum(p)


def exact_pmf(model: MallowsModel) -> ExactPmf:
    if model.n > EXACT_MAX_N:
        raise ValueError(f"exact_pmf enumerates n! states; n={model.n} > {EXACT_MAX_N}")
    states = all_permutations(model.n)
    return ExactPmf(ordering=states, probs=_log_normalize(model.log_weights(states)))


_TABLE_JUMP = {
    DistanceKind.KENDALL: lambda n: 2 * (n - 1) - 1,
    DistanceKind.L1: lambda n: 2 * (n - 1),
    DistanceKind.L2: lambda n: 2 * (n - 1) ** 2,
    DistanceKind.HAMMING: lambda n: 2,
    DistanceKind.ULAM: lambda n: 2,
    DistanceKind.CAYLEY: lambda n: 1,
}

_TABLE_EMAX = {
    DistanceKind.KENDALL: lambda n: n * (n - 1) // 2,
    DistanceKind.L1: lambda n: n * n // 2,
    DistanceKind.L2: lambda n: (n**3 - n) // 3,
    DistanceKind.HAMMING: lambda n: n,
    DistanceKind.ULAM: lambda n: n - 1,
    DistanceKind.CAYLEY: lambda n: n - 1,
}


def table_local_jump(kind: DistanceKind, n: int) -> float:
    """Lipschitz constant of the energy for one transposition step."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return float(_TABLE_JUMP[DistanceKind(kind)](n))


def table_energy_max(kind: DistanceKind, n: int) -> float:
    if n < 2:
        raise ValueError("n must be at least 2")
    return float(_TABLE_EMAX[DistanceKind(kind)](n))


def brute_local_jump(kind: DistanceKind, n: int) -> float:
    """max |E(sigma o tau) - E(sigma)| over S_n and all transpositions, sigma0 = id."""
    if n > BRUTE_JUMP_MAX_N:
        raise ValueError(f"brute_local_jump enumerates S_n; n={n} > {BRUTE_JUMP_MAX_N}")
    model = MallowsModel(n, 0.0, DistanceKind(kind))
    states = all_permutations(n)
    base = model.energies(states)
    best = 0
    for i, j in itertools.combinations(range(n), 2):
        swapped = states.copy()
        swapped[:, [i, j]] = swapped[:, [j, i]]
        best = max(best, int(np.abs(model.energies(swapped) - base).max()))
    return float(best)


def brute_energy_max(kind: DistanceKind, n: int) -> float:
    if n > EXACT_MAX_N:
        raise ValueError(f"brute_energy_max enumerates S_n; n={n} > {EXACT_MAX_N}")
    model = MallowsModel(n, 0.0, DistanceKind(kind))
    return float(model.energies(all_permutations(n)).max())


def cayley_distance(a: Permutation, b: Permutation) -> int:
    """Minimal number of transpositions taking a to b, computed as n - cyc(a o b^-1)."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    return int(K.cayley_distance(a.array, b.array))
