"""Permutations of {1..n} in one-line form.

Composition follows ``(sigma o rho)(i) = sigma(rho(i))``: rho is applied
first. Every orbit in the package is ``sigma o rho^k`` under this
convention. Labels are 1-based in all text and docs and 0-based in the
stored array.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K

LABEL_DTYPE = np.int32
MAX_N = 2**31 - 1


class Permutation:
    """An immutable element of S_n.

    Construct from 1-based one-line values, e.g. ``Permutation([2, 1, 3])``.
    ``sigma.array`` is the 0-based read-only ``int32`` storage.
    """

    __slots__ = ("_a", "_hash")

    def __init__(self, values: Iterable[int]):
        if not isinstance(values, np.ndarray):
            values = list(values)
        a = np.asarray(values, dtype=np.int64) - 1
        n = a.shape[0]
        if a.ndim != 1 or n < 1:
            raise ValueError("a permutation needs at least one label")
        if n > MAX_N:
            raise ValueError(f"n={n} exceeds the label range")
        if a.min() < 0 or a.max() >= n or np.unique(a).shape[0] != n:
            raise ValueError(f"not a permutation of 1..{n}: {list(a + 1)}")
        self._set(a.astype(LABEL_DTYPE))

    def _set(self, a: np.ndarray) -> None:
        a.flags.writeable = False
        self._a = a
        self._hash = None

    @classmethod
    def from_array(cls, a: np.ndarray) -> "Permutation":
        """Wrap a 0-based array without validation (internal fast path)."""
        p = cls.__new__(cls)
        p._set(np.array(a, dtype=LABEL_DTYPE, copy=True))
        return p

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Parse the comma-separated form ``"2,1,3"``."""
        return cls(int(tok) for tok in text.split(",") if tok.strip())

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def n(self) -> int:
        return self._a.shape[0]

    def __len__(self) -> int:
        return self._a.shape[0]

    def __call__(self, label: int) -> int:
        return int(self._a[label - 1]) + 1

    def to_list(self) -> list[int]:
        return (self._a.astype(np.int64) + 1).tolist()

    def __iter__(self):
        return iter(self.to_list())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._a.tobytes())
        return self._hash

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __str__(self) -> str:
        return ",".join(map(str, self.to_list()))

    def __repr__(self) -> str:
        return f"Permutation([{str(self)}])"


@dataclass(frozen=True)
class CycleStats:
    cycles: list[list[int]]
    cycle_count: int
    order: int
    fixed_points: int


def identity(n: int) -> Permutation:
    if n < 1:
        raise ValueError("n must be positive")
    return Permutation.from_array(np.arange(n, dtype=LABEL_DTYPE))


def transposition(n: int, i: int, j: int) -> Permutation:
    """The transposition (i j) on 1-based labels."""
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise ValueError(f"bad transposition ({i} {j}) on n={n}")
    a = np.arange(n, dtype=LABEL_DTYPE)
    a[i - 1], a[j - 1] = j - 1, i - 1
    return Permutation.from_array(a)


def from_cycles(n: int, cycles: Sequence[Sequence[int]]) -> Permutation:
    """Build from 1-based cycle notation, e.g. ``from_cycles(5, [[1, 2, 3], [4, 5]])``."""
    a = np.arange(n, dtype=LABEL_DTYPE)
    for cyc in cycles:
        for r, label in enumerate(cyc):
            a[label - 1] = cyc[(r + 1) % len(cyc)] - 1
    p = Permutation.from_array(a)
    if np.unique(p.array).shape[0] != n:
        raise ValueError(f"cycles {cycles} overlap")
    return p


def compose(sigma: Permutation, rho: Permutation) -> Permutation:
    """sigma o rho, i.e. i -> sigma(rho(i))."""
    if sigma.n != rho.n:
        raise ValueError(f"size mismatch: {sigma.n} vs {rho.n}")
    return Permutation.from_array(sigma.array[rho.array])


def inverse(sigma: Permutation) -> Permutation:
    return Permutation.from_array(K.inverse(sigma.array))


def power(sigma: Permutation, k: int) -> Permutation:
    return Permutation.from_array(K.power(sigma.array, int(k)))


def order(sigma: Permutation) -> int:
    lengths = np.unique(K.cycle_lengths(sigma.array))
    return reduce(math.lcm, (int(x) for x in lengths), 1)


def cycle_stats(sigma: Permutation) -> CycleStats:
    a = sigma.array
    seen = np.zeros(sigma.n, dtype=bool)
    cycles = []
    for start in range(sigma.n):
        if seen[start]:
            continue
        cyc = []
        j = start
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = int(a[j])
        cycles.append(cyc)
    lengths = {len(c) for c in cycles}
    return CycleStats(
        cycles=cycles,
        cycle_count=len(cycles),
        order=reduce(math.lcm, lengths, 1),
        fixed_points=sum(1 for c in cycles if len(c) == 1),
    )


def cycle_length_of(sigma: Permutation, label: int) -> int:
    if not 1 <= label <= sigma.n:
        raise ValueError(f"label {label} outside 1..{sigma.n}")
    return int(K.cycle_length_of(sigma.array, label - 1))


def lis_length(sigma: Permutation) -> int:
    return int(K.lis_length(sigma.array))


def inversion_count(sigma: Permutation) -> int:
    return int(K.inversion_count(sigma.array))


def fisher_yates_array(rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 1:
        return np.zeros(1, dtype=LABEL_DTYPE)
    # One bounded draw per swap: positions n-1..1 pick from {0..i}.
    draws = rng.integers(0, np.arange(n, 1, -1))
    return K.fisher_yates(draws)


def fisher_yates(rng: np.random.Generator, n: int) -> Permutation:
    """Uniform element of S_n using exactly n-1 bounded-uniform draws."""
    if n < 1:
        raise ValueError("n must be positive")
    return Permutation.from_array(fisher_yates_array(rng, n))


def all_permutations(n: int) -> np.ndarray:
    """All of S_n as a (n!, n) 0-based array in lexicographic order."""
    return np.array(list(itertools.permutations(range(n))), dtype=LABEL_DTYPE).reshape(-1, n)
