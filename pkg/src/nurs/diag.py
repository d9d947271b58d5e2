"""Run traces, histograms, reference laws and autocorrelation diagnostics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _kernels as K
from .kernel import ChainResult, StopReason, TransitionRecord
from .metric import MallowsModel, energy
from .perm import Permutation

TRACE_COLUMNS = ("iter", "signed_index", "orbit_len", "stop_reason", "energy",
                 "fixed_points", "cycle_len_1", "lis")
TRIANGULAR_VARIANTS = ("wide", "derived")


def poisson_pmf(lam: float, k: int) -> float:
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if k < 0:
        return 0.0
    return math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))


def triangular_pmf(M: int, k: int, variant: str = "derived") -> float:
    """Signed-index law on a 2^M window at beta = 0.

    ``derived``: (2^M - |k|) / 4^M for |k| < 2^M, the exact law of a uniform
    index in a window of length 2^M placed uniformly around 0.
    ``wide``: (2^M + 1 - |k|) / (2^M + 1)^2 for |k| <= 2^M.
    """
    if variant not in TRIANGULAR_VARIANTS:
        raise ValueError(f"variant must be one of {TRIANGULAR_VARIANTS}, got {variant!r}")
    if M < 0:
        raise ValueError("M must be non-negative")
    full = 2**M
    if abs(k) > full:
        raise ValueError(f"|k|={abs(k)} exceeds 2^M={full}")
    if variant == "wide":
        return (full + 1 - abs(k)) / (full + 1) ** 2
    return max(full - abs(k), 0) / 4**M


def triangular_support(M: int, variant: str = "derived") -> dict[int, float]:
    full = 2**M
    return {k: triangular_pmf(M, k, variant) for k in range(-full, full + 1)}


def poisson_support(lam: float, k_max: int) -> dict[int, float]:
    return {k: poisson_pmf(lam, k) for k in range(k_max + 1)}


@dataclass(frozen=True)
class Histogram:
    bins: np.ndarray
    counts: np.ndarray
    total: int

    def __post_init__(self):
        if int(np.sum(self.counts)) != self.total:
            raise ValueError("counts do not sum to total")

    @classmethod
    def from_values(cls, values) -> "Histogram":
        bins, counts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
        return cls(bins, counts, int(counts.sum()))

    def as_dict(self) -> dict[int, int]:
        return {int(b): int(c) for b, c in zip(self.bins, self.counts)}

    def empirical(self, k: int) -> float:
        return self.as_dict().get(int(k), 0) / self.total


Pmf = Mapping[int, float] | Callable[[int], float]


def _pmf_at(pmf: Pmf, k: int) -> float:
    return pmf(k) if callable(pmf) else pmf.get(k, 0.0)


def empirical_tv(hist: Histogram, pmf: Mapping[int, float]) -> float:
    """0.5 * sum_k |hist(k)/total - pmf(k)| over the union of both supports."""
    if hist.total <= 0:
        raise ValueError("histogram is empty")
    emp = {k: c / hist.total for k, c in hist.as_dict().items()}
    keys = set(emp) | set(pmf)
    return 0.5 * math.fsum(abs(emp.get(k, 0.0) - pmf.get(k, 0.0)) for k in keys)


def histogram_rows(hist: Histogram, pmf: Pmf | None = None, keys: Sequence[int] | None = None):
    """(k, count, empirical_p, reference_p) rows over hist bins plus ``keys``."""
    counts = hist.as_dict()
    ks = sorted(set(counts) | set(keys or ()) | (set(pmf) if isinstance(pmf, Mapping) else set()))
    for k in ks:
        ref = _pmf_at(pmf, k) if pmf is not None else float("nan")
        yield k, counts.get(k, 0), counts.get(k, 0) / hist.total, ref


@dataclass(frozen=True)
class RunTrace:
    iteration: np.ndarray
    signed_index: np.ndarray
    orbit_len: np.ndarray
    stop_reason: tuple[StopReason, ...]
    energy: np.ndarray
    fixed_points: np.ndarray
    cycle_len_1: np.ndarray
    lis: np.ndarray

    def __post_init__(self):
        size = len(self.iteration)
        for name in TRACE_COLUMNS[1:]:
            col = self.stop_reason if name == "stop_reason" else getattr(self, name)
            if len(col) != size:
                raise ValueError(f"column {name} has length {len(col)}, expected {size}")
        if size > 1 and not np.all(np.diff(self.iteration) > 0):
            raise ValueError("iterations must be strictly increasing")

    def __len__(self):
        return len(self.iteration)

    @classmethod
    def from_chain(cls, result: ChainResult) -> "RunTrace":
        col = result.column
        return cls(col("iter"), col("signed_index"), col("orbit_len"), tuple(result.stop_reasons()),
                   col("energy"), col("fixed_points"), col("cycle_len_1"), col("lis"))

    def column(self, name: str) -> np.ndarray:
        if name == "iter":
            return self.iteration
        if name == "stop_reason":
            return np.array([r.value for r in self.stop_reason])
        if name not in TRACE_COLUMNS:
            raise KeyError(f"unknown trace column {name!r}")
        return getattr(self, name)

    def to_csv(self, fh: io.TextIOBase, comment: str | None = None) -> None:
        if comment is not None:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        reasons = [r.value for r in self.stop_reason]
        for row in zip(self.iteration.tolist(), self.signed_index.tolist(), self.orbit_len.tolist(),
                       reasons, self.energy.tolist(), self.fixed_points.tolist(),
                       self.cycle_len_1.tolist(), self.lis.tolist()):
            w.writerow(row)

    @classmethod
    def read_csv(cls, path: str | Path) -> "RunTrace":
        with open(path, newline="") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
        rows = list(csv.DictReader(lines))
        if not rows:
            raise ValueError(f"{path} holds no trace rows")
        missing = set(TRACE_COLUMNS) - set(rows[0])
        if missing:
            raise ValueError(f"{path} lacks columns {sorted(missing)}")
        ints = {c: np.array([int(r[c]) for r in rows], dtype=np.int64)
                for c in TRACE_COLUMNS if c != "stop_reason"}
        return cls(ints["iter"], ints["signed_index"], ints["orbit_len"],
                   tuple(StopReason(r["stop_reason"]) for r in rows), ints["energy"],
                   ints["fixed_points"], ints["cycle_len_1"], ints["lis"])


def trace_stats(states: Sequence[Permutation], records: Sequence[TransitionRecord],
                model: MallowsModel, iterations: Sequence[int] | None = None) -> RunTrace:
    """Trace statistics of explicit states; iterations default to 1..len(states)."""
    if len(states) != len(records):
        raise ValueError(f"{len(states)} states but {len(records)} records")
    its = np.arange(1, len(states) + 1) if iterations is None else np.asarray(iterations, dtype=np.int64)
    arrays = [s.array for s in states]
    return RunTrace(
        iteration=its,
        signed_index=np.array([r.selected_index for r in records], dtype=np.int64),
        orbit_len=np.array([r.orbit_len for r in records], dtype=np.int64),
        stop_reason=tuple(r.stop_reason for r in records),
        energy=np.array([energy(model, s) for s in states], dtype=np.int64),
        fixed_points=np.array([K.fixed_points(a) for a in arrays], dtype=np.int64),
        cycle_len_1=np.array([K.cycle_length_of(a, 0) for a in arrays], dtype=np.int64),
        lis=np.array([K.lis_length(a) for a in arrays], dtype=np.int64),
    )


def autocorr_ess(series, max_lag: int) -> tuple[np.ndarray, float]:
    """Biased ACF for lags 0..max_lag and ESS = N / (1 + 2 sum of leading positive lags).

    The sum stops before the first negative autocorrelation. A constant series
    has no defined ACF; it gets acf = (1, 0, 0, ...) and ESS = N.
    """
    x = np.asarray(series, dtype=float)
    size = x.shape[0]
    if max_lag < 0 or size <= max_lag:
        raise ValueError(f"need 0 <= max_lag < len(series), got max_lag={max_lag}, len={size}")
    d = x - x.mean()
    var = float(d @ d) / size
    acf = np.zeros(max_lag + 1)
    acf[0] = 1.0
    if var == 0.0:
        return acf, float(size)
    nfft = 1 << int(2 * size - 1).bit_length()
    f = np.fft.rfft(d, nfft)
    raw = np.fft.irfft(f * np.conj(f), nfft)[:max_lag + 1] / size
    acf = raw / var
    acf[0] = 1.0
    s = 0.0
    for k in range(1, max_lag + 1):
        if acf[k] < 0:
            break
        s += acf[k]
    return acf, size / (1.0 + 2.0 * s)
