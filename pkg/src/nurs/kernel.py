"""NURS transitions on S_n, the Barker baseline and the full-orbit shiftable kernel."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
import numpy as np

from . import _kernels as K
from .direction import DirectionLaw, sample_shiftable
from .metric import MallowsModel
from .perm import Permutation, order

MAX_DOUBLINGS = 20


class StopReason(enum.Enum):
    STOP = "Stop"
    SUBSTOP = "SubStop"
    MAXLEN = "MaxLen"


_REASONS = {K.REASON_STOP: StopReason.STOP, K.REASON_SUBSTOP: StopReason.SUBSTOP,
            K.REASON_MAXLEN: StopReason.MAXLEN}


@dataclass(frozen=True)
class NursParams:
    eps: float = 0.01
    max_doublings: int = 7

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if not 1 <= self.max_doublings <= MAX_DOUBLINGS:
            raise ValueError(f"max_doublings must lie in [1, {MAX_DOUBLINGS}], got {self.max_doublings}")


@dataclass(frozen=True)
class OrbitWindow:
    """Indices a..b of the orbit sigma o rho^k, with log-weights aligned to k - a."""

    base: Permutation
    direction: Permutation
    a: int
    b: int
    log_weights: np.ndarray

    def __len__(self):
        return self.b - self.a + 1

    def state(self, k: int) -> Permutation:
        if not self.a <= k <= self.b:
            raise IndexError(f"index {k} outside [{self.a}, {self.b}]")
        return Permutation.from_array(self.base.array[K.power(self.direction.array, k)])

    @property
    def states(self) -> list[Permutation]:
        return [self.state(k) for k in range(self.a, self.b + 1)]


@dataclass(frozen=True)
class TransitionRecord:
    selected_index: int
    orbit_len: int
    stop_reason: StopReason
    num_doublings: int


def extend_orbit(edge_state: Permutation, rho: Permutation, steps: int,
                 model: MallowsModel) -> list[tuple[Permutation, float]]:
    """The |steps| orbit points beyond ``edge_state``, in increasing index order."""
    if steps == 0:
        raise ValueError("steps must be non-zero")
    step = rho.array if steps > 0 else K.inverse(rho.array)
    x = edge_state.array
    out = []
    for _ in range(abs(steps)):
        x = x[step]
        out.append(Permutation.from_array(x))
    if steps < 0:
        out.reverse()
    lw = model.log_weights(np.stack([p.array for p in out]))
    return list(zip(out, lw.tolist()))


def _as_lw(log_weights) -> np.ndarray:
    lw = np.ascontiguousarray(log_weights, dtype=float)
    if lw.ndim != 1 or lw.shape[0] == 0:
        raise ValueError("need a non-empty 1-d sequence of log-weights")
    return lw


def stop_check(log_weights, eps: float) -> bool:
    """No-underrun: max boundary weight <= eps * total weight (inclusive)."""
    lw = _as_lw(log_weights)
    return bool(K.stop(lw, 0, lw.shape[0], eps))


def substop_check(log_weights, eps: float) -> bool:
    lw = _as_lw(log_weights)
    size = lw.shape[0]
    if size & (size - 1):
        raise ValueError(f"segment length {size} is not a power of two")
    return bool(K.substop(lw, 0, size, eps))


def _orbit_arrays(x, rho, rho_inv, bits, params, model):
    return K.build_orbit(x, rho, rho_inv, bits, params.eps, float(model.beta),
                         model.kind.code, model._s0, model._s0inv)


def build_orbit(sigma: Permutation, rho: Permutation, bits, params: NursParams,
                model: MallowsModel) -> tuple[OrbitWindow, StopReason]:
    """Deterministic doubling given the direction and all M doubling bits.

    ``bits[j] == 1`` extends forward at stage j+1, otherwise backward.
    """
    bits = np.asarray(bits, dtype=np.int8)
    if bits.shape != (params.max_doublings,):
        raise ValueError(f"need exactly {params.max_doublings} doubling bits, got {bits.shape}")
    a, b, reason, _, lw = _orbit_arrays(sigma.array, rho.array, K.inverse(rho.array), bits, params, model)
    return OrbitWindow(sigma, rho, int(a), int(b), lw), _REASONS[reason]


def categorical_index(log_weights, rng: np.random.Generator) -> int:
    """Inverse-CDF draw with P(t) proportional to exp(log_weights[t])."""
    return int(K.categorical(_as_lw(log_weights), rng.random()))


def _nurs_step_array(x, model, law, params, rng):
    rho = law.sample_array(rng, model.n)
    bits = rng.integers(0, 2, params.max_doublings).astype(np.int8)
    a, b, reason, doublings, lw = _orbit_arrays(x, rho, K.inverse(rho), bits, params, model)
    k = a + K.categorical(lw, rng.random())
    return x[K.power(rho, k)], (int(k), int(b - a + 1), int(reason), int(doublings))


def nurs_step(sigma: Permutation, model: MallowsModel, law: DirectionLaw, params: NursParams,
              rng: np.random.Generator) -> tuple[Permutation, TransitionRecord]:
    if sigma.n != model.n:
        raise ValueError(f"size mismatch: model n={model.n}, sigma n={sigma.n}")
    y, (k, length, reason, doublings) = _nurs_step_array(sigma.array, model, law, params, rng)
    return Permutation.from_array(y), TransitionRecord(k, length, _REASONS[reason], doublings)


def _barker_step_array(x, model, law, rng):
    y = x[law.sample_array(rng, model.n)]
    e = model.energies(np.stack([x, y])).astype(float)
    # w(y) / (w(x) + w(y)) = 1 / (1 + exp(beta (E(y) - E(x))))
    z = min(model.beta * (e[1] - e[0]), 700.0)
    moved = rng.random() < 1.0 / (1.0 + math.exp(z))
    return (y, True) if moved else (x, False)


def barker_step(sigma: Permutation, model: MallowsModel, proposal_law: DirectionLaw,
                rng: np.random.Generator) -> Permutation:
    """Propose sigma o rho, accept with probability w(sigma') / (w(sigma) + w(sigma'))."""
    y, _ = _barker_step_array(sigma.array, model, proposal_law, rng)
    return Permutation.from_array(y)


def shiftable_step(sigma: Permutation, model: MallowsModel, rng: np.random.Generator):
    """One step of the full-orbit kernel: returns (sigma o eta^r, r, eta, i, j)."""
    i, j, eta = sample_shiftable(rng, model.n)
    length = order(eta)
    orbit = np.empty((length, model.n), dtype=np.int32)
    x = sigma.array
    for r in range(length):
        orbit[r] = x
        x = x[eta.array]
    r = categorical_index(model.log_weights(orbit), rng)
    return Permutation.from_array(orbit[r]), r, eta, i, j


@dataclass(frozen=True)
class ChainResult:
    """Per-iteration records of a chain run, after burn-in.

    ``records`` columns: iter, signed_index, orbit_len, reason code,
    doublings, energy, fixed_points, cycle_len_1, lis.
    """

    final: Permutation
    records: np.ndarray
    states: np.ndarray | None
    odd_cycle_tries: int
    odd_cycle_accepted: int

    COLUMNS = ("iter", "signed_index", "orbit_len", "reason", "num_doublings",
               "energy", "fixed_points", "cycle_len_1", "lis")

    def column(self, name: str) -> np.ndarray:
        return self.records[:, self.COLUMNS.index(name)]

    def stop_reasons(self) -> list[StopReason]:
        return [_REASONS[int(r)] for r in self.column("reason")]

    def __len__(self):
        return self.records.shape[0]


_KERNELS = {"nurs": K.KERNEL_NURS, "barker": K.KERNEL_BARKER}


def run_chain(model: MallowsModel, law: DirectionLaw, params: NursParams, iters: int,
              rng: np.random.Generator, burnin: int = 0, start: Permutation | None = None,
              kernel: str = "nurs", keep_states: bool = False) -> ChainResult:
    """Run ``iters`` transitions from ``start`` (default sigma0) in compiled code.

    ``kernel="barker"`` runs the two-point Barker chain with ``law`` as the
    proposal; its records report orbit_len 2, MaxLen, and signed index 1 on a
    move and 0 otherwise. ``keep_states`` stores every retained state.
    """
    if kernel not in _KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if not 0 <= burnin < iters:
        raise ValueError(f"need 0 <= burnin < iters, got burnin={burnin}, iters={iters}")
    x0 = (start if start is not None else model.sigma0).array
    if x0.shape[0] != model.n:
        raise ValueError(f"size mismatch: model n={model.n}, start n={x0.shape[0]}")
    code, param = law.jit_spec(model.n)
    x, rec, states, counts, ok = K.run_chain(
        rng, x0.copy(), code, param, params.eps, params.max_doublings, float(model.beta),
        model.kind.code, model._s0, model._s0inv, iters, burnin, _KERNELS[kernel], keep_states)
    if not ok:
        raise RuntimeError(f"odd-cycle rejection sampler failed {K.SHIFTABLE_MAX_TRIES} times")
    return ChainResult(Permutation.from_array(x), rec, states if keep_states else None,
                       int(counts[0]), int(counts[1]))
