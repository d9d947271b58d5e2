"""Exact transition matrices on small S_n and the residuals that certify them.

Every matrix row is assembled by enumerating all randomness of one
transition (direction atoms and doubling bit strings), so no Monte Carlo
enters. Entries are accumulated with compensated summation in a fixed order,
which makes a matrix a deterministic function of its inputs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels as K
from .direction import DirectionLaw, Shiftable, enumerate_support
from .kernel import NursParams
from .metric import MallowsModel
from .perm import Permutation, all_permutations, inverse, order

NURS_MAX_N = 5
NURS_MAX_DOUBLINGS = 4
BARKER_MAX_N = 6
SHIFTABLE_MAX_N = 5
TV_MAX_STEPS = 500
ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic kernel over ``ordering`` (lexicographic, 0-based rows)."""

    ordering: np.ndarray
    rows: np.ndarray

    def __post_init__(self):
        size = self.ordering.shape[0]
        if self.rows.shape != (size, size):
            raise ValueError(f"rows have shape {self.rows.shape}, expected {(size, size)}")

    @property
    def size(self) -> int:
        return self.rows.shape[0]

    def labels(self) -> list[str]:
        return [str(Permutation.from_array(a)) for a in self.ordering]

    def row_sum_error(self) -> float:
        return float(np.abs(self.rows.sum(axis=1) - 1.0).max())

    def min_entry(self) -> float:
        return float(self.rows.min())

    def to_csv(self, path: str | Path) -> None:
        """Row-major CSV; the header carries the canonical permutation strings."""
        labels = self.labels()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["from", *labels])
            for label, row in zip(labels, self.rows):
                w.writerow([label, *(repr(float(v)) for v in row)])


def _guard(name: str, value: int, limit: int) -> None:
    if value > limit:
        raise ValueError(f"{name}={value} exceeds the enumeration limit {limit}")


def _atoms(law: DirectionLaw, n: int) -> tuple[np.ndarray, np.ndarray]:
    support = enumerate_support(law, n)
    rhos = np.stack([a.rho.array for a in support])
    probs = np.array([a.prob for a in support])
    return rhos, probs


def _model_args(model: MallowsModel):
    return float(model.beta), model.kind.code, model._s0, model._s0inv


def nurs_matrix(model: MallowsModel, law: DirectionLaw, params: NursParams) -> TransitionMatrix:
    _guard("n", model.n, NURS_MAX_N)
    _guard("max_doublings", params.max_doublings, NURS_MAX_DOUBLINGS)
    states = all_permutations(model.n)
    rhos, probs = _atoms(law, model.n)
    rows = K.nurs_matrix(states, rhos, probs, params.max_doublings, params.eps, *_model_args(model))
    return TransitionMatrix(states, rows)


def is_inverse_symmetric(law: DirectionLaw, n: int, tol: float = 1e-15) -> bool:
    """q(rho) = q(rho^-1) on the enumerated support."""
    probs = {a.rho: a.prob for a in enumerate_support(law, n)}
    return all(abs(p - probs.get(inverse(rho), 0.0)) <= tol for rho, p in probs.items())


def barker_matrix(model: MallowsModel, proposal_law: DirectionLaw) -> TransitionMatrix:
    _guard("n", model.n, BARKER_MAX_N)
    if not is_inverse_symmetric(proposal_law, model.n):
        raise ValueError(f"proposal law {proposal_law} is not symmetric under inversion")
    states = all_permutations(model.n)
    rhos, probs = _atoms(proposal_law, model.n)
    return TransitionMatrix(states, K.barker_matrix(states, rhos, probs, *_model_args(model)))


def shiftable_matrix(model: MallowsModel) -> TransitionMatrix:
    """Idealized kernel: uniform (i, j), uniform eta in Omega_ij, full window {0..ord(eta)-1}."""
    _guard("n", model.n, SHIFTABLE_MAX_N)
    if model.n < 2:
        raise ValueError("shiftable directions need n >= 2")
    states = all_permutations(model.n)
    support = enumerate_support(Shiftable(), model.n)
    rhos = np.stack([a.rho.array for a in support])
    probs = np.array([a.prob for a in support])
    lengths = np.array([order(a.rho) for a in support], dtype=np.int64)
    rows = K.full_orbit_matrix(states, rhos, probs, lengths, *_model_args(model))
    return TransitionMatrix(states, rows)


def _check_dims(K_: TransitionMatrix, pmf: np.ndarray) -> np.ndarray:
    pmf = np.asarray(pmf, dtype=float)
    if pmf.shape != (K_.size,):
        raise ValueError(f"pmf has shape {pmf.shape}, matrix has {K_.size} states")
    return pmf


def detailed_balance_residual(K_: TransitionMatrix, pmf) -> float:
    """max over pairs of |pi(s) K(s, t) - pi(t) K(t, s)|."""
    pmf = _check_dims(K_, pmf)
    flow = pmf[:, None] * K_.rows
    return float(np.abs(flow - flow.T).max())


def stationarity_residual(K_: TransitionMatrix, pmf) -> float:
    """max over t of |sum_s pi(s) K(s, t) - pi(t)|, columns summed with fsum."""
    pmf = _check_dims(K_, pmf)
    flow = pmf[:, None] * K_.rows
    pushed = np.array([math.fsum(col) for col in flow.T])
    return float(np.abs(pushed - pmf).max())


def worst_case_tv(dist_rows: np.ndarray, pmf: np.ndarray) -> float:
    """max over rows of the TV distance between that row and pmf."""
    return float(0.5 * np.abs(dist_rows - pmf[None, :]).sum(axis=1).max())


def point_mass_tv(pmf, index: int) -> float:
    """TV between a point mass at state ``index`` and pmf, i.e. 1 - pi(state)."""
    return 1.0 - float(np.asarray(pmf)[index])


def tv_mixing_curve(K_: TransitionMatrix, pmf, t_max: int) -> np.ndarray:
    """Entry t-1 is max over sources of ||K^t(s, .) - pi||_TV, for t = 1..t_max."""
    pmf = _check_dims(K_, pmf)
    if not 1 <= t_max <= TV_MAX_STEPS:
        raise ValueError(f"t_max must lie in [1, {TV_MAX_STEPS}], got {t_max}")
    out = np.empty(t_max)
    power_t = K_.rows.copy()
    for t in range(t_max):
        out[t] = worst_case_tv(power_t, pmf)
        power_t = power_t @ K_.rows
    return out
