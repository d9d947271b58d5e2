"""No-Underrun Sampler for Mallows models on the symmetric group."""

__version__ = "0.1.0"

from .direction import (BareTransposition, BlockShuffle, LocalCycle, Shiftable, UniformSn,
                        parse_direction)
from .kernel import NursParams, StopReason, nurs_step, run_chain
from .metric import DistanceKind, MallowsModel, exact_pmf
from .perm import Permutation
from .rng import make_rng

__all__ = [
    "BareTransposition", "BlockShuffle", "DistanceKind", "LocalCycle", "MallowsModel",
    "NursParams", "Permutation", "Shiftable", "StopReason", "UniformSn", "exact_pmf",
    "make_rng", "nurs_step", "parse_direction", "run_chain",
]
