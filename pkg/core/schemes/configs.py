"""Resolved scheme configurations built from validated probability objects."""

from dataclasses import dataclass
from typing import Optional

from ..coding.codebook import DEFAULT_BUDGET
from ..prob.distributions import Channel, DistortionMeasure, JointPmf, Pmf
from ..solvers.models import ReconstructionMap


DEFAULT_CODEBOOKS_PER_EXPERIMENT = 10
DEFAULT_RATE_MARGIN = 0.15


@dataclass(frozen=True)
class P2PConfig:
    """Point-to-point likelihood-encoder experiment.

    `test_channel` is the forward P_{Y|X}; the encoder channel P_{X|Y} and the
    codeword pmf P_Y are derived from it.
    """

    source: Pmf
    test_channel: Channel
    d: DistortionMeasure
    n: int
    rate: Optional[float] = None
    trials: int = 1
    master_seed: int = 0
    codebooks_per_experiment: int = DEFAULT_CODEBOOKS_PER_EXPERIMENT
    rate_margin: float = DEFAULT_RATE_MARGIN
    codebook_budget: int = DEFAULT_BUDGET


@dataclass(frozen=True)
class WZConfig:
    """Wyner-Ziv experiment with test channel P_{V|X} and map phi(v, b)."""

    joint_xb: JointPmf
    test_channel: Channel
    phi: ReconstructionMap
    d: DistortionMeasure
    n: int
    rate_r: Optional[float] = None
    rate_rprime: Optional[float] = None
    trials: int = 1
    master_seed: int = 0
    codebooks_per_experiment: int = DEFAULT_CODEBOOKS_PER_EXPERIMENT
    rate_margin: float = DEFAULT_RATE_MARGIN
    virtual_margin: float = DEFAULT_RATE_MARGIN
    codebook_budget: int = DEFAULT_BUDGET


@dataclass(frozen=True)
class BTConfig:
    """Berger-Tung corner-1 experiment: encoder 1 decoded first, encoder 2 binned against U1."""

    joint_x1x2: JointPmf
    ch1: Channel
    ch2: Channel
    phi1: ReconstructionMap
    phi2: ReconstructionMap
    d1: DistortionMeasure
    d2: DistortionMeasure
    n: int
    rate1: Optional[float] = None
    rate2: Optional[float] = None
    rate2_prime: Optional[float] = None
    trials: int = 1
    master_seed: int = 0
    codebooks_per_experiment: int = DEFAULT_CODEBOOKS_PER_EXPERIMENT
    rate_margin: float = DEFAULT_RATE_MARGIN
    virtual_margin: float = DEFAULT_RATE_MARGIN
    codebook_budget: int = DEFAULT_BUDGET
