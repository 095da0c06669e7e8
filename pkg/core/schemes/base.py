"""Scheme abstraction shared by the Monte Carlo pipelines."""

import logging
from abc import ABC, abstractmethod
from typing import Dict, List, Tuple

from ..coding.codebook import Codebook
from ..config.models import TrialResult
from .seeds import block_count, block_of, derive_seed


logger = logging.getLogger(__name__)


class Scheme(ABC):
    """A coding system whose trials share codebooks within contiguous blocks.

    Subclasses derive every auxiliary channel once at construction, so trials
    only read immutable state and may run concurrently.
    """

    tag: str = "scheme"

    def __init__(self, config):
        self.config = config
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.warnings: List[str] = []

    @property
    def trials(self) -> int:
        return self.config.trials

    @property
    def master_seed(self) -> int:
        return self.config.master_seed

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def blocks(self) -> int:
        return block_count(self.trials, self.config.codebooks_per_experiment)

    def block_of(self, trial_index: int) -> int:
        return block_of(trial_index, self.trials, self.blocks)

    def trial_seed(self, trial_index: int) -> int:
        return derive_seed(self.master_seed, self.tag, trial_index)

    def codebook_seed(self, block: int, role: str = "") -> int:
        return derive_seed(self.master_seed, f"{self.tag}-codebook{role}", block)

    def warn(self, message: str) -> None:
        self.logger.warning(message)
        self.warnings.append(message)

    @abstractmethod
    def build_codebooks(self, block: int) -> Tuple[Codebook, ...]:
        """Codebooks of one block, generated from the block's seeds."""
        pass

    @abstractmethod
    def run_trial(self, trial_index: int, codebooks: Tuple[Codebook, ...]) -> TrialResult:
        """One trial against the given codebooks."""
        pass

    @abstractmethod
    def rates(self) -> Dict[str, float]:
        """Operational rates in use."""
        pass

    @abstractmethod
    def information(self) -> Dict[str, float]:
        """Information quantities the rate conditions refer to."""
        pass

    @property
    def reconstructions(self) -> int:
        return 1
