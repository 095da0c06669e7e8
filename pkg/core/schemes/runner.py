"""Monte Carlo experiment orchestration.

Codebook blocks are generated first, then every trial runs as an independent
task. A semaphore bounds concurrency and `asyncio.gather` returns results in
trial order, so the summary does not depend on the number of workers.
"""

import asyncio
import dataclasses
import logging
import os
from typing import List, Optional, Union

import numpy as np

from ..config.models import ExperimentSummary, TrialResult
from ..errors import ConfigError
from .base import Scheme
from .berger_tung import BergerTungScheme
from .configs import BTConfig, P2PConfig, WZConfig
from .point_to_point import PointToPointScheme
from .wyner_ziv import WynerZivScheme


logger = logging.getLogger(__name__)

SCHEMES = {
    "p2p": (PointToPointScheme, P2PConfig),
    "wz": (WynerZivScheme, WZConfig),
    "bt": (BergerTungScheme, BTConfig),
}


def build_scheme(name: str, config) -> Scheme:
    """Instantiate the scheme registered under `name` for a matching config."""
    if name not in SCHEMES:
        raise ConfigError(f"Unknown scheme {name!r}; expected one of {sorted(SCHEMES)}")
    scheme_class, config_class = SCHEMES[name]
    if not isinstance(config, config_class):
        raise ConfigError(f"Scheme {name!r} needs a {config_class.__name__}, got {type(config).__name__}")
    return scheme_class(config)


def summarize(scheme: Scheme, results: List[TrialResult]) -> ExperimentSummary:
    """Aggregate statistics computed only from the ordered trial list."""
    table = np.array([result.distortions for result in results], dtype=float)
    means = table.mean(axis=0)
    if len(results) > 1:
        errors = table.std(axis=0, ddof=1) / np.sqrt(len(results))
    else:
        errors = np.zeros(table.shape[1])
    decoded = [result.virtual_decode_ok for result in results if result.virtual_decode_ok is not None]
    virtual_error_rate = float(np.mean([not ok for ok in decoded])) if decoded else None

    warnings = list(scheme.warnings)
    fallbacks = sum(result.uniform_fallback for result in results)
    degenerate = sum(result.decode_degenerate for result in results)
    if fallbacks:
        warnings.append(f"{fallbacks} trials used the uniform encoder fallback")
    if degenerate:
        warnings.append(f"{degenerate} trials had a degenerate virtual-message decode")

    return ExperimentSummary(
        scheme=scheme.tag,
        n=scheme.n,
        trials=len(results),
        master_seed=scheme.master_seed,
        rates=scheme.rates(),
        information=scheme.information(),
        mean_distortions=means.tolist(),
        standard_errors=errors.tolist(),
        virtual_error_rate=virtual_error_rate,
        uniform_fallbacks=fallbacks,
        degenerate_decodes=degenerate,
        codebooks_used=len({result.codebook_block for result in results}),
        warnings=warnings,
        results=results,
    )


class ExperimentRunner:
    """Runs a scheme's trials concurrently over shared per-block codebooks."""

    def __init__(self, scheme: Scheme, threads: Optional[int] = None):
        self.scheme = scheme
        self.threads = max(1, threads or os.cpu_count() or 1)
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    async def _bounded(self, semaphore: asyncio.Semaphore, func, *args):
        async with semaphore:
            return await asyncio.to_thread(func, *args)

    async def run(self) -> ExperimentSummary:
        scheme = self.scheme
        semaphore = asyncio.Semaphore(self.threads)
        self.logger.info(
            f"Running {scheme.trials} {scheme.tag} trials at n={scheme.n} "
            f"over {scheme.blocks} codebook blocks with {self.threads} workers"
        )
        codebooks = await asyncio.gather(
            *(self._bounded(semaphore, scheme.build_codebooks, block) for block in range(scheme.blocks))
        )
        results = await asyncio.gather(
            *(
                self._bounded(semaphore, scheme.run_trial, index, codebooks[scheme.block_of(index)])
                for index in range(scheme.trials)
            )
        )
        summary = summarize(scheme, list(results))
        self.logger.info(
            f"{scheme.tag} done: mean distortion {summary.mean_distortions}, "
            f"virtual error rate {summary.virtual_error_rate}"
        )
        return summary


def run_experiment(
    scheme: Union[str, Scheme],
    config=None,
    trials: Optional[int] = None,
    master_seed: Optional[int] = None,
    parallelism: Optional[int] = None,
) -> ExperimentSummary:
    """Run a full Monte Carlo experiment and summarise it.

    Args:
        scheme: "p2p", "wz" or "bt" (with `config`), or a ready Scheme
        config: The matching P2PConfig, WZConfig or BTConfig
        trials: Overrides the config's trial count
        master_seed: Overrides the config's master seed
        parallelism: Concurrent workers; results do not depend on it

    Returns:
        The experiment summary with per-trial results in trial order
    """
    if not isinstance(scheme, Scheme):
        if config is None:
            raise ConfigError(f"Scheme {scheme!r} needs a config")
        overrides = {}
        if trials is not None:
            overrides["trials"] = trials
        if master_seed is not None:
            overrides["master_seed"] = master_seed
        scheme = build_scheme(scheme, dataclasses.replace(config, **overrides))
    return asyncio.run(ExperimentRunner(scheme, parallelism).run())
