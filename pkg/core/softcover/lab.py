"""Exact soft-covering measurements at small blocklengths.

Every distribution here is computed by full enumeration of the output
sequence space; nothing is estimated by sampling.
"""

import asyncio
import logging
import os
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..coding.codebook import Codebook, generate_codebook, message_count
from ..config.models import SoftcoverReport
from ..errors import DistributionError, EnumerationLimitError
from ..prob.distributions import SIMPLEX_TOLERANCE, Channel, JointPmf, Pmf
from ..prob.measures import (
    check_enumeration,
    conditional,
    marginalize,
    mutual_information,
    iid_extension,
    reverse_channel,
    total_variation,
)
from ..schemes.seeds import derive_seed


logger = logging.getLogger(__name__)

MAX_CODEBOOK_SIZE = 2 ** 16
CHUNK_ELEMENTS = 2 ** 22


def sequence_likelihoods(codewords: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """prod_t rows[v_t, s_t] for each codeword (count, n) and every output sequence s.

    Output sequences are in row-major order, first letter most significant.
    """
    count = codewords.shape[0]
    table = np.ones((count, 1))
    for t in range(codewords.shape[1]):
        table = (table[:, :, None] * rows[codewords[:, t]][:, None, :]).reshape(count, -1)
    return table


def induced_sequence_dist(cb: Codebook, ch: Channel) -> Pmf:
    """Output distribution of a uniformly chosen codeword sent through ch.

    Raises:
        EnumerationLimitError: If the output space exceeds 2^20 sequences or
            the codebook exceeds 2^16 codewords
    """
    if ch.input_size != cb.alphabet_size:
        raise DistributionError(f"Channel has {ch.input_size} inputs but codewords use {cb.alphabet_size} symbols")
    outcomes = check_enumeration(ch.output_size, cb.n)
    if cb.size > MAX_CODEBOOK_SIZE:
        raise EnumerationLimitError(f"Codebook of {cb.size} codewords exceeds the limit of {MAX_CODEBOOK_SIZE}")
    codewords = cb.flat_codewords.astype(np.int64)
    chunk = max(1, CHUNK_ELEMENTS // outcomes)
    total = np.zeros(outcomes)
    for start in range(0, cb.size, chunk):
        total += sequence_likelihoods(codewords[start:start + chunk], ch.rows).sum(axis=0)
    return Pmf(total / cb.size, tolerance=cb.n * SIMPLEX_TOLERANCE)


def tv_to_iid(cb: Codebook, ch: Channel, target: Pmf) -> float:
    """Total variation between the induced distribution and the i.i.d. product of target."""
    if target.size != ch.output_size:
        raise DistributionError(f"Target has {target.size} symbols but the channel has {ch.output_size} outputs")
    return total_variation(induced_sequence_dist(cb, ch), iid_extension(target, cb.n))


def pair_channel(joint_xb: JointPmf, test_channel: Channel) -> Tuple[Channel, Pmf, Pmf]:
    """P(x, b | v) over the flattened pair alphabet x * |B| + b, with P_V and P_XB."""
    source = marginalize(joint_xb, 1)
    x_given_v, _ = reverse_channel(source, test_channel)
    b_given_x = conditional(joint_xb, given=0)
    rows = (x_given_v.rows[:, :, None] * b_given_x.rows[None, :, :]).reshape(x_given_v.input_size, -1)
    gen = Pmf(source.probs @ test_channel.rows)
    return Channel(rows), gen, Pmf(joint_xb.probs.ravel())


class SoftcoverSweep:
    """Grid of (rate, n) cells, each averaging exact TV over independent codebooks."""

    def __init__(
        self,
        gen: Pmf,
        channel: Channel,
        target: Pmf,
        information: float,
        seed: int,
        variant: str = "xy",
        threads: Optional[int] = None,
    ):
        self.gen = gen
        self.channel = channel
        self.target = target
        self.information = information
        self.seed = seed
        self.variant = variant
        self.threads = max(1, threads or os.cpu_count() or 1)
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def check_cell(self, rate: float, n: int) -> None:
        check_enumeration(self.channel.output_size, n)
        if message_count(n, rate) > MAX_CODEBOOK_SIZE:
            raise EnumerationLimitError(
                f"Rate {rate} at n={n} needs {message_count(n, rate)} codewords; the limit is {MAX_CODEBOOK_SIZE}"
            )

    def cell(self, rate: float, n: int, codebooks: int) -> SoftcoverReport:
        tag = f"softcover-{self.variant}:{rate!r}:{n}"
        values = []
        for index in range(codebooks):
            cb = generate_codebook(self.gen, n, rate, 0.0, derive_seed(self.seed, tag, index))
            values.append(tv_to_iid(cb, self.channel, self.target))
        return SoftcoverReport(
            n=n,
            rate=rate,
            mutual_information=self.information,
            tv_values=values,
            mean_tv=float(np.mean(values)),
            codebook_count=codebooks,
            seed=self.seed,
            variant=self.variant,
        )

    async def _bounded(self, semaphore: asyncio.Semaphore, rate: float, n: int, codebooks: int):
        async with semaphore:
            return await asyncio.to_thread(self.cell, rate, n, codebooks)

    async def run(self, rates: Sequence[float], ns: Sequence[int], codebooks: int) -> List[SoftcoverReport]:
        cells = [(rate, n) for rate in rates for n in ns]
        for rate, n in cells:
            self.check_cell(rate, n)
        self.logger.info(
            f"Soft-covering sweep over {len(cells)} cells, {codebooks} codebooks each, "
            f"I = {self.information:.4f} bits"
        )
        semaphore = asyncio.Semaphore(self.threads)
        reports = await asyncio.gather(*(self._bounded(semaphore, rate, n, codebooks) for rate, n in cells))
        return list(reports)


def softcover_sweep(
    joint: JointPmf,
    rates: Sequence[float],
    ns: Sequence[int],
    codebooks_per_cell: int,
    seed: int,
    threads: Optional[int] = None,
) -> List[SoftcoverReport]:
    """Exact mean TV to the i.i.d. X-product for codebooks drawn from P_Y.

    Args:
        joint: Joint pmf over (X, Y)
        rates: Codebook rates in bits per symbol
        ns: Blocklengths
        codebooks_per_cell: Independent codebooks per (rate, n) cell
        seed: Sweep seed; codebook seeds derive from it and the cell
        threads: Concurrent cells

    Returns:
        One report per cell, rates outermost, in the given order
    """
    sweep = SoftcoverSweep(
        gen=marginalize(joint, 0),
        channel=conditional(joint, given=1),
        target=marginalize(joint, 1),
        information=mutual_information(joint),
        seed=seed,
        threads=threads,
    )
    return asyncio.run(sweep.run(rates, ns, codebooks_per_cell))


def softcover_sweep_wz(
    joint_xb: JointPmf,
    test_channel: Channel,
    rates: Sequence[float],
    ns: Sequence[int],
    codebooks_per_cell: int,
    seed: int,
    threads: Optional[int] = None,
) -> List[SoftcoverReport]:
    """Sweep with output pair (X, B) through P(x, b | v); the reference is the i.i.d. P_XB product."""
    channel, gen, target = pair_channel(joint_xb, test_channel)
    information = mutual_information(JointPmf(gen.probs[:, None] * channel.rows))
    sweep = SoftcoverSweep(gen, channel, target, information, seed, variant="xb", threads=threads)
    return asyncio.run(sweep.run(rates, ns, codebooks_per_cell))
