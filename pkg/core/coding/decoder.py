"""Decoder side: ML virtual-message decoding and symbolwise reconstruction."""

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import CodebookError, DistributionError
from ..prob.distributions import Channel, SymbolSequence
from ..solvers.models import ReconstructionMap
from .codebook import Codebook
from .likelihood import codeword_log_likelihoods, log2_table


logger = logging.getLogger(__name__)

# log2 scores this close to the maximum count as ties
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ChannelDecodeResult:
    mprime: int
    degenerate: bool = False


def ml_channel_decode(cb: Codebook, m: int, ch: Channel, b: SymbolSequence) -> ChannelDecodeResult:
    """argmax over m' of log2 P_{B|V}(b^n | v^n(m, m')), lowest index on ties.

    When every candidate has zero likelihood the result is index 0 with
    `degenerate` set.
    """
    if not 0 <= m < cb.num_m:
        raise CodebookError(f"Sub-codebook index {m} is outside [0, {cb.num_m})")
    if ch.input_size != cb.alphabet_size or b.alphabet_size > ch.output_size:
        raise DistributionError(
            f"Channel of shape ({ch.input_size}, {ch.output_size}) does not fit codeword alphabet "
            f"{cb.alphabet_size} and observation alphabet {b.alphabet_size}"
        )
    if b.n != cb.n:
        raise DistributionError(f"Sequence length {b.n} does not match blocklength {cb.n}")
    if cb.num_mprime == 1:
        return ChannelDecodeResult(0)
    scores = codeword_log_likelihoods(cb.codewords[m], log2_table(ch), b.symbols)
    peak = scores.max()
    if not np.isfinite(peak):
        logger.warning(f"No virtual message in sub-codebook {m} explains the side information")
        return ChannelDecodeResult(0, degenerate=True)
    return ChannelDecodeResult(int(np.flatnonzero(scores >= peak - TIE_TOLERANCE)[0]))


def reconstruct(phi: ReconstructionMap, v: SymbolSequence, b: SymbolSequence) -> SymbolSequence:
    """phi applied letter by letter: y_t = phi(v_t, b_t)."""
    if v.n != b.n:
        raise DistributionError(f"Sequences have different lengths {v.n} and {b.n}")
    rows, cols = phi.shape
    if v.alphabet_size > rows or b.alphabet_size > cols:
        raise DistributionError(
            f"Sequence alphabets ({v.alphabet_size}, {b.alphabet_size}) exceed the {rows}x{cols} reconstruction map"
        )
    return SymbolSequence(phi.apply(v.symbols, b.symbols), phi.output_size)
