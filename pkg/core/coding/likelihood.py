"""The likelihood encoder.

A source sequence x^n selects message (m, m') with probability proportional
to prod_t P_{X|V}(x_t | v_t(m, m')). All arithmetic stays in the log2 domain
and is normalised after shifting by the maximum.
"""

import logging
from typing import Tuple, Union

import numpy as np

from ..errors import AllZeroLikelihoodError, DistributionError
from ..prob.distributions import Channel, Pmf, SymbolSequence
from .codebook import Codebook, MessagePair


logger = logging.getLogger(__name__)

RandomSource = Union[int, np.random.Generator]


def log2_table(ch: Channel) -> np.ndarray:
    """log2 of the channel rows, -inf where a transition is impossible."""
    with np.errstate(divide="ignore"):
        return np.log2(ch.rows)


def _check(cb: Codebook, ch: Channel, seq: SymbolSequence) -> None:
    if ch.input_size != cb.alphabet_size:
        raise DistributionError(
            f"Channel has {ch.input_size} inputs but codewords use {cb.alphabet_size} symbols"
        )
    if seq.n != cb.n:
        raise DistributionError(f"Sequence length {seq.n} does not match blocklength {cb.n}")
    if seq.alphabet_size > ch.output_size:
        raise DistributionError(
            f"Sequence alphabet {seq.alphabet_size} exceeds the channel's {ch.output_size} outputs"
        )


def codeword_log_likelihoods(codewords: np.ndarray, table: np.ndarray, symbols: np.ndarray) -> np.ndarray:
    """sum_t table[codewords[:, t], symbols[t]] for codewords shaped (count, n)."""
    total = np.zeros(codewords.shape[0])
    for t, symbol in enumerate(symbols):
        total += table[codewords[:, t], symbol]
    return total


def log_likelihood(cb: Codebook, ch: Channel, x: SymbolSequence, msg: MessagePair) -> float:
    """log2 P_{X|V}(x^n | v^n(msg)); -inf when any factor vanishes."""
    _check(cb, ch, x)
    cb.check(msg)
    codeword = cb.codewords[msg.m, msg.mprime][None, :]
    return float(codeword_log_likelihoods(codeword, log2_table(ch), x.symbols)[0])


def encoder_posterior(cb: Codebook, ch: Channel, x: SymbolSequence) -> Pmf:
    """Posterior over messages in MessagePair.flat order.

    Raises:
        AllZeroLikelihoodError: If no codeword can have produced x
    """
    _check(cb, ch, x)
    scores = codeword_log_likelihoods(cb.flat_codewords, log2_table(ch), x.symbols)
    peak = scores.max()
    if not np.isfinite(peak):
        raise AllZeroLikelihoodError(
            f"All {cb.size} codewords have zero likelihood for the observed sequence"
        )
    weights = np.exp2(scores - peak)
    return Pmf(weights / weights.sum())


def _generator(rng: RandomSource) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_index(posterior: Pmf, rng: RandomSource) -> int:
    """Inverse-CDF draw from a posterior."""
    u = _generator(rng).random()
    cdf = np.cumsum(posterior.probs)
    last = int(np.flatnonzero(posterior.probs > 0)[-1])
    return min(int(np.searchsorted(cdf, u, side="right")), last)


def likelihood_encode(cb: Codebook, ch: Channel, x: SymbolSequence, rng_seed: RandomSource) -> MessagePair:
    """Sample (m, m') from the encoder posterior.

    Args:
        cb: Codebook
        ch: Channel P_{X|V} from codeword letters to source letters
        x: Source sequence
        rng_seed: Seed of the trial's encoder stream, or a Generator to draw from

    Returns:
        The selected message pair
    """
    posterior = encoder_posterior(cb, ch, x)
    return MessagePair.from_flat(sample_index(posterior, rng_seed), cb.num_mprime)


def likelihood_encode_or_uniform(
    cb: Codebook, ch: Channel, x: SymbolSequence, rng_seed: RandomSource
) -> Tuple[MessagePair, bool]:
    """Simulation-path encoder: a uniform message replaces an all-zero posterior.

    Returns:
        The message pair and whether the uniform fallback was used
    """
    rng = _generator(rng_seed)
    try:
        return likelihood_encode(cb, ch, x, rng), False
    except AllZeroLikelihoodError:
        logger.warning(f"All-zero likelihood over {cb.size} codewords; selecting a uniform message")
        return MessagePair.from_flat(int(rng.integers(cb.size)), cb.num_mprime), True
