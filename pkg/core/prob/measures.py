"""Information measures and distribution algebra on validated tables.

All quantities are in bits. Terms with zero mass contribute zero
(0 log 0 = 0). Sequence spaces are ordered row-major, first symbol most
significant.
"""

import logging
from functools import reduce
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy.special import entr, rel_entr

from ..errors import DistributionError, EnumerationLimitError
from .distributions import SIMPLEX_TOLERANCE, Channel, DistortionMeasure, JointPmf, Pmf, SymbolSequence


logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 2 ** 20
LN2 = np.log(2.0)

Distribution = Union[Pmf, JointPmf]


def _table(dist: Distribution) -> np.ndarray:
    return dist.probs


def _as_distribution(probs: np.ndarray, axes: Sequence[str]) -> Distribution:
    if probs.ndim == 1:
        return Pmf(probs)
    return JointPmf(probs, tuple(axes))


def total_variation(p: Distribution, q: Distribution) -> float:
    """Total variation distance sup_A |P(A) - Q(A)|, i.e. half the L1 distance."""
    p_table, q_table = _table(p), _table(q)
    if p_table.shape != q_table.shape:
        raise DistributionError(f"Cannot compare distributions of shapes {p_table.shape} and {q_table.shape}")
    distance = 0.5 * float(np.abs(p_table - q_table).sum())
    return min(max(distance, 0.0), 1.0)


def entropy(p: Pmf) -> float:
    """Shannon entropy in bits."""
    return float(entr(p.probs).sum() / LN2)


def kl_divergence(p: Pmf, q: Pmf) -> float:
    """Relative entropy D(p||q) in bits; infinite when p is not absolutely continuous w.r.t. q."""
    if p.size != q.size:
        raise DistributionError(f"KL divergence needs equal alphabets, got {p.size} and {q.size}")
    return float(rel_entr(p.probs, q.probs).sum() / LN2)


def mutual_information(joint: JointPmf) -> float:
    """I(A;B) for a two-axis joint."""
    if joint.ndim != 2:
        raise DistributionError(f"mutual_information needs a 2-axis joint, got {joint.ndim} axes")
    probs = joint.probs
    product = np.outer(probs.sum(axis=1), probs.sum(axis=0))
    value = float(rel_entr(probs, product).sum() / LN2)
    return max(value, 0.0)


def conditional_mutual_information(joint: JointPmf) -> float:
    """I(axis0; axis1 | axis2) for a three-axis joint."""
    if joint.ndim != 3:
        raise DistributionError(f"conditional_mutual_information needs a 3-axis joint, got {joint.ndim} axes")
    probs = joint.probs
    p_c = probs.sum(axis=(0, 1))
    p_ac = probs.sum(axis=1)
    p_bc = probs.sum(axis=0)
    numerator = p_ac[:, None, :] * p_bc[None, :, :]
    # p(a,c) p(b,c) / p(c); cells with p(c) = 0 carry no joint mass
    reference = np.divide(
        numerator,
        p_c[None, None, :],
        out=np.zeros_like(numerator),
        where=p_c[None, None, :] > 0,
    )
    value = float(rel_entr(probs, reference).sum() / LN2)
    return max(value, 0.0)


def compose(p: Pmf, channel: Channel, axes: Tuple[str, str] = ("X", "Y")) -> JointPmf:
    """Joint p(x) channel(y|x)."""
    if channel.input_size != p.size:
        raise DistributionError(
            f"Channel input alphabet {channel.input_size} does not match pmf alphabet {p.size}"
        )
    return JointPmf(p.probs[:, None] * channel.rows, axes)


def marginalize(joint: JointPmf, axis: Union[int, str]) -> Distribution:
    """Sum out one axis; returns a Pmf once a single axis remains."""
    index = joint.axis_index(axis)
    remaining = joint.axes[:index] + joint.axes[index + 1:]
    return _as_distribution(joint.probs.sum(axis=index), remaining)


def marginal(joint: JointPmf, *keep: Union[int, str]) -> Distribution:
    """Marginal over the listed axes, in the listed order."""
    indices = [joint.axis_index(axis) for axis in keep]
    if len(set(indices)) != len(indices):
        raise DistributionError(f"Repeated axes in marginal request {keep}")
    dropped = tuple(i for i in range(joint.ndim) if i not in indices)
    probs = joint.probs.sum(axis=dropped) if dropped else joint.probs
    # after summing, surviving axes keep their original relative order
    survivors = sorted(indices)
    order = [survivors.index(i) for i in indices]
    probs = np.transpose(probs, order) if len(order) > 1 else probs
    return _as_distribution(probs, [joint.axes[i] for i in indices])


def reorder(joint: JointPmf, axes: Sequence[Union[int, str]]) -> JointPmf:
    """Permute the axes of a joint."""
    indices = [joint.axis_index(axis) for axis in axes]
    if sorted(indices) != list(range(joint.ndim)):
        raise DistributionError(f"reorder needs a permutation of all axes, got {axes}")
    return JointPmf(np.transpose(joint.probs, indices), tuple(joint.axes[i] for i in indices))


def attach(joint: JointPmf, channel: Channel, source_axis: Union[int, str], name: str) -> JointPmf:
    """Append a new last axis drawn through `channel` from `source_axis`."""
    index = joint.axis_index(source_axis)
    if channel.input_size != joint.shape[index]:
        raise DistributionError(
            f"Channel input alphabet {channel.input_size} does not match axis "
            f"{joint.axes[index]!r} of size {joint.shape[index]}"
        )
    shape = [1] * joint.ndim + [channel.output_size]
    shape[index] = channel.input_size
    probs = joint.probs[..., None] * channel.rows.reshape(shape)
    return JointPmf(probs, joint.axes + (name,))


def conditional(joint: JointPmf, given: Union[int, str]) -> Channel:
    """Channel P(other | given) from a two-axis joint.

    Rows for zero-probability conditioning symbols are uniform.
    """
    if joint.ndim != 2:
        raise DistributionError(f"conditional needs a 2-axis joint, got {joint.ndim} axes")
    index = joint.axis_index(given)
    probs = joint.probs if index == 0 else joint.probs.T
    return _normalize_rows(probs)[0]


def _normalize_rows(probs: np.ndarray) -> Tuple[Channel, List[int]]:
    totals = probs.sum(axis=1)
    unreachable = [int(i) for i in np.flatnonzero(totals <= 0)]
    rows = np.divide(
        probs,
        totals[:, None],
        out=np.full_like(probs, 1.0 / probs.shape[1]),
        where=totals[:, None] > 0,
    )
    return Channel(rows), unreachable


def reverse_channel(prior: Pmf, channel: Channel) -> Tuple[Channel, List[int]]:
    """Bayes inversion P(input | output) of `channel` under `prior`.

    Returns the reverse channel and the output symbols of zero probability,
    whose rows are set uniform.
    """
    joint = compose(prior, channel)
    reverse, unreachable = _normalize_rows(joint.probs.T)
    if unreachable:
        logger.debug(f"Reverse channel has unreachable outputs {unreachable}; using uniform rows")
    return reverse, unreachable


def cascade(*channels: Channel) -> Channel:
    """Composition of memoryless channels applied left to right."""
    if not channels:
        raise DistributionError("cascade needs at least one channel")
    for first, second in zip(channels, channels[1:]):
        if first.output_size != second.input_size:
            raise DistributionError(
                f"Cannot cascade a channel with {first.output_size} outputs into one with {second.input_size} inputs"
            )
    return Channel(reduce(np.matmul, [channel.rows for channel in channels]))


def check_enumeration(alphabet_size: int, n: int, limit: int = ENUMERATION_LIMIT) -> int:
    """Return alphabet_size ** n, raising when it exceeds the enumeration guard."""
    if n < 1:
        raise DistributionError(f"Blocklength must be at least 1, got {n}")
    outcomes = alphabet_size ** n
    if outcomes > limit:
        raise EnumerationLimitError(
            f"Sequence space of {alphabet_size}^{n} = {outcomes} outcomes exceeds the limit of {limit}"
        )
    return outcomes


def iid_extension(p: Pmf, n: int) -> Pmf:
    """Product distribution of n i.i.d. letters over the row-major sequence space."""
    check_enumeration(p.size, n)
    probs = p.probs
    for _ in range(n - 1):
        probs = np.outer(probs, p.probs).ravel()
    return Pmf(probs, tolerance=n * SIMPLEX_TOLERANCE)


def sequence_index(symbols: np.ndarray, alphabet_size: int) -> int:
    """Row-major index of a sequence in the sequence space."""
    index = 0
    for symbol in np.asarray(symbols):
        index = index * alphabet_size + int(symbol)
    return index


def sequence_space(alphabet_size: int, n: int) -> np.ndarray:
    """All sequences of length n in row-major order, one per row."""
    check_enumeration(alphabet_size, n)
    grids = np.indices((alphabet_size,) * n).reshape(n, -1).T
    return grids.astype(np.int64)


def sequence_distortion(d: DistortionMeasure, x: SymbolSequence, y: SymbolSequence) -> float:
    """Per-letter average distortion between two sequences."""
    if x.n != y.n:
        raise DistributionError(f"Sequences have different lengths {x.n} and {y.n}")
    if x.alphabet_size > d.source_size or y.alphabet_size > d.reconstruction_size:
        raise DistributionError(
            f"Sequence alphabets ({x.alphabet_size}, {y.alphabet_size}) do not fit the "
            f"{d.source_size}x{d.reconstruction_size} distortion table"
        )
    return float(d.table[x.symbols, y.symbols].mean())


def expected_distortion(joint: JointPmf, d: DistortionMeasure) -> float:
    """E[d(X, Y)] under a two-axis joint over (X, Y)."""
    if joint.ndim != 2 or joint.shape != d.table.shape:
        raise DistributionError(
            f"Joint of shape {joint.shape} does not match distortion table {d.table.shape}"
        )
    return float((joint.probs * d.table).sum())
