"""Exact checks of the auxiliary-distribution identities behind the likelihood encoder.

For a tiny Wyner-Ziv fixture the auxiliary joint
    Q(m, x^n, b^n, v^n) = 1/|C| * 1{v^n = v^n(m)} * prod_t P(x_t, b_t | v_t)
is built in full. Three facts are checked entrywise:

* its Bayes inversion Q(m | x^n) equals the likelihood-encoder posterior;
* averaged over every possible codebook, Q(x^n, b^n, v^n) equals the i.i.d.
  product of P(x, b, v);
* averaged the same way, E_Q[d(X^n, phi^n(V^n, B^n))] equals the
  single-letter E[d(X, phi(V, B))].
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..coding.codebook import Codebook
from ..coding.likelihood import encoder_posterior
from ..config.models import IdentityReport
from ..errors import EnumerationLimitError
from ..prob.distributions import Channel, DistortionMeasure, JointPmf, Pmf, SymbolSequence
from ..prob.measures import attach, check_enumeration, iid_extension, sequence_space
from ..solvers.models import ReconstructionMap
from .lab import pair_channel, sequence_likelihoods


logger = logging.getLogger(__name__)

ENSEMBLE_LIMIT = 2 ** 16
IDENTITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class IdentityFixture:
    """A Wyner-Ziv instance small enough to enumerate every codebook."""

    name: str
    joint_xb: JointPmf
    test_channel: Channel
    codewords: np.ndarray
    num_m: int = 1
    phi: Optional[ReconstructionMap] = None
    d: Optional[DistortionMeasure] = None

    @property
    def n(self) -> int:
        return int(np.asarray(self.codewords).shape[1])


def _pair_to_split(table: np.ndarray, num_x: int, num_b: int, n: int) -> np.ndarray:
    """Re-index trailing pair sequences ((x_1, b_1), ..., (x_n, b_n)) as (x^n, b^n)."""
    lead = table.shape[:-1]
    split = table.reshape(lead + (num_x, num_b) * n)
    offset = len(lead)
    order = list(range(offset)) + [offset + 2 * t for t in range(n)] + [offset + 2 * t + 1 for t in range(n)]
    return split.transpose(order).reshape(lead + (num_x ** n, num_b ** n))


def posterior_identity_error(fixture: IdentityFixture) -> float:
    """Largest gap between Q(m | x^n) and the encoder posterior, over x^n with Q(x^n) > 0."""
    channel, gen, _ = pair_channel(fixture.joint_xb, fixture.test_channel)
    num_x, num_b = fixture.joint_xb.shape
    n = fixture.n
    check_enumeration(channel.output_size, n)
    cb = Codebook.from_codewords(fixture.codewords, gen, fixture.num_m)
    codewords = cb.flat_codewords.astype(np.int64)

    q_full = sequence_likelihoods(codewords, channel.rows) / cb.size
    q_msg_x = _pair_to_split(q_full, num_x, num_b, n).sum(axis=2)
    q_x = q_msg_x.sum(axis=0)

    x_given_v = Channel(channel.rows.reshape(-1, num_x, num_b).sum(axis=2))
    worst = 0.0
    for x_index, x_symbols in enumerate(sequence_space(num_x, n)):
        if q_x[x_index] <= 0:
            continue
        bayes = q_msg_x[:, x_index] / q_x[x_index]
        posterior = encoder_posterior(cb, x_given_v, SymbolSequence(x_symbols, num_x)).probs
        worst = max(worst, float(np.abs(bayes - posterior).max()))
    return worst


def ensemble_identity_errors(fixture: IdentityFixture):
    """Enumerate all codebooks; returns (ensemble size, max gap to i.i.d., distortion gap)."""
    channel, gen, _ = pair_channel(fixture.joint_xb, fixture.test_channel)
    num_x, num_b = fixture.joint_xb.shape
    num_v = gen.size
    size, n = np.asarray(fixture.codewords).shape
    ensemble = num_v ** (n * size)
    if ensemble > ENSEMBLE_LIMIT:
        raise EnumerationLimitError(
            f"Fixture {fixture.name!r} spans {ensemble} codebooks; the limit is {ENSEMBLE_LIMIT}"
        )
    check_enumeration(num_x * num_b * num_v, n)

    v_sequences = sequence_space(num_v, n)
    likelihoods = sequence_likelihoods(v_sequences, channel.rows)
    powers = num_v ** np.arange(n - 1, -1, -1)

    average = np.zeros_like(likelihoods)
    total_weight = 0.0
    for letters in itertools.product(range(num_v), repeat=n * size):
        book = np.asarray(letters).reshape(size, n)
        weight = float(np.prod(gen.probs[book]))
        total_weight += weight
        if weight == 0.0:
            continue
        q = np.zeros_like(likelihoods)
        np.add.at(q, book @ powers, likelihoods[book @ powers] / size)
        average += weight * q

    joint_xbv = attach(fixture.joint_xb, fixture.test_channel, 0, "V")
    product = iid_extension(Pmf(joint_xbv.probs.ravel()), n).probs
    reference = product.reshape((num_x, num_b, num_v) * n)
    order = [3 * t + 2 for t in range(n)] + [3 * t + axis for t in range(n) for axis in (0, 1)]
    reference = reference.transpose(order).reshape(likelihoods.shape)
    error = float(np.abs(average - reference).max())
    logger.debug(f"Ensemble of {ensemble} codebooks carries total weight {total_weight:.15f}")

    distortion_gap = None
    if fixture.phi is not None and fixture.d is not None:
        distortion_gap = _distortion_gap(fixture, joint_xbv, average, v_sequences)
    return ensemble, error, distortion_gap


def _distortion_gap(
    fixture: IdentityFixture, joint_xbv: JointPmf, average: np.ndarray, v_sequences: np.ndarray
) -> float:
    """|E_avgQ[d(X^n, phi^n(V^n, B^n))] - E[d(X, phi(V, B))]|."""
    num_x, num_b = fixture.joint_xb.shape
    n = v_sequences.shape[1]
    d, phi = fixture.d.table, fixture.phi.table
    pairs = sequence_space(num_x * num_b, n)
    x_seq, b_seq = pairs // num_b, pairs % num_b
    # per-letter distortion for every (v^n, (x, b)^n) cell
    letters = d[x_seq[None, :, :], phi[v_sequences[:, None, :], b_seq[None, :, :]]]
    ensemble_value = float((average * letters.mean(axis=2)).sum())

    single = np.einsum("xbv,xvb->", joint_xbv.probs, d[:, phi])
    return abs(ensemble_value - float(single))


def verify_q_identities(fixture: IdentityFixture, tolerance: float = IDENTITY_TOLERANCE) -> IdentityReport:
    """Run the posterior, ensemble and distortion identity checks on a fixture."""
    posterior_error = posterior_identity_error(fixture)
    ensemble, ensemble_error, distortion_gap = ensemble_identity_errors(fixture)
    report = IdentityReport(
        fixture=fixture.name,
        n=fixture.n,
        codebook_size=int(np.asarray(fixture.codewords).shape[0]),
        tolerance=tolerance,
        posterior_max_error=posterior_error,
        ensemble_size=ensemble,
        ensemble_max_error=ensemble_error,
        distortion_gap=distortion_gap,
    )
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(level, f"Identity fixture {fixture.name!r}: passed={report.passed}")
    return report
