"""Berger-Tung corner points, inner-bound checks and time-sharing."""

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DistributionError
from ..prob.distributions import Channel, DistortionMeasure, JointPmf
from ..prob.measures import attach, conditional_mutual_information, marginal, mutual_information, reorder
from .models import ReconstructionMap, RateDistortionPoint


logger = logging.getLogger(__name__)

JOINT_AXES = ("U1", "X1", "X2", "U2")


@dataclass(frozen=True)
class BergerTungBounds:
    """The three inner-bound quantities of a fixed auxiliary pair, in bits."""

    r1_min: float
    r2_min: float
    sum_min: float


def berger_tung_joint(joint: JointPmf, ch1: Channel, ch2: Channel) -> JointPmf:
    """P(x1, x2) P(u1 | x1) P(u2 | x2) over axes (U1, X1, X2, U2)."""
    if joint.ndim != 2:
        raise DistributionError(f"Berger-Tung sources need a joint over (X1, X2), got {joint.ndim} axes")
    base = JointPmf(joint.probs, ("X1", "X2"))
    extended = attach(attach(base, ch1, "X1", "U1"), ch2, "X2", "U2")
    return reorder(extended, JOINT_AXES)


def _pair_information(joint_u1x1x2u2: JointPmf) -> float:
    """I(X1,X2; U1,U2) by flattening each pair."""
    sources_first = reorder(joint_u1x1x2u2, ("X1", "X2", "U1", "U2")).probs
    k1, k2, l1, l2 = sources_first.shape
    return mutual_information(JointPmf(sources_first.reshape(k1 * k2, l1 * l2)))


def _distortion(joint: JointPmf, source_axis: str, phi: ReconstructionMap, d: DistortionMeasure) -> float:
    table = marginal(joint, source_axis, "U1", "U2").probs
    if table.shape[0] != d.source_size or table.shape[1:] != phi.shape:
        raise DistributionError(
            f"Reconstruction map of shape {phi.shape} or distortion table of shape {d.table.shape} "
            f"does not fit the {source_axis} marginal of shape {table.shape}"
        )
    if phi.output_size > d.reconstruction_size:
        raise DistributionError(
            f"Reconstruction map emits {phi.output_size} symbols but the distortion table has {d.reconstruction_size}"
        )
    return float((table * d.table[:, phi.table]).sum())


def berger_tung_corner(
    joint: JointPmf,
    ch1: Channel,
    ch2: Channel,
    phi1: ReconstructionMap,
    phi2: ReconstructionMap,
    d1: DistortionMeasure,
    d2: DistortionMeasure,
    corner: int = 1,
) -> RateDistortionPoint:
    """Corner point of the Berger-Tung inner bound for fixed test channels.

    Corner 1 decodes U1 first: rates (I(X1;U1), I(X2;U2|U1)). Corner 2 is the
    mirror image: rates (I(X1;U1|U2), I(X2;U2)). Distortions are
    E[d_k(X_k, phi_k(U1, U2))] under the long Markov chain U1 - X1 - X2 - U2.

    Args:
        joint: Joint pmf over (X1, X2)
        ch1: Test channel P_{U1|X1}
        ch2: Test channel P_{U2|X2}
        phi1: Reconstruction map for X1, indexed [u1, u2]
        phi2: Reconstruction map for X2, indexed [u1, u2]
        d1: Distortion measure on X1
        d2: Distortion measure on X2
        corner: 1 or 2

    Returns:
        Rate pair and distortion pair with the channels and maps attached
    """
    if corner not in (1, 2):
        raise DistributionError(f"Corner must be 1 or 2, got {corner}")
    full = berger_tung_joint(joint, ch1, ch2)
    if corner == 1:
        r1 = mutual_information(marginal(full, "X1", "U1"))
        r2 = conditional_mutual_information(marginal(full, "X2", "U2", "U1"))
    else:
        r1 = conditional_mutual_information(marginal(full, "X1", "U1", "U2"))
        r2 = mutual_information(marginal(full, "X2", "U2"))
    distortions = (_distortion(full, "X1", phi1, d1), _distortion(full, "X2", phi2, d2))
    sum_rate = _pair_information(full)
    logger.debug(f"Corner {corner}: rates ({r1:.6g}, {r2:.6g}), sum-rate bound {sum_rate:.6g}")
    return RateDistortionPoint(
        rates=(r1, r2),
        distortions=distortions,
        achieving_channels=(ch1, ch2),
        reconstruction_maps=(phi1, phi2),
        status=f"corner-{corner}",
        metadata={"corner": corner, "sum_rate_bound": sum_rate},
    )


def berger_tung_bounds(joint: JointPmf, ch1: Channel, ch2: Channel) -> BergerTungBounds:
    """I(X1;U1|U2), I(X2;U2|U1) and I(X1,X2;U1,U2) for the given test channels."""
    full = berger_tung_joint(joint, ch1, ch2)
    return BergerTungBounds(
        r1_min=conditional_mutual_information(marginal(full, "X1", "U1", "U2")),
        r2_min=conditional_mutual_information(marginal(full, "X2", "U2", "U1")),
        sum_min=_pair_information(full),
    )


def in_berger_tung_region(r1: float, r2: float, bounds: BergerTungBounds) -> bool:
    """Whether (r1, r2) satisfies the three strict inner-bound inequalities."""
    return r1 > bounds.r1_min and r2 > bounds.r2_min and r1 + r2 > bounds.sum_min


def time_share(p1: RateDistortionPoint, p2: RateDistortionPoint, weight: float) -> RateDistortionPoint:
    """Convex combination weight * p1 + (1 - weight) * p2, componentwise."""
    if not 0.0 <= weight <= 1.0:
        raise DistributionError(f"Time-sharing weight must lie in [0, 1], got {weight}")
    if len(p1.rates) != len(p2.rates):
        raise DistributionError(
            f"Cannot time-share points with {len(p1.rates)} and {len(p2.rates)} rate components"
        )
    rates = tuple(float(np.dot((weight, 1.0 - weight), pair)) for pair in zip(p1.rates, p2.rates))
    distortions = tuple(
        float(np.dot((weight, 1.0 - weight), pair)) for pair in zip(p1.distortions, p2.distortions)
    )
    return RateDistortionPoint(
        rates=rates,
        distortions=distortions,
        achieving_channels=p1.achieving_channels + p2.achieving_channels,
        reconstruction_maps=p1.reconstruction_maps + p2.reconstruction_maps,
        status="time-shared",
        metadata={"weight": weight, "statuses": (p1.status, p2.status)},
    )


def optimal_pair_reconstruction(
    joint_u1x1x2u2: JointPmf, source_axis: str, d: DistortionMeasure
) -> ReconstructionMap:
    """Greedy phi_k(u1, u2) minimising E[d_k(X_k, phi_k(U1, U2))], lowest symbol on ties."""
    table = marginal(joint_u1x1x2u2, source_axis, "U1", "U2").probs
    if table.shape[0] != d.source_size:
        raise DistributionError(
            f"{source_axis} has {table.shape[0]} symbols but the distortion table has {d.source_size}"
        )
    cost = np.einsum("xab,xy->aby", table, d.table)
    return ReconstructionMap(np.argmin(cost, axis=2), d.reconstruction_size)
