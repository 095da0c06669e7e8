"""Point-to-point rate-distortion function by Blahut-Arimoto iteration.

The inner loop runs the log-domain self-consistent equations at a fixed
Lagrange slope; the outer loop bisects the slope until the achieved
distortion hits the requested target.
"""

import logging
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from ..errors import InfeasibleDistortionError
from ..prob.distributions import Channel, DistortionMeasure, Pmf
from ..prob.measures import LN2, compose, expected_distortion, mutual_information
from .models import RateDistortionPoint


logger = logging.getLogger(__name__)

RATE_TOLERANCE = 1e-9
MAX_ITERATIONS = 10_000
DISTORTION_TOLERANCE = 1e-7
INITIAL_SLOPE_BRACKET = (0.0, 50.0)
MAX_BRACKET_DOUBLINGS = 40
MAX_BISECTIONS = 200
FEASIBILITY_SLACK = 1e-12


def zero_rate_distortion(source: Pmf, d: DistortionMeasure) -> Tuple[float, int]:
    """Smallest distortion reachable with a constant reconstruction, and that symbol."""
    if d.source_size != source.size:
        raise InfeasibleDistortionError(
            f"Distortion table has {d.source_size} source symbols but the source has {source.size}"
        )
    per_symbol = source.probs @ d.table
    best = int(np.argmin(per_symbol))
    return float(per_symbol[best]), best


def minimum_distortion(source: Pmf, d: DistortionMeasure) -> float:
    """E[min_y d(X, y)], the floor no code can beat."""
    return float(source.probs @ d.table.min(axis=1))


def _iterate(
    px: np.ndarray,
    penalty: np.ndarray,
    max_iterations: int = MAX_ITERATIONS,
    tolerance: float = RATE_TOLERANCE,
) -> Tuple[np.ndarray, int, bool]:
    """Run the self-consistent equations for one slope.

    `penalty[x, y]` is the slope times the distortion, in nats; entries equal
    to +inf forbid the cell. Returns the log test channel for the support of
    `px`, the iteration count and whether the rate iterates settled.
    """
    allowed = np.isfinite(penalty).any(axis=0)
    with np.errstate(divide="ignore"):
        ln_q = np.log(allowed / allowed.sum())
    ln_px = np.log(px)
    rate_prev = np.inf
    for iteration in range(1, max_iterations + 1):
        ln_channel = ln_q[None, :] - penalty
        ln_channel = ln_channel - logsumexp(ln_channel, axis=1, keepdims=True)
        ln_q = logsumexp(ln_px[:, None] + ln_channel, axis=0)
        channel = np.exp(ln_channel)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(channel > 0, channel * (ln_channel - ln_q[None, :]), 0.0)
        rate = float(px @ terms.sum(axis=1)) / LN2
        if abs(rate - rate_prev) < tolerance:
            return ln_channel, iteration, True
        rate_prev = rate
    return ln_channel, max_iterations, False


class BlahutArimotoSolver:
    """Bisection on the Lagrange slope around the fixed-slope iteration."""

    def __init__(self, source: Pmf, d: DistortionMeasure, max_iterations: int = MAX_ITERATIONS):
        if d.source_size != source.size:
            raise InfeasibleDistortionError(
                f"Distortion table has {d.source_size} source symbols but the source has {source.size}"
            )
        self.source = source
        self.d = d
        self.max_iterations = max_iterations
        self.support = source.probs > 0
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.total_iterations = 0

    def _full_channel(self, ln_channel: np.ndarray) -> Channel:
        rows = np.zeros(self.d.table.shape)
        rows[self.support] = np.exp(ln_channel)
        # zero-mass source symbols take their cheapest reconstruction
        for x in np.flatnonzero(~self.support):
            rows[x, int(np.argmin(self.d.table[x]))] = 1.0
        rows /= rows.sum(axis=1, keepdims=True)
        return Channel(rows)

    def at_slope(self, slope: float) -> Tuple[Channel, float, bool]:
        """Converged test channel and its distortion at a slope in bits per distortion unit."""
        table = self.d.table[self.support]
        if np.isinf(slope):
            penalty = np.where(table <= table.min(axis=1, keepdims=True), 0.0, np.inf)
        else:
            penalty = slope * LN2 * table
        ln_channel, iterations, converged = _iterate(
            self.source.probs[self.support], penalty, self.max_iterations
        )
        self.total_iterations += iterations
        channel = self._full_channel(ln_channel)
        distortion = expected_distortion(compose(self.source, channel), self.d)
        return channel, distortion, converged

    def _point(self, channel: Channel, status: str, slope: Optional[float]) -> RateDistortionPoint:
        joint = compose(self.source, channel)
        return RateDistortionPoint(
            rates=(mutual_information(joint),),
            distortions=(expected_distortion(joint, self.d),),
            achieving_channels=(channel,),
            status=status,
            iterations=self.total_iterations,
            metadata={"slope": slope},
        )

    def solve(self, target_d: float) -> RateDistortionPoint:
        d_zero, best_symbol = zero_rate_distortion(self.source, self.d)
        d_floor = minimum_distortion(self.source, self.d)
        if target_d < 0 or target_d < d_floor - FEASIBILITY_SLACK:
            raise InfeasibleDistortionError(
                f"Target distortion {target_d} is below the achievable minimum {d_floor:.6g}"
            )
        if target_d >= d_zero:
            channel = Channel.constant(Pmf.point_mass(self.d.reconstruction_size, best_symbol), self.source.size)
            return self._point(channel, "zero_rate", 0.0)
        if target_d <= d_floor + FEASIBILITY_SLACK:
            channel, _, converged = self.at_slope(np.inf)
            return self._point(channel, "converged" if converged else "max_iterations", np.inf)

        lo, hi = INITIAL_SLOPE_BRACKET
        channel, distortion, converged = self.at_slope(hi)
        for _ in range(MAX_BRACKET_DOUBLINGS):
            if distortion <= target_d:
                break
            lo, hi = hi, 2.0 * hi
            channel, distortion, converged = self.at_slope(hi)
        best = (channel, distortion, converged, hi)

        for _ in range(MAX_BISECTIONS):
            if abs(best[1] - target_d) < DISTORTION_TOLERANCE:
                break
            mid = 0.5 * (lo + hi)
            channel, distortion, converged = self.at_slope(mid)
            if distortion > target_d:
                lo = mid
            else:
                hi = mid
                best = (channel, distortion, converged, mid)
            if hi - lo < 1e-12 * max(hi, 1.0):
                break

        channel, distortion, converged, slope = best
        if not converged:
            self.logger.warning(f"Blahut-Arimoto hit {self.max_iterations} iterations at slope {slope:.6g}")
        self.logger.debug(f"R({target_d:.6g}) bracketed at slope {slope:.6g}, distortion {distortion:.9g}")
        return self._point(channel, "converged" if converged else "max_iterations", slope)


def blahut_arimoto_rd(source: Pmf, d: DistortionMeasure, target_d: float) -> RateDistortionPoint:
    """Rate-distortion function R(target_d) of a memoryless source, in bits.

    Args:
        source: Source pmf P_X
        d: Per-letter distortion measure
        target_d: Distortion constraint

    Returns:
        The rate-distortion point with its achieving test channel P_{Y|X}

    Raises:
        InfeasibleDistortionError: If target_d is negative or below E[min_y d(X, y)]
    """
    return BlahutArimotoSolver(source, d).solve(target_d)


def rate_distortion_curve(source: Pmf, d: DistortionMeasure, targets: Iterable[float]) -> List[RateDistortionPoint]:
    """R(D) at each target, sorted by D ascending."""
    return [blahut_arimoto_rd(source, d, target) for target in sorted(targets)]
