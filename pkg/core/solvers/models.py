"""Result types shared by the rate-distortion solvers."""

from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np

from ..errors import DistributionError
from ..prob.distributions import Channel


RATE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class ReconstructionMap:
    """Deterministic symbolwise map y = phi(v, b).

    `table[v, b]` is the reconstruction symbol; for Berger-Tung maps the two
    coordinates are (u1, u2).
    """

    table: np.ndarray
    output_size: int = 0

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64, copy=True)
        if table.ndim != 2 or table.size == 0:
            raise DistributionError(f"Reconstruction map needs a non-empty 2-D table, got shape {table.shape}")
        output_size = self.output_size or int(table.max()) + 1
        if table.min() < 0 or table.max() >= output_size:
            raise DistributionError(
                f"Reconstruction symbols must lie in [0, {output_size}), got range [{table.min()}, {table.max()}]"
            )
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "output_size", output_size)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.table.shape

    def apply(self, first: np.ndarray, second: np.ndarray) -> np.ndarray:
        """Vectorised lookup phi(first_t, second_t)."""
        return self.table[first, second]

    @classmethod
    def second_coordinate(cls, first_size: int, second_size: int) -> "ReconstructionMap":
        """phi(v, b) = b."""
        return cls(np.tile(np.arange(second_size), (first_size, 1)), second_size)

    @classmethod
    def first_coordinate(cls, first_size: int, second_size: int) -> "ReconstructionMap":
        """phi(v, b) = v."""
        return cls(np.tile(np.arange(first_size)[:, None], (1, second_size)), first_size)

    def to_list(self) -> list:
        return self.table.tolist()


@dataclass(frozen=True, eq=False)
class RateDistortionPoint:
    """A (rate, distortion) point, or a rate pair with a distortion pair.

    Single-terminal solvers fill one-element tuples; `rate` and `distortion`
    read those directly.
    """

    rates: Tuple[float, ...]
    distortions: Tuple[float, ...]
    achieving_channels: Tuple[Channel, ...] = ()
    reconstruction_maps: Tuple[ReconstructionMap, ...] = ()
    status: str = "converged"
    iterations: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        distortions = tuple(float(d) for d in self.distortions)
        if not rates or len(rates) != len(distortions):
            raise DistributionError(
                f"A rate-distortion point needs matching rate and distortion tuples, got {rates} and {distortions}"
            )
        if min(rates) < -RATE_TOLERANCE or min(distortions) < 0:
            raise DistributionError(f"Rates and distortions must be nonnegative, got {rates} and {distortions}")
        object.__setattr__(self, "rates", tuple(max(r, 0.0) for r in rates))
        object.__setattr__(self, "distortions", distortions)
        object.__setattr__(self, "achieving_channels", tuple(self.achieving_channels))
        object.__setattr__(self, "reconstruction_maps", tuple(self.reconstruction_maps))

    @property
    def rate(self) -> float:
        return self.rates[0]

    @property
    def distortion(self) -> float:
        return self.distortions[0]

    @property
    def sum_rate(self) -> float:
        return float(sum(self.rates))

    def as_row(self) -> Dict[str, Any]:
        """Flat record used by the curve writer."""
        row: Dict[str, Any] = {"status": self.status, "iterations": self.iterations}
        if len(self.rates) == 1:
            row.update({"distortion": self.distortion, "rate": self.rate})
        else:
            for index, (rate, distortion) in enumerate(zip(self.rates, self.distortions), start=1):
                row[f"rate{index}"] = rate
                row[f"distortion{index}"] = distortion
        return row

