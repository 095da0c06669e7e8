"""Validated finite-alphabet probability types.

Every type here is immutable after construction: arrays are copied and marked
read-only, so instances can be shared freely between concurrent trials.
Probabilities are validated against the simplex with an absolute tolerance of
1e-9 and are never renormalized.
"""

from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np

from ..errors import DistributionError


SIMPLEX_TOLERANCE = 1e-9

ArrayLike = Union[np.ndarray, Sequence[float], Sequence[Sequence[float]]]


def _frozen(values: ArrayLike, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def _check_simplex(probs: np.ndarray, what: str, tolerance: float = SIMPLEX_TOLERANCE) -> None:
    if probs.size == 0:
        raise DistributionError(f"{what} has an empty alphabet")
    if not np.all(np.isfinite(probs)):
        raise DistributionError(f"{what} contains non-finite entries")
    if np.any(probs < 0):
        raise DistributionError(f"{what} has negative entries (min {probs.min():.3g})")
    total = float(probs.sum())
    if abs(total - 1.0) > tolerance:
        raise DistributionError(f"{what} sums to {total!r}, not 1")


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function over symbols 0..k-1."""

    probs: np.ndarray
    tolerance: float = field(default=SIMPLEX_TOLERANCE, repr=False)

    def __post_init__(self):
        probs = _frozen(self.probs)
        if probs.ndim != 1:
            raise DistributionError(f"Pmf needs a vector, got shape {probs.shape}")
        _check_simplex(probs, "Pmf", self.tolerance)
        object.__setattr__(self, "probs", probs)

    @property
    def size(self) -> int:
        return int(self.probs.shape[0])

    def __len__(self) -> int:
        return self.size

    @classmethod
    def uniform(cls, size: int) -> "Pmf":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size: int, symbol: int) -> "Pmf":
        probs = np.zeros(size)
        probs[symbol] = 1.0
        return cls(probs)

    @classmethod
    def bernoulli(cls, p: float) -> "Pmf":
        """Binary pmf with P(1) = p."""
        return cls([1.0 - p, p])

    def to_list(self) -> list:
        return self.probs.tolist()


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Joint pmf over a product alphabet, one named axis per coordinate."""

    probs: np.ndarray
    axes: Tuple[str, ...] = ()

    def __post_init__(self):
        probs = _frozen(self.probs)
        if probs.ndim < 2:
            raise DistributionError(f"JointPmf needs at least two axes, got shape {probs.shape}")
        axes = tuple(self.axes) or tuple(f"A{i}" for i in range(probs.ndim))
        if len(axes) != probs.ndim:
            raise DistributionError(f"JointPmf has {probs.ndim} axes but {len(axes)} labels {axes}")
        if len(set(axes)) != len(axes):
            raise DistributionError(f"JointPmf axis labels must be distinct, got {axes}")
        _check_simplex(probs, "JointPmf")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "axes", axes)

    @property
    def ndim(self) -> int:
        return self.probs.ndim

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.probs.shape

    def axis_index(self, axis: Union[int, str]) -> int:
        """Resolve an axis given by position or label."""
        if isinstance(axis, str):
            if axis not in self.axes:
                raise DistributionError(f"Unknown axis {axis!r}; joint axes are {self.axes}")
            return self.axes.index(axis)
        if not -self.ndim <= axis < self.ndim:
            raise DistributionError(f"Axis {axis} out of range for a {self.ndim}-axis joint")
        return axis % self.ndim

    def to_list(self) -> list:
        return self.probs.tolist()


@dataclass(frozen=True, eq=False)
class Channel:
    """Memoryless channel: rows[i, j] = P(output j | input i)."""

    rows: np.ndarray

    def __post_init__(self):
        rows = _frozen(self.rows)
        if rows.ndim != 2:
            raise DistributionError(f"Channel needs a 2-D table, got shape {rows.shape}")
        for index, row in enumerate(rows):
            _check_simplex(row, f"Channel row {index}")
        object.__setattr__(self, "rows", rows)

    @property
    def input_size(self) -> int:
        return int(self.rows.shape[0])

    @property
    def output_size(self) -> int:
        return int(self.rows.shape[1])

    def row(self, symbol: int) -> Pmf:
        return Pmf(self.rows[symbol])

    @classmethod
    def identity(cls, size: int) -> "Channel":
        return cls(np.eye(size))

    @classmethod
    def bsc(cls, crossover: float) -> "Channel":
        """Binary symmetric channel."""
        return cls([[1.0 - crossover, crossover], [crossover, 1.0 - crossover]])

    @classmethod
    def constant(cls, output: Pmf, input_size: int) -> "Channel":
        """Channel whose output ignores its input."""
        return cls(np.tile(output.probs, (input_size, 1)))

    def to_list(self) -> list:
        return self.rows.tolist()


@dataclass(frozen=True, eq=False)
class DistortionMeasure:
    """Per-letter distortion table d(x, y) >= 0."""

    table: np.ndarray
    d_max: float = field(init=False)

    def __post_init__(self):
        table = _frozen(self.table)
        if table.ndim != 2 or table.size == 0:
            raise DistributionError(f"Distortion measure needs a non-empty 2-D table, got shape {table.shape}")
        if not np.all(np.isfinite(table)) or np.any(table < 0):
            raise DistributionError("Distortion table entries must be finite and nonnegative")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "d_max", float(table.max()))

    @property
    def source_size(self) -> int:
        return int(self.table.shape[0])

    @property
    def reconstruction_size(self) -> int:
        return int(self.table.shape[1])

    @classmethod
    def hamming(cls, size: int, reconstruction_size: int = 0) -> "DistortionMeasure":
        reconstruction_size = reconstruction_size or size
        table = np.ones((size, reconstruction_size))
        for symbol in range(min(size, reconstruction_size)):
            table[symbol, symbol] = 0.0
        return cls(table)

    def to_list(self) -> list:
        return self.table.tolist()


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """Length-n sequence of symbols from an alphabet of the given size."""

    symbols: np.ndarray
    alphabet_size: int

    def __post_init__(self):
        symbols = _frozen(self.symbols, dtype=np.int64)
        if symbols.ndim != 1 or symbols.size < 1:
            raise DistributionError(f"Symbol sequences must be non-empty vectors, got shape {symbols.shape}")
        if self.alphabet_size < 1:
            raise DistributionError(f"Alphabet size must be positive, got {self.alphabet_size}")
        if symbols.min() < 0 or symbols.max() >= self.alphabet_size:
            raise DistributionError(
                f"Sequence symbols must lie in [0, {self.alphabet_size}), "
                f"got range [{symbols.min()}, {symbols.max()}]"
            )
        object.__setattr__(self, "symbols", symbols)

    @property
    def n(self) -> int:
        return int(self.symbols.shape[0])

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolSequence):
            return NotImplemented
        return self.alphabet_size == other.alphabet_size and np.array_equal(self.symbols, other.symbols)

    def __hash__(self) -> int:
        return hash((self.alphabet_size, self.symbols.tobytes()))

    def to_list(self) -> list:
        return self.symbols.tolist()
