"""Random codebooks {v^n(m, m')} with counter-addressable letters.

Letters come from a Philox counter-based generator keyed by the codebook
seed. Letter (m, m', t) is draw number (m * num_mprime + m') * n + t of that
stream, so any single letter can be recomputed by jumping the counter.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..errors import CodebookBudgetError, CodebookError
from ..prob.distributions import Pmf, SymbolSequence


logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 2 ** 26
MAX_LETTER_ALPHABET = 2 ** 16
PHILOX_BLOCK = 4
CHUNK = 2 ** 20
_UNIT = 2.0 ** -53


@dataclass(frozen=True)
class MessagePair:
    """Transmitted index m and virtual index m'."""

    m: int
    mprime: int = 0

    def flat(self, num_mprime: int) -> int:
        """Row-major position m * num_mprime + m'."""
        return self.m * num_mprime + self.mprime

    @classmethod
    def from_flat(cls, index: int, num_mprime: int) -> "MessagePair":
        return cls(int(index) // num_mprime, int(index) % num_mprime)


@dataclass(frozen=True, eq=False)
class Codebook:
    """Codewords indexed [m, m', t], each letter drawn i.i.d. from the generator pmf."""

    n: int
    num_m: int
    num_mprime: int
    codewords: np.ndarray
    generator_pmf: Pmf
    seed: Optional[int] = None

    def __post_init__(self):
        codewords = np.array(self.codewords, copy=True)
        expected = (self.num_m, self.num_mprime, self.n)
        if codewords.shape != expected:
            raise CodebookError(f"Codeword table has shape {codewords.shape}, expected {expected}")
        if codewords.size and (codewords.min() < 0 or codewords.max() >= self.generator_pmf.size):
            raise CodebookError(
                f"Codeword letters must lie in [0, {self.generator_pmf.size})",
                "Build codebooks with generate_codebook or check hand-written tables.",
            )
        codewords = codewords.astype(_letter_dtype(self.generator_pmf.size))
        codewords.setflags(write=False)
        object.__setattr__(self, "codewords", codewords)

    @property
    def size(self) -> int:
        return self.num_m * self.num_mprime

    @property
    def alphabet_size(self) -> int:
        return self.generator_pmf.size

    @property
    def flat_codewords(self) -> np.ndarray:
        """Codewords as (size, n), in MessagePair.flat order."""
        return self.codewords.reshape(self.size, self.n)

    def check(self, msg: MessagePair) -> None:
        if not (0 <= msg.m < self.num_m and 0 <= msg.mprime < self.num_mprime):
            raise CodebookError(
                f"Message ({msg.m}, {msg.mprime}) is outside the {self.num_m} x {self.num_mprime} codebook"
            )

    def codeword(self, msg: MessagePair) -> SymbolSequence:
        self.check(msg)
        return SymbolSequence(self.codewords[msg.m, msg.mprime], self.alphabet_size)

    @classmethod
    def from_codewords(cls, codewords, generator_pmf: Pmf, num_m: int = 1) -> "Codebook":
        """Hand-built codebook from a list of codewords, split into num_m sub-codebooks."""
        table = np.atleast_2d(np.asarray(codewords, dtype=np.int64))
        total, n = table.shape
        if total % num_m:
            raise CodebookError(f"{total} codewords cannot be split into {num_m} sub-codebooks")
        return cls(n, num_m, total // num_m, table.reshape(num_m, total // num_m, n), generator_pmf)


def _letter_dtype(alphabet_size: int):
    return np.uint8 if alphabet_size <= 256 else np.uint16


def message_count(n: int, rate: float) -> int:
    """ceil(2^(n * rate))."""
    return math.ceil(2.0 ** round(n * rate, 9))


def _letters(gen: Pmf, raw: np.ndarray) -> np.ndarray:
    """Inverse-CDF map from raw 64-bit draws to letters of gen."""
    cdf = np.cumsum(gen.probs)
    uniforms = (raw >> np.uint64(11)).astype(np.float64) * _UNIT
    last = int(np.flatnonzero(gen.probs > 0)[-1])
    return np.minimum(np.searchsorted(cdf, uniforms, side="right"), last)


def codebook_budget_symbols(n: int, rate_r: float, rate_rprime: float) -> float:
    """Symbols a codebook of these rates would hold, computed in log space first."""
    log_total = round(n * rate_r, 9) + round(n * rate_rprime, 9) + math.log2(n)
    if log_total > 62:
        return float("inf")
    return float(message_count(n, rate_r) * message_count(n, rate_rprime) * n)


def generate_codebook(
    gen: Pmf,
    n: int,
    rate_r: float,
    rate_rprime: float,
    seed: int,
    budget: int = DEFAULT_BUDGET,
) -> Codebook:
    """Draw ceil(2^{nR}) x ceil(2^{nR'}) codewords of length n i.i.d. from gen.

    Args:
        gen: Letter distribution
        n: Blocklength
        rate_r: Transmitted rate in bits per symbol
        rate_rprime: Virtual-message rate in bits per symbol
        seed: Philox key; the same inputs always give the same table
        budget: Maximum number of stored symbols

    Returns:
        The codebook

    Raises:
        CodebookBudgetError: If the table would exceed `budget` symbols
    """
    if n < 1:
        raise CodebookError(f"Blocklength must be at least 1, got {n}")
    if rate_r < 0 or rate_rprime < 0:
        raise CodebookError(f"Rates must be nonnegative, got R={rate_r}, R'={rate_rprime}")
    if gen.size > MAX_LETTER_ALPHABET:
        raise CodebookError(f"Codeword alphabet of {gen.size} symbols exceeds {MAX_LETTER_ALPHABET}")
    required = codebook_budget_symbols(n, rate_r, rate_rprime)
    if required > budget:
        raise CodebookBudgetError(
            f"Codebook needs {required:.6g} symbols for n={n}, R={rate_r}, R'={rate_rprime}; budget is {budget}"
        )
    num_m = message_count(n, rate_r)
    num_mprime = message_count(n, rate_rprime)
    total = num_m * num_mprime * n

    bit_generator = np.random.Philox(key=seed)
    letters = np.empty(total, dtype=_letter_dtype(gen.size))
    for start in range(0, total, CHUNK):
        count = min(CHUNK, total - start)
        letters[start:start + count] = _letters(gen, bit_generator.random_raw(count))
    logger.debug(f"Generated {num_m} x {num_mprime} codebook at n={n} with seed {seed}")
    return Codebook(n, num_m, num_mprime, letters.reshape(num_m, num_mprime, n), gen, seed)


def codebook_letter(
    gen: Pmf,
    n: int,
    num_mprime: int,
    seed: int,
    m: int,
    mprime: int,
    t: int,
) -> int:
    """Letter t of codeword (m, m') recomputed without building the table."""
    index = (m * num_mprime + mprime) * n + t
    bit_generator = np.random.Philox(key=seed)
    bit_generator.advance(index // PHILOX_BLOCK)
    raw = bit_generator.random_raw(index % PHILOX_BLOCK + 1)[-1:]
    return int(_letters(gen, raw)[0])


def codeword_lookup(cb: Codebook, msg: MessagePair) -> SymbolSequence:
    """v^n(m, m') verbatim."""
    return cb.codeword(msg)


def dump_codebook(cb: Codebook) -> List[List[int]]:
    """Rows (m, m', v_1, ..., v_n) in message order."""
    rows = []
    for m in range(cb.num_m):
        for mprime in range(cb.num_mprime):
            rows.append([m, mprime] + cb.codewords[m, mprime].tolist())
    return rows
