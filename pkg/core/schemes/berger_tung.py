"""Berger-Tung corner-point coding with two likelihood encoders.

Encoder 1 sends U1 at rate R1 and is decoded by codeword lookup. Encoder 2
uses a virtual message at rate R2' that the decoder recovers with U1^n as
side information, through the channel P_{U1|U2} of the chain U1 - X1 - X2 - U2.
"""

from typing import Dict, List, Optional, Tuple

from ..coding.codebook import Codebook, MessagePair, generate_codebook
from ..coding.decoder import ml_channel_decode, reconstruct
from ..coding.likelihood import likelihood_encode_or_uniform
from ..config.models import TrialResult
from ..errors import DistributionError
from ..prob.distributions import SymbolSequence
from ..prob.measures import (
    cascade,
    conditional,
    marginal,
    mutual_information,
    reverse_channel,
    sequence_distortion,
)
from ..solvers.berger_tung import berger_tung_joint
from .base import Scheme
from .configs import BTConfig
from .seeds import draw_pairs, trial_streams


def bt_rate_conditions(
    rate1: float, rate2: float, rate2_prime: float, i_x1u1: float, i_x2u2: float, i_u1u2: float
) -> List[str]:
    """Violations of R1 > I(X1;U1), R2 + R2' > I(X2;U2) and R2' < I(U1;U2)."""
    problems = []
    if rate1 <= i_x1u1:
        problems.append(f"R1 = {rate1:.4f} does not exceed I(X1;U1) = {i_x1u1:.4f}")
    if rate2 + rate2_prime <= i_x2u2:
        problems.append(f"R2 + R2' = {rate2 + rate2_prime:.4f} does not exceed I(X2;U2) = {i_x2u2:.4f}")
    if rate2_prime > 0 and rate2_prime >= i_u1u2:
        problems.append(f"R2' = {rate2_prime:.4f} is not below I(U1;U2) = {i_u1u2:.4f}")
    return problems


class BergerTungScheme(Scheme):
    """Corner C1: U1 decoded first, then used as side information for U2."""

    tag = "bt"

    def __init__(self, config: BTConfig):
        super().__init__(config)
        full = berger_tung_joint(config.joint_x1x2, config.ch1, config.ch2)
        u1_size, u2_size = full.shape[0], full.shape[3]
        for label, phi, d, size in (
            ("phi1", config.phi1, config.d1, full.shape[1]),
            ("phi2", config.phi2, config.d2, full.shape[2]),
        ):
            if phi.shape != (u1_size, u2_size):
                raise DistributionError(f"{label} must be indexed [u1, u2] with shape {(u1_size, u2_size)}")
            if d.source_size != size or phi.output_size > d.reconstruction_size:
                raise DistributionError(f"Distortion table {d.table.shape} does not fit {label}")

        self.x1 = marginal(full, "X1")
        self.x2 = marginal(full, "X2")
        self.gen1 = marginal(full, "U1")
        self.gen2 = marginal(full, "U2")
        self.x1_given_u1, unreachable1 = reverse_channel(self.x1, config.ch1)
        self.x2_given_u2, unreachable2 = reverse_channel(self.x2, config.ch2)
        for label, unreachable in (("U1", unreachable1), ("U2", unreachable2)):
            if unreachable:
                self.warn(f"{label} symbols {unreachable} are unreachable; their inverse rows are uniform")
        x1_given_x2 = conditional(marginal(full, "X2", "X1"), given=0)
        self.u1_given_u2 = cascade(self.x2_given_u2, x1_given_x2, config.ch1)

        self.i_x1u1 = mutual_information(marginal(full, "X1", "U1"))
        self.i_x2u2 = mutual_information(marginal(full, "X2", "U2"))
        self.i_u1u2 = mutual_information(marginal(full, "U1", "U2"))
        margin, virtual = config.rate_margin, config.virtual_margin
        self.rate1 = config.rate1 if config.rate1 is not None else self.i_x1u1 + margin
        self.rate2_prime = (
            config.rate2_prime if config.rate2_prime is not None else max(self.i_u1u2 - virtual, 0.0)
        )
        self.rate2 = (
            config.rate2 if config.rate2 is not None else max(self.i_x2u2 - self.rate2_prime + margin, 0.0)
        )
        for problem in bt_rate_conditions(
            self.rate1, self.rate2, self.rate2_prime, self.i_x1u1, self.i_x2u2, self.i_u1u2
        ):
            self.warn(f"Rate condition violated: {problem}")

    @property
    def reconstructions(self) -> int:
        return 2

    def build_codebooks(self, block: int) -> Tuple[Codebook, ...]:
        budget = self.config.codebook_budget
        first = generate_codebook(self.gen1, self.n, self.rate1, 0.0, self.codebook_seed(block, "1"), budget)
        second = generate_codebook(
            self.gen2, self.n, self.rate2, self.rate2_prime, self.codebook_seed(block, "2"), budget
        )
        return first, second

    def run_trial(self, trial_index: int, codebooks: Tuple[Codebook, ...]) -> TrialResult:
        cb1, cb2 = codebooks
        seed = self.trial_seed(trial_index)
        source_rng, encoder1_rng, encoder2_rng = trial_streams(seed, 3)
        x1_symbols, x2_symbols = draw_pairs(self.config.joint_x1x2.probs, self.n, source_rng)
        x1 = SymbolSequence(x1_symbols, self.x1.size)
        x2 = SymbolSequence(x2_symbols, self.x2.size)

        msg1, fallback1 = likelihood_encode_or_uniform(cb1, self.x1_given_u1, x1, encoder1_rng)
        msg2, fallback2 = likelihood_encode_or_uniform(cb2, self.x2_given_u2, x2, encoder2_rng)
        u1 = cb1.codeword(msg1)
        decoded = ml_channel_decode(cb2, msg2.m, self.u1_given_u2, u1)
        u2 = cb2.codeword(MessagePair(msg2.m, decoded.mprime))
        y1 = reconstruct(self.config.phi1, u1, u2)
        y2 = reconstruct(self.config.phi2, u1, u2)
        return TrialResult(
            trial_index=trial_index,
            trial_seed=seed,
            codebook_block=self.block_of(trial_index),
            distortions=[sequence_distortion(self.config.d1, x1, y1), sequence_distortion(self.config.d2, x2, y2)],
            virtual_decode_ok=decoded.mprime == msg2.mprime,
            uniform_fallback=fallback1 or fallback2,
            decode_degenerate=decoded.degenerate,
        )

    def rates(self) -> Dict[str, float]:
        return {"rate1": self.rate1, "rate2": self.rate2, "rate2_prime": self.rate2_prime}

    def information(self) -> Dict[str, float]:
        return {"I(X1;U1)": self.i_x1u1, "I(X2;U2)": self.i_x2u2, "I(U1;U2)": self.i_u1u2}


def run_bt_trial(
    cfg: BTConfig, trial_index: int, codebooks: Optional[Tuple[Codebook, Codebook]] = None
) -> TrialResult:
    """One Berger-Tung trial; codebooks default to the trial's block pair."""
    scheme = BergerTungScheme(cfg)
    if codebooks is None:
        codebooks = scheme.build_codebooks(scheme.block_of(trial_index))
    return scheme.run_trial(trial_index, codebooks)
