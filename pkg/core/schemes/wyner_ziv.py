"""Wyner-Ziv coding: likelihood encoder with a virtual message recovered from side information."""

from typing import Dict, List, Optional, Tuple

from ..coding.codebook import Codebook, MessagePair, generate_codebook
from ..coding.decoder import ml_channel_decode, reconstruct
from ..coding.likelihood import likelihood_encode_or_uniform
from ..config.models import TrialResult
from ..errors import DistributionError
from ..prob.distributions import SymbolSequence
from ..prob.measures import (
    cascade,
    compose,
    conditional,
    marginalize,
    mutual_information,
    reverse_channel,
    sequence_distortion,
)
from .base import Scheme
from .configs import WZConfig
from .seeds import draw_pairs, trial_streams


def wz_rate_conditions(rate_r: float, rate_rprime: float, i_xv: float, i_vb: float) -> List[str]:
    """Violations of R + R' > I(X;V) and R' < I(V;B)."""
    problems = []
    if rate_r + rate_rprime <= i_xv:
        problems.append(f"R + R' = {rate_r + rate_rprime:.4f} does not exceed I(X;V) = {i_xv:.4f}")
    if rate_rprime > 0 and rate_rprime >= i_vb:
        problems.append(f"R' = {rate_rprime:.4f} is not below I(V;B) = {i_vb:.4f}")
    return problems


class WynerZivScheme(Scheme):
    """Derives P_V, P_{X|V} and P_{B|V} through the chain V - X - B."""

    tag = "wz"

    def __init__(self, config: WZConfig):
        super().__init__(config)
        joint_xb = config.joint_xb
        source = marginalize(joint_xb, 1)
        if config.test_channel.input_size != source.size:
            raise DistributionError(
                f"Test channel has {config.test_channel.input_size} inputs but X has {source.size} symbols"
            )
        v_size, b_size = config.test_channel.output_size, joint_xb.shape[1]
        if config.phi.shape != (v_size, b_size):
            raise DistributionError(f"phi must be indexed [v, b] with shape {(v_size, b_size)}, got {config.phi.shape}")
        if config.d.source_size != source.size or config.phi.output_size > config.d.reconstruction_size:
            raise DistributionError(
                f"Distortion table {config.d.table.shape} does not fit X and the map's {config.phi.output_size} outputs"
            )

        joint_xv = compose(source, config.test_channel)
        self.source = source
        self.gen = marginalize(joint_xv, 0)
        self.x_given_v, unreachable = reverse_channel(source, config.test_channel)
        if unreachable:
            self.warn(f"Auxiliary symbols {unreachable} are unreachable; their inverse rows are uniform")
        self.b_given_v = cascade(self.x_given_v, conditional(joint_xb, given=0))

        self.i_xv = mutual_information(joint_xv)
        self.i_vb = mutual_information(compose(self.gen, self.b_given_v))
        self.rate_rprime = (
            config.rate_rprime if config.rate_rprime is not None else max(self.i_vb - config.virtual_margin, 0.0)
        )
        self.rate_r = (
            config.rate_r
            if config.rate_r is not None
            else max(self.i_xv - self.rate_rprime + config.rate_margin, 0.0)
        )
        for problem in wz_rate_conditions(self.rate_r, self.rate_rprime, self.i_xv, self.i_vb):
            self.warn(f"Rate condition violated: {problem}")

    def build_codebooks(self, block: int) -> Tuple[Codebook, ...]:
        return (
            generate_codebook(
                self.gen,
                self.n,
                self.rate_r,
                self.rate_rprime,
                self.codebook_seed(block),
                self.config.codebook_budget,
            ),
        )

    def run_trial(self, trial_index: int, codebooks: Tuple[Codebook, ...]) -> TrialResult:
        cb = codebooks[0]
        seed = self.trial_seed(trial_index)
        source_rng, encoder_rng = trial_streams(seed)
        x_symbols, b_symbols = draw_pairs(self.config.joint_xb.probs, self.n, source_rng)
        x = SymbolSequence(x_symbols, self.source.size)
        b = SymbolSequence(b_symbols, self.config.joint_xb.shape[1])

        msg, fallback = likelihood_encode_or_uniform(cb, self.x_given_v, x, encoder_rng)
        decoded = ml_channel_decode(cb, msg.m, self.b_given_v, b)
        v = cb.codeword(MessagePair(msg.m, decoded.mprime))
        y = reconstruct(self.config.phi, v, b)
        return TrialResult(
            trial_index=trial_index,
            trial_seed=seed,
            codebook_block=self.block_of(trial_index),
            distortions=[sequence_distortion(self.config.d, x, y)],
            virtual_decode_ok=decoded.mprime == msg.mprime,
            uniform_fallback=fallback,
            decode_degenerate=decoded.degenerate,
        )

    def rates(self) -> Dict[str, float]:
        return {"rate_r": self.rate_r, "rate_rprime": self.rate_rprime}

    def information(self) -> Dict[str, float]:
        return {"I(X;V)": self.i_xv, "I(V;B)": self.i_vb, "I(X;V|B)": self.i_xv - self.i_vb}


def run_wz_trial(cfg: WZConfig, trial_index: int, codebook: Optional[Codebook] = None) -> TrialResult:
    """One Wyner-Ziv trial; the codebook defaults to the trial's block codebook."""
    scheme = WynerZivScheme(cfg)
    if codebook is None:
        return scheme.run_trial(trial_index, scheme.build_codebooks(scheme.block_of(trial_index)))
    return scheme.run_trial(trial_index, (codebook,))
