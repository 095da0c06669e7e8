"""Point-to-point lossy compression with the likelihood encoder."""

from typing import Dict, Optional, Tuple

from ..coding.codebook import Codebook, generate_codebook
from ..coding.likelihood import likelihood_encode_or_uniform
from ..config.models import TrialResult
from ..errors import DistributionError
from ..prob.distributions import Channel, DistortionMeasure, Pmf, SymbolSequence
from ..prob.measures import compose, marginalize, mutual_information, reverse_channel, sequence_distortion
from .base import Scheme
from .configs import P2PConfig
from .seeds import derive_seed, trial_streams


def run_p2p_trial(
    source: Pmf,
    ch: Channel,
    gen: Pmf,
    d: DistortionMeasure,
    n: int,
    rate: float,
    seed: int,
    codebook: Optional[Codebook] = None,
    trial_index: int = 0,
    block: int = 0,
) -> TrialResult:
    """One point-to-point trial.

    Draws x^n from the source, likelihood-encodes it with P_{X|Y} against a
    codebook drawn from P_Y and reconstructs the selected codeword.

    Args:
        source: Source pmf P_X
        ch: Encoder channel P_{X|Y}, rows indexed by codeword letters
        gen: Codeword letter pmf P_Y
        d: Distortion measure
        n: Blocklength
        rate: Rate in bits per symbol
        seed: Trial seed
        codebook: Shared codebook; generated from the trial seed when omitted
    """
    if d.source_size != source.size or d.reconstruction_size < gen.size:
        raise DistributionError(
            f"Distortion table {d.table.shape} does not fit source {source.size} and codewords {gen.size}"
        )
    if codebook is None:
        codebook = generate_codebook(gen, n, rate, 0.0, derive_seed(seed, "codebook", 0))
    source_rng, encoder_rng = trial_streams(seed)
    x = SymbolSequence(source_rng.choice(source.size, size=n, p=source.probs), source.size)
    msg, fallback = likelihood_encode_or_uniform(codebook, ch, x, encoder_rng)
    distortion = sequence_distortion(d, x, codebook.codeword(msg))
    return TrialResult(
        trial_index=trial_index,
        trial_seed=seed,
        codebook_block=block,
        distortions=[distortion],
        uniform_fallback=fallback,
    )


class PointToPointScheme(Scheme):
    """Derives P_Y and P_{X|Y} from the forward test channel."""

    tag = "p2p"

    def __init__(self, config: P2PConfig):
        super().__init__(config)
        joint = compose(config.source, config.test_channel)
        self.gen = marginalize(joint, 0)
        self.encoder_channel, unreachable = reverse_channel(config.source, config.test_channel)
        if unreachable:
            self.warn(f"Reconstruction symbols {unreachable} have zero probability under the test channel")
        self.mutual_information = mutual_information(joint)
        self.rate = config.rate if config.rate is not None else self.mutual_information + config.rate_margin
        if self.rate <= self.mutual_information:
            self.warn(f"Rate {self.rate:.4f} does not exceed I(X;Y) = {self.mutual_information:.4f}")

    def build_codebooks(self, block: int) -> Tuple[Codebook, ...]:
        return (
            generate_codebook(
                self.gen, self.n, self.rate, 0.0, self.codebook_seed(block), self.config.codebook_budget
            ),
        )

    def run_trial(self, trial_index: int, codebooks: Tuple[Codebook, ...]) -> TrialResult:
        return run_p2p_trial(
            self.config.source,
            self.encoder_channel,
            self.gen,
            self.config.d,
            self.n,
            self.rate,
            self.trial_seed(trial_index),
            codebook=codebooks[0],
            trial_index=trial_index,
            block=self.block_of(trial_index),
        )

    def rates(self) -> Dict[str, float]:
        return {"rate": self.rate}

    def information(self) -> Dict[str, float]:
        return {"I(X;Y)": self.mutual_information}
