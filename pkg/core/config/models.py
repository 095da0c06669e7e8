"""Core data models for the source coding lab."""

from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator


Scheme = Literal["p2p", "wz", "bt", "softcover", "rd", "wz-rate", "bt-corner", "identities"]
Table = List[List[float]]
DistortionSpec = Union[Literal["hamming"], Table]

# fields each scheme needs before anything is computed
REQUIRED_FIELDS: Dict[str, List[str]] = {
    "rd": ["source", "targets"],
    "wz-rate": ["joint", "targets"],
    "bt-corner": ["joint", "channel1", "channel2"],
    "p2p": ["source", "test_channel", "n"],
    "wz": ["joint", "test_channel", "n"],
    "bt": ["joint", "channel1", "channel2", "n"],
    "softcover": ["joint", "rates", "ns"],
    "identities": [],
}


class ExperimentConfig(BaseModel):
    """A JSON experiment description; unknown fields are rejected."""
    model_config = {"extra": "forbid"}

    scheme: Scheme = Field(..., description="Which experiment to run")
    name: str = Field(default="experiment", description="Problem identifier echoed into outputs")

    source: Optional[List[float]] = Field(None, description="Source pmf P_X")
    joint: Optional[Table] = Field(None, description="Joint pmf over (X, B), (X1, X2) or (X, Y)")
    test_channel: Optional[Table] = Field(None, description="Forward test channel P_{Y|X} or P_{V|X}")
    channel1: Optional[Table] = Field(None, description="Berger-Tung test channel P_{U1|X1}")
    channel2: Optional[Table] = Field(None, description="Berger-Tung test channel P_{U2|X2}")
    phi: Optional[List[List[int]]] = Field(None, description="Reconstruction map phi(v, b); greedy when omitted")
    phi1: Optional[List[List[int]]] = Field(None, description="Reconstruction map phi_1(u1, u2)")
    phi2: Optional[List[List[int]]] = Field(None, description="Reconstruction map phi_2(u1, u2)")
    distortion: DistortionSpec = Field(default="hamming", description="Distortion table or 'hamming'")
    distortion1: DistortionSpec = Field(default="hamming", description="Distortion on X1")
    distortion2: DistortionSpec = Field(default="hamming", description="Distortion on X2")

    n: Optional[int] = Field(None, ge=1, description="Blocklength")
    ns: Optional[List[int]] = Field(None, description="Blocklengths for sweeps")
    rate: Optional[float] = Field(None, ge=0.0, description="Transmitted rate R (bits/symbol)")
    rate_prime: Optional[float] = Field(None, ge=0.0, description="Virtual-message rate R'")
    rate1: Optional[float] = Field(None, ge=0.0, description="Encoder 1 rate")
    rate2: Optional[float] = Field(None, ge=0.0, description="Encoder 2 transmitted rate")
    rate2_prime: Optional[float] = Field(None, ge=0.0, description="Encoder 2 virtual-message rate")
    rate_margin: float = Field(default=0.15, ge=0.0, description="Bits added above information quantities")
    virtual_margin: float = Field(default=0.15, ge=0.0, description="Bits kept below the side-information rate")
    rates: Optional[List[float]] = Field(None, description="Codebook rates for soft-covering sweeps")
    targets: Optional[List[float]] = Field(None, description="Distortion targets for solver runs")

    trials: int = Field(default=100, ge=1, description="Monte Carlo trials")
    codebooks_per_experiment: Optional[int] = Field(None, ge=1, description="Codebook blocks per experiment")
    codebooks_per_cell: int = Field(default=20, ge=1, description="Codebooks per soft-covering cell")
    master_seed: int = Field(default=0, ge=0, description="Master seed for every derived stream")
    restarts: int = Field(default=64, ge=1, description="Random restarts for the Wyner-Ziv solver")
    corner: Literal[1, 2] = Field(default=1, description="Berger-Tung corner")
    time_share: Optional[float] = Field(None, ge=0.0, le=1.0, description="Weight of corner 1 when time-sharing")
    variant: Literal["xy", "xb"] = Field(default="xy", description="Soft-covering output: X alone or the pair (X, B)")
    fixtures: Optional[List[str]] = Field(None, description="Identity fixtures to verify; all shipped ones when omitted")
    output_dir: Optional[str] = Field(None, description="Directory for results.csv and summary.json")
    threads: Optional[int] = Field(None, ge=1, description="Concurrent workers; --threads overrides it and SOFTCOVER_THREADS applies when unset")

    @field_validator("ns")
    @classmethod
    def _positive_blocklengths(cls, value):
        if value is not None and (not value or min(value) < 1):
            raise ValueError("ns must be a non-empty list of positive blocklengths")
        return value

    @field_validator("rates", "targets")
    @classmethod
    def _nonnegative_grid(cls, value):
        if value is not None and (not value or min(value) < 0):
            raise ValueError("grids must be non-empty and nonnegative")
        return value

    @model_validator(mode="after")
    def _scheme_fields(self):
        missing = [name for name in REQUIRED_FIELDS[self.scheme] if getattr(self, name) is None]
        if self.scheme == "softcover" and self.variant == "xb" and self.test_channel is None:
            missing.append("test_channel")
        if missing:
            raise ValueError(f"scheme {self.scheme!r} requires {', '.join(missing)}")
        return self


class TrialResult(BaseModel):
    """Outcome of one Monte Carlo trial."""
    trial_index: int = Field(..., ge=0, description="Position of the trial in the experiment")
    trial_seed: int = Field(..., description="Seed of the trial's random streams")
    codebook_block: int = Field(default=0, ge=0, description="Codebook block that served the trial")
    distortions: List[float] = Field(..., description="Per-letter distortion of each reconstruction")
    virtual_decode_ok: Optional[bool] = Field(None, description="Whether the virtual message was recovered")
    uniform_fallback: bool = Field(default=False, description="Encoder met an all-zero likelihood")
    decode_degenerate: bool = Field(default=False, description="ML decoder saw only zero likelihoods")

    @property
    def distortion(self) -> float:
        return self.distortions[0]


class ExperimentSummary(BaseModel):
    """Aggregate of a Monte Carlo experiment; every statistic is a function of `results`."""
    scheme: str = Field(..., description="Scheme tag")
    n: int = Field(..., description="Blocklength")
    trials: int = Field(..., description="Number of trials")
    master_seed: int = Field(..., description="Master seed")
    rates: Dict[str, float] = Field(default_factory=dict, description="Operational rates in bits/symbol")
    information: Dict[str, float] = Field(default_factory=dict, description="Information quantities the rates are compared to")
    mean_distortions: List[float] = Field(..., description="Mean distortion per reconstruction")
    standard_errors: List[float] = Field(..., description="Standard error of each mean")
    virtual_error_rate: Optional[float] = Field(None, description="Fraction of trials with a wrong virtual message")
    uniform_fallbacks: int = Field(default=0, description="Trials that used the uniform encoder fallback")
    degenerate_decodes: int = Field(default=0, description="Trials whose ML decoder was degenerate")
    codebooks_used: int = Field(..., description="Distinct codebook blocks")
    warnings: List[str] = Field(default_factory=list, description="Rate-condition and degeneracy warnings")
    results: List[TrialResult] = Field(default_factory=list, description="Per-trial results in trial order")

    @property
    def mean_distortion(self) -> float:
        return self.mean_distortions[0]


class SoftcoverReport(BaseModel):
    """Exact total variation of one (rate, n) soft-covering cell."""
    n: int = Field(..., ge=1, description="Blocklength")
    rate: float = Field(..., ge=0.0, description="Codebook rate")
    mutual_information: float = Field(..., description="I(X;Y) or I(XB;V) of the single-letter joint")
    tv_values: List[float] = Field(..., description="Exact TV of each codebook")
    mean_tv: float = Field(..., description="Arithmetic mean of tv_values")
    codebook_count: int = Field(..., ge=1, description="Codebooks in the cell")
    seed: int = Field(..., description="Sweep seed")
    variant: str = Field(default="xy", description="Output variable: X alone or the pair (X, B)")

    @field_validator("tv_values")
    @classmethod
    def _unit_interval(cls, value):
        if any(tv < 0.0 or tv > 1.0 for tv in value):
            raise ValueError("total variation values must lie in [0, 1]")
        return value


class IdentityReport(BaseModel):
    """Outcome of the exact auxiliary-distribution checks on one fixture."""
    fixture: str = Field(..., description="Fixture name")
    n: int = Field(..., description="Blocklength")
    codebook_size: int = Field(..., description="Codewords per codebook")
    tolerance: float = Field(default=1e-12, description="Entrywise tolerance")
    posterior_max_error: float = Field(..., description="Largest gap between the Bayes-inverted and encoder posteriors")
    ensemble_size: int = Field(..., description="Codebooks enumerated in the ensemble average")
    ensemble_max_error: float = Field(..., description="Largest gap between the ensemble average and the i.i.d. product")
    distortion_gap: Optional[float] = Field(None, description="Gap between ensemble and single-letter expected distortion")

    @property
    def passed(self) -> bool:
        checks = [self.posterior_max_error, self.ensemble_max_error]
        if self.distortion_gap is not None:
            checks.append(self.distortion_gap)
        return all(error <= self.tolerance for error in checks)
