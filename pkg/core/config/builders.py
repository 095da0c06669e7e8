"""Turn validated experiment configs into probability objects and scheme configs."""

import logging
from typing import Optional, Sequence, Union

import numpy as np

from ..prob.distributions import Channel, DistortionMeasure, JointPmf, Pmf
from ..prob.measures import attach
from ..schemes.configs import BTConfig, P2PConfig, WZConfig
from ..solvers.berger_tung import berger_tung_joint, optimal_pair_reconstruction
from ..solvers.models import ReconstructionMap
from ..solvers.wyner_ziv import optimal_reconstruction
from .models import DistortionSpec, ExperimentConfig
from .settings import LabSettings


logger = logging.getLogger(__name__)


def build_distortion(spec: DistortionSpec, source_size: int, reconstruction_size: int = 0) -> DistortionMeasure:
    """'hamming' over the given alphabets, or an explicit table."""
    if isinstance(spec, str):
        return DistortionMeasure.hamming(source_size, reconstruction_size)
    return DistortionMeasure(np.asarray(spec, dtype=float))


def build_map(table: Optional[Sequence[Sequence[int]]], d: DistortionMeasure) -> Optional[ReconstructionMap]:
    if table is None:
        return None
    return ReconstructionMap(np.asarray(table), d.reconstruction_size)


def build_joint(cfg: ExperimentConfig, axes: Sequence[str]) -> JointPmf:
    return JointPmf(np.asarray(cfg.joint, dtype=float), tuple(axes))


def build_channel(rows: Sequence[Sequence[float]]) -> Channel:
    return Channel(np.asarray(rows, dtype=float))


def build_source(cfg: ExperimentConfig) -> Pmf:
    return Pmf(np.asarray(cfg.source, dtype=float))


def _codebooks(cfg: ExperimentConfig, settings: LabSettings) -> int:
    return cfg.codebooks_per_experiment or settings.codebooks_per_experiment


def p2p_config(cfg: ExperimentConfig, settings: LabSettings) -> P2PConfig:
    source = build_source(cfg)
    test_channel = build_channel(cfg.test_channel)
    return P2PConfig(
        source=source,
        test_channel=test_channel,
        d=build_distortion(cfg.distortion, source.size, test_channel.output_size),
        n=cfg.n,
        rate=cfg.rate,
        trials=cfg.trials,
        master_seed=cfg.master_seed,
        codebooks_per_experiment=_codebooks(cfg, settings),
        rate_margin=cfg.rate_margin,
        codebook_budget=settings.codebook_budget,
    )


def wz_config(cfg: ExperimentConfig, settings: LabSettings) -> WZConfig:
    """Wyner-Ziv config; phi defaults to the greedy per-cell map."""
    joint = build_joint(cfg, ("X", "B"))
    test_channel = build_channel(cfg.test_channel)
    d = build_distortion(cfg.distortion, joint.shape[0])
    phi = build_map(cfg.phi, d)
    if phi is None:
        phi = optimal_reconstruction(attach(joint, test_channel, "X", "V"), d)
        logger.info(f"Using greedy reconstruction map {phi.to_list()}")
    return WZConfig(
        joint_xb=joint,
        test_channel=test_channel,
        phi=phi,
        d=d,
        n=cfg.n,
        rate_r=cfg.rate,
        rate_rprime=cfg.rate_prime,
        trials=cfg.trials,
        master_seed=cfg.master_seed,
        codebooks_per_experiment=_codebooks(cfg, settings),
        rate_margin=cfg.rate_margin,
        virtual_margin=cfg.virtual_margin,
        codebook_budget=settings.codebook_budget,
    )


def bt_parts(cfg: ExperimentConfig):
    """(joint, ch1, ch2, phi1, phi2, d1, d2) with greedy maps where none are given."""
    joint = build_joint(cfg, ("X1", "X2"))
    ch1, ch2 = build_channel(cfg.channel1), build_channel(cfg.channel2)
    d1 = build_distortion(cfg.distortion1, joint.shape[0])
    d2 = build_distortion(cfg.distortion2, joint.shape[1])
    phi1, phi2 = build_map(cfg.phi1, d1), build_map(cfg.phi2, d2)
    if phi1 is None or phi2 is None:
        full = berger_tung_joint(joint, ch1, ch2)
        phi1 = phi1 or optimal_pair_reconstruction(full, "X1", d1)
        phi2 = phi2 or optimal_pair_reconstruction(full, "X2", d2)
    return joint, ch1, ch2, phi1, phi2, d1, d2


def bt_config(cfg: ExperimentConfig, settings: LabSettings) -> BTConfig:
    joint, ch1, ch2, phi1, phi2, d1, d2 = bt_parts(cfg)
    return BTConfig(
        joint_x1x2=joint,
        ch1=ch1,
        ch2=ch2,
        phi1=phi1,
        phi2=phi2,
        d1=d1,
        d2=d2,
        n=cfg.n,
        rate1=cfg.rate1,
        rate2=cfg.rate2,
        rate2_prime=cfg.rate2_prime,
        trials=cfg.trials,
        master_seed=cfg.master_seed,
        codebooks_per_experiment=_codebooks(cfg, settings),
        rate_margin=cfg.rate_margin,
        virtual_margin=cfg.virtual_margin,
        codebook_budget=settings.codebook_budget,
    )


SchemeConfig = Union[P2PConfig, WZConfig, BTConfig]

SCHEME_BUILDERS = {"p2p": p2p_config, "wz": wz_config, "bt": bt_config}
