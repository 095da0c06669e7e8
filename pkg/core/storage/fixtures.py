"""Identity-verification fixtures shipped in fixtures.yaml."""

import logging
from typing import List, Optional

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError

from ..config.builders import build_distortion, build_map
from ..config.models import DistortionSpec
from ..errors import ConfigError
from ..prob.distributions import Channel, JointPmf
from ..softcover.identities import IdentityFixture


logger = logging.getLogger(__name__)


class FixtureSpec(BaseModel):
    """A Wyner-Ziv instance with a hand-written codebook."""
    name: str = Field(..., description="Fixture identifier")
    description: str = Field(default="", description="What the fixture exercises")
    joint: List[List[float]] = Field(..., description="Joint pmf over (X, B)")
    test_channel: List[List[float]] = Field(..., description="Test channel P_{V|X}")
    codewords: List[List[int]] = Field(..., description="Codewords v^n, one row each")
    num_m: int = Field(default=1, ge=1, description="Sub-codebooks (transmitted messages)")
    phi: Optional[List[List[int]]] = Field(None, description="Reconstruction map phi(v, b)")
    distortion: Optional[DistortionSpec] = Field(None, description="Distortion on X; enables the distortion identity")

    def to_fixture(self) -> IdentityFixture:
        joint = JointPmf(np.asarray(self.joint, dtype=float), ("X", "B"))
        d = build_distortion(self.distortion, joint.shape[0]) if self.distortion is not None else None
        return IdentityFixture(
            name=self.name,
            joint_xb=joint,
            test_channel=Channel(np.asarray(self.test_channel, dtype=float)),
            codewords=np.asarray(self.codewords, dtype=np.int64),
            num_m=self.num_m,
            phi=build_map(self.phi, d) if d is not None else None,
            d=d,
        )


class FixtureStorage:
    def __init__(self, fixtures_path: str = "fixtures.yaml"):
        self.fixtures_path = fixtures_path
        self._fixtures: List[FixtureSpec] = []
        self._load_fixtures()

    def _load_fixtures(self):
        try:
            with open(self.fixtures_path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except FileNotFoundError:
            raise ConfigError(
                f"Fixtures file not found at {self.fixtures_path}",
                "Run from the repository root or pass the path to fixtures.yaml.",
            )
        except yaml.YAMLError as e:
            raise ConfigError(f"Fixtures file {self.fixtures_path} is not valid YAML: {e}")
        try:
            self._fixtures = [FixtureSpec(**entry) for entry in data or []]
        except ValidationError as e:
            raise ConfigError(f"Error validating fixtures from {self.fixtures_path}: {e}")
        logger.debug(f"Loaded {len(self._fixtures)} fixtures from {self.fixtures_path}")

    def get_all_fixtures(self) -> List[FixtureSpec]:
        return self._fixtures

    def get_fixture_by_name(self, name: str) -> Optional[FixtureSpec]:
        for fixture in self._fixtures:
            if fixture.name == name:
                return fixture
        return None

    def select(self, names: Optional[List[str]] = None) -> List[FixtureSpec]:
        """All fixtures, or the named ones in the given order."""
        if not names:
            return list(self._fixtures)
        selected = []
        for name in names:
            fixture = self.get_fixture_by_name(name)
            if fixture is None:
                raise ConfigError(f"Unknown fixture {name!r}; available: {[f.name for f in self._fixtures]}")
            selected.append(fixture)
        return selected
