"""Probe target generation and simulated touch probing."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, OutOfPatchError
from .mathcore import Rng, vec3
from .terrain import NoiseModel, TerrainPatch, contact_at


def _default_thetas():
    return [k * math.pi / 3 for k in range(6)]


@dataclass(frozen=True)
class ExplorationConfig:
    alpha: float = 0.06  # m, probe circle radius
    thetas: tuple = field(default_factory=lambda: tuple(_default_thetas()))
    approach_z: float = 0.0
    # cap on probes pooled over all rounds of one estimation session
    max_probes: int = 60

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        if not self.alpha > 0:
            raise InvalidInputError(f"alpha must be > 0, got {self.alpha}")
        if not self.thetas:
            raise InvalidInputError("thetas must be nonempty")
        if any(not 0 <= t < 2 * math.pi for t in self.thetas):
            raise InvalidInputError("each theta must lie in [0, 2*pi)")
        if not self.max_probes >= len(self.thetas):
            raise InvalidInputError("max_probes must be >= len(thetas)")


@dataclass
class ContactSet:
    points: list
    target: np.ndarray

    def __len__(self):
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=float).reshape(-1, 3)

    def extended(self, other: "ContactSet") -> "ContactSet":
        return ContactSet(points=list(self.points) + list(other.points), target=self.target)


def probe_targets(p_star, cfg: ExplorationConfig) -> list:
    p = vec3(p_star)
    return [
        p + np.array([cfg.alpha * math.cos(t), cfg.alpha * math.sin(t), cfg.approach_z])
        for t in cfg.thetas
    ]


def run_exploration(patch: TerrainPatch, p_star, cfg: ExplorationConfig,
                    noise: NoiseModel, rng: Rng) -> ContactSet:
    points = []
    for i, target in enumerate(probe_targets(p_star, cfg)):
        try:
            points.append(contact_at(patch, target[:2], noise, rng))
        except OutOfPatchError as exc:
            raise OutOfPatchError(f"probe {i} missed the patch: {exc}", probe_index=i) from exc
    return ContactSet(points=points, target=vec3(p_star))
