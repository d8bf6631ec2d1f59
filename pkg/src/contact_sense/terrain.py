"""Ground-truth planar terrain patches used by the probe simulator."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, OutOfPatchError
from .mathcore import Rng, is_unit, vec3


@dataclass(frozen=True)
class NoiseModel:
    sigma_contact: float = 0.002  # m, isotropic on contact positions
    sigma_velocity: float = 0.002  # m/s, on observed foot velocity

    def __post_init__(self):
        for name in ("sigma_contact", "sigma_velocity"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidInputError(f"{name} must be finite and >= 0, got {v}")


NOISELESS = NoiseModel(0.0, 0.0)


@dataclass(frozen=True)
class TerrainPatch:
    true_normal: np.ndarray
    true_friction: float
    extent: float
    origin: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "origin", vec3(self.origin))
        object.__setattr__(self, "true_normal", vec3(self.true_normal))
        if not is_unit(self.true_normal):
            raise InvalidInputError("true_normal must be a unit vector")
        if not self.true_normal[2] > 0:
            raise InvalidInputError("true_normal must face upward")
        if not 0 < self.true_friction <= 2:
            raise InvalidInputError(f"true_friction must be in (0, 2], got {self.true_friction}")
        if not self.extent > 0:
            raise InvalidInputError(f"extent must be > 0, got {self.extent}")

    def height_at(self, x: float, y: float) -> float:
        n, o = self.true_normal, self.origin
        return o[2] - (n[0] * (x - o[0]) + n[1] * (y - o[1])) / n[2]

    def contains(self, x: float, y: float) -> bool:
        return max(abs(x - self.origin[0]), abs(y - self.origin[1])) <= self.extent


def make_wedge(inclination: float, friction: float, extent: float = 0.25) -> TerrainPatch:
    """Plane ``z = x tan(inclination)`` through the origin, inclined along +x."""
    if not abs(inclination) < math.pi / 2:
        raise InvalidInputError(f"inclination must satisfy |theta| < pi/2, got {inclination}")
    normal = np.array([-math.sin(inclination), 0.0, math.cos(inclination)])
    return TerrainPatch(true_normal=normal, true_friction=friction, extent=extent)


def contact_at(patch: TerrainPatch, xy, noise: NoiseModel, rng: Rng) -> np.ndarray:
    x, y = float(xy[0]), float(xy[1])
    if not patch.contains(x, y):
        raise OutOfPatchError(f"query ({x}, {y}) lies outside the patch extent {patch.extent}")
    point = np.array([x, y, patch.height_at(x, y)])
    if noise.sigma_contact > 0:
        point = point + rng.gaussian3(noise.sigma_contact)
    return point


def slips(patch: TerrainPatch, tangential_mag: float, normal_mag: float) -> bool:
    """Coulomb slip test against the true friction; the cone boundary sticks."""
    if tangential_mag < 0 or normal_mag < 0:
        raise InvalidInputError("force magnitudes must be nonnegative")
    return tangential_mag > patch.true_friction * normal_mag
