"""Friction-cone math and Beta-Bernoulli friction estimation by stick-slip probing.

Sign conventions: ``f_w`` is the force the foot exerts on the ground and the
ground reaction is ``lambda_c = -f_w``. The normal push demanded for a trial
friction ``mu`` points into the surface (along ``-n``) with magnitude
``|f_par| / mu``, which puts the reaction exactly on the cone boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, InsufficientDataError, InvalidInputError, InvalidReactionError
from .exploration import ContactSet
from .mathcore import Rng, project_tangent, reg_inc_beta, vec3
from .terrain import NoiseModel, TerrainPatch, slips

CONE_SLACK = 1e-12


@dataclass(frozen=True)
class FrictionCone:
    normal: np.ndarray
    mu: float

    def __post_init__(self):
        if not 0 < self.mu <= 2:
            raise InvalidInputError(f"mu must be in (0, 2], got {self.mu}")


@dataclass(frozen=True)
class ForceDecomposition:
    f_perp: np.ndarray
    f_par: np.ndarray


@dataclass(frozen=True)
class ImpedanceGains:
    k_spring: float = 500.0  # N/m
    d_damp: float = 20.0  # N s/m

    def __post_init__(self):
        if not self.k_spring > 0:
            raise InvalidInputError("k_spring must be > 0")
        if not self.d_damp >= 0:
            raise InvalidInputError("d_damp must be >= 0")


@dataclass(frozen=True)
class SlipObservation:
    z: int
    projected_error_norm: float


@dataclass(frozen=True)
class BetaState:
    a: float = 1.0
    b: float = 1.0
    mu: float = 1.0
    step: int = 0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidInputError(f"shape parameters must be positive, got a={self.a}, b={self.b}")
        if not 0 <= self.mu <= 1:
            raise InvalidInputError(f"mu must lie in [0, 1], got {self.mu}")

    def mean(self) -> float:
        return self.a / (self.a + self.b)

    def variance(self) -> float:
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))


def decompose(f, n_hat) -> ForceDecomposition:
    f = vec3(f)
    n = np.asarray(n_hat, float)
    f_perp = (n @ f) * n
    return ForceDecomposition(f_perp=f_perp, f_par=f - f_perp)


def in_cone(lambda_c, cone: FrictionCone) -> bool:
    lam = vec3(lambda_c)
    normal = float(cone.normal @ lam)
    if normal < 0:
        raise InvalidReactionError(f"reaction pulls into the surface (normal component {normal})")
    tangential = float(np.linalg.norm(project_tangent(lam, cone.normal)))
    return cone.mu * normal + CONE_SLACK >= tangential


def required_normal_force(f_par, mu: float, n_hat) -> np.ndarray:
    """Normal push that puts the reaction on the cone boundary for friction ``mu``."""
    if not mu > 0:
        raise DomainError(f"mu must be > 0, got {mu}")
    mag = float(np.linalg.norm(vec3(f_par))) / mu
    return -mag * np.asarray(n_hat, float)


def commanded_tangential_force(p_desired, p, v, gains: ImpedanceGains, n_hat) -> np.ndarray:
    """Projected PD impedance law; the inertial term is dropped (quasi-static probing)."""
    err = vec3(p_desired) - vec3(p)
    raw = gains.k_spring * err - gains.d_damp * vec3(v)
    return project_tangent(raw, n_hat)


def detect_slip(v_desired, v_observed, n_hat, eps: float) -> SlipObservation:
    """Binary observation: z=1 when the foot failed to follow the command (held by friction)."""
    v_star = vec3(v_desired)
    if not np.any(v_star):
        raise InvalidInputError("desired velocity must be nonzero")
    if not eps > 0:
        raise InvalidInputError(f"eps must be > 0, got {eps}")
    err = float(np.linalg.norm(project_tangent(v_star - vec3(v_observed), n_hat)))
    return SlipObservation(z=1 if err >= eps else 0, projected_error_norm=err)


def beta_update(state: BetaState, z: int) -> BetaState:
    if z not in (0, 1):
        raise InvalidInputError(f"z must be 0 or 1, got {z}")
    return replace(state, a=state.a + z, b=state.b + (1 - z), step=state.step + 1)


def mu_schedule(state: BetaState, z: int, delta_mu: float = 0.05, mu_min: float = 0.2) -> BetaState:
    """Lower the trial friction by ``delta_mu`` after an observed slip."""
    if not delta_mu > 0:
        raise InvalidInputError(f"delta_mu must be > 0, got {delta_mu}")
    mu = state.mu - delta_mu if z == 0 else state.mu
    # rounding keeps repeated decrements on the decimal grid
    mu = round(min(1.0, max(mu_min, mu)), 12)
    return replace(state, mu=mu)


def stop_probability(state: BetaState) -> float:
    """Posterior probability that the true friction exceeds the current trial value."""
    return 1.0 - reg_inc_beta(state.mu, state.a, state.b)


# --------------------------------------------------------------------------
# simulation loop


@dataclass(frozen=True)
class FrictionStep:
    k: int
    z: int
    mu: float  # trial friction after the schedule update
    a: float
    b: float
    p_stop: float
    mu_tested: float
    slipped: bool
    f_w: np.ndarray
    lambda_c: np.ndarray


@dataclass
class FrictionResult:
    state: BetaState
    trace: list = field(default_factory=list)
    converged: bool = False

    def state_at(self, step: int) -> BetaState:
        """Posterior after ``step`` observations; step 0 is the prior."""
        if step <= 0 or not self.trace:
            return BetaState()
        row = self.trace[min(step, len(self.trace)) - 1]
        return BetaState(a=row.a, b=row.b, mu=row.mu, step=row.k)


class _CyclePath:
    """Closed piecewise-linear path through the contact points, by arc length."""

    def __init__(self, points: np.ndarray):
        self.nodes = np.vstack([points, points[:1]])
        seg = np.linalg.norm(np.diff(self.nodes, axis=0), axis=1)
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])
        self.length = float(self.cum[-1])
        if self.length <= 0:
            raise InsufficientDataError("contact points coincide; no path to follow")

    def at(self, s: float) -> np.ndarray:
        s = s % self.length
        i = int(np.searchsorted(self.cum, s, side="right")) - 1
        i = min(i, len(self.cum) - 2)
        seg = self.cum[i + 1] - self.cum[i]
        w = 0.0 if seg == 0 else (s - self.cum[i]) / seg
        return (1 - w) * self.nodes[i] + w * self.nodes[i + 1]


def estimate_friction(patch: TerrainPatch, n_hat, contact_set: ContactSet,
                      gains: ImpedanceGains | None = None,
                      noise: NoiseModel | None = None, rng: Rng | None = None,
                      eps_mu: float = 0.9, delta_mu: float = 0.05, max_steps: int = 200,
                      speed: float = 0.05, dt: float = 0.1, slip_eps: float | None = None,
                      slip_eps_relative: float = 0.5, mu_min: float = 0.2) -> FrictionResult:
    """Stick-slip probing along the contact-point cycle until the stop rule fires.

    Each step commands a short slide of ``speed * dt`` along the path, pushes
    with the normal force that would just hold at the current trial friction,
    and lets the true terrain decide whether the foot slides. ``slip_eps``
    overrides the relative velocity threshold ``slip_eps_relative * speed``.
    """
    if len(contact_set) < 2:
        raise InsufficientDataError("friction probing needs at least 2 contact points")
    gains = gains or ImpedanceGains()
    noise = noise or NoiseModel()
    rng = rng or Rng(0)
    n = vec3(n_hat)
    eps = slip_eps if slip_eps is not None else slip_eps_relative * speed

    path = _CyclePath(contact_set.as_array())
    step_len = speed * dt
    s = 0.0
    p = path.at(0.0)
    state = BetaState()
    result = FrictionResult(state=state)

    for _ in range(max_steps):
        p_des = path.at(s + step_len)
        v_star = project_tangent(p_des - p, n) / dt
        if not np.any(v_star):
            # path segment aligned with the normal; skip ahead
            s += step_len
            continue
        f_par = commanded_tangential_force(p_des, p, np.zeros(3), gains, n)
        f_perp = required_normal_force(f_par, state.mu, n)
        f_w = f_par + f_perp
        lambda_c = -f_w

        n_true = patch.true_normal
        lam_n = max(0.0, float(n_true @ lambda_c))
        lam_t = float(np.linalg.norm(project_tangent(lambda_c, n_true)))
        slipped = slips(patch, lam_t, lam_n)

        v_obs = (v_star if slipped else np.zeros(3)) + rng.gaussian3(noise.sigma_velocity)
        obs = detect_slip(v_star, v_obs, n, eps)

        mu_tested = state.mu
        state = mu_schedule(beta_update(state, obs.z), obs.z, delta_mu, mu_min)
        p_stop = stop_probability(state)
        result.trace.append(FrictionStep(state.step, obs.z, state.mu, state.a, state.b, p_stop,
                                         mu_tested, slipped, f_w, lambda_c))
        if slipped:
            p = p_des
            s += step_len
        if p_stop > eps_mu:
            result.converged = True
            break

    result.state = state
    return result
