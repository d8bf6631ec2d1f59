"""Surface normal estimation from probed contact points.

The normal is the eigenvector of ``A = sum_k v_k v_k^T`` with the smallest
eigenvalue, where the ``v_k`` are all pairwise differences of contact points.
Confidence is tracked with a Normal-Gamma posterior over the scalar residuals
``v_k . n``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DegenerateDataError, InsufficientDataError, InvalidInputError
from .exploration import ContactSet, ExplorationConfig, run_exploration
from .mathcore import Rng, student_t_cdf, sym_eig3, unit_vec3, vec3
from .terrain import NoiseModel, TerrainPatch

TAU_NOISELESS = 1e-6
TAU_NOISY = 1e-2


class RankClass(enum.Enum):
    SURFACE = "surface"
    LINE = "line"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class ContactVectorSet:
    vectors: np.ndarray  # (v, 3)

    def __len__(self):
        return self.vectors.shape[0]

    def scaled(self, length: float) -> "ContactVectorSet":
        return ContactVectorSet(self.vectors / length)


@dataclass(frozen=True)
class NormalEstimate:
    normal: np.ndarray
    singular_values: np.ndarray  # eigenvalues of D D^T, ascending
    rank_class: RankClass


@dataclass(frozen=True)
class NormalGammaState:
    n_tilde: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    kappa: float = 1.0
    alpha: float = 0.1
    beta: float = 0.1
    step: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n_tilde", vec3(self.n_tilde))
        for name in ("kappa", "alpha", "beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidInputError(f"{name} must be positive and finite, got {v}")

    def direction(self) -> np.ndarray:
        return unit_vec3(self.n_tilde)


DEFAULT_PRIOR = NormalGammaState()


def contact_vectors(points) -> ContactVectorSet:
    """All pairwise differences ``c_i - c_j`` for ``i < j``."""
    pts = points.as_array() if isinstance(points, ContactSet) else np.asarray(points, float).reshape(-1, 3)
    m = pts.shape[0]
    if m < 2:
        raise InsufficientDataError(f"need at least 2 contact points, got {m}")
    i, j = np.array(list(combinations(range(m), 2))).T
    return ContactVectorSet(pts[i] - pts[j])


def classify_rank(eigenvalues, tau: float) -> RankClass:
    lam_max = float(eigenvalues[-1])
    n_zero = int(np.sum(np.asarray(eigenvalues) <= tau * lam_max))
    if n_zero == 1:
        return RankClass.SURFACE
    if n_zero == 2:
        return RankClass.LINE
    return RankClass.DEGENERATE


def estimate_normal(d: ContactVectorSet, tau: float = TAU_NOISELESS) -> NormalEstimate:
    if len(d) == 0:
        raise InsufficientDataError("no contact vectors")
    a = d.vectors.T @ d.vectors
    eig = sym_eig3(a)
    lam = eig.eigenvalues
    if lam[-1] <= 0.0:
        raise DegenerateDataError("all contact points coincide")
    n = eig.vector(0)
    if n[2] < 0:
        n = -n
    return NormalEstimate(normal=n, singular_values=lam, rank_class=classify_rank(lam, tau))


def ng_update(state: NormalGammaState, d: ContactVectorSet, n_hat,
              prior: NormalGammaState = DEFAULT_PRIOR) -> NormalGammaState:
    """One Normal-Gamma hyperparameter update for ``k = len(d)`` residuals.

    The update is taken against ``prior`` (the configured initial values), so
    calling it with a pooled vector set gives the batch posterior. ``state``
    only contributes its step counter.
    """
    k = len(d)
    if k == 0:
        raise InsufficientDataError("ng_update needs at least one contact vector")
    n = vec3(n_hat)
    k0, n0, a0, b0 = prior.kappa, prior.n_tilde, prior.alpha, prior.beta
    residuals = d.vectors @ n
    dev = n - n0
    return NormalGammaState(
        n_tilde=(k0 * n0 + k * n) / (k0 + k),
        kappa=k0 + k,
        alpha=a0 + 0.5 * k,
        beta=b0 + 0.5 * float(residuals @ residuals) + k0 * k * float(dev @ dev) / (2.0 * (k0 + k)),
        step=state.step + k,
    )


def predictive_scale(state: NormalGammaState) -> float:
    return math.sqrt(state.beta * (state.kappa + 1.0) / (state.alpha * state.kappa))


def ng_confidence(state: NormalGammaState, residual_tol: float) -> float:
    """Posterior-predictive mass of a new residual in ``[-tol, tol]``."""
    if residual_tol < 0:
        raise InvalidInputError(f"residual_tol must be >= 0, got {residual_tol}")
    if residual_tol == 0:
        return 0.0
    t = residual_tol / predictive_scale(state)
    return max(0.0, 2.0 * student_t_cdf(t, 2.0 * state.alpha) - 1.0)


@dataclass(frozen=True)
class NormalRound:
    round: int
    k: int
    n_tilde: np.ndarray
    kappa: float
    alpha: float
    beta: float
    confidence: float
    normal: np.ndarray
    rank_class: RankClass


@dataclass
class NormalResult:
    estimate: NormalEstimate | None
    state: NormalGammaState
    rounds: int
    converged: bool
    contacts: ContactSet | None = None
    trace: list = field(default_factory=list)


def estimate_until_confident(patch: TerrainPatch, p_star, cfg: ExplorationConfig,
                             noise: NoiseModel, rng: Rng, eps_lambda: float = 0.95,
                             max_rounds: int = 10, residual_tol: float = 0.3,
                             tau: float | None = None,
                             prior: NormalGammaState = DEFAULT_PRIOR) -> NormalResult:
    """Probe in rounds, pooling contacts, until the normal estimate is confident.

    Residuals fed to the posterior are measured in units of the probe radius
    ``cfg.alpha``, so ``residual_tol`` is dimensionless. Convergence requires
    a SURFACE rank class and ``ng_confidence >= eps_lambda``.
    """
    if not 0 < eps_lambda < 1:
        raise InvalidInputError(f"eps_lambda must lie in (0, 1), got {eps_lambda}")
    if tau is None:
        tau = TAU_NOISELESS if noise.sigma_contact == 0 else TAU_NOISY
    contacts = None
    estimate = None
    state = prior
    trace = []
    rounds = 0
    max_rounds = min(max_rounds, cfg.max_probes // len(cfg.thetas))
    while rounds < max_rounds:
        batch = run_exploration(patch, p_star, cfg, noise, rng)
        contacts = batch if contacts is None else contacts.extended(batch)
        rounds += 1
        d = contact_vectors(contacts)
        estimate = estimate_normal(d, tau=tau)
        state = ng_update(prior, d.scaled(cfg.alpha), estimate.normal, prior)
        conf = ng_confidence(state, residual_tol)
        trace.append(NormalRound(rounds, len(d), state.n_tilde, state.kappa, state.alpha,
                                 state.beta, conf, estimate.normal, estimate.rank_class))
        if estimate.rank_class is RankClass.SURFACE and conf >= eps_lambda:
            return NormalResult(estimate, state, rounds, True, contacts, trace)
    return NormalResult(estimate, state, rounds, False, contacts, trace)


def squared_error(n_hat, n_true) -> float:
    e = np.asarray(n_hat, float) - np.asarray(n_true, float)
    return float(e @ e)
