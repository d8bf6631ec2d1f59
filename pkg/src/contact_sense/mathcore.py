"""Shared numerics: 3-vectors, symmetric 3x3 eigensolver, special functions, RNG.

Vectors are plain ``numpy`` arrays of shape (3,). ``vec3`` and ``unit_vec3``
validate and coerce; nothing else in the package wraps them in a class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError

UNIT_TOL = 1e-12


def vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise InvalidInputError(f"expected 3 components, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"non-finite vector {a}")
    return a


def unit_vec3(v) -> np.ndarray:
    """Normalize ``v`` to unit length. Zero vectors are rejected."""
    a = vec3(v)
    n = math.sqrt(float(a @ a))
    if n == 0.0:
        raise InvalidInputError("cannot normalize the zero vector")
    return a / n


def is_unit(v, tol: float = UNIT_TOL) -> bool:
    a = np.asarray(v, dtype=float)
    return a.shape == (3,) and abs(math.sqrt(float(a @ a)) - 1.0) <= tol


def projector(n_hat) -> np.ndarray:
    """Tangent-plane projector ``I - n n^T`` for a unit normal."""
    n = np.asarray(n_hat, dtype=float)
    return np.eye(3) - np.outer(n, n)


def project_tangent(v, n_hat) -> np.ndarray:
    """``(I - n n^T) v`` without forming the matrix."""
    n = np.asarray(n_hat, dtype=float)
    v = np.asarray(v, dtype=float)
    return v - (n @ v) * n


# --------------------------------------------------------------------------
# symmetric 3x3 eigendecomposition


@dataclass(frozen=True)
class SymEig3:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # column i pairs with eigenvalues[i]

    def vector(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i].copy()


def sym_eig3(a, sym_tol: float = 1e-12, max_sweeps: int = 64) -> SymEig3:
    """Eigendecomposition of a real symmetric 3x3 matrix by cyclic Jacobi rotations."""
    m = np.array(a, dtype=float)
    if m.shape != (3, 3):
        raise InvalidInputError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    scale = float(np.max(np.abs(m)))
    if float(np.max(np.abs(m - m.T))) > sym_tol * max(scale, np.finfo(float).tiny):
        raise InvalidInputError("matrix is not symmetric")
    m = 0.5 * (m + m.T)
    v = np.eye(3)

    fro = math.sqrt(float(np.sum(m * m)))
    for _ in range(max_sweeps):
        off = m[0, 1] ** 2 + m[0, 2] ** 2 + m[1, 2] ** 2
        if off <= (1e-17 * fro) ** 2:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = m[p, q]
            if apq == 0.0:
                continue
            h = m[q, q] - m[p, p]
            if abs(h) + 100.0 * abs(apq) == abs(h):
                # off-diagonal negligible against the gap; avoids overflow in theta**2
                t = apq / h
            else:
                theta = h / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            rot = np.eye(3)
            rot[p, p] = c
            rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            m = rot.T @ m @ rot
            m[p, q] = m[q, p] = 0.0
            v = v @ rot

    w = np.diag(m).copy()
    order = np.argsort(w, kind="stable")
    vecs = v[:, order]
    # re-orthonormalize against accumulated rounding
    q, r = np.linalg.qr(vecs)
    q = q * np.sign(np.diag(r))
    return SymEig3(eigenvalues=w[order], eigenvectors=q)


# --------------------------------------------------------------------------
# special functions


def log_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def log_beta(a: float, b: float) -> float:
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


_CF_EPS = 1e-16
_CF_FPMIN = 1e-300


def _beta_cf(x: float, a: float, b: float, max_iter: int = 20000) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_FPMIN:
        d = _CF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise DomainError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _reg_inc_beta(x: float, y: float, a: float, b: float) -> float:
    # y == 1 - x, passed separately so callers can supply it without cancellation
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = a * math.log(x) + b * math.log(y) - log_beta(a, b)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b) / a
    return 1.0 - front * _beta_cf(y, b, a) / b


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if not (a > 0 and b > 0) or not math.isfinite(a) or not math.isfinite(b):
        raise DomainError(f"reg_inc_beta needs a, b > 0, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reg_inc_beta needs 0 <= x <= 1, got {x}")
    return min(1.0, max(0.0, _reg_inc_beta(x, 1.0 - x, a, b)))


def beta_pdf(x: float, a: float, b: float) -> float:
    if not (a > 0 and b > 0):
        raise DomainError(f"beta_pdf needs a, b > 0, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        return 0.0
    if (x == 0.0 and a < 1.0) or (x == 1.0 and b < 1.0):
        return math.inf
    if (x == 0.0 and a > 1.0) or (x == 1.0 and b > 1.0):
        return 0.0
    log_p = -log_beta(a, b)
    if a != 1.0:
        log_p += (a - 1.0) * math.log(x)
    if b != 1.0:
        log_p += (b - 1.0) * math.log1p(-x)
    return math.exp(log_p)


def student_t_cdf(t: float, dof: float) -> float:
    if not dof > 0:
        raise DomainError(f"student_t_cdf needs dof > 0, got {dof}")
    if math.isnan(t):
        raise DomainError("student_t_cdf got NaN")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    t2 = t * t
    denom = dof + t2
    tail = 0.5 * _reg_inc_beta(dof / denom, t2 / denom, 0.5 * dof, 0.5)
    return tail if t < 0 else 1.0 - tail


# --------------------------------------------------------------------------
# RNG


class Rng:
    """Seeded counter-based generator (Philox). One instance per simulation run."""

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.Philox(seed))

    def normal(self, scale: float = 1.0, size=None):
        return self._gen.normal(0.0, scale, size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._gen.uniform(low, high, size)

    def gaussian3(self, sigma: float) -> np.ndarray:
        """Isotropic 3D Gaussian noise. Always consumes three draws, even for sigma == 0."""
        return sigma * self._gen.standard_normal(3)
