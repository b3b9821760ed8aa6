"""Numeric substrate: SPD matrix helpers, Lambert W, root finding, finite differences."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _kernels


class DomainError(ValueError):
    """Input lies outside the domain of an operation or generator."""


class ConvergenceError(RuntimeError):
    """An iterative scheme failed to converge; carries the last iterate."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class AmbiguityError(RuntimeError):
    """The requested minimizer is not unique (flat objective detected)."""


@dataclass(frozen=True)
class ToleranceConfig:
    tol_sym: float = 1e-10
    tol_root: float = 1e-12
    tol_psd: float = 1e-9
    max_iter: int = 200

    def __post_init__(self):
        if min(self.tol_sym, self.tol_root, self.tol_psd) <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


DEFAULT_TOL = ToleranceConfig()


def as_vector(x):
    """Coerce to a 1-d float array, rejecting NaN/Inf entries."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


@dataclass(frozen=True)
class SpdMatrix:
    """Symmetric positive-definite matrix, validated on construction."""

    entries: np.ndarray
    tol_sym: float = DEFAULT_TOL.tol_sym

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > self.tol_sym * scale:
            raise DomainError("matrix is not symmetric within tolerance")
        m = 0.5 * (m + m.T)
        if np.linalg.eigvalsh(m).min() <= 0:
            raise DomainError("matrix is not positive definite")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self):
        return self.entries.shape[0]


def lambert_w0(x):
    """Principal branch of the Lambert W function (w >= -1, x >= -1/e)."""
    if x < -math.exp(-1.0):
        raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
    return float(_kernels.lambert_w0_scalar(float(x)))


def spd_sqrt(m: SpdMatrix) -> SpdMatrix:
    """Symmetric square root via eigendecomposition."""
    vals, vecs = np.linalg.eigh(m.entries)
    root = (vecs * np.sqrt(vals)) @ vecs.T
    return SpdMatrix(root)


def spd_inv(m: SpdMatrix) -> SpdMatrix:
    vals, vecs = np.linalg.eigh(m.entries)
    return SpdMatrix((vecs / vals) @ vecs.T)


def loewner_geq(a, b, tol=DEFAULT_TOL.tol_psd):
    """True iff A - B is positive semidefinite up to -tol on the spectrum."""
    a = a.entries if isinstance(a, SpdMatrix) else np.asarray(a, dtype=float)
    b = b.entries if isinstance(b, SpdMatrix) else np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = 0.5 * (a + a.T) - 0.5 * (b + b.T)
    return bool(np.linalg.eigvalsh(diff).min() >= -tol)


def find_root_1d(f, bracket, tol=DEFAULT_TOL.tol_root, max_iter=200):
    """Bracketed scalar root: |f(t)| <= tol or bracket width <= tol.

    Brent's method; requires a sign change on the bracket.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError(f"no sign change on bracket [{lo}, {hi}]")
    return float(brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps,
                        maxiter=max_iter))


def finite_diff_gradient(f, x, h=1e-5):
    """Central-difference gradient estimate, componentwise error O(h^2)."""
    x = as_vector(x)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def minimize_convex(value, grad, x0, in_domain=None, tol=1e-12, max_iter=200):
    """Damped Newton for a smooth strictly convex function on an open domain.

    The Hessian is approximated by central differences of ``grad``; backtracking
    keeps iterates inside ``in_domain``.  Returns the minimizer.
    """
    x = as_vector(x0).copy()
    if in_domain is not None and not in_domain(x):
        raise DomainError("initial point outside domain")
    n = x.size
    for _ in range(max_iter):
        g = as_vector(grad(x))
        gnorm = np.linalg.norm(g)
        if gnorm <= tol:
            return x
        h = np.empty((n, n))
        hstep = 1e-6 * (1.0 + np.abs(x))
        for i in range(n):
            e = np.zeros(n)
            e[i] = hstep[i]
            h[:, i] = (as_vector(grad(x + e)) - as_vector(grad(x - e))) / (2 * hstep[i])
        h = 0.5 * (h + h.T)
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            step = g
        if not np.all(np.isfinite(step)) or float(step @ g) <= 0:
            step = g
        t = 1.0
        fx = value(x)
        for _ in range(60):
            cand = x - t * step
            if (in_domain is None or in_domain(cand)):
                fc = value(cand)
                if np.isfinite(fc) and fc <= fx - 1e-4 * t * float(step @ g):
                    break
            t *= 0.5
        else:
            # cannot make progress; accept current point if gradient is tiny
            if gnorm <= 1e-8:
                return x
            raise ConvergenceError("line search failed", last_iterate=x)
        x = cand
    g = as_vector(grad(x))
    if np.linalg.norm(g) <= max(tol, 1e-9):
        return x
    raise ConvergenceError("Newton did not converge", last_iterate=x)
