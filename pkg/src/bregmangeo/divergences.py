"""Divergence functionals built on Legendre generators.

Covers the plain and Fenchel-Young Bregman divergences, restrictions to
embedded parameter subspaces, the Jeffreys-type symmetrization and its
additively weighted quadratic (AWQ) relatives, pointwise divergences on
finite grids, and the Gaussian / circular-complex-normal KL divergence.
"""

import math
from dataclasses import dataclass

import numpy as np

from .generators import (LegendreGenerator, gaussian_natural_params,
                         make_gaussian_cumulant)
from .numerics import DomainError, SpdMatrix, as_vector


@dataclass(frozen=True)
class CurvedModel:
    """Embedding u -> theta(u) of a low-dimensional parameter.

    ``bounds`` gives a per-coordinate sampling box for the u-space; it is used
    by centroid search and ambiguity detection, not enforced as a hard domain.
    """

    embed: callable
    u_dim: int
    bounds: tuple  # (lo, hi) arrays of length u_dim
    in_domain: callable = staticmethod(lambda u: True)

    def __call__(self, u):
        u = as_vector(u)
        if u.size != self.u_dim or not self.in_domain(u):
            raise DomainError(f"point outside model domain: {u}")
        return as_vector(self.embed(u))


def circle_model() -> CurvedModel:
    """Unit circle theta(u) = (cos u, sin u)."""
    return CurvedModel(embed=lambda u: np.array([math.cos(u[0]), math.sin(u[0])]),
                       u_dim=1, bounds=(np.array([0.0]), np.array([2 * math.pi])))


def ellipse_model(a: float, b: float) -> CurvedModel:
    """Axis-aligned ellipse theta(u) = (a cos u, b sin u)."""
    return CurvedModel(embed=lambda u: np.array([a * math.cos(u[0]),
                                                 b * math.sin(u[0])]),
                       u_dim=1, bounds=(np.array([0.0]), np.array([2 * math.pi])))


@dataclass(frozen=True)
class DiscreteDensity:
    """Non-negative grid function with positive quadrature/counting weights."""

    values: np.ndarray
    measure_weights: np.ndarray

    def __post_init__(self):
        v = as_vector(self.values)
        w = as_vector(self.measure_weights)
        if v.size != w.size:
            raise ValueError("values and measure weights must align")
        if np.any(v < 0):
            raise ValueError("density values must be non-negative")
        if np.any(w <= 0):
            raise ValueError("measure weights must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "measure_weights", w)


# ---------------------------------------------------------------------------

def bregman(g: LegendreGenerator, theta1, theta2) -> float:
    """B_F(theta1 : theta2) = F(t1) - F(t2) - <t1 - t2, grad F(t2)>."""
    t1 = as_vector(theta1)
    t2 = as_vector(theta2)
    if g.fast_pair is not None and g.in_domain(t1) and g.in_domain(t2):
        return g.fast_pair(t1, t2)
    return g.value(t1) - g.value(t2) - float((t1 - t2) @ g.grad(t2))


def fenchel_young(g: LegendreGenerator, theta, eta) -> float:
    """Y_F(theta : eta) = F(theta) + F*(eta) - <theta, eta> >= 0."""
    t = as_vector(theta)
    e = as_vector(eta)
    return g.value(t) + g.conjugate_value(e) - float(t @ e)


def curved_divergence(g: LegendreGenerator, model: CurvedModel, u1, u2) -> float:
    """Bregman divergence restricted to the embedded parameter subspace."""
    return bregman(g, model(u1), model(u2))


def symmetrized(g: LegendreGenerator, theta1, theta2) -> float:
    """Jeffreys-Bregman divergence S_F = B_F(t1:t2) + B_F(t2:t1)."""
    t1 = as_vector(theta1)
    t2 = as_vector(theta2)
    if g.fast_pair is not None and g.in_domain(t1) and g.in_domain(t2):
        return g.fast_pair(t1, t2) + g.fast_pair(t2, t1)
    # equals <t1 - t2, grad F(t1) - grad F(t2)>; the sum form reuses checks
    return bregman(g, t1, t2) + bregman(g, t2, t1)


def jensen(g: LegendreGenerator, theta1, theta2) -> float:
    """Jensen-Bregman divergence (F(t1)+F(t2))/2 - F((t1+t2)/2)."""
    t1 = as_vector(theta1)
    t2 = as_vector(theta2)
    return 0.5 * (g.value(t1) + g.value(t2)) - g.value(0.5 * (t1 + t2))


def skew_jensen(g: LegendreGenerator, alpha: float, theta_l, theta_r) -> float:
    """Scaled skewed Jensen divergence; tends to the sided Bregman divergences
    as alpha -> 0 / 1."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    tl = as_vector(theta_l)
    tr = as_vector(theta_r)
    raw = (alpha * g.value(tl) + (1.0 - alpha) * g.value(tr)
           - g.value(alpha * tl + (1.0 - alpha) * tr))
    return raw / (alpha * (1.0 - alpha))


# ---------------------------------------------------------------------------
# additively weighted quadratic symmetrizations

def awq_divergence(g: LegendreGenerator, alpha: float, beta: float,
                   theta1, theta2) -> float:
    """S_F^(a,b) = S_F + a/2 |dtheta|^2 + b/2 |deta|^2 (a, b >= 0)."""
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be non-negative")
    t1 = as_vector(theta1)
    t2 = as_vector(theta2)
    dt = t2 - t1
    de = g.grad(t2) - g.grad(t1)
    return (float(dt @ de) + 0.5 * alpha * float(dt @ dt)
            + 0.5 * beta * float(de @ de))


def awq_feature_map(g: LegendreGenerator, alpha: float, beta: float, theta):
    """Feature map with S^(a,b) = 1/2 |Phi(t1) - Phi(t2)|^2; needs a b > 1."""
    if alpha <= 0 or beta <= 0 or alpha * beta <= 1.0:
        raise ValueError("feature map requires alpha > 0, beta > 0, alpha*beta > 1")
    t = as_vector(theta)
    eta = g.grad(t)
    sa = math.sqrt(alpha)
    return np.concatenate([sa * t + eta / sa,
                           math.sqrt((alpha * beta - 1.0) / alpha) * eta])


def awq_matrix_divergence(g: LegendreGenerator, a: SpdMatrix, b: SpdMatrix,
                          theta1, theta2) -> float:
    """Matrix-weighted AWQ divergence; reduces to the scalar form at A=aI, B=bI."""
    t1 = as_vector(theta1)
    t2 = as_vector(theta2)
    if a.dim != t1.size or b.dim != t1.size:
        raise ValueError("weight matrix dimension mismatch")
    dt = t2 - t1
    de = g.grad(t2) - g.grad(t1)
    return (float(dt @ de) + 0.5 * float(dt @ a.entries @ dt)
            + 0.5 * float(de @ b.entries @ de))


# ---------------------------------------------------------------------------
# pointwise divergences on finite grids

def pointwise_divergence(f: LegendreGenerator, w: DiscreteDensity,
                         p: DiscreteDensity, q: DiscreteDensity) -> float:
    """Weighted sum of scalar Bregman divergences over an aligned grid."""
    if f.dim != 1:
        raise ValueError("pointwise divergence needs a scalar generator")
    n = p.values.size
    if q.values.size != n or w.values.size != n:
        raise ValueError("grid mismatch")
    if not np.array_equal(p.measure_weights, q.measure_weights):
        raise ValueError("grid mismatch: measures differ")
    if np.any(q.values <= 0):
        raise DomainError("second argument must be strictly positive")
    total = 0.0
    for wi, mi, pi, qi in zip(w.values, p.measure_weights, p.values, q.values):
        total += wi * mi * bregman(f, [pi], [qi])
    return total


# ---------------------------------------------------------------------------
# Gaussian and circular complex normal KLD

def gaussian_kld(mu1, sigma1: SpdMatrix, mu2, sigma2: SpdMatrix) -> float:
    """KL divergence between multivariate normals, closed form.

    Equals the reverse Bregman divergence B_F(theta2 : theta1) under the
    Gaussian cumulant generator; that identity is the tested contract.
    """
    mu1 = as_vector(mu1)
    mu2 = as_vector(mu2)
    d = mu1.size
    s2inv = np.linalg.inv(sigma2.entries)
    dmu = mu2 - mu1
    return 0.5 * (float(np.trace(s2inv @ sigma1.entries))
                  + float(dmu @ s2inv @ dmu) - d
                  + float(np.linalg.slogdet(sigma2.entries)[1])
                  - float(np.linalg.slogdet(sigma1.entries)[1]))


def gaussian_kld_via_bregman(mu1, sigma1: SpdMatrix, mu2, sigma2: SpdMatrix) -> float:
    """Same quantity through the cumulant generator (independent route)."""
    d = as_vector(mu1).size
    g = make_gaussian_cumulant(d)
    th1 = gaussian_natural_params(mu1, sigma1)
    th2 = gaussian_natural_params(mu2, sigma2)
    return bregman(g, th2, th1)


def realify_complex(mean_re, mean_im, cov_re, cov_im):
    """Real representation of a circular complex normal.

    Returns (mu, Sigma) with mu = (Re m, Im m) and Sigma = 1/2 [[A, -B], [B, A]]
    for the complex covariance A + iB.  Complex inputs are passed as explicit
    real/imaginary parts.
    """
    a = np.asarray(cov_re, dtype=float)
    b = np.asarray(cov_im, dtype=float)
    mu = np.concatenate([as_vector(mean_re), as_vector(mean_im)])
    top = np.hstack([a, -b])
    bot = np.hstack([b, a])
    sigma = 0.5 * np.vstack([top, bot])
    return mu, SpdMatrix(sigma)


def complex_normal_kld(mean_re1, mean_im1, cov_re1, cov_im1,
                       mean_re2, mean_im2, cov_re2, cov_im2) -> float:
    """KLD between circular complex normals via their real representations."""
    mu1, s1 = realify_complex(mean_re1, mean_im1, cov_re1, cov_im1)
    mu2, s2 = realify_complex(mean_re2, mean_im2, cov_re2, cov_im2)
    return gaussian_kld(mu1, s1, mu2, s2)
