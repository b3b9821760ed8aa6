"""Sided, symmetrized, curved, and generalized Bregman centroids.

Closed forms (Lambert-W Jeffreys centroid, COSH centroid, matrix COSH
centroid) sit next to the generic machinery: Bregman information with its
bias-variance decomposition, right-projection search for curved centroids,
and the convex-concave (CCCP) iteration approximating symmetrized centroids.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .divergences import CurvedModel, DiscreteDensity, bregman, pointwise_divergence
from .generators import LegendreGenerator, conjugate_generator
from .numerics import (AmbiguityError, ConvergenceError, DomainError, SpdMatrix,
                       as_vector, find_root_1d, lambert_w0, minimize_convex,
                       spd_inv, spd_sqrt)

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class WeightedParamSet:
    """n parameter points with a strictly positive weight vector summing to 1."""

    points: list
    weights: np.ndarray

    def __post_init__(self):
        pts = [p if isinstance(p, SpdMatrix) else as_vector(p) for p in self.points]
        w = as_vector(self.weights)
        if len(pts) != w.size or len(pts) < 1:
            raise ValueError("need one weight per point, n >= 1")
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")
        if abs(float(np.sum(w)) - 1.0) > _WEIGHT_TOL:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return len(self.points)


def uniform_set(points) -> WeightedParamSet:
    n = len(points)
    return WeightedParamSet(points, np.full(n, 1.0 / n))


@dataclass(frozen=True)
class CccpConfig:
    epsilon: float = 1e-4
    max_rounds: int = 200000
    convergence_tol: float = 1e-12
    mode: str = "primal"  # primal | dual | mixed

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.mode not in ("primal", "dual", "mixed"):
            raise ValueError(f"unknown mode {self.mode!r}")


# ---------------------------------------------------------------------------
# sided centroids

def right_centroid(pset: WeightedParamSet):
    """Weighted arithmetic mean; generator independent."""
    return sum(w * p for w, p in zip(pset.weights, pset.points))


def left_centroid(g: LegendreGenerator, pset: WeightedParamSet):
    """(grad F)^{-1} of the dual mean; harmonic mean for the Burg generator."""
    eta_bar = sum(w * g.grad(p) for w, p in zip(pset.weights, pset.points))
    return g.grad_inv(eta_bar)


def generalized_left_centroid(gens, pset: WeightedParamSet):
    """Minimizer of sum w_i B_{F_i}(theta : theta_i) for per-point generators.

    Solves grad Fbar(theta) = sum w_i grad F_i(theta_i) by damped Newton on the
    strictly convex objective; all generators must share one domain.
    """
    if len(gens) != pset.n:
        raise ValueError("need one generator per point")
    w = pset.weights
    target = sum(wi * gi.grad(p) for wi, gi, p in zip(w, gens, pset.points))

    def fbar(th):
        return sum(wi * gi.value(th) for wi, gi in zip(w, gens))

    def grad_fbar(th):
        return sum(wi * gi.grad(th) for wi, gi in zip(w, gens))

    def in_dom(th):
        return all(gi.in_domain(th) for gi in gens)

    x0 = gens[0].interior_point
    return minimize_convex(
        value=lambda th: fbar(th) - float(th @ target),
        grad=lambda th: grad_fbar(th) - target,
        x0=x0, in_domain=in_dom, tol=1e-11, max_iter=300)


# ---------------------------------------------------------------------------
# Bregman information

def bregman_information(g: LegendreGenerator, pset: WeightedParamSet) -> float:
    """Minimal average divergence, attained at the center of mass."""
    bar = right_centroid(pset)
    return sum(w * bregman(g, p, bar) for w, p in zip(pset.weights, pset.points))


def jensen_diversity(g: LegendreGenerator, pset: WeightedParamSet) -> float:
    """sum w_i F(theta_i) - F(theta_bar); equals the Bregman information."""
    bar = right_centroid(pset)
    return sum(w * g.value(p) for w, p in zip(pset.weights, pset.points)) - g.value(bar)


def bias_variance(g: LegendreGenerator, pset: WeightedParamSet, theta):
    """(information, bias) with info + bias = sum w_i B_F(theta_i : theta)."""
    theta = as_vector(theta)
    info = bregman_information(g, pset)
    bias = bregman(g, right_centroid(pset), theta)
    return info, bias


# ---------------------------------------------------------------------------
# curved centroids (right Bregman projection)

def _descend(objective, x0, lo, hi, max_iter=400, gtol=1e-11):
    """Finite-difference gradient descent with backtracking, box-agnostic."""
    x = as_vector(x0).astype(float)
    h = 1e-6
    fx = objective(x)
    for _ in range(max_iter):
        grad = np.empty_like(x)
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = h
            grad[i] = (objective(x + e) - objective(x - e)) / (2 * h)
        gn = np.linalg.norm(grad)
        if gn <= gtol:
            break
        t = 1.0
        for _ in range(60):
            cand = x - t * grad
            fc = objective(cand)
            if np.isfinite(fc) and fc < fx - 1e-4 * t * gn * gn:
                break
            t *= 0.5
        else:
            break
        x, fx = cand, fc
    return x, fx


def curved_centroid(g: LegendreGenerator, model: CurvedModel,
                    uset: WeightedParamSet, init, n_starts=9,
                    ambiguity_tol=1e-8):
    """Right Bregman projection of the center of mass onto the model.

    Minimizes B_F(theta_bar : theta(u)) by multi-start descent (init plus
    deterministic perturbations).  A flat objective (gradient below
    ``ambiguity_tol`` at 16 equispaced samples) raises AmbiguityError since
    the projection is then non-unique.
    """
    init = as_vector(init)
    bar = sum(w * model(u) for w, u in zip(uset.weights, uset.points))
    lo, hi = model.bounds

    def objective(u):
        try:
            return bregman(g, bar, model(u))
        except (DomainError, FloatingPointError):
            return math.inf

    # flat-objective detection on an equispaced sample of the box
    flat = True
    h = 1e-6
    for k in range(16):
        u = lo + (k + 0.5) / 16.0 * (hi - lo)
        gnorm = 0.0
        for i in range(u.size):
            e = np.zeros_like(u)
            e[i] = h
            fp, fm = objective(u + e), objective(u - e)
            if not (np.isfinite(fp) and np.isfinite(fm)):
                flat = False
                break
            gnorm += ((fp - fm) / (2 * h)) ** 2
        else:
            if math.sqrt(gnorm) > ambiguity_tol:
                flat = False
        if not flat:
            break
    if flat:
        raise AmbiguityError("flat projection objective: curved centroid is not unique")

    starts = [init]
    span = hi - lo
    for k in range(1, n_starts):
        starts.append(lo + ((k / n_starts) * span + (init - lo)) % span)
    best_u, best_f = None, math.inf
    for s in starts:
        if not np.isfinite(objective(s)):
            continue
        u, f = _descend(objective, s, lo, hi)
        if f < best_f:
            best_u, best_f = u, f
    if best_u is None:
        raise ConvergenceError("no feasible start for curved centroid search")
    return best_u


def pointwise_curved_centroid(f: LegendreGenerator, densities, weights,
                              family, init, measure_weights=None):
    """Projection of the mixture density onto a parametric grid family.

    ``family`` maps a parameter vector to a positive grid function (array).
    Minimizes the pointwise divergence from the mixture p_bar to p_theta.
    """
    weights = as_vector(weights)
    if len(densities) != weights.size:
        raise ValueError("need one weight per density")
    grid_n = densities[0].values.size
    mw = densities[0].measure_weights
    for d in densities:
        if d.values.size != grid_n or not np.array_equal(d.measure_weights, mw):
            raise ValueError("grid mismatch")
    p_bar = DiscreteDensity(sum(w * d.values for w, d in zip(weights, densities)), mw)
    ones = DiscreteDensity(np.ones(grid_n), mw)

    def objective(theta):
        try:
            vals = as_vector(family(theta))
            if np.any(vals <= 0):
                return math.inf
            return pointwise_divergence(f, ones, p_bar, DiscreteDensity(vals, mw))
        except (DomainError, ValueError, FloatingPointError):
            return math.inf

    theta0 = as_vector(init)
    theta, fv = _descend(objective, theta0, theta0, theta0, max_iter=2000)
    if not np.isfinite(fv):
        raise ConvergenceError("pointwise projection failed", last_iterate=theta)
    return theta


# ---------------------------------------------------------------------------
# symmetrized centroids: closed forms

def jeffreys_centroid_1d(pset: WeightedParamSet) -> float:
    """Symmetrized extended-KL centroid of positive scalars: a / W(a e / g)."""
    th = np.array([float(p[0]) if np.ndim(p) else float(p) for p in pset.points])
    if np.any(th <= 0):
        raise DomainError("points must be positive scalars")
    w = pset.weights
    a = float(w @ th)
    g = float(np.exp(w @ np.log(th)))
    return a / lambert_w0(a * math.e / g)


def jeffreys_centroid_categorical(pset: WeightedParamSet):
    """Jeffreys centroid of categorical distributions (exact Lambert-W form).

    Coordinates a_i / W((a_i/g_i) e^{1+lambda}) with a the arithmetic and g
    the normalized geometric mean; lambda is fixed by bracketed root finding
    on the normalization constraint.
    """
    pts = [as_vector(p) for p in pset.points]
    m = pts[0].size
    for p in pts:
        if p.size != m or np.any(p <= 0) or abs(float(np.sum(p)) - 1.0) > 1e-9:
            raise DomainError("points must lie in the open probability simplex")
    w = pset.weights
    a = sum(wi * p for wi, p in zip(w, pts))
    log_g = sum(wi * np.log(p) for wi, p in zip(w, pts))
    g_raw = np.exp(log_g)
    g = g_raw / float(np.sum(g_raw))

    def total(lam):
        return sum(ai / lambert_w0((ai / gi) * math.exp(1.0 + lam))
                   for ai, gi in zip(a, g)) - 1.0

    # s(lambda) is strictly decreasing; expand a bracket from 0
    lo = hi = 0.0
    s0 = total(0.0)
    if s0 > 0:
        hi = 1.0
        while total(hi) > 0:
            hi *= 2.0
            if hi > 1e6:
                raise ConvergenceError("bracketing failure for lambda")
    elif s0 < 0:
        lo = -1.0
        while total(lo) < 0:
            lo *= 2.0
            if lo < -1e6:
                raise ConvergenceError("bracketing failure for lambda")
    lam = find_root_1d(total, (lo, hi), tol=1e-15)
    c = np.array([ai / lambert_w0((ai / gi) * math.exp(1.0 + lam))
                  for ai, gi in zip(a, g)])
    return c / float(np.sum(c))


def jeffreys_objective_categorical(pset: WeightedParamSet, p) -> float:
    """sum_i w_i (KL(p_i : p) + KL(p : p_i)) on the simplex."""
    p = as_vector(p)
    total = 0.0
    for wi, pi in zip(pset.weights, pset.points):
        pi = as_vector(pi)
        total += wi * (float(np.sum(pi * np.log(pi / p)))
                       + float(np.sum(p * np.log(p / pi))))
    return total


def cosh_centroid(pset: WeightedParamSet) -> float:
    """Symmetrized Itakura-Saito centroid: sqrt(arithmetic x harmonic mean)."""
    th = np.array([float(p[0]) if np.ndim(p) else float(p) for p in pset.points])
    if np.any(th <= 0):
        raise DomainError("points must be positive scalars")
    w = pset.weights
    a = float(w @ th)
    h = 1.0 / float(w @ (1.0 / th))
    return math.sqrt(a * h)


def logdet_cosh_centroid(pset: WeightedParamSet) -> SpdMatrix:
    """Symmetrized log-det centroid: geometric mean of arithmetic and harmonic
    matrix means, Hbar^(1/2) (Hbar^(-1/2) Abar Hbar^(-1/2))^(1/2) Hbar^(1/2)."""
    mats = pset.points
    if not all(isinstance(p, SpdMatrix) for p in mats):
        raise ValueError("points must be SpdMatrix instances")
    d = mats[0].dim
    if not all(p.dim == d for p in mats):
        raise ValueError("dimension mismatch")
    w = pset.weights
    a_bar = sum(wi * p.entries for wi, p in zip(w, mats))
    h_bar = np.linalg.inv(sum(wi * np.linalg.inv(p.entries) for wi, p in zip(w, mats)))
    h_half = spd_sqrt(SpdMatrix(h_bar)).entries
    h_half_inv = np.linalg.inv(h_half)
    mid = spd_sqrt(SpdMatrix(h_half_inv @ a_bar @ h_half_inv)).entries
    return SpdMatrix(h_half @ mid @ h_half)


# ---------------------------------------------------------------------------
# CCCP approximation of symmetrized centroids

def _cccp_step(g: LegendreGenerator, pts_matrix, weights, theta, eps):
    """One convex-concave update for the symmetric eps-Jensen objective."""
    blend_a = eps * pts_matrix + (1.0 - eps) * theta
    blend_b = (1.0 - eps) * pts_matrix + eps * theta
    if g.grad_rows is not None:
        with np.errstate(invalid="ignore", divide="ignore"):
            ga = np.atleast_2d(g.grad_rows(blend_a))
            gb = np.atleast_2d(g.grad_rows(blend_b))
        if not (np.all(np.isfinite(ga)) and np.all(np.isfinite(gb))):
            raise DomainError("CCCP blend left the generator domain")
        acc = weights @ ((1.0 - eps) * ga + eps * gb)
        if g.grad_inv_rows is not None:
            with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
                nxt = np.asarray(g.grad_inv_rows(acc), dtype=float)
            if not np.all(np.isfinite(nxt)):
                raise DomainError("CCCP dual mean left the dual domain")
            return nxt
    else:
        acc = np.zeros_like(theta)
        for wi, pa, pb in zip(weights, blend_a, blend_b):
            acc = acc + wi * ((1.0 - eps) * g.grad(pa) + eps * g.grad(pb))
    return g.grad_inv(acc)


def cccp_objective(g: LegendreGenerator, pset: WeightedParamSet, eps, theta) -> float:
    """Symmetric scaled eps-Jensen objective the CCCP minimizes."""
    theta = as_vector(theta)
    total = 0.0
    for wi, p in zip(pset.weights, pset.points):
        p = as_vector(p)
        total += wi * (eps * g.value(p) + (1.0 - eps) * g.value(theta)
                       - g.value(eps * p + (1.0 - eps) * theta)
                       + eps * g.value(theta) + (1.0 - eps) * g.value(p)
                       - g.value(eps * theta + (1.0 - eps) * p))
    return total / (eps * (1.0 - eps))


def cccp_symmetrized_centroid(g: LegendreGenerator, pset: WeightedParamSet,
                              config: CccpConfig = CccpConfig()):
    """CCCP iteration toward the symmetrized Bregman centroid.

    Returns (theta, trace).  mode="dual" runs the same iteration under the
    conjugate generator on dual points and maps back; mode="mixed" alternates
    one primal and one dual round per step.  Initialization is the center of
    mass.
    """
    eps = config.epsilon
    pts = np.array([as_vector(p) for p in pset.points])
    w = pset.weights
    g_dual = conjugate_generator(g) if config.mode in ("dual", "mixed") else None
    eta_pts = (np.array([g.grad(p) for p in pts])
               if g_dual is not None else None)

    if config.mode == "dual":
        eta = w @ eta_pts
        trace = [g.grad_inv(eta)]
        for _ in range(config.max_rounds):
            eta_next = _cccp_step(g_dual, eta_pts, w, eta, eps)
            theta_next = g.grad_inv(eta_next)
            trace.append(theta_next)
            if np.linalg.norm(eta_next - eta) < config.convergence_tol:
                return theta_next, trace
            eta = eta_next
        return trace[-1], trace

    if config.mode == "primal" and g.cccp_kernel is not None:
        trace_arr = np.empty((config.max_rounds + 1, g.dim))
        rounds = int(g.cccp_kernel(pts, w, eps, config.convergence_tol,
                                   config.max_rounds, trace_arr))
        trace = [trace_arr[i].copy() for i in range(rounds + 1)]
        return trace[-1], trace

    theta = w @ pts
    trace = [theta]
    for _ in range(config.max_rounds):
        try:
            theta_next = _cccp_step(g, pts, w, theta, eps)
            if config.mode == "mixed":
                eta = g.grad(theta_next)
                eta = _cccp_step(g_dual, eta_pts, w, eta, eps)
                theta_next = g.grad_inv(eta)
        except DomainError as exc:
            raise ConvergenceError(f"CCCP iterate left the domain: {exc}",
                                   last_iterate=theta) from exc
        trace.append(theta_next)
        if np.linalg.norm(theta_next - theta) < config.convergence_tol:
            return theta_next, trace
        theta = theta_next
    return trace[-1], trace
