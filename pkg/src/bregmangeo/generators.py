"""Legendre-type Bregman generators and restriction operators.

A generator bundles the potential F, its gradient (the primal-to-dual map),
the inverse gradient, the convex conjugate, and domain predicates.  All
concrete constructors expose analytic gradients and inverse gradients where a
closed form exists; matrix-valued parameters are packed into flat vectors via
scaled symmetric storage so the Euclidean inner product of packed vectors
equals the Frobenius trace pairing of the matrices.
"""

import math

import numpy as np

from . import _kernels
from .numerics import (DomainError, SpdMatrix, as_vector, find_root_1d,
                       minimize_convex)

_MARGIN = 1e-12

_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# symmetric matrix packing

def sym_dim(d):
    return d * (d + 1) // 2


def mat_dim(k):
    d = int(round((math.sqrt(8 * k + 1) - 1) / 2))
    if sym_dim(d) != k:
        raise ValueError(f"{k} is not a triangular number")
    return d


def pack_sym(m):
    """Flatten a symmetric matrix; off-diagonals scaled by sqrt(2) so that
    <pack(A), pack(B)> = tr(A B)."""
    m = np.asarray(m, dtype=float)
    d = m.shape[0]
    iu = np.triu_indices(d)
    v = m[iu].copy()
    v[iu[0] != iu[1]] *= _SQRT2
    return v


def unpack_sym(v):
    v = as_vector(v)
    d = mat_dim(v.size)
    m = np.zeros((d, d))
    iu = np.triu_indices(d)
    vals = v.copy()
    off = iu[0] != iu[1]
    vals[off] /= _SQRT2
    m[iu] = vals
    m.T[iu] = vals
    return m


# ---------------------------------------------------------------------------

class LegendreGenerator:
    """A strictly convex differentiable potential of Legendre type."""

    def __init__(self, dim, name, value, grad, grad_inv, conjugate_value,
                 in_domain, in_dual_domain, interior_point):
        self.dim = dim
        self.name = name
        self._value = value
        self._grad = grad
        self._grad_inv = grad_inv
        self._conjugate_value = conjugate_value
        self._in_domain = in_domain
        self._in_dual_domain = in_dual_domain
        self.interior_point = as_vector(interior_point)
        self.fast_pair = None  # optional (p, q) -> B_F(p:q) kernel
        # optional unvalidated row-wise maps (n, dim) -> (n, dim) for hot loops
        self.grad_rows = None
        self.grad_inv_rows = None
        self.cccp_kernel = None  # optional compiled primal-CCCP loop

    # -- domain ------------------------------------------------------------
    def in_domain(self, theta):
        theta = as_vector(theta)
        return theta.size == self.dim and bool(self._in_domain(theta))

    def in_dual_domain(self, eta):
        eta = as_vector(eta)
        return eta.size == self.dim and bool(self._in_dual_domain(eta))

    def _require(self, theta):
        theta = as_vector(theta)
        if theta.size != self.dim:
            raise DomainError(
                f"{self.name}: expected dimension {self.dim}, got {theta.size}")
        if not self._in_domain(theta):
            raise DomainError(f"{self.name}: point outside domain: {theta}")
        return theta

    def _require_dual(self, eta):
        eta = as_vector(eta)
        if eta.size != self.dim:
            raise DomainError(
                f"{self.name}: expected dimension {self.dim}, got {eta.size}")
        if not self._in_dual_domain(eta):
            raise DomainError(f"{self.name}: point outside dual domain: {eta}")
        return eta

    # -- evaluation --------------------------------------------------------
    def value(self, theta):
        return float(self._value(self._require(theta)))

    def grad(self, theta):
        return as_vector(self._grad(self._require(theta)))

    def grad_inv(self, eta):
        return as_vector(self._grad_inv(self._require_dual(eta)))

    def conjugate_value(self, eta):
        return float(self._conjugate_value(self._require_dual(eta)))

    def __repr__(self):
        return f"LegendreGenerator({self.name}, dim={self.dim})"


def _generic_conjugate(value, grad_inv):
    def conj(eta):
        theta = grad_inv(eta)
        return float(theta @ eta) - value(theta)
    return conj


def _separable(name, m, f, fp, fp_inv, fstar, dom, dual_dom, interior):
    """Build a separable generator from scalar callables (vectorized)."""
    g = LegendreGenerator(
        dim=m, name=name,
        value=lambda th: float(np.sum(f(th))),
        grad=lambda th: fp(th),
        grad_inv=lambda et: fp_inv(et),
        conjugate_value=lambda et: float(np.sum(fstar(et))),
        in_domain=lambda th: bool(np.all(dom(th))),
        in_dual_domain=lambda et: bool(np.all(dual_dom(et))),
        interior_point=np.full(m, interior, dtype=float),
    )
    g.grad_rows = fp
    g.grad_inv_rows = fp_inv
    return g


# ---------------------------------------------------------------------------
# concrete generators

def make_quadratic(q: SpdMatrix) -> LegendreGenerator:
    """F(theta) = 1/2 theta^T Q theta on all of R^m."""
    qm = q.entries
    qinv = np.linalg.inv(qm)
    m = q.dim
    g = LegendreGenerator(
        dim=m, name="quadratic",
        value=lambda th: 0.5 * float(th @ qm @ th),
        grad=lambda th: qm @ th,
        grad_inv=lambda et: qinv @ et,
        conjugate_value=lambda et: 0.5 * float(et @ qinv @ et),
        in_domain=lambda th: True,
        in_dual_domain=lambda et: True,
        interior_point=np.zeros(m),
    )
    g.grad_rows = lambda rows: rows @ qm
    g.grad_inv_rows = lambda rows: rows @ qinv
    return g


def make_extended_kl(m: int) -> LegendreGenerator:
    """F = sum theta log theta - theta on the positive orthant (extended KL)."""
    g = _separable(
        "extended-kl", m,
        f=lambda th: th * np.log(th) - th,
        fp=np.log,
        fp_inv=np.exp,
        fstar=np.exp,
        dom=lambda th: th > _MARGIN,
        dual_dom=lambda et: np.isfinite(et),
        interior=1.0,
    )
    g.fast_pair = lambda p, q: float(_kernels.extended_kl_sum(
        np.ascontiguousarray(p), np.ascontiguousarray(q)))
    return g


def make_burg(m: int) -> LegendreGenerator:
    """F = -sum log theta (Burg negentropy); B_F is the Itakura-Saito divergence."""
    g = _separable(
        "burg", m,
        f=lambda th: -np.log(th),
        fp=lambda th: -1.0 / th,
        fp_inv=lambda et: -1.0 / et,
        fstar=lambda et: -1.0 - np.log(-et),
        dom=lambda th: th > _MARGIN,
        dual_dom=lambda et: et < -_MARGIN,
        interior=1.0,
    )
    g.fast_pair = lambda p, q: float(_kernels.itakura_saito_sum(
        np.ascontiguousarray(p), np.ascontiguousarray(q)))
    return g


def make_logdet(d: int) -> LegendreGenerator:
    """F = -log det Theta on the SPD cone, parameters in packed symmetric storage."""
    k = sym_dim(d)

    def spd_ok(v):
        m = unpack_sym(v)
        return np.linalg.eigvalsh(m).min() > _MARGIN

    return LegendreGenerator(
        dim=k, name="logdet",
        value=lambda v: -float(np.linalg.slogdet(unpack_sym(v))[1]),
        grad=lambda v: pack_sym(-np.linalg.inv(unpack_sym(v))),
        grad_inv=lambda h: pack_sym(-np.linalg.inv(unpack_sym(h))),
        conjugate_value=lambda h: -d - float(np.linalg.slogdet(-unpack_sym(h))[1]),
        in_domain=spd_ok,
        in_dual_domain=lambda h: np.linalg.eigvalsh(-unpack_sym(h)).min() > _MARGIN,
        interior_point=pack_sym(np.eye(d)),
    )


def make_shannon_simplex(m: int) -> LegendreGenerator:
    """Non-separable Shannon negentropy on the open (m-1)-simplex.

    The parameter is the first m-1 coordinates of a probability vector; the
    gradient is the log-ratio map and the conjugate is log(1 + sum exp).
    """
    if m < 2:
        raise ValueError("need m >= 2")

    def last(a):
        return 1.0 - float(np.sum(a))

    def value(a):
        am = last(a)
        return float(np.sum(a * np.log(a))) + am * math.log(am)

    def grad(a):
        return np.log(a / last(a))

    def grad_inv(et):
        ex = np.exp(et)
        return ex / (1.0 + np.sum(ex))

    g = LegendreGenerator(
        dim=m - 1, name="shannon-simplex",
        value=value, grad=grad, grad_inv=grad_inv,
        conjugate_value=lambda et: math.log1p(float(np.sum(np.exp(et)))),
        in_domain=lambda a: bool(np.all(a > _MARGIN)) and last(a) > _MARGIN,
        in_dual_domain=lambda et: True,
        interior_point=np.full(m - 1, 1.0 / m),
    )
    g.grad_rows = lambda rows: np.log(
        rows / (1.0 - np.sum(rows, axis=-1, keepdims=True)))

    def _inv_rows(rows):
        ex = np.exp(rows)
        return ex / (1.0 + np.sum(ex, axis=-1, keepdims=True))

    g.grad_inv_rows = _inv_rows
    g.cccp_kernel = _kernels.cccp_simplex
    return g


def make_gaussian_cumulant(d: int) -> LegendreGenerator:
    """Log-partition of the d-variate Gaussian family.

    Parameter is (theta1, theta2) with theta1 in R^d and theta2 SPD, packed as
    a single vector of length d + d(d+1)/2.  The gradient is analytic; the
    inverse gradient goes through the mean/covariance reparameterization.
    """
    k = sym_dim(d)

    def split(v):
        return v[:d], unpack_sym(v[d:])

    def value(v):
        t1, t2 = split(v)
        t2inv = np.linalg.inv(t2)
        return 0.5 * (d * math.log(math.pi)
                      - float(np.linalg.slogdet(t2)[1])
                      + 0.5 * float(t1 @ t2inv @ t1))

    def grad(v):
        t1, t2 = split(v)
        t2inv = np.linalg.inv(t2)
        g1 = 0.5 * t2inv @ t1
        g2 = -0.5 * t2inv - 0.25 * np.outer(t2inv @ t1, t2inv @ t1)
        return np.concatenate([g1, pack_sym(g2)])

    def grad_inv(et):
        mu, h2 = et[:d], unpack_sym(et[d:])
        sigma = -h2 - np.outer(mu, mu)
        sinv = np.linalg.inv(sigma)
        return np.concatenate([sinv @ mu, pack_sym(0.5 * sinv)])

    def in_domain(v):
        _, t2 = split(v)
        return np.linalg.eigvalsh(t2).min() > _MARGIN

    def in_dual_domain(et):
        mu, h2 = et[:d], unpack_sym(et[d:])
        sigma = -h2 - np.outer(mu, mu)
        return np.linalg.eigvalsh(sigma).min() > _MARGIN

    g = LegendreGenerator(
        dim=d + k, name="gaussian",
        value=value, grad=grad, grad_inv=grad_inv,
        conjugate_value=None,
        in_domain=in_domain, in_dual_domain=in_dual_domain,
        interior_point=np.concatenate([np.zeros(d), pack_sym(0.5 * np.eye(d))]),
    )
    g._conjugate_value = _generic_conjugate(value, grad_inv)
    return g


def gaussian_natural_params(mu, sigma: SpdMatrix):
    """(mu, Sigma) -> packed natural parameter of the Gaussian cumulant."""
    mu = as_vector(mu)
    sinv = np.linalg.inv(sigma.entries)
    return np.concatenate([sinv @ mu, pack_sym(0.5 * sinv)])


def make_alpha_generator(alpha: float, m: int) -> LegendreGenerator:
    """Separable generator reproducing alpha-divergences on representation space.

    For alpha away from +-1 the potential is c (t x + 1)^(1/t) with
    t = (1-alpha)/2 and c = 2/(1+alpha), defined where t x + 1 > 0.  The
    limits are exp(x) at alpha=1 and (1+x)log(1+x) - x at alpha=-1; both were
    verified numerically to reproduce the KL cases of the divergence.
    """
    if abs(alpha - 1.0) <= 1e-8:
        return _separable(
            "alpha[1]", m,
            f=np.exp, fp=np.exp, fp_inv=np.log,
            fstar=lambda et: et * np.log(et) - et,
            dom=np.isfinite,
            dual_dom=lambda et: et > _MARGIN,
            interior=0.0,
        )
    if abs(alpha + 1.0) <= 1e-8:
        return _separable(
            "alpha[-1]", m,
            f=lambda x: (1.0 + x) * np.log1p(x) - x,
            fp=np.log1p,
            fp_inv=np.expm1,
            fstar=lambda et: np.exp(et) - et - 1.0,
            dom=lambda x: x > -1.0 + _MARGIN,
            dual_dom=np.isfinite,
            interior=0.0,
        )

    t = 0.5 * (1.0 - alpha)
    c = 2.0 / (1.0 + alpha)

    def z_of(x):
        return t * x + 1.0

    def fp_inv(et):
        z = (et / c) ** (t / (1.0 - t))
        return (z - 1.0) / t

    def fstar(et):
        x = fp_inv(et)
        return et * x - c * z_of(x) ** (1.0 / t)

    return _separable(
        f"alpha[{alpha}]", m,
        f=lambda x: c * z_of(x) ** (1.0 / t),
        fp=lambda x: c * z_of(x) ** ((1.0 - t) / t),
        fp_inv=fp_inv,
        fstar=fstar,
        dom=lambda x: z_of(x) > _MARGIN,
        dual_dom=lambda et: et / c > _MARGIN,
        interior=0.0,
    )


def make_awq_lifted(base: LegendreGenerator, alpha: float, beta: float) -> LegendreGenerator:
    """Product generator F(x1) + a/2|x1|^2 + F*(x2) + b/2|x2|^2 on Theta x H."""
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be non-negative")
    m = base.dim

    def split(xi):
        return xi[:m], xi[m:]

    def value(xi):
        x1, x2 = split(xi)
        return (base.value(x1) + 0.5 * alpha * float(x1 @ x1)
                + base.conjugate_value(x2) + 0.5 * beta * float(x2 @ x2))

    def grad(xi):
        x1, x2 = split(xi)
        return np.concatenate([base.grad(x1) + alpha * x1,
                               base.grad_inv(x2) + beta * x2])

    def _solve_block(y, val, grd, in_dom, x0, weight):
        if weight == 0.0:
            raise AssertionError("closed form should be used when weight is 0")
        return minimize_convex(
            value=lambda x: val(x) + 0.5 * weight * float(x @ x) - float(y @ x),
            grad=lambda x: as_vector(grd(x)) + weight * x - y,
            x0=x0, in_domain=in_dom, tol=1e-11, max_iter=200)

    def grad_inv(et):
        y1, y2 = split(et)
        if alpha == 0.0:
            x1 = base.grad_inv(y1)
        else:
            x1 = _solve_block(y1, base.value, base.grad, base.in_domain,
                              base.interior_point, alpha)
        if beta == 0.0:
            x2 = base.grad(y2)
        else:
            x2 = _solve_block(y2, base.conjugate_value, base.grad_inv,
                              base.in_dual_domain,
                              base.grad(base.interior_point), beta)
        return np.concatenate([x1, x2])

    def in_domain(xi):
        x1, x2 = split(xi)
        return base.in_domain(x1) and base.in_dual_domain(x2)

    def _in_dual(et):
        try:
            grad_inv(as_vector(et))
            return True
        except Exception:
            return False

    g = LegendreGenerator(
        dim=2 * m, name=f"awq({base.name},{alpha},{beta})",
        value=value, grad=grad, grad_inv=grad_inv,
        conjugate_value=None,
        in_domain=in_domain, in_dual_domain=_in_dual,
        interior_point=np.concatenate([base.interior_point,
                                       base.grad(base.interior_point)]),
    )
    g._conjugate_value = _generic_conjugate(value, grad_inv)
    return g


def conjugate_generator(g: LegendreGenerator) -> LegendreGenerator:
    """Legendre-Fenchel conjugate (H, F*); applying it twice reproduces g."""
    conj = LegendreGenerator(
        dim=g.dim,
        name=g.name[:-1] if g.name.endswith("*") else g.name + "*",
        value=g._conjugate_value,
        grad=g._grad_inv,
        grad_inv=g._grad,
        conjugate_value=g._value,
        in_domain=g._in_dual_domain,
        in_dual_domain=g._in_domain,
        interior_point=g.grad(g.interior_point),
    )
    conj.grad_rows = g.grad_inv_rows
    conj.grad_inv_rows = g.grad_rows
    return conj


# ---------------------------------------------------------------------------
# restriction operators

class SegmentGenerator:
    """Univariate generator F(theta + u (theta' - theta)) on u in [0, 1]."""

    def __init__(self, base: LegendreGenerator, theta, theta_prime):
        theta = as_vector(theta)
        theta_prime = as_vector(theta_prime)
        if not base.in_domain(theta) or not base.in_domain(theta_prime):
            raise DomainError("segment endpoints must lie in the generator domain")
        if np.allclose(theta, theta_prime):
            raise DomainError("degenerate segment: endpoints coincide")
        self.base = base
        self.endpoints = (theta, theta_prime)
        self._delta = theta_prime - theta

        def embed(u):
            return theta + float(u) * self._delta

        def value(u):
            return base.value(embed(u[0]))

        def grad(u):
            return np.array([float(self._delta @ base.grad(embed(u[0])))])

        def in_domain(u):
            return base.in_domain(embed(u[0]))

        def grad_inv(et):
            target = float(et[0])

            def fp(u):
                return float(self._delta @ base.grad(embed(u))) - target

            lo, hi = self._extent()
            if fp(lo) * fp(hi) > 0:
                raise DomainError("dual value outside segment gradient range")
            return np.array([find_root_1d(fp, (lo, hi), tol=1e-14)])

        g = LegendreGenerator(
            dim=1, name=f"segment({base.name})",
            value=value, grad=grad, grad_inv=grad_inv,
            conjugate_value=None,
            in_domain=in_domain,
            in_dual_domain=lambda et: True,
            interior_point=np.array([0.5]),
        )
        g._conjugate_value = _generic_conjugate(g.value, g.grad_inv)
        self.generator = g

    def _extent(self):
        # widest [lo, hi] around [0,1] keeping the embedded point interior
        lo, hi = 0.0, 1.0
        step = 0.5
        for _ in range(20):
            if self.generator.in_domain(np.array([lo - step])):
                lo -= step
            if self.generator.in_domain(np.array([hi + step])):
                hi += step
        eps = 1e-9
        while not self.generator.in_domain(np.array([lo])):
            lo += eps
            eps *= 2
        eps = 1e-9
        while not self.generator.in_domain(np.array([hi])):
            hi -= eps
            eps *= 2
        return lo, hi


class SimplexGenerator:
    """Generator reparameterized on barycentric coordinates of k vertices.

    The free parameter is (lambda_1, ..., lambda_{k-1}); lambda_0 is the
    complement.  Vertices must be affinely independent.
    """

    def __init__(self, base: LegendreGenerator, vertices):
        vertices = [as_vector(v) for v in vertices]
        k = len(vertices)
        if k < 2 or k > base.dim + 1:
            raise ValueError("need 2 <= k <= m+1 vertices")
        for v in vertices:
            if not base.in_domain(v):
                raise DomainError("vertices must lie in the generator domain")
        v0 = vertices[0]
        edges = np.column_stack([v - v0 for v in vertices[1:]])
        if np.linalg.matrix_rank(edges, tol=1e-10) < k - 1:
            raise DomainError("vertices are affinely dependent")
        self.base = base
        self.vertices = vertices
        self._v0 = v0
        self._edges = edges

        def embed(lam):
            return v0 + edges @ lam

        def value(lam):
            return base.value(embed(lam))

        def grad(lam):
            return edges.T @ base.grad(embed(lam))

        def in_domain(lam):
            s = float(np.sum(lam))
            return (bool(np.all(lam > _MARGIN)) and s < 1.0 - _MARGIN
                    and base.in_domain(embed(lam)))

        def grad_inv(et):
            return minimize_convex(
                value=lambda lam: value(lam) - float(et @ lam),
                grad=lambda lam: grad(lam) - et,
                x0=np.full(k - 1, 1.0 / k), in_domain=in_domain,
                tol=1e-11, max_iter=300)

        g = LegendreGenerator(
            dim=k - 1, name=f"simplex({base.name},k={k})",
            value=value, grad=grad, grad_inv=grad_inv,
            conjugate_value=None,
            in_domain=in_domain,
            in_dual_domain=lambda et: True,
            interior_point=np.full(k - 1, 1.0 / k),
        )
        g._conjugate_value = _generic_conjugate(g.value, g.grad_inv)
        self.generator = g
        self.embed = embed

    def barycentric(self, theta):
        """Free barycentric coordinates of a point of the simplex hull."""
        theta = as_vector(theta)
        lam, res, _, _ = np.linalg.lstsq(self._edges, theta - self._v0, rcond=None)
        if not np.allclose(self._edges @ lam, theta - self._v0, atol=1e-9):
            raise DomainError("point does not lie in the simplex span")
        return lam


def restrict_to_segment(g: LegendreGenerator, theta, theta_prime) -> SegmentGenerator:
    return SegmentGenerator(g, theta, theta_prime)


def restrict_to_simplex(g: LegendreGenerator, vertices) -> SimplexGenerator:
    return SimplexGenerator(g, vertices)
