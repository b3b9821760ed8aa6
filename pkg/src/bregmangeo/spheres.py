"""Space of Bregman spheres.

A right sphere {theta' : B_F(theta':c) = r} corresponds to a non-vertical
hyperplane cutting the epigraph of F; the correspondence (lift/unlift) turns
sphere intersection into linear algebra on the radical flats plus bracketed
root finding along the remaining free direction.  Alpha-divergence spheres
are handled by mapping centers through the alpha-representation, intersecting
the representational Bregman spheres, and mapping solutions back.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import root

from .divergences import bregman
from .generators import LegendreGenerator, conjugate_generator, make_alpha_generator
from .numerics import DomainError, as_vector, find_root_1d
from .representational import alpha_divergence, alpha_rep, alpha_rep_inv

_RADIUS_TOL = 1e-10
_SPHERE_TOL = 1e-8


@dataclass(frozen=True)
class BregmanSphere:
    """Sphere of the divergence induced by ``generator``.

    side="right": {theta' : B_F(theta' : center) = r} (center in the second
    slot); side="left" fixes the first slot instead.
    """

    generator: LegendreGenerator
    center: np.ndarray
    radius: float
    side: str = "right"

    def __post_init__(self):
        c = as_vector(self.center)
        if self.side not in ("right", "left"):
            raise ValueError(f"unknown side {self.side!r}")
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        if not self.generator.in_domain(c):
            raise DomainError("sphere center outside generator domain")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class LiftedHyperplane:
    """Non-vertical plane y = <normal_a, theta> + offset_b in epigraph space."""

    normal_a: np.ndarray
    offset_b: float

    def __post_init__(self):
        a = as_vector(self.normal_a)
        if not math.isfinite(self.offset_b):
            raise ValueError("offset must be finite")
        object.__setattr__(self, "normal_a", a)
        object.__setattr__(self, "offset_b", float(self.offset_b))


@dataclass(frozen=True)
class IntersectionResult:
    """Solution points plus the radical-flat description.

    ``flat_point`` + span(``flat_basis`` columns) is the affine set carrying
    the intersection; ``enumerable`` is False when the flat leaves two or more
    free dimensions, in which case ``points`` is empty and the flat plus one
    sphere equation describe the intersection symbolically.
    """

    points: list
    flat_point: np.ndarray = None
    flat_basis: np.ndarray = None
    enumerable: bool = True
    residuals: list = field(default_factory=list)


def lift_sphere(s: BregmanSphere) -> LiftedHyperplane:
    """Supporting plane of a right sphere: a = grad F(c), b = F(c)+r-<c,a>."""
    if s.side != "right":
        raise ValueError("lift_sphere expects a right sphere")
    g = s.generator
    a = g.grad(s.center)
    b = g.value(s.center) + s.radius - float(s.center @ a)
    return LiftedHyperplane(a, b)


def hyperplane_to_sphere(g: LegendreGenerator, h: LiftedHyperplane) -> BregmanSphere:
    """Vertical projection of a plane onto the parameter space as a right sphere."""
    if not g.in_dual_domain(h.normal_a):
        raise DomainError("plane normal outside the dual domain")
    theta = g.grad_inv(h.normal_a)
    r = float(h.normal_a @ theta) - g.value(theta) + h.offset_b
    if r < -_RADIUS_TOL:
        raise DomainError(f"plane lies below the epigraph (r = {r})")
    return BregmanSphere(g, theta, max(r, 0.0), side="right")


def dual_sphere(s: BregmanSphere) -> BregmanSphere:
    """Right sphere under the conjugate generator matching a left sphere.

    theta' lies on the left sphere iff grad F(theta') lies on the returned
    sphere (biduality pointwise).
    """
    if s.side != "left":
        raise ValueError("dual_sphere expects a left sphere")
    g = s.generator
    return BregmanSphere(conjugate_generator(g), g.grad(s.center),
                         s.radius, side="right")


# ---------------------------------------------------------------------------
# intersection machinery

def _radical_flat(planes, dim, tol=1e-10):
    """Affine solution set of the pairwise plane-difference equations.

    Returns (point, basis, consistent); basis columns span the free
    directions (empty matrix when the solution is isolated).
    """
    rows = []
    rhs = []
    a0, b0 = planes[0].normal_a, planes[0].offset_b
    for h in planes[1:]:
        rows.append(h.normal_a - a0)
        rhs.append(b0 - h.offset_b)
    amat = np.array(rows, dtype=float)
    bvec = np.array(rhs, dtype=float)
    scale = max(1.0, float(np.abs(amat).max()), float(np.abs(bvec).max()))
    sol, _, rank, _ = np.linalg.lstsq(amat, bvec, rcond=None)
    if np.linalg.norm(amat @ sol - bvec) > tol * scale:
        return None, None, False
    # null space of the coefficient matrix spans the free directions
    _, _, vt = np.linalg.svd(amat)
    basis = vt[rank:].T if rank < dim else np.zeros((dim, 0))
    return sol, basis, True


def _domain_window(g, theta0, v, t_max=4096.0):
    """Open t-interval around a feasible point with theta0 + t v in domain."""
    def ok(t):
        return g.in_domain(theta0 + t * v)

    # locate any feasible t by coarse scanning if 0 is infeasible
    t_ref = None
    if ok(0.0):
        t_ref = 0.0
    else:
        for span in (1.0, 8.0, 64.0, 512.0, t_max):
            for t in np.linspace(-span, span, 257):
                if ok(t):
                    t_ref = float(t)
                    break
            if t_ref is not None:
                break
    if t_ref is None:
        return None
    lo = hi = t_ref
    step = 1.0
    while hi - t_ref < t_max and ok(hi + step):
        hi += step
        step *= 2.0
    step = 1.0
    while t_ref - lo < t_max and ok(lo - step):
        lo -= step
        step *= 2.0
    return lo, hi


def _roots_along_line(func, lo, hi, grid):
    """All sign-change roots of func on [lo, hi] sampled at `grid` points."""
    ts = np.linspace(lo, hi, grid)
    vals = np.array([func(t) for t in ts])
    roots = []
    for i in range(grid - 1):
        f0, f1 = vals[i], vals[i + 1]
        if not (np.isfinite(f0) and np.isfinite(f1)):
            continue
        if f0 == 0.0:
            roots.append(float(ts[i]))
        elif f0 * f1 < 0:
            roots.append(find_root_1d(func, (ts[i], ts[i + 1]), tol=1e-14))
    if np.isfinite(vals[-1]) and vals[-1] == 0.0:
        roots.append(float(ts[-1]))
    # dedupe near-coincident roots deterministically
    out = []
    for t in sorted(roots):
        if not out or abs(t - out[-1]) > 1e-9 * max(1.0, abs(t)):
            out.append(t)
    return out


def _sphere_residuals(g, spheres, theta):
    return [abs(bregman(g, theta, s.center) - s.radius) for s in spheres]


def intersect_right_spheres(g: LegendreGenerator, spheres, grid=256) -> IntersectionResult:
    """Common points of n right spheres via the radical-flat reduction.

    The lifted planes agree pairwise on an affine flat; solutions are roots
    of one sphere equation along that flat.  Flats with two or more free
    dimensions are returned unenumerated (``enumerable=False``).
    """
    if len(spheres) < 2:
        raise ValueError("need at least two spheres")
    for s in spheres:
        if s.side != "right":
            raise ValueError("intersect_right_spheres expects right spheres")
    planes = [lift_sphere(s) for s in spheres]
    point, basis, consistent = _radical_flat(planes, g.dim)
    if not consistent:
        return IntersectionResult(points=[], enumerable=True)
    free = basis.shape[1]
    if free >= 2:
        return IntersectionResult(points=[], flat_point=point, flat_basis=basis,
                                  enumerable=False)
    s1 = spheres[0]
    candidates = []
    if free == 0:
        if g.in_domain(point):
            candidates.append(point)
    else:
        v = basis[:, 0]
        window = _domain_window(g, point, v)
        if window is not None:
            lo, hi = window
            pad = 1e-9 * (hi - lo)

            def eq(t):
                th = point + t * v
                if not g.in_domain(th):
                    return math.nan
                return bregman(g, th, s1.center) - s1.radius

            for t in _roots_along_line(eq, lo + pad, hi - pad, grid):
                candidates.append(point + t * v)
    points, residuals = [], []
    for th in candidates:
        res = _sphere_residuals(g, spheres, th)
        if max(res) < _SPHERE_TOL:
            points.append(th)
            residuals.append(res)
    return IntersectionResult(points=points, flat_point=point, flat_basis=basis,
                              enumerable=True, residuals=residuals)


def alpha_sphere_intersection(alpha, spheres, simplex_constraint=False,
                              grid=256) -> IntersectionResult:
    """Common points of alpha-divergence spheres {q : D_alpha(q : q_i) = r_i}.

    Centers map through the alpha-representation, where each sphere is an
    ordinary right Bregman sphere; the simplex constraint (sum q_j = 1)
    enters as one extra nonlinear equation along the radical flat.  Returned
    points and residuals are in the original positive-measure coordinates.
    """
    if len(spheres) < 2:
        raise ValueError("need at least two spheres")
    centers = [as_vector(c) for c, _ in spheres]
    radii = [float(r) for _, r in spheres]
    m = centers[0].size
    for c in centers:
        if c.size != m or np.any(c <= 0):
            raise DomainError("centers must be strictly positive")
        if simplex_constraint and abs(float(np.sum(c)) - 1.0) > 1e-9:
            raise DomainError("constrained centers must lie on the simplex")
    g = make_alpha_generator(alpha, m)
    rep_spheres = [BregmanSphere(g, alpha_rep(alpha, c), r)
                   for c, r in zip(centers, radii)]

    if not simplex_constraint:
        rep_result = intersect_right_spheres(g, rep_spheres, grid=grid)
        return _map_back(alpha, centers, radii, rep_result, constrained=False)

    planes = [lift_sphere(s) for s in rep_spheres]
    point, basis, consistent = _radical_flat(planes, m)
    if not consistent:
        return IntersectionResult(points=[], enumerable=True)
    free = basis.shape[1]
    s1 = rep_spheres[0]

    def simplex_gap(th):
        return float(np.sum(alpha_rep_inv(alpha, th))) - 1.0

    def sphere_gap(th):
        return bregman(g, th, s1.center) - s1.radius

    candidates = []
    if free == 0:
        if g.in_domain(point):
            candidates.append(point)
    elif free == 1:
        v = basis[:, 0]
        window = _domain_window(g, point, v)
        if window is not None:
            lo, hi = window
            pad = 1e-9 * (hi - lo)

            def eq(t):
                th = point + t * v
                if not g.in_domain(th):
                    return math.nan
                try:
                    return simplex_gap(th)
                except DomainError:
                    return math.nan

            for t in _roots_along_line(eq, lo + pad, hi - pad, grid):
                candidates.append(point + t * v)
    elif free == 2:
        # grid-seeded Newton on (sphere equation, simplex equation)
        def system(uv):
            th = point + basis @ uv
            if not g.in_domain(th):
                return np.array([1e6, 1e6])
            try:
                return np.array([sphere_gap(th), simplex_gap(th)])
            except DomainError:
                return np.array([1e6, 1e6])

        span = 2.0 + max(np.linalg.norm(alpha_rep(alpha, c) - point)
                         for c in centers)
        seeds = np.linspace(-span, span, max(8, int(round(math.sqrt(grid)))))
        for u0 in seeds:
            for v0 in seeds:
                uv0 = np.array([u0, v0])
                if np.max(np.abs(system(uv0))) >= 1e6:
                    continue
                sol = root(system, uv0, method="hybr", tol=1e-13)
                if not sol.success:
                    continue
                th = point + basis @ sol.x
                if g.in_domain(th) and np.max(np.abs(system(sol.x))) < 1e-9:
                    candidates.append(th)
    else:
        return IntersectionResult(points=[], flat_point=point, flat_basis=basis,
                                  enumerable=False)

    rep_points = []
    for th in candidates:
        res = _sphere_residuals(g, rep_spheres, th)
        if max(res) < _SPHERE_TOL and abs(simplex_gap(th)) < 1e-10:
            rep_points.append(th)
    rep_result = IntersectionResult(points=rep_points, flat_point=point,
                                    flat_basis=basis, enumerable=True)
    return _map_back(alpha, centers, radii, rep_result, constrained=True)


def _map_back(alpha, centers, radii, rep_result, constrained):
    """Pull representation-space solutions back to positive-measure space."""
    points, residuals = [], []
    for th in rep_result.points:
        try:
            q = alpha_rep_inv(alpha, th)
        except DomainError:
            continue
        res = [abs(alpha_divergence(alpha, q, c) - r)
               for c, r in zip(centers, radii)]
        if max(res) >= 1e-7:
            continue
        if constrained and abs(float(np.sum(q)) - 1.0) > 1e-10:
            continue
        # deduplicate points that collapse after the inverse map
        if any(np.allclose(q, p, atol=1e-9) for p in points):
            continue
        points.append(q)
        residuals.append(res)
    return IntersectionResult(points=points, flat_point=rep_result.flat_point,
                              flat_basis=rep_result.flat_basis,
                              enumerable=rep_result.enumerable,
                              residuals=residuals)
