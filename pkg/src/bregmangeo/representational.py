"""Alpha-representations of positive measures and alpha-divergences.

The monotone coordinate change r_a turns the alpha-divergence into an
ordinary Bregman (or Fenchel-Young) divergence on representation space.  The
power-form potential printed alongside r_a needs a unit shift of its argument
to make the identity exact (the representation subtracts 1); that corrected
potential is what ``generators.make_alpha_generator`` builds.  Affine changes
of a generator leave its Bregman divergence untouched, so this is a
presentation choice, verified numerically in the test suite.
"""

import numpy as np

from . import _kernels
from .divergences import bregman, fenchel_young
from .generators import make_alpha_generator
from .numerics import DomainError, as_vector

_LIMIT_EPS = 1e-8


def _require_positive(q):
    q = as_vector(q)
    if np.any(q <= 0):
        raise DomainError("alpha representations require strictly positive inputs")
    return q


def alpha_rep(alpha: float, q):
    """Componentwise representation r_a(x); log at a=1, x-1 at a=-1."""
    q = _require_positive(q)
    if abs(alpha - 1.0) <= _LIMIT_EPS:
        return np.log(q)
    t = 0.5 * (1.0 - alpha)
    return (q ** t - 1.0) / t


def alpha_rep_inv(alpha: float, r):
    r = as_vector(r)
    if abs(alpha - 1.0) <= _LIMIT_EPS:
        return np.exp(r)
    t = 0.5 * (1.0 - alpha)
    z = t * r + 1.0
    if np.any(z <= 0):
        raise DomainError("representation point outside the image of r_alpha")
    return z ** (1.0 / t)


def alpha_divergence(alpha: float, q1, q2) -> float:
    """Alpha-divergence extended to positive measures (KL cases at a = +-1)."""
    q1 = _require_positive(q1)
    q2 = _require_positive(q2)
    if q1.size != q2.size:
        raise ValueError("dimension mismatch")
    if abs(alpha + 1.0) <= _LIMIT_EPS:
        return float(_kernels.extended_kl_sum(np.ascontiguousarray(q1),
                                              np.ascontiguousarray(q2)))
    if abs(alpha - 1.0) <= _LIMIT_EPS:
        return float(_kernels.extended_kl_sum(np.ascontiguousarray(q2),
                                              np.ascontiguousarray(q1)))
    return float(_kernels.alpha_div_sum(float(alpha), np.ascontiguousarray(q1),
                                        np.ascontiguousarray(q2)))


def rep_bregman(alpha: float, q1, q2) -> float:
    """D_a(q1:q2) as B_{F_a}(R_a q1 : R_a q2)."""
    q1 = _require_positive(q1)
    q2 = _require_positive(q2)
    g = make_alpha_generator(alpha, q1.size)
    return bregman(g, alpha_rep(alpha, q1), alpha_rep(alpha, q2))


def rep_bregman_dual(alpha: float, q1, q2) -> float:
    """Dual route B_{F_{-a}}(R_{-a} q2 : R_{-a} q1); equals rep_bregman."""
    q1 = _require_positive(q1)
    q2 = _require_positive(q2)
    g = make_alpha_generator(-alpha, q1.size)
    return bregman(g, alpha_rep(-alpha, q2), alpha_rep(-alpha, q1))


def rep_fenchel_young(alpha: float, q1, q2) -> float:
    """D_a(q1:q2) as the Fenchel-Young divergence Y(R_a q1 : R_{-a} q2).

    The dual representation R_{-a} must land in the dual domain of F_a, which
    holds up to the affine normalization of the representation: the dual
    coordinate of x under F_a is f_a'(r_a(x)).
    """
    q1 = _require_positive(q1)
    q2 = _require_positive(q2)
    g = make_alpha_generator(alpha, q1.size)
    eta2 = g.grad(alpha_rep(alpha, q2))
    return fenchel_young(g, alpha_rep(alpha, q1), eta2)
