"""Bregman divergence geometry: generators, divergences, centroids, spheres.

The package builds everything on Legendre-type generators (potential,
gradient, inverse gradient, conjugate).  Hot separable kernels run under
numba when available; set BREGMANGEO_NO_NUMBA=1 before import to force the
pure-numpy fallback.
"""

from .numerics import (AmbiguityError, ConvergenceError, DomainError,
                       SpdMatrix, ToleranceConfig, find_root_1d,
                       finite_diff_gradient, lambert_w0, loewner_geq,
                       spd_inv, spd_sqrt)
from .generators import (LegendreGenerator, SegmentGenerator, SimplexGenerator,
                         conjugate_generator, gaussian_natural_params,
                         make_alpha_generator, make_awq_lifted, make_burg,
                         make_extended_kl, make_gaussian_cumulant, make_logdet,
                         make_quadratic, make_shannon_simplex, pack_sym,
                         restrict_to_segment, restrict_to_simplex, unpack_sym)
from .divergences import (CurvedModel, DiscreteDensity, awq_divergence,
                          awq_feature_map, awq_matrix_divergence, bregman,
                          circle_model, complex_normal_kld, curved_divergence,
                          ellipse_model, fenchel_young, gaussian_kld,
                          gaussian_kld_via_bregman, jensen,
                          pointwise_divergence, realify_complex, skew_jensen,
                          symmetrized)
from .representational import (alpha_divergence, alpha_rep, alpha_rep_inv,
                               rep_bregman, rep_bregman_dual,
                               rep_fenchel_young)
from .centroids import (CccpConfig, WeightedParamSet, bias_variance,
                        bregman_information, cccp_objective,
                        cccp_symmetrized_centroid, cosh_centroid,
                        curved_centroid, generalized_left_centroid,
                        jeffreys_centroid_1d, jeffreys_centroid_categorical,
                        jeffreys_objective_categorical, jensen_diversity,
                        left_centroid, logdet_cosh_centroid,
                        pointwise_curved_centroid, right_centroid, uniform_set)
from .spheres import (BregmanSphere, IntersectionResult, LiftedHyperplane,
                      alpha_sphere_intersection, dual_sphere,
                      hyperplane_to_sphere, intersect_right_spheres,
                      lift_sphere)

__version__ = "0.1.0"
