"""Coisotropic capacities of convex bodies.

Capacities relative to the coisotropic subspace R^{n,k} are computed from the
Clarke dual action principle on truncated Fourier loops, and checked against
closed forms for balls, ellipsoids, products of discs and planar domains.
"""

from .bodies import (
    Ball,
    BodySpecError,
    ConvexBody,
    Ellipsoid,
    LpBall,
    Product,
    Scaled,
    Translate,
    body_from_dict,
    dual_estimate,
)
from .calculus import (
    axiom_harness,
    closed_form_capacity,
    disc_capacity,
    nontriviality_constants,
    product_capacity,
    product_index_chain,
)
from .dual import (
    CapacityEstimate,
    SolverError,
    SolverOptions,
    minimize_capacity,
    reconstruct_chord,
    verify_chord,
)
from .loops import FourierLoop
from .spectrum import (
    PlanarCurve,
    Spectrum,
    ellipsoid_min_action,
    ellipsoid_spectrum,
    planar_chord_actions,
    w_domain_curve,
)
from .symplectic import CoisoIndex, in_sp2nk, sp2nk_membership, sp2nk_sample

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BodySpecError",
    "CapacityEstimate",
    "CoisoIndex",
    "ConvexBody",
    "Ellipsoid",
    "FourierLoop",
    "LpBall",
    "PlanarCurve",
    "Product",
    "Scaled",
    "SolverError",
    "SolverOptions",
    "Spectrum",
    "Translate",
    "axiom_harness",
    "body_from_dict",
    "closed_form_capacity",
    "disc_capacity",
    "dual_estimate",
    "ellipsoid_min_action",
    "ellipsoid_spectrum",
    "in_sp2nk",
    "minimize_capacity",
    "nontriviality_constants",
    "planar_chord_actions",
    "product_capacity",
    "product_index_chain",
    "reconstruct_chord",
    "sp2nk_membership",
    "sp2nk_sample",
    "verify_chord",
    "w_domain_curve",
]
