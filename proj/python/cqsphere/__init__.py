"""CQ and shrinking projection methods on the unit sphere.

Mappings are lists of ``(i, j, angle)`` plane rotations with 0-based axes,
applied in order. An empty list is the identity.
"""

from ._core import (
    Error,
    apply_w,
    brute_project,
    common_fixed_basis,
    distance,
    geodesic_combine,
    pal_inequality_gap,
    project,
    random_point_in_cap,
    residuals,
    run,
)

__all__ = [
    "Error",
    "apply_w",
    "brute_project",
    "common_fixed_basis",
    "distance",
    "geodesic_combine",
    "pal_inequality_gap",
    "project",
    "random_point_in_cap",
    "residuals",
    "run",
]
