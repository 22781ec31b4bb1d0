"""Numerical companion for Robin eigenvalue isoperimetry with negative boundary parameter.

Submodules
----------
geometry    geodesic disks on surfaces of constant curvature K >= 0
domains     planar and spherical polygonal domains, parallel-coordinate profiles
corpus      built-in test domains
radial      shooting solver for the rotationally symmetric problem on disks
fem2d       P1 finite elements for the Robin Laplacian on star-shaped planar domains
transplant  transplanted test functions and certified upper bounds
cone        Robin Laplacian on infinite cones over spherical domains
spectral    DtN eigenvalues, weak coupling and the two-cap comparison
cli         command-line experiment runner
"""

from .geometry import GeodesicDisk, disk_from_perimeter
from .domains import Domain, DomainError, compute_profiles
from .radial import solve_ground_state, solve_mode

__all__ = [
    "Domain",
    "DomainError",
    "GeodesicDisk",
    "compute_profiles",
    "disk_from_perimeter",
    "solve_ground_state",
    "solve_mode",
]
__version__ = "0.1.0"
