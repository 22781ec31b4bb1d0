"""Geodesic disks on surfaces of constant curvature K >= 0.

A disk is stored by (K, R) only; perimeter and area are derived on access so
the four quantities can never drift apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

Branch = Literal["hemisphere", "complement"]


@dataclass(frozen=True)
class GeodesicDisk:
    """Geodesic disk of radius ``R`` on the complete surface of curvature ``K``."""

    K: float
    R: float

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("negative curvature is not supported")
        if not self.R > 0:
            raise ValueError(f"radius must be positive, got {self.R}")
        if self.K > 0 and not self.R < math.pi / math.sqrt(self.K):
            raise ValueError("radius must be below pi/sqrt(K)")

    @property
    def L(self) -> float:
        if self.K == 0:
            return 2 * math.pi * self.R
        s = math.sqrt(self.K)
        return 2 * math.pi * math.sin(s * self.R) / s

    @property
    def A(self) -> float:
        if self.K == 0:
            return math.pi * self.R**2
        # 1 - cos(x) = 2 sin^2(x/2) keeps precision for small caps
        s = math.sqrt(self.K)
        return 4 * math.pi * math.sin(0.5 * s * self.R) ** 2 / self.K

    @property
    def within_hemisphere(self) -> bool:
        return self.K == 0 or self.R <= math.pi / (2 * math.sqrt(self.K)) * (1 + 1e-14)

    @property
    def branch(self) -> Branch:
        return "hemisphere" if self.within_hemisphere else "complement"


def disk_from_perimeter(K: float, L: float, branch: Branch = "hemisphere") -> GeodesicDisk:
    """Return the geodesic disk of perimeter ``L`` on the surface of curvature ``K``.

    For ``K > 0`` a geodesic circle bounds two caps; ``branch`` picks the one
    inside a hemisphere or its complement. It is never inferred.
    """
    if not L > 0:
        raise ValueError(f"perimeter must be positive, got {L}")
    if branch not in ("hemisphere", "complement"):
        raise ValueError(f"unknown branch {branch!r}")
    if K == 0:
        if branch == "complement":
            raise ValueError("complement branch needs K > 0")
        return GeodesicDisk(0.0, L / (2 * math.pi))
    if K < 0:
        raise ValueError("negative curvature is not supported")
    s = math.sqrt(K)
    x = L * s / (2 * math.pi)
    if x > 1 + 1e-14:
        raise ValueError(f"perimeter {L} exceeds the great-circle length {2 * math.pi / s}")
    R = math.asin(min(x, 1.0)) / s
    if branch == "complement":
        R = math.pi / s - R
    return GeodesicDisk(float(K), R)


def disk_profiles(disk: GeodesicDisk, t):
    """Level-set length and boundary-layer area of ``disk`` at depth ``t``.

    Returns ``(L(t), A(t))`` where ``L(t)`` is the length of the set at
    distance ``t`` from the boundary and ``A(t)`` the area within distance
    ``t`` of it. Works elementwise on arrays.
    """
    import numpy as np

    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < -1e-14) or np.any(t_arr > disk.R * (1 + 1e-14)):
        raise ValueError("depth outside [0, R]")
    r = np.clip(disk.R - t_arr, 0.0, None)
    if disk.K == 0:
        L = 2 * np.pi * r
        A = disk.A - np.pi * r**2
    else:
        s = math.sqrt(disk.K)
        L = 2 * np.pi * np.sin(s * r) / s
        A = disk.A - 4 * np.pi * np.sin(0.5 * s * r) ** 2 / disk.K
    if np.ndim(t) == 0:
        return float(L), float(A)
    return L, A


def isoperimetric_deficit(perimeter: float, area: float, K: float) -> float:
    """``perimeter^2 - 4 pi area + K area^2``; zero on geodesic disks of curvature K."""
    return perimeter**2 - 4 * math.pi * area + K * area**2
