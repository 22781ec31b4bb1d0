"""Robin Laplacian on infinite cones over spherical domains.

For a cross-section m of the unit sphere the cone is {r w : r > 0, w in m}.
Dilations show that the operator with coupling beta is unitarily equivalent
to beta^2 times the one with beta = -1, so everything here is computed at
beta = -1 and rescaled.

For the circular cone of half-aperture alpha (sin alpha = L / 2 pi) the ground
state is exp(-x3 / sin alpha) with eigenvalue -1/sin^2 alpha.  Written in
terms of the depth t below the rim of the cross-section it is
psi_r(t) = exp(-r cos(alpha - t) / sin alpha), and transplanting psi_r onto
another cross-section of the same perimeter gives a test function whose
r-integrals are Gamma integrals,

    int_0^inf r^k exp(-a r) dr = k! / a^(k+1),

leaving one-dimensional quadratures in t against the length profile L_m(t).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .domains import Domain, DomainError, EmpiricalProfiles, compute_profiles
from .geometry import GeodesicDisk, disk_profiles

TWO_PI = 2 * math.pi
NEAR_HALF_SPACE = 1e-3


class ConeError(ValueError):
    pass


def _check_beta(beta: float) -> None:
    if not beta < 0:
        raise ValueError(f"beta must be negative, got {beta}")


def half_aperture(L: float) -> float:
    if not 0 < L < TWO_PI:
        raise ConeError(f"cross-section perimeter must lie in (0, 2 pi), got {L}")
    return math.asin(L / TWO_PI)


def circular_cone_eigenvalue(L: float, beta: float) -> float:
    """Lowest eigenvalue -(2 pi beta / L)^2 of the circular cone with rim length L."""
    _check_beta(beta)
    half_aperture(L)
    return -((TWO_PI * beta / L) ** 2)


def essential_threshold(beta: float) -> float:
    _check_beta(beta)
    return -beta * beta


@dataclass(frozen=True)
class CircularCone:
    """Circular cone with axis e3 and half-aperture alpha."""

    L: float

    @property
    def alpha(self) -> float:
        return half_aperture(self.L)

    def eigenvalue(self, beta: float = -1.0) -> float:
        return circular_cone_eigenvalue(self.L, beta)

    def eigenfunction(self, x, beta: float = -1.0):
        """exp(-2 pi |beta| x3 / L) at points x (..., 3)."""
        _check_beta(beta)
        x = np.asarray(x, dtype=float)
        return np.exp(-TWO_PI * abs(beta) * x[..., 2] / self.L)

    def cross_section(self) -> GeodesicDisk:
        return GeodesicDisk(1.0, self.alpha)


@dataclass
class ConeCrossSection:
    """Spherical domain m together with its parallel-coordinate profiles."""

    domain: Domain
    profiles: EmpiricalProfiles

    def __post_init__(self):
        if self.domain.kind != "spherical":
            raise ConeError("cone cross-sections are spherical domains")
        L, A = self.L_m, self.A_m
        if not (L < TWO_PI and A < TWO_PI):
            raise ConeError(f"cross-section needs perimeter and area below 2 pi, got {L}, {A}")
        if TWO_PI - L < NEAR_HALF_SPACE or TWO_PI - A < NEAR_HALF_SPACE:
            warnings.warn("cross-section is within 1e-3 of a hemisphere; the cone is close to "
                          "a half-space", stacklevel=2)

    @property
    def L_m(self) -> float:
        return self.domain.perimeter

    @property
    def A_m(self) -> float:
        return self.domain.area

    @classmethod
    def from_domain(cls, d: Domain, grid_n: int = 256, raster_n: int = 512) -> "ConeCrossSection":
        return cls(d, compute_profiles(d, grid_n=grid_n, raster_n=raster_n))


def _trapz(f: np.ndarray, t: np.ndarray) -> float:
    return float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(t)))


@dataclass
class SliceIntegrals:
    """Cone form pieces at beta = -1 for the transplanted circular ground state."""

    gradient: float
    norm: float
    boundary: float

    @property
    def form(self) -> float:
        return self.gradient + self.boundary

    @property
    def quotient(self) -> float:
        return self.form / self.norm


def _densities(alpha: float, t: np.ndarray):
    s = math.sin(alpha)
    c = np.cos(alpha - t)
    if np.any(c <= 0):
        raise ConeError("cos(alpha - t) <= 0 on the profile grid; profile depth exceeds the "
                        "admissible range")
    sn = np.sin(alpha - t)
    grad = s / (4 * c) + sn**2 * s / (4 * c**3)
    norm = s**3 / (4 * c**3)
    return grad, norm


def slice_integrals(t: np.ndarray, L: np.ndarray, perimeter: float, alpha: float) -> SliceIntegrals:
    """Gradient, norm and boundary term of u(r, x) = psi_r(rho(x)) on the cone, beta = -1."""
    g, n = _densities(alpha, t)
    s = math.sin(alpha)
    return SliceIntegrals(gradient=_trapz(g * L, t), norm=_trapz(n * L, t),
                          boundary=-perimeter * s * s / (4 * math.cos(alpha) ** 2))


def disk_slice_integrals(L: float, n: int = 20001) -> SliceIntegrals:
    alpha = half_aperture(L)
    disk = GeodesicDisk(1.0, alpha)
    t = np.linspace(0.0, alpha, n)
    Lt, _ = disk_profiles(disk, t)
    return slice_integrals(t, Lt, disk.L, alpha)


@dataclass
class ConeCertificate:
    L: float
    A: float
    beta: float
    alpha: float
    quotient: float
    circular_value: float
    margin: float
    tolerances: dict
    reductions: dict = field(default_factory=dict)
    name: str = ""
    ok: bool = True

    def to_json(self) -> dict:
        return asdict(self)


def cone_rayleigh_upper_bound(c: ConeCrossSection, beta: float) -> ConeCertificate:
    """Transplanted upper bound for the lowest eigenvalue of the cone over ``c``."""
    _check_beta(beta)
    p = c.profiles
    L = c.L_m
    alpha = half_aperture(L)
    m = slice_integrals(p.t, p.L, L, alpha)
    b = disk_slice_integrals(L)
    q = m.quotient
    # propagate the area-profile tolerance through integration by parts
    g, n = _densities(alpha, p.t)
    sens = lambda f: abs(float(f[-1])) + _trapz(np.abs(np.gradient(f, p.t)), p.t)  # noqa: E731
    d_grad = p.tolerance * sens(g)
    d_norm = p.tolerance * sens(n)
    prof = (d_grad + abs(q) * d_norm) / m.norm
    half = slice_integrals(p.t[::2], p.L[::2], L, alpha) if len(p.t) % 2 == 1 else m
    quad = abs(q - half.quotient) / 3
    tol = prof + quad
    circ = circular_cone_eigenvalue(L, beta)
    scale = beta * beta
    margin = circ - q * scale
    reductions = {
        "gradient": b.gradient - m.gradient,
        "norm": b.norm - m.norm,
        "boundary": abs(b.boundary - m.boundary),
        "gradient_tolerance": d_grad,
        "norm_tolerance": d_norm,
        "disk_quotient": b.quotient * scale,
    }
    return ConeCertificate(L=L, A=c.A_m, beta=float(beta), alpha=alpha, quotient=q * scale,
                           circular_value=circ, margin=margin,
                           tolerances={"profile": prof * scale, "quadrature": quad * scale,
                                       "total": tol * scale},
                           reductions=reductions, name=c.domain.name,
                           ok=bool(margin >= -tol * scale))


# -- one-dimensional Robin bound -------------------------------------------------------


def random_half_line_spline(rng: np.random.Generator, T: float = 4.0, knots: int = 8) -> CubicSpline:
    """Seeded cubic spline on [0, T] vanishing with its slope at T (so it extends by zero)."""
    x = np.linspace(0.0, T, knots)
    y = rng.normal(size=knots)
    y[-1] = 0.0
    return CubicSpline(x, y, bc_type=((1, rng.normal()), (1, 0.0)))


def near_extremal_half_line_spline(rng: np.random.Generator, beta: float, knots: int = 24,
                                   noise: float = 1e-3) -> CubicSpline:
    """Spline close to the optimiser exp(beta t), shifted to vanish at T = 12 / |beta|."""
    _check_beta(beta)
    T = 12.0 / abs(beta)
    x = np.linspace(0.0, T, knots)
    y = np.exp(beta * x) - math.exp(beta * T)
    y[1:-1] += noise * rng.normal(size=knots - 2)
    return CubicSpline(x, y, bc_type=((1, beta), (1, 0.0)))


def half_line_slack(f: CubicSpline, beta: float) -> float:
    """int f'^2 + beta f(0)^2 + beta^2 int f^2 over the support of f (exact for splines)."""
    _check_beta(beta)
    a, b = f.x[0], f.x[-1]
    if a != 0.0:
        raise ValueError("spline must start at 0")
    df = f.derivative()
    sq = lambda g: _poly_square_integral(g, a, b)  # noqa: E731
    return sq(df) + beta * float(f(0.0)) ** 2 + beta * beta * sq(f)


def _poly_square_integral(g, a: float, b: float) -> float:
    """Exact int_a^b g^2 for a piecewise polynomial, via Gauss-Legendre per piece."""
    nodes, weights = np.polynomial.legendre.leggauss(8)
    x = g.x
    total = 0.0
    for lo, hi in zip(x[:-1], x[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * float(weights @ g(mid + half * nodes) ** 2)
    return total
