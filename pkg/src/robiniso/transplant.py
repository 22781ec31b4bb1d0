"""Transplanting a radial profile onto a domain through its distance function.

Given psi on [0, T], the test function u_M = psi(rho(x)) on a domain M has,
by the co-area formula in parallel coordinates,

    ||grad u_M||^2 = int_0^{R_M} psi'(t)^2 L_M(t) dt,
    ||u_M||^2      = int_0^{R_M} psi(t)^2 L_M(t) dt,
    ||u_M||^2_bdry = |dM| psi(0)^2,

so the Robin form and the Rayleigh quotient reduce to one-dimensional
integrals against the length profile.  The same formulas with the closed-form
profile of a geodesic disk give the comparison quantities.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .domains import Domain, DomainError, EmpiricalProfiles, compute_profiles
from .geometry import GeodesicDisk, disk_from_perimeter, disk_profiles
from .radial import RadialGroundState, solve_ground_state

DISK_GRID = 4001


@dataclass
class TestProfile:
    """Radial profile psi on [0, T] with its derivative."""

    __test__ = False  # keep pytest from collecting the class

    t: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.psi = np.asarray(self.psi, dtype=float)
        self.dpsi = np.asarray(self.dpsi, dtype=float)
        if self.t.ndim != 1 or len(self.t) < 2 or self.t[0] != 0.0:
            raise ValueError("profile grid must start at 0 and have at least two points")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("profile grid must be strictly increasing")
        if not (self.psi.shape == self.dpsi.shape == self.t.shape):
            raise ValueError("psi and dpsi must match the grid")
        if not (np.all(np.isfinite(self.psi)) and np.all(np.isfinite(self.dpsi))):
            raise ValueError("profile values must be finite")
        self._spline = CubicHermiteSpline(self.t, self.psi, self.dpsi)

    @property
    def T(self) -> float:
        return float(self.t[-1])

    def _check(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if np.any(s > self.T * (1 + 1e-12)) or np.any(s < 0):
            raise ValueError(f"profile evaluated outside [0, {self.T}]")
        return np.clip(s, 0.0, self.T)

    def __call__(self, s):
        return self._spline(self._check(s))

    def derivative(self, s, order: int = 1):
        return self._spline(self._check(s), nu=order)

    def scaled(self, c: float) -> "TestProfile":
        return TestProfile(self.t, c * self.psi, c * self.dpsi)

    @classmethod
    def from_ground_state(cls, gs: RadialGroundState) -> "TestProfile":
        return cls(gs.t, gs.psi, gs.dpsi)

    @classmethod
    def constant(cls, T: float, value: float = 1.0, n: int = 2) -> "TestProfile":
        t = np.linspace(0.0, T, n)
        return cls(t, np.full(n, value), np.zeros(n))

    @classmethod
    def cosine_series(cls, T: float, coeffs, n: int = 2001) -> "TestProfile":
        """psi(t) = sum_k c_k cos(k pi t / T), derivative exact."""
        c = np.asarray(coeffs, dtype=float)
        t = np.linspace(0.0, T, n)
        k = np.arange(len(c))[:, None] * np.pi / T
        psi = c @ np.cos(k * t)
        dpsi = -(c[:, None] * k * np.sin(k * t)).sum(axis=0)
        return cls(t, psi, dpsi)

    @classmethod
    def from_samples(cls, t, psi) -> "TestProfile":
        """Derivative by second-order finite differences."""
        t = np.asarray(t, dtype=float)
        psi = np.asarray(psi, dtype=float)
        return cls(t, psi, np.gradient(psi, t, edge_order=2))


def random_cosine_profile(rng: np.random.Generator, T: float, terms: int = 5) -> TestProfile:
    """Seeded smooth test profile with decaying random cosine coefficients."""
    c = rng.normal(size=terms) / (1.0 + np.arange(terms))
    return TestProfile.cosine_series(T, c)


def _trapz(f: np.ndarray, t: np.ndarray) -> float:
    return float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(t)))


def _trapz_with_error(f: np.ndarray, t: np.ndarray) -> tuple[float, float]:
    """Trapezoid value and a Richardson estimate of its error (grid vs every other node)."""
    full = _trapz(f, t)
    if len(t) < 5 or len(t) % 2 == 0:
        return full, 0.0
    half = _trapz(f[::2], t[::2])
    return full, abs(full - half) / 3


def _profile_on(p: EmpiricalProfiles | GeodesicDisk, n_disk: int = DISK_GRID):
    """(t, L, perimeter, in-radius, area tolerance) for profiles or a disk."""
    if isinstance(p, GeodesicDisk):
        t = np.linspace(0.0, p.R, n_disk)
        L, _ = disk_profiles(p, t)
        return t, L, p.L, p.R, 0.0
    return p.t, p.L, p.total_perimeter, p.R_M, p.tolerance


@dataclass
class TransplantResult:
    gradient: float
    norm: float
    boundary: float
    numerator: float
    denominator: float
    quotient: float
    quadrature_error: float
    profile_error: float

    def __iter__(self):
        # unpacks as (numerator, denominator, quotient)
        return iter((self.numerator, self.denominator, self.quotient))


def _sensitivity(g: np.ndarray, dg: np.ndarray, t: np.ndarray) -> float:
    """sup over |dA| <= 1 of |int g dA'| = |g(R)| + int |g'| (integration by parts, dA(0) = 0)."""
    return abs(float(g[-1])) + _trapz(np.abs(dg), t)


def transplant_rayleigh(p: EmpiricalProfiles | GeodesicDisk, psi: TestProfile,
                        beta: float) -> TransplantResult:
    """Robin form, L2 norm and Rayleigh quotient of psi(rho) on the profiled domain.

    ``profile_error`` bounds the change of the quotient under a perturbation of
    the area profile by its stated tolerance; ``quadrature_error`` estimates
    the trapezoid error.
    """
    if not beta < 0:
        raise ValueError(f"beta must be negative, got {beta}")
    t, L, perim, R, eps_A = _profile_on(p)
    if psi.T < R * (1 - 1e-12):
        raise ValueError(f"test profile covers [0, {psi.T}] but the domain needs [0, {R}]")
    s = np.minimum(t, psi.T)
    f = psi(s)
    df = psi.derivative(s)
    G, eG = _trapz_with_error(df**2 * L, t)
    D, eD = _trapz_with_error(f**2 * L, t)
    if not D > 0:
        raise ValueError("test function has zero norm")
    bdry = beta * perim * float(psi(0.0)) ** 2
    N = G + bdry
    Q = N / D
    d2f = psi.derivative(s, 2)
    dG = eps_A * _sensitivity(df**2, 2 * df * d2f, t)
    dD = eps_A * _sensitivity(f**2, 2 * f * df, t)
    return TransplantResult(gradient=G, norm=D, boundary=bdry, numerator=N, denominator=D,
                            quotient=Q, quadrature_error=(eG + abs(Q) * eD) / D,
                            profile_error=(dG + abs(Q) * dD) / D)


# -- functional inequalities -----------------------------------------------------------


@dataclass
class PropMargins:
    """Disk minus domain for the norms; boundary terms as an absolute difference."""

    norm: float
    gradient: float
    boundary: float
    norm_tolerance: float
    gradient_tolerance: float
    boundary_tolerance: float = 1e-10

    @property
    def ok(self) -> bool:
        return (self.norm >= -self.norm_tolerance and self.gradient >= -self.gradient_tolerance
                and self.boundary <= self.boundary_tolerance)


def _check_pair(p: EmpiricalProfiles, disk: GeodesicDisk) -> None:
    if abs(p.total_perimeter - disk.L) > p.length_tolerance:
        raise DomainError(f"perimeter mismatch: |dM|={p.total_perimeter}, |dB|={disk.L}")
    if disk.K > 0:
        cap = 2 * math.pi / disk.K
        if p.total_area > cap * (1 + 1e-12) or disk.A > cap * (1 + 1e-12):
            raise DomainError("areas must not exceed 2 pi / K")


def prop_main_check(p_M: EmpiricalProfiles, disk: GeodesicDisk, psi: TestProfile) -> PropMargins:
    """Compare ||u||^2, ||grad u||^2 and the boundary trace of psi(rho) on M and on the disk."""
    _check_pair(p_M, disk)
    if p_M.R_M > disk.R + p_M.length_tolerance:
        raise DomainError(f"in-radius {p_M.R_M} exceeds the disk radius {disk.R}")
    beta = -1.0  # the margins below do not involve beta
    m = transplant_rayleigh(p_M, psi, beta)
    b = transplant_rayleigh(disk, psi, beta)
    psi0 = float(psi(0.0)) ** 2
    return PropMargins(
        norm=b.norm - m.norm,
        gradient=b.gradient - m.gradient,
        boundary=abs(p_M.total_perimeter * psi0 - disk.L * psi0),
        norm_tolerance=_norm_tol(p_M, psi),
        gradient_tolerance=_grad_tol(p_M, psi),
        boundary_tolerance=1e-10 * max(1.0, disk.L * psi0),
    )


def _norm_tol(p: EmpiricalProfiles, psi: TestProfile) -> float:
    s = np.minimum(p.t, psi.T)
    f, df = psi(s), psi.derivative(s)
    return p.tolerance * _sensitivity(f**2, 2 * f * df, p.t) + _quad_err(f**2 * p.L, p.t)


def _grad_tol(p: EmpiricalProfiles, psi: TestProfile) -> float:
    s = np.minimum(p.t, psi.T)
    df, d2f = psi.derivative(s), psi.derivative(s, 2)
    return p.tolerance * _sensitivity(df**2, 2 * df * d2f, p.t) + _quad_err(df**2 * p.L, p.t)


def _quad_err(f, t) -> float:
    return _trapz_with_error(f, t)[1]


# -- upper-bound certificate -------------------------------------------------------------


@dataclass
class Certificate:
    domain_id: str
    beta: float
    lambda_disk: float
    rayleigh: float
    margins: dict
    tolerances: dict
    lambda_fem: float | None = None
    fem_error: float | None = None
    K: float = 0.0
    perimeter: float = 0.0
    area: float = 0.0
    disk_radius: float = 0.0
    ok: bool = True
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = asdict(self)
        if self.lambda_fem is None:
            out.pop("lambda_fem")
            out.pop("fem_error")
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def comparison_disk(d: Domain) -> GeodesicDisk:
    """Disk of the same perimeter on the model surface, hemisphere branch."""
    disk = disk_from_perimeter(d.K, d.perimeter, "hemisphere")
    if d.K > 0:
        cap = 2 * math.pi / d.K
        if d.area > cap * (1 + 1e-12) or disk.A > cap * (1 + 1e-12):
            raise DomainError(f"domain {d.name!r}: areas must not exceed 2 pi / K = {cap}")
    return disk


def theorem_upper_bound(d: Domain, beta: float, profiles: EmpiricalProfiles | None = None,
                        fem: tuple[float, float] | None = None, solver_tol: float = 1e-10,
                        raster_n: int = 512, grid_n: int = 256) -> Certificate:
    """Certify lambda(M) <= R[psi o rho] <= lambda(disk) for the perimeter-matched disk.

    ``fem`` is an optional ``(lambda, error_estimate)`` pair from a direct
    solve, checked against the transplanted quotient.
    """
    if not beta < 0:
        raise ValueError(f"beta must be negative, got {beta}")
    disk = comparison_disk(d)
    p = profiles if profiles is not None else compute_profiles(d, grid_n=grid_n, raster_n=raster_n)
    if p.R_M > disk.R + p.length_tolerance:
        raise DomainError(f"in-radius {p.R_M} exceeds the comparison radius {disk.R}")
    gs = solve_ground_state(disk.K, disk.R, beta)
    psi = TestProfile.from_ground_state(gs)
    tr = transplant_rayleigh(p, psi, beta)
    solver = solver_tol * max(1.0, abs(gs.lam))
    tol = tr.profile_error + tr.quadrature_error + solver
    margins = {"disk": gs.lam - tr.quotient}
    tols = {"profile": tr.profile_error, "quadrature": tr.quadrature_error, "solver": solver,
            "total": tol}
    ok = margins["disk"] >= -tol
    lam_fem = fem_err = None
    if fem is not None:
        lam_fem, fem_err = float(fem[0]), float(fem[1])
        margins["fem"] = tr.quotient - lam_fem
        margins["direct"] = gs.lam - lam_fem
        tols["fem"] = fem_err
        ok = ok and margins["fem"] >= -(tol + fem_err) and margins["direct"] >= -(solver + fem_err)
    return Certificate(domain_id=d.name, beta=float(beta), lambda_disk=gs.lam,
                       rayleigh=tr.quotient, margins=margins, tolerances=tols,
                       lambda_fem=lam_fem, fem_error=fem_err, K=d.K, perimeter=d.perimeter,
                       area=d.area, disk_radius=disk.R, ok=bool(ok),
                       extra={"in_radius": p.R_M, "raster_n": p.raster_n})
