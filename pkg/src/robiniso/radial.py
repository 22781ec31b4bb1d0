"""Lowest Robin eigenpairs of geodesic disks by radial shooting.

In geodesic polar coordinates the disk of radius R on the surface of
curvature K carries the metric dr^2 + w(r)^2 dtheta^2 with w(r) = r (K = 0) or
sin(sqrt(K) r)/sqrt(K).  The m-th Fourier fiber of the Robin Laplacian is

    -u'' - (w'/w) u' + (m^2/w^2) u = lam u    on (0, R),
    u regular at 0,   u'(R) + beta u(R) = 0.

The fiber is shot from a series start near r = 0 and the eigenvalue located
with a sign-change bracket followed by Brent's method.  Two independent
oracles live here as well: the Bessel transcendental equation for K = 0 and a
finite-difference discretisation of the same fiber.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.linalg import eigh_tridiagonal

PSI_CSV_HEADER = "# robiniso radial profile v1"


class RadialSolverError(RuntimeError):
    pass


def _check_inputs(K: float, R: float, beta: float) -> None:
    if K < 0:
        raise ValueError("negative curvature is not supported")
    if not R > 0:
        raise ValueError(f"radius must be positive, got {R}")
    if K > 0 and not R < math.pi / math.sqrt(K):
        raise ValueError("radius must be below pi/sqrt(K)")
    if not beta < 0:
        raise ValueError(f"beta must be negative, got {beta}")


def _weight(K: float, r):
    """w(r) with w(r)^2 = h(r), the circumferential metric factor."""
    if K == 0:
        return r
    s = math.sqrt(K)
    return np.sin(s * r) / s


def _log_weight_slope(K: float, r: float) -> float:
    if K == 0:
        return 1.0 / r
    s = math.sqrt(K)
    return s / math.tan(s * r)


def _series_start(K: float, lam: float, m: int, r0: float) -> tuple[float, float]:
    """u ~ r^m (1 + c r^2 + ...) at r0."""
    c = (K * m * (m + 1) / 3 - lam) / (4 * (m + 1))
    if m == 0:
        b = c * (2 * K / 3 - lam) / 16
        return 1 + c * r0**2 + b * r0**4, 2 * c * r0 + 4 * b * r0**3
    return r0**m * (1 + c * r0**2), m * r0 ** (m - 1) + c * (m + 2) * r0 ** (m + 1)


class _Fiber:
    def __init__(self, K: float, R: float, beta: float, m: int, rtol: float = 1e-12):
        self.K, self.R, self.beta, self.m = float(K), float(R), float(beta), int(m)
        self.r0 = 1e-6 * R
        self.rtol = rtol
        self.calls = 0

    def rhs(self, lam):
        K, m = self.K, self.m

        def f(r, y):
            u, du = y
            pot = m * m / _weight(K, r) ** 2 if m else 0.0
            return [du, -_log_weight_slope(K, r) * du + (pot - lam) * u]

        return f

    def shoot(self, lam: float, dense: bool = False):
        self.calls += 1
        u0, du0 = _series_start(self.K, lam, self.m, self.r0)
        scale = abs(u0) + abs(du0) * self.r0

        def crossing(r, y):
            return y[0]

        crossing.terminal = not dense
        crossing.direction = -1
        sol = integrate.solve_ivp(self.rhs(lam), (self.r0, self.R), [u0, du0], method="DOP853",
                                  rtol=self.rtol, atol=1e-30 * scale, events=crossing,
                                  dense_output=dense)
        if sol.status < 0:
            raise RadialSolverError(f"ODE integration failed at lam={lam}: {sol.message}")
        has_zero = len(sol.t_events[0]) > 0
        u, du = sol.y[0, -1], sol.y[1, -1]
        return u, du, has_zero, sol

    def classify(self, lam: float) -> tuple[bool, float | None]:
        """(below_root, log-derivative mismatch or None when u vanishes)."""
        u, du, has_zero, _ = self.shoot(lam)
        if has_zero or u <= 0:
            return False, None
        g = du / u + self.beta
        return g > 0, g

    def mismatch(self, lam: float) -> float:
        u, du, _, _ = self.shoot(lam)
        return du / u + self.beta


def _find_lowest(fib: _Fiber, tol: float, max_expand: int = 60) -> float:
    beta = fib.beta
    lo = -25 * beta**2
    for _ in range(max_expand):
        below, _ = fib.classify(lo)
        if below:
            break
        lo *= 4
    else:
        raise RadialSolverError("no eigenvalue found: lower bracket expansion exceeded cap")
    hi, step = -1e-12, 1.0
    below, g_hi = fib.classify(hi)
    n = 0
    while below:
        lo = hi
        hi = step
        step *= 4
        below, g_hi = fib.classify(hi)
        n += 1
        if n > max_expand:
            raise RadialSolverError("no eigenvalue found: upper bracket expansion exceeded cap")
    # shrink until u stays positive at the upper end, so the mismatch is continuous
    n = 0
    while g_hi is None:
        mid = 0.5 * (lo + hi)
        below, g = fib.classify(mid)
        if below:
            lo = mid
        else:
            hi, g_hi = mid, g
        n += 1
        if n > 200:
            raise RadialSolverError("could not isolate the lowest eigenvalue")
    return optimize.brentq(fib.mismatch, lo, hi, xtol=tol * max(1.0, abs(lo)), rtol=1e-15,
                           maxiter=200)


@dataclass
class RadialGroundState:
    """Lowest Robin eigenpair of a geodesic disk in the depth variable.

    ``psi[i]`` is the eigenfunction at depth ``t[i]`` below the boundary
    (geodesic distance ``R - t[i]`` from the centre), normalised by
    ``psi(0) = 1``; ``dpsi`` is its t-derivative.
    """

    K: float
    R: float
    beta: float
    lam: float
    t: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    ode_residual: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(PSI_CSV_HEADER + "\n")
            w = csv.writer(fh)
            w.writerow(["t", "psi", "dpsi"])
            for row in zip(self.t, self.psi, self.dpsi):
                w.writerow([f"{v:.12e}" for v in row])


def solve_mode(K: float, R: float, beta: float, m: int = 0, tol: float = 1e-12) -> float:
    """Lowest eigenvalue of the m-th Fourier fiber."""
    _check_inputs(K, R, beta)
    if m < 0:
        raise ValueError("fiber index must be nonnegative")
    return _find_lowest(_Fiber(K, R, beta, m), tol)


def solve_ground_state(K: float, R: float, beta: float, tol: float = 1e-12,
                       n_samples: int = 2001) -> RadialGroundState:
    """Ground state of the Robin Laplacian on the geodesic disk (K, R)."""
    _check_inputs(K, R, beta)
    fib = _Fiber(K, R, beta, 0)
    lam = _find_lowest(fib, tol)
    u_R, du_R, _, sol = fib.shoot(lam, dense=True)
    t = np.linspace(0.0, R, n_samples)
    r = R - t
    r_ode = np.maximum(r, fib.r0)
    y = sol.sol(r_ode)
    near0 = r < fib.r0
    if np.any(near0):
        c = -lam / 4
        y[0, near0] = 1 + c * r[near0] ** 2
        y[1, near0] = 2 * c * r[near0]
    # pin the boundary sample to the integrator's endpoint
    y[:, 0] = [u_R, du_R]
    psi = y[0] / u_R
    dpsi = -y[1] / u_R
    residual = abs(du_R + beta * u_R) / (abs(du_R) + abs(beta * u_R))
    if not np.all(psi > 0):
        raise RadialSolverError("computed ground state changes sign")
    return RadialGroundState(K=float(K), R=float(R), beta=float(beta), lam=float(lam), t=t,
                             psi=psi, dpsi=dpsi, ode_residual=float(residual))


# -- oracles -------------------------------------------------------------------------


def _bessel_i_series(nu: int, x: float) -> float:
    """x^-nu scaled power series of I_nu, returned as I_nu(x) e^{-x}."""
    half = 0.5 * x
    term = half**nu / math.factorial(nu)
    total = term
    k = 0
    while True:
        k += 1
        term *= half * half / (k * (k + nu))
        total += term
        if term <= 1e-17 * total:
            break
    return total * math.exp(-x)


def _bessel_i_asymptotic(nu: int, x: float) -> float:
    """Hankel expansion of I_nu(x) e^{-x} for large x."""
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    for k in range(1, 60):
        new = -term * (mu - (2 * k - 1) ** 2) / (k * 8 * x)
        if abs(new) > abs(term):
            break
        term = new
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total / math.sqrt(2 * math.pi * x)


def bessel_i_scaled(nu: int, x: float) -> float:
    """e^{-x} I_nu(x) for nu in {0, 1}, x >= 0."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    return _bessel_i_series(nu, x) if x <= 30 else _bessel_i_asymptotic(nu, x)


def bessel_ratio(x: float) -> float:
    """I_1(x) / I_0(x)."""
    return bessel_i_scaled(1, x) / bessel_i_scaled(0, x)


def euclid_disk_wavenumber(R: float, sigma: float, tol: float = 1e-15) -> float:
    """Positive root k of k I_1(kR) = sigma I_0(kR) by bisection."""
    if not (R > 0 and sigma > 0):
        raise ValueError("need R > 0 and sigma > 0")

    def f(k):
        return k * bessel_ratio(k * R) - sigma

    lo, hi = 0.0, 2.0 * sigma
    while f(hi) <= 0:
        lo, hi = hi, 2 * hi
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def euclid_disk_oracle(R: float, beta: float) -> float:
    """Lowest Robin eigenvalue of the Euclidean disk of radius R via Bessel functions."""
    if not (R > 0 and beta < 0):
        raise ValueError("need R > 0 and beta < 0")
    return -euclid_disk_wavenumber(R, -beta) ** 2


def fd_fiber_eigenvalue(K: float, R: float, beta: float, m: int = 0, n: int = 10_000) -> float:
    """Lowest eigenvalue of the m-th fiber from a lumped P1 discretisation on ``n`` nodes."""
    _check_inputs(K, R, beta)
    r = np.linspace(0.0, R, n)
    dr = r[1] - r[0]
    wm = _weight(K, 0.5 * (r[1:] + r[:-1]))
    k_e = wm / dr
    diag = np.zeros(n)
    diag[:-1] += k_e
    diag[1:] += k_e
    off = -k_e
    mass = np.zeros(n)
    mass[:-1] += 0.5 * dr * wm
    mass[1:] += 0.5 * dr * wm
    if m:
        wn = _weight(K, r[1:])
        diag[1:] += m * m * mass[1:] / wn**2
    diag[-1] += beta * _weight(K, R)
    if m:
        diag, off, mass = diag[1:], off[1:], mass[1:]
    s = 1 / np.sqrt(mass)
    d = diag * s * s
    e = off * s[:-1] * s[1:]
    return float(eigh_tridiagonal(d, e, select="i", select_range=(0, 0), eigvals_only=True)[0])
