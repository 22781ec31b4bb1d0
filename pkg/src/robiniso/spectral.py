"""Relations between Robin eigenvalue curves and other spectral quantities.

* Dirichlet-to-Neumann: the lowest eigenvalue sigma_lam of the DtN map at
  energy lam < 0 satisfies sigma_lam = -beta* where lam_{beta*} = lam, so it is
  found by inverting the (strictly increasing) Robin curve beta -> lam_beta.
* Weak coupling: d lam_beta / d beta at beta = 0 equals |dM| / |M|.
* The two caps of equal perimeter on the sphere: for small |beta| the larger
  cap has the larger eigenvalue, so the comparison with the disk needs the
  hemisphere restriction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from . import fem2d
from .domains import Domain, DomainError
from .geometry import GeodesicDisk, disk_from_perimeter
from .radial import solve_mode

CURVE_CSV_HEADER = "# robiniso robin curve v1"
DTN_CSV_HEADER = "# robiniso dtn sweep v1"


class SpectralError(RuntimeError):
    pass


@dataclass
class SpectralCurve:
    """beta -> lowest Robin eigenvalue, with memoised solver calls."""

    solver: Callable[[float], float]
    area: float
    perimeter: float
    label: str = ""
    cache: dict = field(default_factory=dict)

    def __call__(self, beta: float) -> float:
        beta = float(beta)
        if beta > 0:
            raise ValueError("only beta <= 0 is supported")
        if beta == 0.0:
            return 0.0
        if beta not in self.cache:
            self.cache[beta] = float(self.solver(beta))
        return self.cache[beta]

    @classmethod
    def radial(cls, K: float, R: float, tol: float = 1e-13) -> "SpectralCurve":
        disk = GeodesicDisk(K, R)
        return cls(lambda b: solve_mode(K, R, b, 0, tol=tol), disk.A, disk.L,
                   label=f"disk K={K:g} R={R:.6g}")

    @classmethod
    def fem(cls, mesh: fem2d.TriMesh, label: str = "") -> "SpectralCurve":
        mats = fem2d.assemble(mesh)
        return cls(lambda b: fem2d.solve_lowest(mesh, b, matrices=mats).lam, mesh.area(),
                   mesh.boundary_length(), label=label)

    def sample(self, betas) -> np.ndarray:
        lam = np.array([self(b) for b in betas])
        order = np.argsort(betas)
        if np.any(np.diff(lam[order]) <= 0):
            raise SpectralError("sampled curve is not strictly increasing in beta")
        return lam

    def to_csv(self, path, betas) -> None:
        lam = self.sample(betas)
        with open(path, "w", newline="") as fh:
            fh.write(CURVE_CSV_HEADER + "\n")
            w = csv.writer(fh)
            w.writerow(["beta", "lambda"])
            for b, v in zip(betas, lam):
                w.writerow([f"{b:.12e}", f"{v:.12e}"])


def dtn_lowest(curve: SpectralCurve, lam: float, tol: float = 1e-12,
               max_expand: int = 60) -> float:
    """sigma_lam = -beta* with lam_{beta*} = lam, by bracketing and Brent's method."""
    if not lam < 0:
        raise ValueError(f"lambda must be negative, got {lam}")
    hi = 0.0
    lo = -math.sqrt(-lam)
    for _ in range(max_expand):
        v = curve(lo)
        if v < lam:
            break
        hi = lo
        lo *= 2
    else:
        raise SpectralError(f"lambda={lam} not reached on the search bracket")
    beta = optimize.brentq(lambda b: curve(b) - lam, lo, hi, xtol=tol, rtol=1e-15, maxiter=200)
    return -float(beta)


def disk_dtn_oracle(R: float, lam: float) -> float:
    """k I_1(kR) / I_0(kR) for the Euclidean disk of radius R at lam = -k^2."""
    from .radial import bessel_ratio

    if not lam < 0:
        raise ValueError("lambda must be negative")
    k = math.sqrt(-lam)
    return k * bessel_ratio(k * R)


def dtn_sweep_csv(path, curve: SpectralCurve, lams) -> list[float]:
    sig = [dtn_lowest(curve, lam) for lam in lams]
    with open(path, "w", newline="") as fh:
        fh.write(DTN_CSV_HEADER + "\n")
        w = csv.writer(fh)
        w.writerow(["lambda", "sigma"])
        for lam, s in zip(lams, sig):
            w.writerow([f"{lam:.12e}", f"{s:.12e}"])
    return sig


@dataclass
class DtnCheck:
    lam: float
    sigma_domain: float
    sigma_disk: float
    margin: float
    fem_error: float
    levels: list

    @property
    def ok(self) -> bool:
        return self.margin >= -self.fem_error


DTN_LADDER = ((32, 128), (64, 256))


def dtn_isoperimetric_check(d: Domain, lam: float, ladder=DTN_LADDER) -> DtnCheck:
    """sigma_lam(disk) - sigma_lam(M) for a planar domain, FEM side extrapolated in h^2."""
    if d.kind != "planar":
        raise DomainError("the direct DtN comparison needs a planar domain")
    disk = disk_from_perimeter(0.0, d.perimeter)
    sig_b = dtn_lowest(SpectralCurve.radial(0.0, disk.R), lam)
    sig, hs = [], []
    for nr, na in ladder:
        mesh = fem2d.mesh_star_shaped(d, nr, na)
        sig.append(dtn_lowest(SpectralCurve.fem(mesh), lam, tol=1e-10))
        hs.append(mesh.h_max)
    if len(sig) >= 2:
        r = (hs[-2] / hs[-1]) ** 2
        sig_m = sig[-1] + (sig[-1] - sig[-2]) / (r - 1)
        err = abs(sig_m - sig[-1])
    else:
        sig_m, err = sig[-1], 0.0
    return DtnCheck(lam=lam, sigma_domain=sig_m, sigma_disk=sig_b, margin=sig_b - sig_m,
                    fem_error=err, levels=sig)


# -- weak coupling ---------------------------------------------------------------------


def weak_slope(d: Domain | GeodesicDisk) -> float:
    """|dM| / |M|, the derivative of the lowest Robin eigenvalue at beta = 0."""
    if isinstance(d, GeodesicDisk):
        return d.L / d.A
    return d.perimeter / d.area


@dataclass
class WeakSlopeCheck:
    fd_slope: float
    exact: float
    rel_error: float
    h: float


def weak_slope_check(curve: SpectralCurve, h: float = 1e-3, exact: float | None = None) -> WeakSlopeCheck:
    """Second-order one-sided difference at beta = 0 using lam_0 = 0."""
    f1, f2 = curve(-h), curve(-2 * h)
    fd = (f2 - 4 * f1) / (2 * h)
    ex = curve.perimeter / curve.area if exact is None else exact
    return WeakSlopeCheck(fd_slope=fd, exact=ex, rel_error=abs(fd - ex) / abs(ex), h=h)


# -- two caps ---------------------------------------------------------------------------


@dataclass
class CounterexampleReport:
    L: float
    beta: float
    R_small: float
    R_big: float
    lam_small: float
    lam_big: float
    gap: float
    slope_gap: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.gap > self.tol and self.lam_small < 0 and self.lam_big < 0

    def as_dict(self) -> dict:
        out = dict(self.__dict__)
        out["ok"] = self.ok
        return out


def counterexample_caps(L: float = math.pi, beta: float = -0.01, tol: float = 1e-8) -> CounterexampleReport:
    """Compare the two caps of perimeter L on the unit sphere at small coupling."""
    if not 0 < L < 2 * math.pi:
        raise ValueError("L must lie in (0, 2 pi)")
    if not beta < 0:
        raise ValueError("beta must be negative")
    small = disk_from_perimeter(1.0, L, "hemisphere")
    big = disk_from_perimeter(1.0, L, "complement")
    lam_s = solve_mode(1.0, small.R, beta, 0, tol=1e-14)
    lam_b = solve_mode(1.0, big.R, beta, 0, tol=1e-14)
    slope = L * (1 / small.A - 1 / big.A)
    rep = CounterexampleReport(L=L, beta=beta, R_small=small.R, R_big=big.R, lam_small=lam_s,
                               lam_big=lam_b, gap=lam_b - lam_s, slope_gap=slope, tol=tol)
    if not rep.ok:
        fd = (beta * L / big.A) - (beta * L / small.A)
        if rep.gap * fd <= 0:
            raise SpectralError(f"|beta|={abs(beta)} is outside the weak-coupling regime")
    return rep
