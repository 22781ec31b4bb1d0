"""Simply-connected planar and spherical domains given by boundary polylines.

Besides perimeter and area this module evaluates the distance to the
boundary and the parallel-coordinate profiles of a domain,

    A(t) = area of {x : rho(x) < t},   L(t) = length of {x : rho(x) = t},

where rho is the (geodesic) distance to the boundary.

Profiles come from a raster.  Every cell centre carries its signed distance
(positive inside) and its area.  The counting measure is smoothed in the
depth variable with the fourth-order Gaussian kernel k(z) = (3 - z^2) phi(z)/2,
whose second moment vanishes::

    A(t) = sum_c w_c [F((t - rho_c)/sigma) - F(-rho_c/sigma)],  F(z) = Phi(z) + z phi(z)/2
    L(t) = dA/dt = sum_c w_c k((t - rho_c)/sigma) / sigma

so L is the exact derivative of A and the smoothing bias is O(sigma^4) where
the profiles are smooth.  Near the in-radius, where L may jump, the error is
O(sigma) times the jump; the stated tolerances cover that.

Planar rasters are uniform on the bounding box.  Spherical rasters are
uniform in (phi, theta) on the bounding box of the domain after rotating the
witness to the equator, with exact cell areas (sin theta_2 - sin theta_1) dphi.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate, optimize, special
from scipy.spatial import cKDTree

from .geometry import GeodesicDisk, disk_profiles

PROFILE_CSV_HEADER = "# robiniso profiles v1"
MIN_POINTS = 16


class DomainError(ValueError):
    """Invalid domain input or a query the domain cannot answer."""


@dataclass
class Domain:
    """Closed boundary polyline of a simply-connected domain.

    ``points`` is ``(n, 2)`` for planar domains and ``(n, 3)`` unit vectors for
    spherical ones.  The polyline is stored positively oriented (interior on
    the left); a clockwise input is reversed.  Spherical domains need a
    ``witness`` point inside; it defaults to the normalised vertex mean.
    """

    kind: str
    points: np.ndarray
    analytic: dict | None = None
    witness: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("planar", "spherical"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != (2 if self.kind == "planar" else 3):
            raise DomainError(f"bad point array shape {pts.shape} for {self.kind} domain")
        if np.allclose(pts[0], pts[-1]) and len(pts) > 1:
            pts = pts[:-1]
        if len(pts) < MIN_POINTS:
            raise DomainError(f"need at least {MIN_POINTS} boundary points, got {len(pts)}")
        seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        if np.any(seg == 0):
            raise DomainError("consecutive boundary points coincide")
        if self.kind == "spherical":
            norms = np.linalg.norm(pts, axis=1)
            if np.max(np.abs(norms - 1)) > 1e-12:
                raise DomainError("spherical boundary points must have unit norm")
            if self.witness is None:
                w = pts.mean(axis=0)
                if np.linalg.norm(w) < 1e-8:
                    raise DomainError("cannot infer a witness point; pass one explicitly")
                self.witness = w / np.linalg.norm(w)
            else:
                w = np.asarray(self.witness, dtype=float)
                self.witness = w / np.linalg.norm(w)
            if _spherical_signed_area(pts, self.witness) < 0:
                pts = pts[::-1].copy()
        else:
            if _shoelace(pts) < 0:
                pts = pts[::-1].copy()
            if self.witness is not None:
                self.witness = np.asarray(self.witness, dtype=float)
        self.points = pts
        if self.kind == "spherical":
            a = self.area
            if not 0 < a < 4 * np.pi:
                raise DomainError(f"spherical area {a} outside (0, 4 pi)")
            if self.signed_distance(self.witness) <= 0:
                raise DomainError("witness point is not inside the domain")

    # -- basic measures -----------------------------------------------------

    @property
    def K(self) -> float:
        """Curvature of the ambient surface (unit sphere or plane)."""
        return 1.0 if self.kind == "spherical" else 0.0

    @property
    def perimeter(self) -> float:
        if self.analytic is not None:
            return _analytic_measures(self.analytic, self.kind)[0]
        return self.polyline_perimeter

    @property
    def area(self) -> float:
        if self.analytic is not None:
            return _analytic_measures(self.analytic, self.kind)[1]
        return self.polyline_area

    @property
    def polyline_perimeter(self) -> float:
        p = self.points
        q = np.roll(p, -1, axis=0)
        if self.kind == "planar":
            return float(np.linalg.norm(q - p, axis=1).sum())
        return float(_arc_angle(p, q).sum())

    @property
    def polyline_area(self) -> float:
        if self.kind == "planar":
            return float(_shoelace(self.points))
        return float(_spherical_signed_area(self.points, self.witness))

    # -- distance ------------------------------------------------------------

    def signed_distance(self, x) -> np.ndarray | float:
        """Distance to the boundary, positive inside and negative outside."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        if self.kind == "planar":
            d = _planar_signed_distance(pts, self.points)
        else:
            pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
            d = _spherical_signed_distance(pts, self.points)
        return float(d[0]) if single else d

    def contains(self, x) -> np.ndarray | bool:
        d = self.signed_distance(x)
        return d > 0

    # -- (de)serialisation ---------------------------------------------------

    def to_json(self) -> dict:
        out = {"kind": self.kind, "points": self.points.tolist()}
        if self.analytic is not None:
            out["analytic"] = self.analytic
        if self.witness is not None:
            out["witness"] = np.asarray(self.witness).tolist()
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Domain":
        try:
            kind = obj["kind"]
            points = obj["points"]
        except KeyError as exc:
            raise DomainError(f"domain file lacks field {exc}") from None
        return cls(kind, np.asarray(points, dtype=float), obj.get("analytic"),
                   obj.get("witness"), obj.get("name", ""))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path) -> "Domain":
        obj = json.loads(Path(path).read_text())
        if not obj.get("name"):
            obj["name"] = Path(path).stem
        return cls.from_json(obj)


def perimeter(d: Domain) -> float:
    return d.perimeter


def area(d: Domain) -> float:
    return d.area


def distance_to_boundary(d: Domain, x) -> float:
    """Distance from an interior point ``x`` to the boundary of ``d``."""
    rho = d.signed_distance(np.asarray(x, dtype=float))
    if rho <= 0:
        raise DomainError(f"point {x} is not inside the domain")
    return rho


# -- analytic descriptors ------------------------------------------------------


def _analytic_measures(desc: dict, kind: str) -> tuple[float, float]:
    typ = desc.get("type")
    par = desc.get("params", {})
    if kind == "planar" and typ == "disk":
        R = float(par["R"])
        return 2 * math.pi * R, math.pi * R**2
    if kind == "planar" and typ == "ellipse":
        a, b = float(par["a"]), float(par["b"])
        return ellipse_perimeter(a, b), math.pi * a * b
    if kind == "spherical" and typ == "cap":
        disk = GeodesicDisk(1.0, float(par["R"]))
        return disk.L, disk.A
    raise DomainError(f"unsupported analytic descriptor {typ!r} for {kind} domain")


def ellipse_perimeter(a: float, b: float) -> float:
    """Arc length of the ellipse with semi-axes a, b (complete elliptic integral)."""
    a, b = max(a, b), min(a, b)
    return 4 * a * float(special.ellipe(1 - (b / a) ** 2))


def ellipse_perimeter_quad(a: float, b: float) -> float:
    """Same quantity by adaptive quadrature of the arc-length integrand."""
    val, _ = integrate.quad(lambda s: math.hypot(a * math.sin(s), b * math.cos(s)),
                            0, 2 * math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


# -- planar kernels ------------------------------------------------------------


def _shoelace(p: np.ndarray) -> float:
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _candidate_segments(P: np.ndarray, mids: np.ndarray, k: int) -> np.ndarray:
    # the nearest segment of a densely sampled polyline is among the segments
    # with the nearest midpoints; ties far from the boundary are harmless
    k = min(k, len(mids))
    _, idx = cKDTree(mids).query(P, k=k, workers=-1)
    return idx.reshape(len(P), k)


def _planar_signed_distance(P: np.ndarray, V: np.ndarray, k: int = 8,
                            chunk: int = 200_000) -> np.ndarray:
    D = np.roll(V, -1, axis=0) - V
    dd = np.einsum("ij,ij->i", D, D)
    # outward normals of the edges and pseudo-normals at vertices
    n_edge = np.stack([D[:, 1], -D[:, 0]], axis=1) / np.sqrt(dd)[:, None]
    n_vert = n_edge + np.roll(n_edge, 1, axis=0)
    m = len(V)
    cand_all = _candidate_segments(P, V + 0.5 * D, k)
    out = np.empty(len(P))
    for s in range(0, len(P), chunk):
        X = P[s:s + chunk]
        cand = cand_all[s:s + chunk]
        rel = X[:, None, :] - V[cand]
        Dc = D[cand]
        t = np.einsum("pmk,pmk->pm", rel, Dc) / dd[cand]
        np.clip(t, 0.0, 1.0, out=t)
        diff = rel - t[..., None] * Dc
        d2 = np.einsum("pmk,pmk->pm", diff, diff)
        j = np.argmin(d2, axis=1)
        rows = np.arange(len(X))
        seg = cand[rows, j]
        tk = t[rows, j]
        vec = diff[rows, j]
        dist = np.sqrt(d2[rows, j])
        normal = n_edge[seg].copy()
        at_start = tk <= 0.0
        at_end = tk >= 1.0
        normal[at_start] = n_vert[seg[at_start]]
        normal[at_end] = n_vert[(seg[at_end] + 1) % m]
        outside = np.einsum("ij,ij->i", vec, normal) > 0
        out[s:s + chunk] = np.where(outside, -dist, dist)
    return out


# -- spherical kernels ---------------------------------------------------------


def _arc_angle(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.arctan2(np.linalg.norm(np.cross(p, q), axis=-1), np.einsum("...k,...k->...", p, q))


def _spherical_signed_area(p: np.ndarray, w: np.ndarray) -> float:
    """Signed area of the polygon seen from witness ``w`` (sum of triangles)."""
    q = np.roll(p, -1, axis=0)
    num = np.einsum("ik,ik->i", np.broadcast_to(w, p.shape), np.cross(p, q))
    den = 1 + p @ w + np.einsum("ik,ik->i", p, q) + q @ w
    return float(2 * np.arctan2(num, den).sum())


def _spherical_signed_distance(P: np.ndarray, V: np.ndarray, k: int = 8,
                               chunk: int = 200_000) -> np.ndarray:
    W = np.roll(V, -1, axis=0)
    n_edge = np.cross(V, W)
    n_edge /= np.linalg.norm(n_edge, axis=1, keepdims=True)
    # n_edge points to the interior side of a positively oriented boundary
    n_vert = n_edge + np.roll(n_edge, 1, axis=0)
    m = len(V)
    n_x_v = np.cross(n_edge, V)
    w_x_n = np.cross(W, n_edge)
    mids = V + W
    mids /= np.linalg.norm(mids, axis=1, keepdims=True)
    cand_all = _candidate_segments(P, mids, k)
    out = np.empty(len(P))
    for s in range(0, len(P), chunk):
        X = P[s:s + chunk]
        cand = cand_all[s:s + chunk]
        sn = np.einsum("pk,pmk->pm", X, n_edge[cand])   # sine of distance to the great circle
        ca = np.einsum("pk,pmk->pm", X, V[cand])
        cb = np.einsum("pk,pmk->pm", X, W[cand])
        # the foot point x - sn n lies on the arc iff it is between a and b; since
        # n is orthogonal to n x a and b x n this reduces to two dot products with x
        on_arc = ((np.einsum("pk,pmk->pm", X, n_x_v[cand]) >= 0)
                  & (np.einsum("pk,pmk->pm", X, w_x_n[cand]) >= 0))
        cosd = np.where(on_arc, np.sqrt(np.clip(1 - sn**2, 0, 1)), np.maximum(ca, cb))
        j = np.argmax(cosd, axis=1)
        rows = np.arange(len(X))
        seg = cand[rows, j]
        sk = sn[rows, j]
        vertex = ~on_arc[rows, j]
        vidx = np.where(cb[rows, j] > ca[rows, j], (seg + 1) % m, seg)
        ang = np.where(vertex, _arc_angle(X, V[vidx]), np.arcsin(np.clip(np.abs(sk), 0, 1)))
        side = np.where(vertex, np.einsum("ij,ij->i", X, n_vert[vidx]), sk)
        out[s:s + chunk] = np.where(side > 0, ang, -ang)
    return out


def _rotation_to_pole(w: np.ndarray) -> np.ndarray:
    """Rotation matrix taking unit vector ``w`` to the north pole (0, 0, 1)."""
    z = np.array([0.0, 0.0, 1.0])
    v = np.cross(w, z)
    s = np.linalg.norm(v)
    c = float(np.dot(w, z))
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx * ((1 - c) / s**2)


# -- profiles ----------------------------------------------------------------------


@dataclass
class EmpiricalProfiles:
    """Sampled parallel-coordinate profiles of a domain.

    ``tolerance`` is in area units and ``length_tolerance`` in length units;
    both scale with the raster spacing ``h``.
    """

    t: np.ndarray
    A: np.ndarray
    L: np.ndarray
    R_M: float
    total_area: float
    total_perimeter: float
    h: float
    sigma: float
    raster_n: int
    tolerance: float
    length_tolerance: float
    kind: str = "planar"
    name: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def K(self) -> float:
        return 1.0 if self.kind == "spherical" else 0.0

    def inner_area(self) -> np.ndarray:
        """Area of the inner parallel set {rho > t}."""
        return self.total_area - self.A

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(PROFILE_CSV_HEADER + "\n")
            w = csv.writer(fh)
            w.writerow(["t", "A", "L"])
            for row in zip(self.t, self.A, self.L):
                w.writerow([f"{v:.12e}" for v in row])


def read_profiles_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", comments="#", skiprows=2)
    return data[:, 0], data[:, 1], data[:, 2]


def _raster_planar(d: Domain, raster_n: int):
    lo = d.points.min(axis=0)
    hi = d.points.max(axis=0)
    h = float(np.max(hi - lo)) / raster_n
    sigma = 1.5 * h
    pad = 7 * sigma + h
    xs = np.arange(lo[0] - pad + h / 2, hi[0] + pad, h)
    ys = np.arange(lo[1] - pad + h / 2, hi[1] + pad, h)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    P = np.column_stack([X.ravel(), Y.ravel()])
    rho = _planar_signed_distance(P, d.points)
    w = np.full(len(P), h * h)
    return P, rho, w, h, sigma


def _far_axis(d: Domain) -> np.ndarray:
    """Axis whose two ends are farthest from the boundary (witness among candidates)."""
    n = 400
    k = np.arange(n) + 0.5
    z = 1 - k / n
    r = np.sqrt(1 - z * z)
    ang = np.pi * (1 + 5**0.5) * k
    cand = np.vstack([d.witness, np.column_stack([r * np.cos(ang), r * np.sin(ang), z])])
    dist = np.minimum(np.abs(d.signed_distance(cand)), np.abs(d.signed_distance(-cand)))
    return cand[int(np.argmax(dist))]


_POLE_TO_EQUATOR = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])


def _raster_spherical(d: Domain, raster_n: int):
    """Uniform (phi, theta) grid over the bounding box of the domain.

    The witness is rotated to (phi, theta) = (0, 0) on the equator, where the
    coordinate cells are closest to square.  Cells carry their exact area
    (sin theta_2 - sin theta_1) dphi.
    """
    Q = _POLE_TO_EQUATOR @ _rotation_to_pole(d.witness)
    V = d.points @ Q.T
    phi_b = np.arctan2(V[:, 1], V[:, 0])
    th_b = np.arcsin(np.clip(V[:, 2], -1, 1))
    ext = max(float(th_b.max() - th_b.min()), float(phi_b.max() - phi_b.min()))
    s = ext / raster_n
    pad = 11.5 * s
    poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]) @ Q
    th_lo = max(-np.pi / 2, float(th_b.min()) - pad)
    th_hi = min(np.pi / 2, float(th_b.max()) + pad)
    cos_edge = math.cos(min(np.pi / 2, max(abs(th_lo), abs(th_hi))))
    full = bool(np.any(d.contains(poles))) or np.abs(phi_b).max() > 0.9 * np.pi or cos_edge < 0.05
    if not full:
        ph_lo = float(phi_b.min()) - pad / cos_edge
        ph_hi = float(phi_b.max()) + pad / cos_edge
        full = ph_hi - ph_lo >= 2 * np.pi
    if full:
        # whole sphere: keep the singular grid poles well away from the boundary,
        # where the midpoint rule in (phi, theta) loses accuracy
        Q = _rotation_to_pole(_far_axis(d))
        V = d.points @ Q.T
        s = np.pi / raster_n
        ph_lo, ph_hi = -np.pi, np.pi
        th_lo, th_hi = -np.pi / 2, np.pi / 2
    n_th = max(8, int(math.ceil((th_hi - th_lo) / s)))
    n_ph = max(8, int(math.ceil((ph_hi - ph_lo) / s)))
    dth = (th_hi - th_lo) / n_th
    dph = (ph_hi - ph_lo) / n_ph
    h = max(dth, dph)
    th_edges = th_lo + dth * np.arange(n_th + 1)
    th = 0.5 * (th_edges[1:] + th_edges[:-1])
    ph = ph_lo + dph * (np.arange(n_ph) + 0.5)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    cell = (np.sin(th_edges[1:]) - np.sin(th_edges[:-1])) * dph
    W = np.broadcast_to(cell[:, None], TH.shape).ravel()
    P = np.column_stack([(np.cos(TH) * np.cos(PH)).ravel(), (np.cos(TH) * np.sin(PH)).ravel(),
                         np.sin(TH).ravel()])
    rho = _spherical_signed_distance(P, V)
    return P @ Q, rho, W.copy(), h, 1.5 * h


def _gauss(z):
    return np.exp(-0.5 * z * z) * (1 / math.sqrt(2 * math.pi))


def _refine_inradius(d: Domain, x0: np.ndarray) -> float:
    if d.kind == "planar":
        res = optimize.minimize(lambda x: -d.signed_distance(x), x0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 400})
        return float(max(-res.fun, d.signed_distance(x0)))
    # tangent-plane coordinates around x0
    e1 = np.cross(x0, [1.0, 0, 0] if abs(x0[0]) < 0.9 else [0, 1.0, 0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(x0, e1)

    def f(u):
        y = x0 + u[0] * e1 + u[1] * e2
        return -d.signed_distance(y / np.linalg.norm(y))

    res = optimize.minimize(f, np.zeros(2), method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 400})
    return float(max(-res.fun, d.signed_distance(x0)))


def compute_profiles(d: Domain, grid_n: int = 256, raster_n: int = 512) -> EmpiricalProfiles:
    """Rasterise ``d`` and return its profiles A(t), L(t) on ``grid_n + 1`` depths."""
    if grid_n < 32:
        raise DomainError("grid_n must be at least 32")
    if raster_n < 256:
        raise DomainError("raster_n must be at least 256")
    if d.kind == "planar":
        P, rho, w, h, sigma = _raster_planar(d, raster_n)
    else:
        P, rho, w, h, sigma = _raster_spherical(d, raster_n)
    interior = rho > 0
    if interior.sum() < 1000:
        raise DomainError(f"raster too coarse: only {int(interior.sum())} interior samples")
    best = int(np.argmax(rho))
    R_M = _refine_inradius(d, P[best])

    # deposit cell weights on a fine depth histogram (linear weights), then
    # evaluate the smoothed sums per grid depth.  The kernel is the Gaussian
    # with its sigma^2/2 second-moment bias removed (fourth-order kernel).
    keep = rho > -8 * sigma
    r, wk = rho[keep], w[keep]
    delta = sigma / 64
    lo = -8 * sigma
    idx = (r - lo) / delta
    i0 = np.floor(idx).astype(int)
    frac = idx - i0
    nb = int(i0.max()) + 2
    hist = np.bincount(i0, wk * (1 - frac), minlength=nb) + np.bincount(i0 + 1, wk * frac, minlength=nb)
    centers = lo + delta * np.arange(nb)

    t = np.linspace(0.0, R_M, grid_n + 1)
    A = np.empty_like(t)
    L = np.empty_like(t)
    z0 = -centers / sigma
    F0 = (special.ndtr(z0) + 0.5 * z0 * _gauss(z0)) @ hist
    for i, ti in enumerate(t):
        z = (ti - centers) / sigma
        g = _gauss(z)
        A[i] = (special.ndtr(z) + 0.5 * z * g) @ hist - F0
        L[i] = (0.5 * (3 - z * z) * g) @ hist / sigma
    A[0] = 0.0

    total_perimeter = d.perimeter
    total_area = d.area
    # smoothing smears the profiles over a few sigma at the in-radius
    tolerance = 0.1 * sigma * total_perimeter
    length_tolerance = 2 * math.pi * sigma
    meta = {
        "area_defect": float(total_area - A[-1]),
        "perimeter_defect": float(total_perimeter - L[0]),
        "cells": int(len(P)),
        "interior_cells": int(interior.sum()),
    }
    return EmpiricalProfiles(t=t, A=A, L=L, R_M=R_M, total_area=total_area,
                             total_perimeter=total_perimeter, h=h, sigma=sigma,
                             raster_n=raster_n, tolerance=tolerance,
                             length_tolerance=length_tolerance, kind=d.kind,
                             name=d.name, meta=meta)


# -- profile domination -------------------------------------------------------------------


@dataclass
class DominationReport:
    inradius_margin: float
    inner_area_margin: float
    length_margin: float
    tolerance: float
    length_tolerance: float

    @property
    def ok(self) -> bool:
        return (self.inradius_margin >= -self.length_tolerance
                and self.inner_area_margin >= -self.tolerance
                and self.length_margin >= -self.length_tolerance)

    def as_dict(self) -> dict:
        return {"inradius_margin": self.inradius_margin,
                "inner_area_margin": self.inner_area_margin,
                "length_margin": self.length_margin,
                "tolerance": self.tolerance,
                "length_tolerance": self.length_tolerance,
                "ok": self.ok}


def check_profile_domination(p: EmpiricalProfiles, disk: GeodesicDisk) -> DominationReport:
    """Compare the profiles of M against the perimeter-matched disk.

    Margins: R_B - R_M, min_t(|B(t)| - |M(t)|) and min_t(L_B(t) - L_M(t))
    over the profile grid, where X(t) is the inner parallel set {rho > t}.
    """
    if abs(p.total_perimeter - disk.L) > p.length_tolerance:
        raise DomainError(f"perimeter mismatch: |dM|={p.total_perimeter}, |dB|={disk.L}")
    if disk.K > 0:
        cap = 2 * np.pi / disk.K
        if p.total_area > cap * (1 + 1e-12) or disk.A > cap * (1 + 1e-12):
            raise DomainError("areas must not exceed the hemisphere area 2 pi / K")
    inr = disk.R - p.R_M
    t = np.minimum(p.t, disk.R)
    LB, AB = disk_profiles(disk, t)
    inner_B = disk.A - AB
    area_m = float(np.min(inner_B - p.inner_area()))
    len_m = float(np.min(LB - p.L))
    return DominationReport(inr, area_m, len_m, p.tolerance, p.length_tolerance)
