"""P1 finite elements for the lowest Robin eigenvalue of planar domains.

Only star-shaped domains are meshed: rings of vertices are placed at fixed
fractions of the ray length from a centre to the boundary, and the quads
between consecutive rings are split along their shorter diagonal.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .domains import Domain, DomainError, _planar_signed_distance

MESH_HEADER = "# robiniso mesh v1"
EIGVEC_CSV_HEADER = "# robiniso fem eigenvector v1"


class FemError(RuntimeError):
    pass


@dataclass
class TriMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    h_max: float

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def triangle_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def boundary_length(self) -> float:
        e = self.vertices[self.boundary_edges]
        return float(np.linalg.norm(e[:, 1] - e[:, 0], axis=1).sum())

    def area(self) -> float:
        return float(self.triangle_areas().sum())

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(MESH_HEADER + "\n")
            fh.write(f"{len(self.vertices)} {len(self.triangles)}\n")
            for x, y in self.vertices:
                fh.write(f"{float(x)!r} {float(y)!r}\n")
            for a, b, c in self.triangles:
                fh.write(f"{a} {b} {c}\n")

    @classmethod
    def load(cls, path) -> "TriMesh":
        with open(path) as fh:
            lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
        nv, nt = (int(v) for v in lines[0].split())
        V = np.array([[float(v) for v in ln.split()] for ln in lines[1:1 + nv]])
        T = np.array([[int(v) for v in ln.split()] for ln in lines[1 + nv:1 + nv + nt]])
        return from_triangles(V, T)


def _edge_lengths(V: np.ndarray, T: np.ndarray) -> np.ndarray:
    p = V[T]
    return np.linalg.norm(p[:, [1, 2, 0]] - p, axis=2)


def _ordered_boundary(T: np.ndarray) -> np.ndarray:
    """Boundary edges (edges used by one triangle), chained head to tail."""
    e = np.concatenate([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]])
    key = np.sort(e, axis=1)
    _, inv, cnt = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    bnd = e[cnt[inv.ravel()] == 1]
    nxt = {int(a): int(b) for a, b in bnd}
    if len(nxt) != len(bnd):
        raise FemError("boundary is not a simple closed curve")
    start = int(bnd[0, 0])
    out, cur = [], start
    for _ in range(len(bnd)):
        out.append((cur, nxt[cur]))
        cur = nxt[cur]
        if cur == start:
            break
    if len(out) != len(bnd):
        raise FemError("boundary has more than one component")
    return np.array(out, dtype=np.int64)


def from_triangles(vertices, triangles) -> TriMesh:
    V = np.asarray(vertices, dtype=float)
    T = np.asarray(triangles, dtype=np.int64)
    mesh = TriMesh(V, T, _ordered_boundary(T), float(_edge_lengths(V, T).max()))
    if np.any(mesh.triangle_areas() <= 0):
        raise FemError("mesh has non-positive triangle areas")
    return mesh


def _polar_angles(d: Domain, center: np.ndarray) -> np.ndarray:
    rel = d.points - center
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    step = np.diff(np.concatenate([ang, ang[:1]]))
    step = (step + np.pi) % (2 * np.pi) - np.pi
    if np.any(step <= 0) or not math.isclose(step.sum(), 2 * np.pi, rel_tol=1e-9):
        raise DomainError(f"domain {d.name!r} is not star-shaped with respect to {center.tolist()}")
    return ang[0] + np.concatenate([[0.0], np.cumsum(step)])


def _ray_boundary(d: Domain, center: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Intersection of rays from ``center`` at angles ``phi`` with the polyline."""
    ang = _polar_angles(d, center)
    P = np.vstack([d.points, d.points[:1]])
    a0 = ang[0]
    q = a0 + (phi - a0) % (2 * np.pi)
    j = np.clip(np.searchsorted(ang, q, side="right") - 1, 0, len(d.points) - 1)
    p0, p1 = P[j] - center, P[j + 1] - center
    u = np.column_stack([np.cos(q), np.sin(q)])
    e = p1 - p0
    # solve p0 + s e = r u for s
    den = e[:, 0] * u[:, 1] - e[:, 1] * u[:, 0]
    s = (p0[:, 1] * u[:, 0] - p0[:, 0] * u[:, 1]) / den
    return center + p0 + np.clip(s, 0, 1)[:, None] * e


def polygon_centroid(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = cr.sum() / 2
    return np.array([((x + xn) * cr).sum(), ((y + yn) * cr).sum()]) / (6 * a)


def mesh_star_shaped(d: Domain, n_radial: int, n_angular: int, center=None) -> TriMesh:
    """Polar-graded mesh of a planar domain star-shaped about ``center``.

    The centre defaults to the polygon centroid.  The boundary ring is the
    polyline resampled at ``n_angular`` equally spaced ray angles.
    """
    if d.kind != "planar":
        raise DomainError("fem2d meshes planar domains only")
    if n_radial < 2 or n_angular < 8:
        raise ValueError("need n_radial >= 2 and n_angular >= 8")
    c = polygon_centroid(d.points) if center is None else np.asarray(center, dtype=float)
    phi = 2 * np.pi * np.arange(n_angular) / n_angular
    bnd = _ray_boundary(d, c, phi)
    frac = np.arange(1, n_radial + 1) / n_radial
    rings = c + frac[:, None, None] * (bnd - c)[None]
    V = np.vstack([c[None], rings.reshape(-1, 2)])

    def vid(i, j):  # ring i >= 1, angle j
        return 1 + (i - 1) * n_angular + (j % n_angular)

    j = np.arange(n_angular)
    tris = [np.column_stack([np.zeros(n_angular, np.int64), vid(1, j), vid(1, j + 1)])]
    for i in range(1, n_radial):
        a, b = vid(i, j), vid(i + 1, j)
        cc, dd = vid(i + 1, j + 1), vid(i, j + 1)
        diag_ac = np.linalg.norm(V[a] - V[cc], axis=1)
        diag_bd = np.linalg.norm(V[b] - V[dd], axis=1)
        use_ac = diag_ac <= diag_bd
        t1 = np.where(use_ac[:, None], np.column_stack([a, b, cc]), np.column_stack([a, b, dd]))
        t2 = np.where(use_ac[:, None], np.column_stack([a, cc, dd]), np.column_stack([b, cc, dd]))
        tris += [t1, t2]
    mesh = from_triangles(V, np.vstack(tris))
    mid = 0.5 * (V[mesh.boundary_edges[:, 0]] + V[mesh.boundary_edges[:, 1]])
    dev = np.abs(_planar_signed_distance(mid, d.points)).max()
    if dev > mesh.h_max**2:
        raise DomainError(f"boundary chords deviate from the polyline by {dev:.3g}")
    return mesh


# -- assembly ----------------------------------------------------------------------------


def assemble(mesh: TriMesh):
    """P1 stiffness, consistent mass and trapezoid boundary mass (CSR)."""
    V, T = mesh.vertices, mesh.triangles
    n = len(V)
    p = V[T]
    area = mesh.triangle_areas()
    # gradients of barycentric coordinates: rotate opposite edges by 90 degrees
    e = p[:, [2, 0, 1]] - p[:, [1, 2, 0]]
    grads = np.stack([-e[..., 1], e[..., 0]], axis=-1) / (2 * area[:, None, None])
    Kloc = area[:, None, None] * np.einsum("tik,tjk->tij", grads, grads)
    Mloc = area[:, None, None] * (np.ones((3, 3)) + np.eye(3)) / 12
    rows = np.repeat(T, 3, axis=1).ravel()
    cols = np.tile(T, (1, 3)).ravel()
    Kmat = sparse.csr_matrix((Kloc.ravel(), (rows, cols)), shape=(n, n))
    Mmat = sparse.csr_matrix((Mloc.ravel(), (rows, cols)), shape=(n, n))
    be = mesh.boundary_edges
    le = np.linalg.norm(V[be[:, 1]] - V[be[:, 0]], axis=1)
    bdiag = np.bincount(be.ravel(), np.repeat(0.5 * le, 2), minlength=n)
    Bmat = sparse.diags(bdiag).tocsr()
    return Kmat, Mmat, Bmat


@dataclass
class FemEigenResult:
    lam: float
    coefficients: np.ndarray
    h_max: float
    iterations: int
    residual: float
    n_vertices: int

    def to_csv(self, path, mesh: TriMesh) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(EIGVEC_CSV_HEADER + "\n")
            w = csv.writer(fh)
            w.writerow(["x", "y", "u"])
            for (x, y), u in zip(mesh.vertices, self.coefficients):
                w.writerow([f"{x:.12e}", f"{y:.12e}", f"{u:.12e}"])


def _inverse_iteration(A, M, shift: float, x: np.ndarray, tol: float, max_iter: int):
    lu = splu((A - shift * M).tocsc())
    rq_old = np.inf
    for it in range(1, max_iter + 1):
        y = lu.solve(M @ x)
        x = y / math.sqrt(float(y @ (M @ y)))
        Ax = A @ x
        rq = float(x @ Ax)
        if abs(rq - rq_old) <= tol * max(1.0, abs(rq)):
            return x, rq, it
        rq_old = rq
    return x, rq, -max_iter


def solve_lowest(mesh: TriMesh, beta: float, tol: float = 1e-13, max_iter: int = 500,
                 matrices=None) -> FemEigenResult:
    """Smallest eigenvalue of (K + beta B) x = lam M x by shifted inverse iteration."""
    if beta > 0:
        raise ValueError("beta must be nonpositive")
    Kmat, Mmat, Bmat = matrices if matrices is not None else assemble(mesh)
    A = (Kmat + beta * Bmat).tocsr()
    x = np.ones(mesh.n_vertices)
    x /= math.sqrt(float(x @ (Mmat @ x)))
    rho0 = float(x @ (A @ x))
    shift = 4 * min(rho0, -beta * beta) - 1
    total = 0
    # coarse phase with a safe shift, then re-shift just below the estimate
    x, rq, it = _inverse_iteration(A, Mmat, shift, x, 1e-6, max_iter)
    total += abs(it)
    gap = 1e-3 * (1 + abs(rq))
    x, rq, it = _inverse_iteration(A, Mmat, rq - gap, x, tol, max_iter)
    total += abs(it)
    if it < 0:
        raise FemError(f"inverse iteration did not converge in {max_iter} steps")
    if np.median(x) < 0:
        x = -x
    if np.any(x < -1e-8 * np.abs(x).max()):
        raise FemError("eigenvector changes sign; converged to an excited state")
    Ax = A @ x
    Mx = Mmat @ x
    rq = float(x @ Ax) / float(x @ Mx)
    res = float(np.linalg.norm(Ax - rq * Mx) / np.linalg.norm(Ax))
    return FemEigenResult(lam=rq, coefficients=x, h_max=mesh.h_max, iterations=total,
                          residual=res, n_vertices=mesh.n_vertices)


def rayleigh_quotient(mesh: TriMesh, beta: float, x: np.ndarray, matrices=None) -> float:
    Kmat, Mmat, Bmat = matrices if matrices is not None else assemble(mesh)
    return float(x @ (Kmat @ x) + beta * (x @ (Bmat @ x))) / float(x @ (Mmat @ x))


def extrapolate(results: list[FemEigenResult]) -> tuple[float, float]:
    """Richardson extrapolation of the two finest levels assuming O(h^2).

    Returns ``(lam_extrap, error_estimate)`` with the error estimate
    ``|lam_extrap - lam_finest|``.  A non-monotone sequence only warns.
    """
    if len(results) < 3:
        raise ValueError("need at least three refinement levels")
    rs = sorted(results, key=lambda r: -r.h_max)
    lams = np.array([r.lam for r in rs])
    diffs = np.diff(lams)
    if not (np.all(diffs <= 0) or np.all(diffs >= 0)):
        warnings.warn("eigenvalue sequence is not monotone under refinement", stacklevel=2)
    coarse, fine = rs[-2], rs[-1]
    if coarse.lam == fine.lam:
        return fine.lam, 0.0
    ratio = (coarse.h_max / fine.h_max) ** 2
    if ratio <= 1 + 1e-12:
        raise ValueError("finest levels have the same mesh size")
    lam_ex = fine.lam + (fine.lam - coarse.lam) / (ratio - 1)
    return float(lam_ex), float(abs(lam_ex - fine.lam))


def observed_order(results: list[FemEigenResult]) -> float:
    """Convergence order from the three finest levels of a ladder with constant ratio."""
    rs = sorted(results, key=lambda r: -r.h_max)[-3:]
    d1 = rs[1].lam - rs[0].lam
    d2 = rs[2].lam - rs[1].lam
    return float(math.log(abs(d1 / d2)) / math.log(rs[0].h_max / rs[1].h_max))


DEFAULT_LADDER = ((32, 128), (64, 256), (128, 512))


def solve_ladder(d: Domain, beta: float, ladder=DEFAULT_LADDER, meshes=None):
    """Solve on each (n_radial, n_angular) level; returns (results, lam_ex, err)."""
    out = []
    for k, (nr, na) in enumerate(ladder):
        if meshes is not None:
            mesh, mats = meshes[k]
        else:
            mesh = mesh_star_shaped(d, nr, na)
            mats = None
        out.append(solve_lowest(mesh, beta, matrices=mats))
    lam_ex, err = extrapolate(out)
    return out, lam_ex, err
