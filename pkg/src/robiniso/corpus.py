"""Shape generators and the bundled verification corpora."""

from __future__ import annotations

import math

import numpy as np

from .domains import Domain, ellipse_perimeter

TWO_PI = 2 * math.pi


def _closed_curve_length(xy: np.ndarray) -> float:
    return float(np.linalg.norm(np.roll(xy, -1, axis=0) - xy, axis=1).sum())


def _equal_arclength(fn, n: int, dense: int = 1 << 15) -> np.ndarray:
    """Resample the closed parametric curve ``fn(s)``, s in [0, 2pi), by arc length."""
    s = np.linspace(0, TWO_PI, dense, endpoint=False)
    xy = fn(s)
    seg = np.linalg.norm(np.roll(xy, -1, axis=0) - xy, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0, cum[-1], n, endpoint=False)
    s_ext = np.concatenate([s, [TWO_PI]])
    return fn(np.interp(targets, cum, s_ext))


def disk(R: float = 1.0, n: int = 1024, name: str = "disk") -> Domain:
    s = TWO_PI * np.arange(n) / n
    pts = R * np.column_stack([np.cos(s), np.sin(s)])
    return Domain("planar", pts, {"type": "disk", "params": {"R": R}}, [0.0, 0.0], name)


def ellipse(a: float, b: float, n: int = 1024, name: str = "") -> Domain:
    pts = _equal_arclength(lambda s: np.column_stack([a * np.cos(s), b * np.sin(s)]), n)
    return Domain("planar", pts, {"type": "ellipse", "params": {"a": a, "b": b}}, [0.0, 0.0],
                  name or f"ellipse_{a:g}x{b:g}")


def ellipse_matched(ratio: float, perimeter: float = TWO_PI, n: int = 1024) -> Domain:
    """Ellipse with axis ratio ``ratio`` scaled to the given perimeter."""
    b = perimeter / ellipse_perimeter(ratio, 1.0)
    return ellipse(ratio * b, b, n, name=f"ellipse_{ratio:g}")


def _polar_planar(rfun, n: int, perimeter: float, name: str) -> Domain:
    def fn(s):
        r = rfun(s)
        return np.column_stack([r * np.cos(s), r * np.sin(s)])

    pts = _equal_arclength(fn, n)
    dense = fn(np.linspace(0, TWO_PI, 1 << 16, endpoint=False))
    pts *= perimeter / _closed_curve_length(dense)
    return Domain("planar", pts, None, [0.0, 0.0], name)


def superellipse(a: float, b: float, p: float, n: int = 1024, perimeter: float = TWO_PI,
                 name: str = "") -> Domain:
    """|x/a|^p + |y/b|^p = 1, smooth for even integer p; rescaled to ``perimeter``."""

    def r(s):
        c, si = np.abs(np.cos(s)) / a, np.abs(np.sin(s)) / b
        return (c**p + si**p) ** (-1.0 / p)

    return _polar_planar(r, n, perimeter, name or f"superellipse_{a:g}x{b:g}_p{p:g}")


def star(k: int, eps: float, n: int = 1024, perimeter: float = TWO_PI, name: str = "") -> Domain:
    """Smooth star r(s) = 1 + eps cos(k s), rescaled to ``perimeter``."""
    return _polar_planar(lambda s: 1 + eps * np.cos(k * s), n, perimeter,
                         name or f"star_{k}_{eps:g}")


def planar_corpus(n: int = 1024) -> list[Domain]:
    """Twelve smooth planar domains of perimeter 2 pi."""
    out = [ellipse_matched(q, n=n) for q in (1.2, 1.5, 2.0, 3.0)]
    out += [
        superellipse(1, 1, 4, n, name="rounded_square_p4"),
        superellipse(1, 1, 6, n, name="rounded_square_p6"),
        superellipse(2, 1, 4, n, name="rounded_rect_2x1_p4"),
        superellipse(1.5, 1, 6, n, name="rounded_rect_1.5x1_p6"),
        star(3, 0.1, n),
        star(4, 0.06, n),
        star(5, 0.04, n),
        star(3, 0.2, n),
    ]
    return out


# -- spherical ---------------------------------------------------------------------


def _sphere_from_polar(rad: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Points at geodesic distance ``rad`` from the north pole in direction ``s``."""
    return np.column_stack([np.sin(rad) * np.cos(s), np.sin(rad) * np.sin(s), np.cos(rad)])


def cap(R: float, n: int = 1024, name: str = "") -> Domain:
    s = TWO_PI * np.arange(n) / n
    pts = _sphere_from_polar(np.full(n, R), s)
    return Domain("spherical", pts, {"type": "cap", "params": {"R": R}}, [0.0, 0.0, 1.0],
                  name or f"cap_{R:.4f}")


def spherical_polar(rfun, n: int = 1024, name: str = "") -> Domain:
    """Spherical domain whose boundary is r = rfun(s) in geodesic polar coordinates."""

    def fn(s):
        return _sphere_from_polar(rfun(s), s)

    pts = _equal_arclength(fn, n)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return Domain("spherical", pts, None, [0.0, 0.0, 1.0], name)


def spherical_ellipse(r0: float, eps: float, n: int = 1024) -> Domain:
    return spherical_polar(lambda s: r0 * (1 + eps * np.cos(2 * s)), n,
                           name=f"sph_ellipse_{r0:g}_{eps:g}")


def spherical_star(r0: float, k: int, eps: float, n: int = 1024) -> Domain:
    return spherical_polar(lambda s: r0 * (1 + eps * np.cos(k * s)), n,
                           name=f"sph_star_{r0:g}_{k}_{eps:g}")


def spherical_corpus(n: int = 1024) -> list[Domain]:
    """Ten non-circular spherical domains inside a hemisphere."""
    return [
        spherical_ellipse(0.3, 0.3, n),
        spherical_ellipse(0.5, 0.25, n),
        spherical_ellipse(0.7, 0.2, n),
        spherical_ellipse(0.9, 0.15, n),
        spherical_ellipse(1.1, 0.12, n),
        spherical_star(0.4, 3, 0.15, n),
        spherical_star(0.6, 3, 0.12, n),
        spherical_star(0.8, 4, 0.08, n),
        spherical_star(1.0, 5, 0.05, n),
        spherical_star(0.5, 4, 0.1, n),
    ]
