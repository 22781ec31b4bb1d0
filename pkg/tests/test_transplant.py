import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from robiniso import corpus, radial, transplant
from robiniso.domains import DomainError, compute_profiles
from robiniso.geometry import GeodesicDisk, disk_from_perimeter
from robiniso.transplant import TestProfile


@pytest.fixture(scope="module")
def star_profiles():
    d = corpus.star(3, 0.2)
    return d, compute_profiles(d)


@pytest.fixture(scope="module")
def sph_profiles():
    d = corpus.spherical_ellipse(0.7, 0.2)
    return d, compute_profiles(d)


# -- test profiles -------------------------------------------------------------------------


def test_profile_validation():
    with pytest.raises(ValueError):
        TestProfile([0.1, 1.0], [1, 1], [0, 0])
    with pytest.raises(ValueError):
        TestProfile([0.0, 0.0, 1.0], [1, 1, 1], [0, 0, 0])
    with pytest.raises(ValueError):
        TestProfile([0.0, 1.0], [1, np.nan], [0, 0])
    psi = TestProfile.constant(2.0)
    with pytest.raises(ValueError):
        psi(2.5)


@given(c=st.lists(st.floats(-2, 2), min_size=1, max_size=6), T=st.floats(0.2, 4.0))
@settings(max_examples=25)
def test_cosine_series_derivative_exact(c, T):
    psi = TestProfile.cosine_series(T, c)
    s = np.linspace(0, T, 37)
    k = np.arange(len(c))[:, None] * np.pi / T
    assert_allclose(psi(s), np.asarray(c) @ np.cos(k * s), atol=1e-9)
    scale = 1 + float(np.abs(c) @ k[:, 0])
    # exact at the nodes; cubic Hermite interpolation in between
    assert_allclose(psi.derivative(s), -(np.asarray(c)[:, None] * k * np.sin(k * s)).sum(0),
                    atol=1e-7 * scale)


def test_from_samples_derivative():
    t = np.linspace(0, 1, 2001)
    psi = TestProfile.from_samples(t, np.exp(-2 * t))
    assert_allclose(psi.derivative(t), -2 * np.exp(-2 * t), rtol=1e-5)


# -- Rayleigh quotients on disks --------------------------------------------------------------


@pytest.mark.parametrize("K,R,beta", [(0.0, 1.0, -1.0), (0.0, 2.0, -0.3), (1.0, 1.0, -2.0),
                                      (1.0, math.pi / 2, -0.5)])
def test_ground_state_reproduces_eigenvalue(K, R, beta):
    gs = radial.solve_ground_state(K, R, beta)
    q = transplant.transplant_rayleigh(GeodesicDisk(K, R), TestProfile.from_ground_state(gs), beta)
    assert abs(q.quotient - gs.lam) <= max(3 * q.quadrature_error, 1e-6)


def test_constant_profile_closed_form():
    disk = GeodesicDisk(0.0, 1.5)
    N, D, Q = transplant.transplant_rayleigh(disk, TestProfile.constant(disk.R), -0.7)
    assert_allclose(D, disk.A, rtol=1e-6)
    assert_allclose(N, -0.7 * disk.L, rtol=1e-12)
    assert_allclose(Q, -0.7 * disk.L / disk.A, rtol=1e-6)


def test_quotient_is_scale_free(star_profiles):
    _, p = star_profiles
    psi = TestProfile.cosine_series(p.R_M * 1.2, [1.0, 0.3, -0.1])
    a = transplant.transplant_rayleigh(p, psi, -1.0).quotient
    b = transplant.transplant_rayleigh(p, psi.scaled(-3.7), -1.0).quotient
    assert_allclose(a, b, rtol=1e-12)


def test_short_profile_rejected(star_profiles):
    _, p = star_profiles
    with pytest.raises(ValueError):
        transplant.transplant_rayleigh(p, TestProfile.constant(0.5 * p.R_M), -1.0)
    with pytest.raises(ValueError):
        transplant.transplant_rayleigh(p, TestProfile.constant(p.R_M), 0.0)


# -- functional inequalities ------------------------------------------------------------------


def test_prop_margins_random_profiles(star_profiles, sph_profiles):
    rng = np.random.default_rng(3)
    for d, p in (star_profiles, sph_profiles):
        disk = transplant.comparison_disk(d)
        for _ in range(10):
            m = transplant.prop_main_check(p, disk, transplant.random_cosine_profile(rng, disk.R))
            assert m.ok
            assert m.norm > 0 and m.gradient > -m.gradient_tolerance
            assert m.boundary <= 1e-12


def test_prop_requires_matched_perimeter(star_profiles):
    d, p = star_profiles
    disk = disk_from_perimeter(0.0, 1.2 * d.perimeter)
    with pytest.raises(DomainError):
        transplant.prop_main_check(p, disk, TestProfile.constant(disk.R))


def test_disk_against_itself_has_zero_margins():
    d = corpus.disk(1.0, n=2048)
    p = compute_profiles(d)
    disk = GeodesicDisk(0.0, 1.0)
    psi = TestProfile.cosine_series(1.0, [1.0, 0.5])
    m = transplant.prop_main_check(p, disk, psi)
    assert abs(m.norm) <= m.norm_tolerance and abs(m.gradient) <= m.gradient_tolerance


# -- certificates --------------------------------------------------------------------------


def test_certificate_planar(star_profiles):
    d, p = star_profiles
    c = transplant.theorem_upper_bound(d, -1.0, profiles=p)
    assert c.ok
    assert c.rayleigh < c.lambda_disk
    assert_allclose(c.lambda_disk, radial.euclid_disk_oracle(d.perimeter / (2 * math.pi), -1.0),
                    rtol=1e-10)
    obj = json.loads(c.dumps())
    assert obj["domain_id"] == d.name and "lambda_fem" not in obj
    assert set(obj["tolerances"]) == {"profile", "quadrature", "solver", "total"}


def test_certificate_with_fem_value(star_profiles):
    d, p = star_profiles
    c = transplant.theorem_upper_bound(d, -1.0, profiles=p, fem=(-2.9, 1e-4))
    assert c.ok and set(c.margins) == {"disk", "fem", "direct"}
    bad = transplant.theorem_upper_bound(d, -1.0, profiles=p, fem=(-2.0, 1e-4))
    assert not bad.ok


def test_certificate_spherical(sph_profiles):
    d, p = sph_profiles
    c = transplant.theorem_upper_bound(d, -2.0, profiles=p)
    assert c.ok and c.K == 1.0
    assert c.margins["disk"] > c.tolerances["total"]


def test_comparison_disk_rejects_large_spherical_domain():
    with pytest.raises(DomainError):
        transplant.comparison_disk(corpus.cap(2.0))


@pytest.mark.parametrize("beta", [-0.25, -4.0])
def test_ellipse_beats_disk(beta):
    d = corpus.ellipse_matched(1.5)
    c = transplant.theorem_upper_bound(d, beta, raster_n=256)
    assert c.ok and c.margins["disk"] > 0
