import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from robiniso.geometry import GeodesicDisk, disk_from_perimeter, disk_profiles, isoperimetric_deficit


def test_planar_disk_measures():
    d = GeodesicDisk(0.0, 2.0)
    assert_allclose(d.L, 4 * math.pi)
    assert_allclose(d.A, 4 * math.pi)


def test_hemisphere_measures():
    d = GeodesicDisk(1.0, math.pi / 2)
    assert_allclose(d.L, 2 * math.pi)
    assert_allclose(d.A, 2 * math.pi)
    assert d.within_hemisphere


def test_curved_disk_tends_to_flat():
    for R in (0.1, 1.0):
        d = GeodesicDisk(1e-10, R)
        assert_allclose([d.L, d.A], [2 * math.pi * R, math.pi * R * R], rtol=1e-8)


def test_small_cap_area_keeps_precision():
    d = GeodesicDisk(1.0, 1e-6)
    assert_allclose(d.A, math.pi * 1e-12, rtol=1e-10)


@pytest.mark.parametrize("K,R", [(-1.0, 1.0), (0.0, 0.0), (1.0, math.pi), (4.0, 2.0)])
def test_invalid_disks(K, R):
    with pytest.raises(ValueError):
        GeodesicDisk(K, R)


@given(K=st.sampled_from([0.0, 0.5, 1.0, 4.0]), x=st.floats(0.01, 0.99))
def test_perimeter_round_trip(K, x):
    L = 2 * math.pi * x / math.sqrt(K) if K > 0 else 10 * x
    d = disk_from_perimeter(K, L)
    assert_allclose(d.L, L, rtol=1e-12)
    assert d.within_hemisphere
    if K > 0:
        c = disk_from_perimeter(K, L, "complement")
        assert_allclose(c.L, L, rtol=1e-10)
        assert_allclose(c.R, math.pi / math.sqrt(K) - d.R, rtol=1e-12)
        assert c.branch == "complement"
        assert_allclose(d.A + c.A, 4 * math.pi / K, rtol=1e-12)


def test_branch_errors():
    with pytest.raises(ValueError):
        disk_from_perimeter(0.0, 1.0, "complement")
    with pytest.raises(ValueError):
        disk_from_perimeter(1.0, 7.0)
    with pytest.raises(ValueError):
        disk_from_perimeter(1.0, 1.0, "north")
    with pytest.raises(ValueError):
        disk_from_perimeter(0.0, -1.0)


@given(K=st.sampled_from([0.0, 1.0, 2.0]), x=st.floats(0.05, 0.95))
def test_deficit_vanishes_on_disks(K, x):
    R = x * (math.pi / math.sqrt(K) if K > 0 else 3.0)
    d = GeodesicDisk(K, R)
    assert abs(isoperimetric_deficit(d.L, d.A, K)) < 1e-11 * max(1.0, d.L**2)


def test_deficit_positive_for_square():
    assert isoperimetric_deficit(4.0, 1.0, 0.0) == pytest.approx(16 - 4 * math.pi)


@settings(max_examples=30)
@given(K=st.sampled_from([0.0, 1.0]), R=st.floats(0.1, 2.5))
def test_profiles_endpoints_and_derivative(K, R):
    d = GeodesicDisk(K, R)
    t = np.linspace(0.0, R, 4001)
    L, A = disk_profiles(d, t)
    assert_allclose([L[0], A[0], L[-1], A[-1]], [d.L, 0.0, 0.0, d.A], atol=1e-12)
    assert np.all(np.diff(A) >= 0)
    # dA/dt = L(t)
    assert_allclose(np.gradient(A, t, edge_order=2), L, atol=1e-5 * max(1.0, d.L))


def test_profiles_reject_bad_depth():
    with pytest.raises(ValueError):
        disk_profiles(GeodesicDisk(0.0, 1.0), 1.5)
    L, A = disk_profiles(GeodesicDisk(0.0, 1.0), 0.5)
    assert isinstance(L, float) and L == pytest.approx(math.pi)
