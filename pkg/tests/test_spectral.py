import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy import special

from robiniso import corpus, fem2d, spectral
from robiniso.domains import DomainError
from robiniso.geometry import GeodesicDisk


@pytest.fixture(scope="module")
def unit_disk_curve():
    return spectral.SpectralCurve.radial(0.0, 1.0)


def test_curve_zero_and_sign(unit_disk_curve):
    assert unit_disk_curve(0.0) == 0.0
    with pytest.raises(ValueError):
        unit_disk_curve(0.1)


def test_curve_strictly_increasing(unit_disk_curve, tmp_path):
    betas = np.linspace(-3, -0.1, 8)
    lam = unit_disk_curve.sample(betas)
    assert np.all(np.diff(lam) > 0)
    unit_disk_curve.to_csv(tmp_path / "c.csv", betas)
    assert (tmp_path / "c.csv").read_text().startswith(spectral.CURVE_CSV_HEADER)


def test_sample_detects_non_monotone():
    c = spectral.SpectralCurve(lambda b: b * b, 1.0, 1.0)
    with pytest.raises(spectral.SpectralError):
        c.sample([-2.0, -1.0])


@settings(max_examples=12, deadline=None)
@given(lam=st.floats(-20.0, -0.01), R=st.sampled_from([0.5, 1.0, 3.0]))
def test_dtn_disk_oracle(lam, R):
    curve = spectral.SpectralCurve.radial(0.0, R)
    s = spectral.dtn_lowest(curve, lam)
    k = math.sqrt(-lam)
    assert_allclose(s, k * special.ive(1, k * R) / special.ive(0, k * R), rtol=1e-9)
    assert_allclose(spectral.disk_dtn_oracle(R, lam), s, rtol=1e-9)
    assert abs(curve(-s) - lam) < 1e-9


def test_dtn_monotone_in_lambda():
    curve = spectral.SpectralCurve.radial(1.0, 1.0)
    sig = [spectral.dtn_lowest(curve, lam) for lam in (-0.1, -0.5, -2.0, -8.0)]
    assert np.all(np.diff(sig) > 0)
    assert all(s > 0 for s in sig)


def test_dtn_rejects_nonnegative_energy(unit_disk_curve):
    with pytest.raises(ValueError):
        spectral.dtn_lowest(unit_disk_curve, 0.0)


def test_dtn_sweep_csv(tmp_path, unit_disk_curve):
    sig = spectral.dtn_sweep_csv(tmp_path / "d.csv", unit_disk_curve, [-0.5, -2.0])
    data = np.loadtxt(tmp_path / "d.csv", delimiter=",", skiprows=2)
    assert_allclose(data[:, 1], sig, rtol=1e-11)


def test_dtn_isoperimetric_star():
    r = spectral.dtn_isoperimetric_check(corpus.star(3, 0.2), -1.0)
    assert r.ok and r.margin > 0
    with pytest.raises(DomainError):
        spectral.dtn_isoperimetric_check(corpus.cap(0.5), -1.0)


def test_fem_curve_matches_radial_on_disk():
    d = corpus.disk(1.0, n=2048)
    curve = spectral.SpectralCurve.fem(fem2d.mesh_star_shaped(d, 64, 256))
    assert_allclose(curve(-1.0), spectral.SpectralCurve.radial(0.0, 1.0)(-1.0), rtol=2e-4)


def test_weak_slope_values():
    assert spectral.weak_slope(GeodesicDisk(0.0, 1.0)) == pytest.approx(2.0)
    assert spectral.weak_slope(GeodesicDisk(1.0, math.pi / 2)) == pytest.approx(1.0)
    e = corpus.ellipse(2.0, 1.0)
    assert spectral.weak_slope(e) == pytest.approx(e.perimeter / e.area)


@pytest.mark.parametrize("K,R", [(0.0, 0.7), (0.0, 2.0), (1.0, 0.5), (1.0, 2.5)])
def test_weak_slope_radial(K, R):
    w = spectral.weak_slope_check(spectral.SpectralCurve.radial(K, R), 1e-3)
    assert w.rel_error < 1e-3


def test_counterexample_caps():
    rep = spectral.counterexample_caps()
    assert_allclose([rep.R_small, rep.R_big], [math.pi / 6, 5 * math.pi / 6], rtol=1e-14)
    assert rep.ok and rep.lam_big > rep.lam_small
    assert_allclose(rep.lam_small, -0.03736939577546019, rtol=1e-10)
    assert_allclose(rep.lam_big, -0.002693175258614955, rtol=1e-10)
    assert rep.slope_gap > 0  # the small cap has the steeper weak-coupling slope
    assert rep.as_dict()["ok"] is True


@pytest.mark.parametrize("beta", [-0.5, -2.0, -20.0])
def test_cap_ordering_persists(beta):
    # the small cap has the larger boundary curvature and stays lower for all couplings
    rep = spectral.counterexample_caps(math.pi, beta)
    assert rep.ok and rep.gap > 0


def test_counterexample_input_checks():
    with pytest.raises(ValueError):
        spectral.counterexample_caps(7.0)
    with pytest.raises(ValueError):
        spectral.counterexample_caps(math.pi, 0.1)
