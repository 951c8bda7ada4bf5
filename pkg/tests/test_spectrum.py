import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cocap.bodies import Ellipsoid, LpBall
from cocap.spectrum import (
    CurveError,
    PlanarCurve,
    Segment,
    Spectrum,
    SpectrumEntry,
    circle_curve,
    curve_from_body,
    ellipsoid_min_action,
    ellipsoid_spectrum,
    is_star_shaped,
    planar_chord_actions,
    shoot_ellipsoid_actions,
    w_domain_curve,
)
from cocap.symplectic import CoisoIndex


def test_ellipsoid_spectrum_examples():
    sp = ellipsoid_spectrum([1, 1], CoisoIndex(2, 1), 4)
    assert sp.values == pytest.approx([np.pi / 2, np.pi, np.pi])
    assert sp.entries[0].label.startswith("plane 2")
    assert ellipsoid_spectrum([1], CoisoIndex(1, 1), 10).min() == pytest.approx(np.pi)
    assert ellipsoid_spectrum([1], CoisoIndex(1, 0), 10).min() == pytest.approx(np.pi / 2)
    with pytest.raises(ValueError):
        ellipsoid_spectrum([1, 1], CoisoIndex(2, 1), 0)


def test_ellipsoid_min_action():
    assert ellipsoid_min_action([1, 2], CoisoIndex(2, 1)) == pytest.approx(np.pi)
    for n in (1, 2, 4):
        for k in range(n):
            assert ellipsoid_min_action([1] * n, CoisoIndex(n, k)) == pytest.approx(np.pi / 2)
        assert ellipsoid_min_action([1] * n, CoisoIndex(n, n)) == pytest.approx(np.pi)
    with pytest.raises(ValueError):
        ellipsoid_min_action([1, -1], CoisoIndex(2, 0))


@settings(max_examples=5)
@given(st.integers(0, 2**31 - 1), st.integers(0, 2))
def test_shooting_realises_every_analytic_action(seed, k):
    idx = CoisoIndex(2, k)
    radii = np.random.default_rng(seed).uniform(0.5, 2.0, 2)
    bound = 12.0
    shots = shoot_ellipsoid_actions(radii, idx, bound)
    assert all(res <= 1e-6 for _, _, res in shots)
    times = np.array(sorted(t for _, t, _ in shots))
    analytic = ellipsoid_spectrum(radii, idx, bound).values
    assert len(times) == len(analytic)
    assert np.allclose(times, analytic, atol=1e-8)


def test_spectrum_container():
    sp = Spectrum((SpectrumEntry(2.0, "b"), SpectrumEntry(1.0, "a")))
    assert [e.label for e in sp] == ["a", "b"] and len(sp) == 2
    assert json.loads(sp.to_json()) == [{"action": 1.0, "label": "a"}, {"action": 2.0, "label": "b"}]
    assert sp.to_csv().splitlines() == ["action,label", "1,a", "2,b"]
    with pytest.raises(ValueError):
        Spectrum((SpectrumEntry(-1.0, "x"),))
    with pytest.raises(ValueError):
        Spectrum(()).min()


def test_circle_arcs():
    sp = planar_chord_actions(circle_curve())
    assert sp.values == pytest.approx([np.pi / 2, np.pi / 2], abs=1e-12)
    sp = planar_chord_actions(circle_curve(1.7))
    assert sp.values == pytest.approx([np.pi * 1.7**2 / 2] * 2, abs=1e-12)
    assert len(planar_chord_actions(circle_curve(), bound=1.0)) == 0


def test_polyline_resampling():
    th = np.linspace(0, 2 * np.pi, 20001)[:-1]
    fine = PlanarCurve.from_samples(np.c_[np.cos(th), np.sin(th)])
    coarse = PlanarCurve.from_samples(np.c_[np.cos(th[::2]), np.sin(th[::2])])
    a, b = planar_chord_actions(fine).values, planar_chord_actions(coarse).values
    assert np.abs(a - b).max() < 1e-6


def test_reparameterisation_invariance():
    def phi(s):
        return s + 0.1 * np.sin(2 * np.pi * s)

    def dphi(s):
        return 1 + 0.2 * np.pi * np.cos(2 * np.pi * s)

    w = w_domain_curve(3, 0.01)
    a = planar_chord_actions(w.curve).values
    b = planar_chord_actions(w.curve.reparameterized(phi, dphi)).values
    assert np.abs(a - b).max() < 1e-6


def test_lp_disc_arcs():
    from math import gamma

    sp = planar_chord_actions(curve_from_body(LpBall(4.0, (1.0,))))
    area = 4 * gamma(1.25) ** 2 / gamma(1.5)
    assert sp.values == pytest.approx([area / 2] * 2, abs=1e-8)
    with pytest.raises(CurveError):
        curve_from_body(Ellipsoid.from_radii([1, 1]))


def test_tangential_crossings_rejected():
    # an arc touching the axis tangentially at q = 1
    cap = Segment.graph(lambda x: 1 - x**2, lambda x: -2 * x, 1.0, -1.0)
    cup = Segment.graph(lambda x: -((1 - x**2) ** 2), lambda x: 4 * x * (1 - x**2), -1.0, 1.0)
    with pytest.raises(CurveError, match="tangential"):
        planar_chord_actions(PlanarCurve((cap, cup)))
    # an isolated touch inside a segment
    bump = Segment.polar(lambda t: 1 + 0.0 * t, 0.0, np.pi)
    low = Segment.graph(lambda x: -0.5 * (x - 0.2) ** 2 * (1 - x**2) * 4, lambda x: 0 * x, -1.0, 1.0)
    with pytest.raises(CurveError):
        planar_chord_actions(PlanarCurve((bump, low)))


def test_curve_validation():
    with pytest.raises(CurveError, match="join"):
        PlanarCurve((Segment.line((1, 0), (0, 1)), Segment.line((0, 1), (-1, 0.5))))
    with pytest.raises(CurveError, match="counter-clockwise"):
        PlanarCurve.from_samples([(1, 0), (0, -1), (-1, 0), (0, 1)])
    assert "q,p" in circle_curve().to_csv(4)


@pytest.mark.parametrize("eps", [0.01, 0.005, 0.0025])
def test_w_domain_areas_and_chords(eps):
    N = 3
    w = w_domain_curve(N, eps)
    surplus = w.area_g - w.area_unsmoothed
    assert 0 < surplus < eps / 2
    assert w.notch_area == pytest.approx(eps**2 / 12) and 4 * w.notch_area < eps**2
    assert w.curve.area() == pytest.approx(w.area, abs=1e-9)
    sp = planar_chord_actions(w.curve)
    assert len(sp) == 2
    assert sp.values == pytest.approx(sorted(w.expected_actions), abs=1e-9)
    cap, bottom = sp.values
    assert np.pi / 2 < cap < np.pi / 2 + eps / 2 + eps**2
    assert bottom > 2 * N**2 - eps
    assert is_star_shaped(w.curve)


def test_w_domain_parameter_checks():
    with pytest.raises(CurveError):
        w_domain_curve(2.0, 0.01)
    with pytest.raises(CurveError):
        w_domain_curve(3, 0.02)
    with pytest.raises(CurveError, match="dips below"):
        w_domain_curve(3, 0.01, delta1=1e-3, delta2=1e-3)


def test_star_shape_detects_failure():
    th = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    assert is_star_shaped(PlanarCurve.from_samples(np.c_[np.cos(th), np.sin(th)]))
    # a limacon-like loop whose rays from the origin cross the boundary twice
    hook = np.c_[np.cos(th) + 0.9 * np.cos(2 * th), np.sin(th) + 0.9 * np.sin(2 * th)]
    assert not is_star_shaped(PlanarCurve.from_samples(hook))
