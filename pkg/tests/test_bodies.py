import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cocap.bodies import (
    Ball,
    BodySpecError,
    Ellipsoid,
    LpBall,
    Product,
    Scaled,
    Translate,
    anchored,
    body_from_dict,
    check_origin_interior,
    dual_estimate,
    grad_hamiltonian,
    grad_legendre,
    hamiltonian,
    legendre_gauge_sq,
)
from cocap.symplectic import CoisoIndex
from oracles import brute_legendre, central_gradient

BODIES = {
    "ball": Ball(1.3, 2),
    "ellipsoid": Ellipsoid.from_radii([1.0, 2.0]),
    "ellipsoid_Q": Ellipsoid(np.array([[2.0, 0.3, 0, 0.1], [0.3, 1.0, 0, 0], [0, 0, 1.5, 0], [0.1, 0, 0, 0.7]])),
    "lp": LpBall(4.0, (1.0, 0.8)),
    "product": Product((Ball(1.0, 1), Ball(1.2, 1))),
    "translate": Translate(Ellipsoid.from_radii([1.0, 1.5]), [0.3, -0.2, 0.1, 0.0]),
    "scaled": Scaled(LpBall(3.0, (1.0, 1.0)), 0.7),
}


def test_gauge_examples():
    z = np.random.default_rng(1).standard_normal(4)
    assert BODIES["ball"].gauge(1.3 * z / np.linalg.norm(z)) == pytest.approx(1.0)
    assert Ellipsoid.from_radii([1, 2]).gauge([0, 2, 0, 0]) == pytest.approx(1.0)
    assert Ball(1, 2).gauge(np.zeros(4)) == 0.0


@pytest.mark.parametrize("name", sorted(BODIES))
@settings(max_examples=25)
@given(seed=st.integers(0, 2**31 - 1), lam=st.floats(0.1, 10))
def test_homogeneity_and_euler(name, seed, lam):
    body = BODIES[name]
    z = np.random.default_rng(seed).standard_normal(body.dim)
    assert body.gauge(lam * z) == pytest.approx(lam * body.gauge(z), rel=1e-9)
    assert body.support(lam * z) == pytest.approx(lam * body.support(z), rel=1e-9)
    # Euler identities for the 2-homogeneous pair
    assert grad_hamiltonian(body, z) @ z == pytest.approx(2 * hamiltonian(body, z), rel=1e-9)
    assert grad_legendre(body, z) @ z == pytest.approx(2 * legendre_gauge_sq(body, z), rel=1e-9)


@pytest.mark.parametrize("name", ["ball", "ellipsoid", "ellipsoid_Q", "lp", "scaled"])
def test_fenchel_young_equality(name):
    body = BODIES[name]
    rng = np.random.default_rng(7)
    for w in rng.standard_normal((50, body.dim)):
        zs = grad_legendre(body, w)
        assert zs @ w == pytest.approx(hamiltonian(body, zs) + legendre_gauge_sq(body, w), abs=1e-8)


@pytest.mark.parametrize("name", sorted(BODIES))
def test_gradients_match_finite_differences(name):
    body = BODIES[name]
    rng = np.random.default_rng(3)
    for z in rng.standard_normal((200, body.dim)):
        g = grad_hamiltonian(body, z)
        fd = central_gradient(lambda x: float(hamiltonian(body, x)), z)
        assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)
        g = grad_legendre(body, z)
        fd = central_gradient(lambda x: float(legendre_gauge_sq(body, x)), z)
        assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


@pytest.mark.parametrize("name", ["ball", "ellipsoid_Q", "product", "translate"])
def test_legendre_against_brute_force(name):
    body = BODIES[name]
    rng = np.random.default_rng(11)
    for w in rng.standard_normal((4, body.dim)):
        assert legendre_gauge_sq(body, w) == pytest.approx(brute_legendre(body, w), abs=1e-4)
    assert legendre_gauge_sq(body, np.zeros(body.dim)) == 0.0


def test_support_closed_forms():
    w = np.array([0.3, -1.0, 0.7, 0.2])
    assert Ball(2.0, 2).support(w) == pytest.approx(2 * np.linalg.norm(w))
    Q = BODIES["ellipsoid_Q"].Q
    assert BODIES["ellipsoid_Q"].support(w) == pytest.approx(np.sqrt(w @ np.linalg.solve(Q, w)))
    # product of discs: factor 1 owns (q1, p1), factor 2 owns (q2, p2)
    h = 1.0 * np.hypot(w[0], w[2]) + 1.2 * np.hypot(w[1], w[3])
    assert BODIES["product"].support(w) == pytest.approx(h)


def test_support_against_boundary_samples():
    body = Ellipsoid.from_radii([1.0, 2.0])
    rng = np.random.default_rng(5)
    d = rng.standard_normal((100000, 4))
    u = d / body.gauge(d)[:, None]
    for w in rng.standard_normal((5, 4)):
        assert body.support(w) == pytest.approx((u @ w).max(), abs=1e-2)
        assert body.support(w) >= (u @ w).max() - 1e-12


def test_nonsmooth_selection_is_flagged():
    body = BODIES["product"]
    g, flag = body.grad_support(np.array([0.0, 1.0, 0.0, 0.5]), with_flag=True)
    assert flag and np.allclose(g[[0, 2]], 0.0)
    g, flag = Ball(1, 2).grad_gauge(np.zeros(4), with_flag=True)
    assert flag and not g.any()
    # tie of the product gauge: first factor is selected
    g, flag = body.grad_gauge(np.array([1.0, 1.2, 0.0, 0.0]), with_flag=True)
    assert flag and g[0] > 0 and g[1] == 0


def test_dual_estimate_values():
    est = dual_estimate(Ball(1, 2))
    assert est.raw_R1 == pytest.approx(1.0)
    assert est.R1 == pytest.approx(1.05)
    # H* = |w|^2 / 4, so the two-sided bound needs R2 = 4
    assert est.raw_R2 == pytest.approx(4.0)
    est = dual_estimate(Ellipsoid.from_radii([1, 2]))
    assert est.raw_R1 == pytest.approx(4.0)
    assert est.raw_R2 == pytest.approx(4.0)
    rng = np.random.default_rng(0)
    body = BODIES["lp"]
    est = dual_estimate(body)
    z = rng.standard_normal((1000, 4))
    r2 = np.sum(z * z, axis=1)
    assert np.all(hamiltonian(body, z) <= est.R1 * r2) and np.all(hamiltonian(body, z) >= r2 / est.R1)
    assert np.all(legendre_gauge_sq(body, z) <= est.R2 * r2)


def test_constructor_errors():
    with pytest.raises(BodySpecError):
        Ball(0.0, 2)
    with pytest.raises(BodySpecError):
        Ellipsoid(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(BodySpecError):
        LpBall(1.5, (1.0,))
    with pytest.raises(BodySpecError):
        Translate(Ball(1, 1), [1.0, 0.0, 0.0])
    with pytest.raises(BodySpecError):
        Translate(Ball(1, 1), [2.0, 0.0]).gauge([1.0, 0.0])


def test_json_round_trip():
    for body in BODIES.values():
        d = json.loads(json.dumps(body.to_dict()))
        again = body_from_dict(d, n=body.n)
        z = np.random.default_rng(2).standard_normal((10, body.dim))
        assert np.allclose(again.gauge(z), body.gauge(z))
    with pytest.raises(BodySpecError, match="unknown"):
        body_from_dict({"type": "torus"})
    with pytest.raises(BodySpecError, match="dimension"):
        body_from_dict({"type": "ball", "r": 1})
    prod = body_from_dict({"type": "product", "factors": [{"type": "ball", "r": 1}, {"type": "ball", "r": 1.2}]})
    assert prod.dims == (1, 1)


def test_anchoring():
    idx = CoisoIndex(2, 1)
    base = Ellipsoid.from_radii([1.0, 1.5])
    moved = Translate(base, [2.0, 0.0, 0.0, 0.0])
    # origin outside: the anchor brings it back
    back = anchored(moved, idx, anchor=[2.0, 0.0, 0.0, 0.0])
    assert back is base
    with pytest.raises(BodySpecError):
        anchored(moved, idx)
    with pytest.raises(BodySpecError, match="R\\^\\{n,k\\}"):
        anchored(Translate(base, [0, 0, 0, 0.1]), idx)
    with pytest.raises(BodySpecError, match="anchor"):
        anchored(base, idx, anchor=[0, 0, 0, 0.1])
    assert check_origin_interior(base) > 0.9


def test_translate_gauge_about_origin():
    base = Ball(1.0, 1)
    body = Translate(base, [0.5, 0.0])
    # boundary points of the shifted disc have gauge one
    th = np.linspace(0, 2 * np.pi, 50)
    pts = np.c_[0.5 + np.cos(th), np.sin(th)]
    assert np.allclose(body.gauge(pts), 1.0, atol=1e-12)
