import numpy as np
import pytest
from hypothesis import given, strategies as st

from cocap.bodies import Ball, Ellipsoid, LpBall, Product, Scaled, Translate
from cocap.calculus import (
    axiom_harness,
    closed_form_capacity,
    disc_capacity,
    effective_indices,
    monotonicity_margin,
    nontriviality_constants,
    product_capacity,
    product_index_chain,
)
from cocap.dual import SolverOptions
from cocap.symplectic import CoisoIndex

FAST = SolverOptions(M=12, starts=4)


def test_chain_examples():
    assert effective_indices(3, [1, 2]) == [1, 2]
    assert effective_indices(0, [1, 1, 1]) == [0, 0, 0]
    assert effective_indices(1, [1, 1, 1]) == [1, 0, 0]
    assert product_index_chain(4, [2, 1, 3]) == [4, 2, 1]
    with pytest.raises(ValueError):
        product_index_chain(5, [1, 1])
    with pytest.raises(ValueError):
        product_index_chain(0, [0, 1])


@given(st.lists(st.integers(1, 4), min_size=1, max_size=6).flatmap(lambda d: st.tuples(st.just(d), st.integers(0, sum(d)))))
def test_chain_properties(case):
    dims, l0 = case
    chain = product_index_chain(l0, dims)
    assert all(a >= b for a, b in zip(chain, chain[1:]))
    ks = effective_indices(l0, dims)
    assert all(0 <= k <= d for k, d in zip(ks, dims))
    # the effective indices use up exactly l0 p-directions
    assert sum(ks) == l0


def test_disc_values():
    assert disc_capacity(1, 1) == pytest.approx(np.pi)
    assert disc_capacity(1, 0) == pytest.approx(np.pi / 2)
    assert disc_capacity(2, 0) == pytest.approx(2 * np.pi)
    with pytest.raises(ValueError):
        disc_capacity(1, 2)
    with pytest.raises(ValueError):
        disc_capacity(0, 1)


def test_product_of_discs_formula():
    r = (1.0, 1.2)
    ev = [(1, lambda k, r=ri: disc_capacity(r, k)) for ri in r]
    assert product_capacity(ev, 0) == pytest.approx(np.pi / 2)
    assert product_capacity(ev, 1) == pytest.approx(min(np.pi, np.pi * 1.44 / 2))
    assert product_capacity(ev, 2) == pytest.approx(np.pi)
    body = Product((Ball(1.0, 1), Ball(1.2, 1)))
    for k in range(3):
        assert closed_form_capacity(body, CoisoIndex(2, k)) == pytest.approx(product_capacity(ev, k))


@pytest.mark.parametrize("nk", [(2, 0), (3, 2), (1, 0)])
def test_nontriviality_constants(nk):
    c = nontriviality_constants(CoisoIndex(*nk))
    assert c.ball == c.w_domain == c.u_domain == pytest.approx(np.pi / 2)


def test_constants_reject_full_index():
    with pytest.raises(ValueError):
        nontriviality_constants(CoisoIndex(2, 2))


def test_closed_form_cases():
    idx = CoisoIndex(2, 1)
    assert closed_form_capacity(Ball(1.0, 2), idx) == pytest.approx(np.pi / 2)
    assert closed_form_capacity(Ellipsoid.from_radii([1, 2]), idx) == pytest.approx(np.pi)
    assert closed_form_capacity(Scaled(Ball(1.0, 2), 3.0), idx) == pytest.approx(9 * np.pi / 2)
    assert closed_form_capacity(Translate(Ball(1.0, 2), [0.1, 0.2, 0.3, 0.0]), idx) == pytest.approx(np.pi / 2)
    assert closed_form_capacity(Translate(Ball(1.0, 2), [0.0, 0.0, 0.0, 0.3]), idx) is None
    assert closed_form_capacity(LpBall(4.0, (1.0, 1.0)), idx) is None
    assert closed_form_capacity(LpBall(2.0, (1.0,)), CoisoIndex(1, 1)) == pytest.approx(np.pi)
    with pytest.raises(ValueError):
        closed_form_capacity(Ball(1.0, 2), CoisoIndex(3, 0))


@given(st.lists(st.floats(0.5, 2.0), min_size=2, max_size=4), st.data())
def test_product_dominates_inscribed_ellipsoid(radii, data):
    n = len(radii)
    k = data.draw(st.integers(0, n))
    idx = CoisoIndex(n, k)
    body = Product(tuple(Ball(r, 1) for r in radii))
    # the ellipsoid with the same radii sits inside the polydisc
    inner = Ellipsoid.from_radii(radii)
    assert closed_form_capacity(body, idx) >= closed_form_capacity(inner, idx) - 1e-12


def test_value_non_increasing_in_k():
    body = Product((Ball(1.0, 1), Ball(1.3, 1), Ball(0.9, 1)))
    vals = [closed_form_capacity(body, CoisoIndex(3, k)) for k in range(4)]
    # more p-directions means a larger capacity for discs
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_harness_on_ball():
    rep = axiom_harness(Ball(1.0, 2), CoisoIndex(2, 1), FAST)
    assert rep.passed, rep.table()
    assert {c.name for c in rep.checks} == {"conformality", "translation", "monotonicity"}
    assert rep.capacities["base"] == pytest.approx(np.pi / 2, rel=1e-6)
    d = rep.to_dict()
    assert d["passed"] and len(d["checks"]) == 3


def test_harness_flags_misscaled_evaluator():
    def bad(body, idx, anchor=None):
        base = closed_form_capacity(body, idx)
        return base if not isinstance(body, Scaled) or body.factor < 1.5 else base / body.factor

    rep = axiom_harness(Ball(1.0, 2), CoisoIndex(2, 0), evaluate=bad)
    assert rep.failed == ["conformality"]
    assert "FAIL" in rep.table()


def test_harness_records_errors():
    def broken(body, idx, anchor=None):
        if isinstance(body, Translate):
            raise RuntimeError("no")
        return closed_form_capacity(body, idx)

    rep = axiom_harness(Ball(1.0, 1), CoisoIndex(1, 0), evaluate=broken)
    (trans,) = [c for c in rep.checks if c.name == "translation"]
    assert not trans.passed and "RuntimeError" in trans.error


def test_harness_product_formula():
    body = Product((Ball(1.0, 1), Ball(1.2, 1)))

    def exact(b, idx, anchor=None):
        v = closed_form_capacity(b, idx)
        return v if v is not None else closed_form_capacity(b.base, idx)

    rep = axiom_harness(body, CoisoIndex(2, 1), evaluate=exact)
    assert "product_formula" in {c.name for c in rep.checks}
    assert rep.passed


def test_monotonicity_margin():
    idx = CoisoIndex(2, 0)
    m = monotonicity_margin(Ball(1.0, 2), Ellipsoid.from_radii([1.0, 1.5]), idx, evaluate=lambda b, i: closed_form_capacity(b, i))
    assert m == pytest.approx(0.0)
    m = monotonicity_margin(Ball(1.0, 2), Ball(2.0, 2), idx, evaluate=lambda b, i: closed_form_capacity(b, i))
    assert m == pytest.approx(3.0)
