import pytest

from kohnlab.dangelo import (
    HoloCurve,
    LeviBoundViolation,
    dangelo_type,
    derivative_witness,
    levi_vanishing_bound_check,
    pullback_order,
)
from kohnlab.multitype import INF
from kohnlab.poly import parse_poly, truncate

P = parse_poly
PURE2 = P("2*Re(z2) + z1^2*zb1^2")
SPHERE = P("z1*zb1 + z2*zb2 - 1")
DEC3 = P("2*Re(z3) + z1^2*zb1^2 + z2^3*zb2^3")


def test_pullback_order_examples():
    assert pullback_order(PURE2, HoloCurve.line((1, 0))) == 4
    assert pullback_order(PURE2, HoloCurve.line((0, 1))) == 1
    assert pullback_order(P("z1*zb2 + zb1*z2 - z1*zb1 - z2*zb2"), HoloCurve.line((1, 1))) == INF


def test_curve_validation():
    with pytest.raises(ValueError):
        HoloCurve(((), ()))
    with pytest.raises(ValueError):
        HoloCurve((((0, 1),), ()))


def test_curve_text():
    assert str(HoloCurve.line((1, 0))) == "(tau, 0)"


def test_type_examples():
    est = dangelo_type(SPHERE, (1, 0))
    assert est.exact and est.lower == 2
    est = dangelo_type(PURE2, (0, 0))
    assert est.exact and est.lower == est.upper == 4
    assert pullback_order(PURE2, est.witness) == 4 * est.witness.order
    est = dangelo_type(DEC3, (0, 0, 0), q=2)
    assert est.exact and est.lower == 4


def test_type_q_range():
    with pytest.raises(ValueError):
        dangelo_type(PURE2, (0, 0), q=2)


def test_vanishing_bound_examples():
    rep = levi_vanishing_bound_check(PURE2, (0, 0), 1, 4)
    assert (rep.min_order, rep.bound) == (2, 2) and rep.equality
    rep = levi_vanishing_bound_check(P("2*Re(z2) + z1^3*zb1^3"), (0, 0), 1, 6)
    assert (rep.min_order, rep.bound) == (4, 4) and rep.equality
    rep = levi_vanishing_bound_check(SPHERE, (1, 0), 1, 2)
    assert (rep.min_order, rep.bound) == (0, 0)


def test_vanishing_bound_violation():
    with pytest.raises(LeviBoundViolation):
        levi_vanishing_bound_check(P("2*Re(z2) + z1^3*zb1^3"), (0, 0), 1, 4)
    rep = levi_vanishing_bound_check(P("2*Re(z2) + z1^3*zb1^3"), (0, 0), 1, 4, strict=False)
    assert not rep.holds


def test_derivative_witness_examples():
    w = derivative_witness(PURE2, (0, 0), 1, 0, 2)
    assert (w.alpha, w.beta, w.value) == ((1, 0), (1, 0), 4)
    w = derivative_witness(SPHERE, (1, 0), 1, 0, 0)
    assert w.order == 0


def test_derivative_witness_survives_truncation():
    w = derivative_witness(truncate(PURE2, 4), (0, 0), 1, 0, 2)
    v = derivative_witness(PURE2, (0, 0), 1, 0, 2)
    assert (w.alpha, w.beta, w.value) == (v.alpha, v.beta, v.value)


def test_derivative_witness_none_when_exhausted():
    assert derivative_witness(PURE2, (0, 0), 1, 0, 1) is None
