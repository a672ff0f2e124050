from fractions import Fraction as F

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from kohnlab.dangelo import HoloCurve, pullback_order
from kohnlab.fields import VectorField10, bracket
from kohnlab.forms import del_, delbar, levi_rank_at, levi_wedge, wedge
from kohnlab.kohn import radical_capture, verify_capture, Multiplier
from kohnlab.multitype import (
    INF,
    counting_bound,
    enumerate_weights,
    is_weight,
    lex_compare,
    lex_key,
    try_weight,
)
from kohnlab.poly import CPoint, conj, diff, evaluate, format_poly, parse_poly, vanishing_order, weighted_membership

from strategies import forms, gaussian, homogeneous_forms, hpolys, points, real_hpolys

# ---------------------------------------------------------------- polynomials


@given(hpolys(), hpolys(), points())
def test_eval_is_a_ring_morphism(f, g, x):
    assert evaluate(f + g, x) == evaluate(f, x) + evaluate(g, x)
    assert evaluate(f * g, x) == evaluate(f, x) * evaluate(g, x)


@given(hpolys(), points())
def test_conj_evaluates_to_conjugate(f, x):
    assert evaluate(conj(f), x) == evaluate(f, x).conjugate()


@given(hpolys(), st.integers(0, 1), st.integers(0, 1), st.booleans(), st.booleans())
def test_partial_derivatives_commute(f, i, j, ci, cj):
    assert diff(diff(f, i, ci), j, cj) == diff(diff(f, j, cj), i, ci)


@given(hpolys(), hpolys(), st.integers(0, 1), st.booleans())
def test_leibniz_rule(f, g, j, c):
    assert diff(f * g, j, c) == diff(f, j, c) * g + f * diff(g, j, c)


@given(hpolys(), hpolys(), points())
def test_vanishing_order_is_additive(f, g, x):
    assume(not f.is_zero() and not g.is_zero())
    assert vanishing_order(f * g, x) == vanishing_order(f, x) + vanishing_order(g, x)


@given(hpolys(), st.integers(1, 6), st.tuples(st.integers(1, 4), st.integers(1, 4)))
def test_weighted_membership_is_monotone_in_t(f, t, lam):
    if weighted_membership(f, t, lam):
        assert weighted_membership(f, t - 1, lam)
        assert weighted_membership(f, F(t, 2), lam)


@given(hpolys(), hpolys(), st.integers(1, 4), st.tuples(st.integers(1, 4), st.integers(1, 4)))
def test_weighted_membership_is_closed_under_sums(f, g, t, lam):
    if weighted_membership(f, t, lam) and weighted_membership(g, t, lam):
        assert weighted_membership(f + g, t, lam)


@given(hpolys(n=3, max_terms=5))
def test_format_parse_round_trip(f):
    assert parse_poly(format_poly(f), 3) == f


@given(real_hpolys(), points())
def test_real_valued_polys_have_real_values(f, x):
    assert f.is_real_valued()
    assert evaluate(f, x).im == 0


# ---------------------------------------------------------------- forms


@given(hpolys(n=3, max_terms=4))
def test_del_squared_vanishes(f):
    assert del_(del_(f)).is_zero()
    assert delbar(delbar(f)).is_zero()


@given(hpolys(n=3, max_terms=4))
def test_del_delbar_anticommute(f):
    assert del_(delbar(f)) == -delbar(del_(f))


@given(forms(n=2))
def test_del_squared_vanishes_on_forms(w):
    assert del_(del_(w)).is_zero()


@given(st.integers(1, 2), st.integers(1, 2), st.data())
def test_wedge_graded_symmetry(p, q, data):
    a = data.draw(homogeneous_forms(3, p))
    b = data.draw(homogeneous_forms(3, q))
    ab, ba = wedge(a, b), wedge(b, a)
    assert ab == (ba if (p * q) % 2 == 0 else -ba)


@given(forms(n=2), forms(n=2), forms(n=2))
def test_wedge_is_associative(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@settings(max_examples=25)
@given(real_hpolys(n=2, max_terms=3), points())
def test_levi_wedge_vanishes_iff_rank_drops(g, x):
    r = parse_poly("2*Re(z2)", 2) + g
    assume(evaluate(diff(r, 1), x))
    value = levi_wedge(r, 1).at(x)
    assert any(value.values()) == (levi_rank_at(r, x) == 1)


# ---------------------------------------------------------------- fields


def fields(n=2):
    return st.lists(hpolys(n, 2, 1), min_size=n, max_size=n).filter(
        lambda cs: any(not c.is_zero() for c in cs)).map(lambda cs: VectorField10(tuple(cs)))


@given(fields(), fields(), st.booleans(), st.booleans(), hpolys())
def test_bracket_antisymmetry(X, Y, cx, cy, f):
    a, b = bracket((X, cx), (Y, cy)), bracket((Y, cy), (X, cx))
    assert a(f) == (-b)(f)


@settings(max_examples=20)
@given(fields(), fields(), fields(), hpolys(n=2, max_terms=2, top=1))
def test_jacobi_identity(X, Y, Z, f):
    def br(a, b):
        return bracket(a, b)

    total = br((X, False), br((Y, True), (Z, False)))(f) + br((Y, True), br((Z, False), (X, False)))(f) \
        + br((Z, False), br((X, False), (Y, True)))(f)
    assert total.is_zero()


# ---------------------------------------------------------------- weights


@given(st.integers(2, 3), st.integers(1, 6))
def test_enumeration_is_strictly_increasing_and_certified(nu, bound):
    ws = enumerate_weights(nu, bound)
    keys = [lex_key(w) for w in ws]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    for w in ws:
        assert w.verify()
        assert max(w.entries) <= bound
        assert is_weight(w.entries) == w


@given(st.integers(2, 3), st.integers(2, 6))
def test_enumeration_respects_counting_bound(nu, bound):
    assert len(enumerate_weights(nu, bound, min_second=2)) <= counting_bound(bound, nu)


@given(st.lists(st.builds(F, st.integers(1, 12), st.integers(1, 4)), min_size=1, max_size=4))
def test_try_weight_certificates_verify(entries):
    entries = [F(1)] + sorted(max(F(1), e) for e in entries)
    w = try_weight(entries)
    if w is not None:
        assert w.verify()
        for lam, cert in zip(w.entries, w.certificates):
            k = len(cert)
            assert sum(F(a) / w.entries[i] for i, a in enumerate(cert)) == 1 and k <= len(w.entries)


@given(st.integers(2, 3), st.integers(1, 5), st.data())
def test_lex_compare_is_antisymmetric(nu, bound, data):
    ws = enumerate_weights(nu, bound)
    a, b = data.draw(st.sampled_from(ws)), data.draw(st.sampled_from(ws))
    flip = {"<": ">", ">": "<", "=": "="}
    assert lex_compare(a, b) == flip[lex_compare(b, a)]


def test_unbounded_sorts_last():
    assert lex_compare(is_weight([1, 2, INF]), is_weight([1, 2, 99])) == ">"


# ---------------------------------------------------------------- curves and captures


curve_components = st.lists(st.tuples(st.integers(1, 3), gaussian.filter(bool)), max_size=2, unique_by=lambda t: t[0]).map(tuple)


@given(st.tuples(curve_components, curve_components), st.integers(2, 3),
       st.sampled_from(["2*Re(z2) + z1^2*zb1^2", "2*Re(z2) + z1*zb1 + z1^2*zb2 + zb1^2*z2",
                        "z1*zb1 + z2*zb2 - 1"]))
def test_contact_ratio_is_reparametrization_invariant(comps, s, text):
    assume(any(comps))
    phi = HoloCurve(comps)
    r = parse_poly(text, 2)
    x = (1, 0) if "- 1" in text else (0, 0)
    a = pullback_order(r, phi, x)
    b = pullback_order(r, phi.reparametrized(s), x)
    if a == INF:
        assert b == INF
    else:
        assert F(b, phi.reparametrized(s).order) == F(a, phi.order)


@settings(max_examples=30)
@given(st.lists(st.tuples(st.integers(1, 3), st.integers(0, 2), st.integers(1, 4)), min_size=1, max_size=3))
def test_capture_certificates_verify(terms):
    text = " + ".join(f"{c}*z1^{a}*zb1^{a}*z2^{b}*zb2^{b}" for a, b, c in terms)
    f = Multiplier(parse_poly(text, 2), F(1, 2), "levi_entry")
    for g in radical_capture([f], CPoint.origin(2)):
        assert verify_capture(g, CPoint.origin(2), samples=50)
