import pytest

from kohnlab.boundary import (
    BoundarySearchExhausted,
    BoundarySystem,
    FieldList,
    InvariantViolation,
    build_boundary_system,
    construct_system,
    gradients_independent,
    is_admissible,
    is_ordered,
    list_eval,
    list_weight_sums,
    point3_check,
    threshold_violations,
    triangularity_failures,
)
from kohnlab.fields import SameTypeBracketError, VectorField10, apply, lie_bracket, pair_del
from kohnlab.forms import tangential_frame
from kohnlab.multitype import is_weight
from kohnlab.poly import HPoly, evaluate, parse_poly

P = parse_poly
PURE2 = "2*Re(z2) + z1^2*zb1^2"
DEC3 = "2*Re(z3) + z1^2*zb1^2 + z2^3*zb2^3"


def L_of(text):
    r = P(text)
    (L,) = tangential_frame(r, r.n - 1)
    return r, L


def test_apply_examples():
    d1 = VectorField10.coordinate(1, 0)
    assert apply(d1, P("z1^2*zb1")) == P("2*z1*zb1")
    r, L = L_of(PURE2)
    assert apply(L, r).is_zero()


def test_lie_bracket_examples():
    d1 = VectorField10.coordinate(1, 0)
    assert lie_bracket(d1, (d1, True)).is_zero()
    r, L = L_of(PURE2)
    value = pair_del(r, lie_bracket(L, (L, True)))
    assert value in (P("4*z1*zb1", 2), -P("4*z1*zb1", 2))


def test_lie_bracket_same_type_rejected():
    d1 = VectorField10.coordinate(1, 0)
    with pytest.raises(SameTypeBracketError):
        lie_bracket(d1, d1)


def test_list_eval_examples():
    r, L = L_of("2*Re(z2) + z1*zb1")
    assert list_eval(FieldList(((L, False), (L, True))), r, (0, 0)) != 0
    r, L = L_of(PURE2)
    v = list_eval(FieldList(((L, False), (L, True), (L, False), (L, True))), r, (0, 0))
    assert abs(v.re) == 4 and v.im == 0
    assert list_eval(FieldList(((L, False), (L, True), (L, True))), r, (0, 0)) == 0


def test_list_eval_malformed():
    r, L = L_of(PURE2)
    with pytest.raises(ValueError):
        list_eval(FieldList(((L, False),)), r, (0, 0))
    with pytest.raises(ValueError):
        list_eval(FieldList(((VectorField10.coordinate(3, 0), False),) * 2), r, (0, 0))


def test_is_ordered_examples():
    one = VectorField10.coordinate(2, 0, "L3")
    two = VectorField10.coordinate(2, 1, "L4")
    assert is_ordered(FieldList(((one, False), (one, True), (one, False), (one, True))))
    assert not is_ordered(FieldList(((one, False), (two, False), (one, False))))
    assert not is_ordered(FieldList(((two, False), (one, False)), order=("L3", "L4")))


def test_is_admissible_zero_multiplicity():
    L2 = VectorField10.coordinate(2, 0, "L2").with_tag("L2", 2)
    Ls = FieldList(((L2, False), (L2, True)))
    c = is_weight([1, 4])
    assert is_admissible(Ls, c, 2)
    assert not is_admissible(Ls, c, 3)


def test_sphere_system():
    B = build_boundary_system(P("z1*zb1 + z2*zb2 - 1"), (1, 0), 2, 8)
    assert B.rs == () and B.rank == 1
    assert B.multitype.entries == (1, 2)
    cert = point3_check(B, 1)
    assert cert.coefficient != 0 and cert.matches


def test_pure2_system():
    B = build_boundary_system(P(PURE2), (0, 0), 2, 8)
    assert B.multitype.entries == (1, 4)
    (r2,) = B.rs
    assert r2 == P("2*z1 + 2*zb1", 2)
    assert len(B.lists[0]) == 4
    assert gradients_independent(B)
    cert = point3_check(B, 1)
    assert cert.matches and cert.diagonal[0] != 0


def test_decoupled_system():
    B = build_boundary_system(P(DEC3), (0, 0, 0), 3, 8)
    assert B.multitype.entries == (1, 4, 6)
    assert len(B.rs) == 2
    assert gradients_independent(B)
    assert triangularity_failures(B) == []
    assert list_weight_sums(B) == [1, 1]
    assert threshold_violations(B, 8) == []
    assert point3_check(B, 1).matches


def test_corrupted_system_fails_point3():
    B = build_boundary_system(P(PURE2), (0, 0), 2, 8)
    bad = BoundarySystem(B.r1, (B.rs[0] * B.rs[0],), B.fields, B.lists, B.rank, B.multitype,
                         B.base_point, B.pivot)
    with pytest.raises(InvariantViolation):
        point3_check(bad, 1)


def test_search_exhausted_reports_level():
    with pytest.raises(BoundarySearchExhausted) as exc:
        build_boundary_system(P("2*Re(z2) + z1^3*zb1^3"), (0, 0), 2, 4)
    assert exc.value.level == 2


def test_construct_marks_unresolved_entries():
    B = construct_system(P("2*Re(z2) + z1^3*zb1^3"), (0, 0), 2, 4)
    assert not B.complete and B.exhausted_level == 2


def test_off_surface_point_rejected():
    with pytest.raises(ValueError):
        construct_system(P("z1*zb1 + z2*zb2 - 1"), (1, 1), 2, 8)


def test_to_json_is_plain():
    import json

    B = build_boundary_system(P(DEC3), (0, 0, 0), 3, 8)
    data = json.loads(json.dumps(B.to_json()))
    assert data["multitype"] == [1, 4, 6]
    assert evaluate(P(data["rs"][0], 3), (0, 0, 0)) == 0
    assert HPoly.zero(3).is_zero()
