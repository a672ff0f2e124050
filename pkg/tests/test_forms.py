from math import comb

import pytest

from kohnlab.fields import VectorField10
from kohnlab.forms import (
    LeviMatrix,
    PForm,
    del_,
    deldelbar,
    delbar,
    diagonalize_frame,
    jacobian_wedge,
    levi_matrix,
    levi_minors,
    levi_rank_at,
    wedge,
)
from kohnlab.poly import HPoly, evaluate, parse_poly

P = parse_poly


def dz(n, j):
    return PForm.basis(n, dz=[j])


def dzb(n, j):
    return PForm.basis(n, dzb=[j])


def test_del_of_sphere_potential():
    w = del_(P("z1*zb1 + z2*zb2"))
    assert w == dz(2, 0).scale(P("zb1", 2)) + dz(2, 1).scale(P("zb2", 2))


def test_deldelbar_examples():
    assert deldelbar(P("z1*zb1")) == wedge(dz(1, 0), dzb(1, 0))
    assert deldelbar(P("z1^2*zb1^2")) == wedge(dz(1, 0), dzb(1, 0)).scale(P("4*z1*zb1"))


def test_wedge_examples():
    assert wedge(dz(1, 0), dz(1, 0)).is_zero()
    a = dz(1, 0).scale(P("zb1"))
    b = dzb(1, 0).scale(P("z1"))
    assert wedge(a, b) == wedge(dz(1, 0), dzb(1, 0)).scale(P("z1*zb1"))


def test_wedge_dimension_mismatch():
    with pytest.raises(ValueError):
        wedge(dz(1, 0), dz(2, 0))


def test_levi_minors_examples():
    assert [abs(evaluate(m, (0, 0)).re) for m in levi_minors(P("2*Re(z2) + z1*zb1"), 1)] == [1]
    (m,) = levi_minors(P("2*Re(z2) + z1^2*zb1^2"), 1)
    assert m == P("4*z1*zb1", 2) or m == -P("4*z1*zb1", 2)
    (s,) = levi_minors(P("z1*zb1 + z2*zb2 - 1"), 1)
    assert evaluate(s, (1, 0))


@pytest.mark.parametrize("n,q", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_levi_minor_count(n, q):
    r = P(f"2*Re(z{n}) + " + " + ".join(f"z{j}*zb{j}" for j in range(1, n)), n)
    assert len(levi_minors(r, q)) == comb(n - 1, n - q) ** 2


def test_levi_minors_rejects_bad_q():
    with pytest.raises(ValueError):
        levi_minors(P("2*Re(z2) + z1*zb1"), 2)


def test_jacobian_wedge_empty_is_levi_factor():
    r = P("2*Re(z2) + z1^2*zb1^2")
    assert sorted(map(str, jacobian_wedge(r, [], 1))) == sorted(map(str, [c for c in levi_minors(r, 1) if c]))


def test_jacobian_wedge_with_real_coordinate():
    r = P("2*Re(z2) + z1^2*zb1^2")
    x1 = P("(z1 + zb1)/2", 2)
    vals = {evaluate(c, (0, 0)) for c in jacobian_wedge(r, [x1], 1)}
    assert {v.re for v in vals if v} <= {1 / 2 * s for s in (1, -1)}
    assert any(vals)


def test_jacobian_wedge_parallel_gradients_vanish():
    r = P("2*Re(z3) + z1*zb1 + z2*zb2", 3)
    f = P("z1", 3)
    assert jacobian_wedge(r, [f, P("2*z1", 3)], 1) == []


def test_jacobian_wedge_too_many_functions():
    r = P("2*Re(z2) + z1*zb1")
    with pytest.raises(ValueError):
        jacobian_wedge(r, [P("z1", 2), P("zb1", 2)], 1)


def test_levi_rank_examples():
    assert levi_rank_at(P("z1*zb1 + z2*zb2 - 1"), (1, 0)) == 1
    assert levi_rank_at(P("2*Re(z2) + z1^2*zb1^2"), (0, 0)) == 0
    assert levi_rank_at(P("2*Re(z2) + z1*zb1"), (0, 0)) == 1


def _matrix(entries):
    n = 1
    frame = (VectorField10.coordinate(n, 0, "L2"), VectorField10.coordinate(n, 0, "L3"))
    return LeviMatrix(tuple(tuple(P(e, n) for e in row) for row in entries), frame)


def test_diagonalize_block_diagonal_unchanged():
    L = _matrix([["1", "0"], ["0", "z1*zb1"]])
    D = diagonalize_frame(L, 1, (0,))
    assert D.certificate
    assert D.matrix.entries == L.entries


def test_diagonalize_cramer_numerator():
    L = _matrix([["1", "z1"], ["zb1", "z1*zb1"]])
    D = diagonalize_frame(L, 1, (0,))
    assert D.numerators == ((-P("z1"),),)
    assert D.denominator == HPoly.const(1, 1)
    assert D.certificate
    assert D.matrix.entries[0][1].is_zero() and D.matrix.entries[1][0].is_zero()


def test_diagonalize_singular_block():
    L = _matrix([["z1*zb1", "1"], ["1", "1"]])
    with pytest.raises(ValueError):
        diagonalize_frame(L, 1, (0,))


def test_levi_matrix_is_hermitian():
    r = P("2*Re(z3) + z1*zb1*z2*zb2 + z1^2*zb2 + zb1^2*z2", 3)
    assert levi_matrix(r).is_hermitian()
