import json
from fractions import Fraction as F

import pytest

from kohnlab.kohn import (
    LEVI_ENTRY,
    Multiplier,
    MultiplierIdeal,
    aggregate,
    fold_gain,
    gain_of,
    gains_decrease,
    is_terminated,
    provenance_leaves,
    radical_capture,
    run,
    step,
    step1,
    verify_capture,
)
from kohnlab.poly import CPoint, HPoly, evaluate, parse_poly

P = parse_poly
SPHERE = P("z1*zb1 + z2*zb2 - 1")
PURE2 = P("2*Re(z2) + z1^2*zb1^2")
O2 = CPoint.origin(2)


def leaf(text, n, gain=F(1, 2)):
    return Multiplier(P(text, n), gain, "levi_entry")


def test_gain_rules():
    assert gain_of("defining") == 1
    assert gain_of("levi_entry") == F(1, 2)
    assert gain_of("dominate_same", [F(1, 3)]) == F(1, 3)
    assert gain_of("root", [F(1, 2)], m=3) == F(1, 6)
    assert gain_of("gradient", [F(1, 4)]) == F(1, 8)
    assert gain_of("determinant", [F(1, 8), F(1, 2)]) == F(1, 8)
    assert gain_of("aggregate", [F(1, 4), F(1, 4)]) == F(1, 4)
    assert gain_of("aggregate", [F(1, 4), F(1, 8)]) is None
    with pytest.raises(ValueError):
        gain_of("bogus")
    with pytest.raises(ValueError):
        gain_of("root", [F(1, 2)], m=0)


def test_multiplier_gain_range():
    with pytest.raises(ValueError):
        Multiplier(P("z1", 1), F(3, 2), "defining")
    with pytest.raises(ValueError):
        Multiplier(P("z1", 1), F(1), "no_such_rule")


def test_step1_sphere_has_unit():
    I = step1(SPHERE, (1, 0), 1)
    term, wit = is_terminated(I)
    assert term and wit.gain == F(1, 2)


def test_step1_pure2_generators():
    I = step1(PURE2, O2, 1)
    gens = {str(g.poly): g.gain for g in I.generators}
    assert gens == {
        str(PURE2): 1,
        "4*z1*zb1": F(1, 2),
        str(P("(z1 + zb1)/2", 2)): F(1, 4),
        str(P("(z1 - zb1)/(2*i)", 2)): F(1, 4),
    }
    assert not is_terminated(I)[0]


def test_step1_zero_levi_block_has_no_unit():
    I = step1(P("2*Re(z3) + z1^2*zb1^2 + z2^2*zb2^2"), CPoint.origin(3), 1)
    assert not is_terminated(I)[0]


def test_step1_off_surface():
    with pytest.raises(ValueError, match="base point off surface"):
        step1(SPHERE, (1, 1), 1)


def test_radical_capture_examples():
    f = leaf("4*z1*zb1", 1)
    caps = radical_capture([f], CPoint.origin(1))
    assert {str(g.poly) for g in caps} == {str(P("(z1 + zb1)/2")), str(P("(z1 - zb1)/(2*i)"))}
    assert all(g.exponent == 2 and g.gain == F(1, 4) for g in caps)
    f = leaf("z1^2*zb1^2 + z2^3*zb2^3", 2)
    caps = radical_capture([f], O2)
    exps = {str(g.poly): g.exponent for g in caps}
    assert exps[str(P("(z1 + zb1)/2", 2))] == 4
    assert exps[str(P("(z2 + zb2)/2", 2))] == 6
    assert all(verify_capture(g, O2, samples=100) for g in caps)


def test_radical_capture_of_unit_keeps_gain():
    f = leaf("1 + z1*zb1", 1, F(1, 3))
    (g,) = radical_capture([f], CPoint.origin(1))
    assert g.poly == HPoly.const(1, 1) and g.gain == F(1, 3)
    assert g.rule == "dominate_same"


def test_tampered_certificate_fails():
    from dataclasses import replace

    f = leaf("4*z1*zb1", 1)
    g = radical_capture([f], CPoint.origin(1))[0]
    bad = replace(g, certificate=replace(g.certificate, constant=g.certificate.constant / 100))
    assert verify_capture(g, CPoint.origin(1))
    assert not verify_capture(bad, CPoint.origin(1))


def test_is_terminated_on_constant():
    one = Multiplier(HPoly.const(2, 1), F(1), "defining")
    assert is_terminated(MultiplierIdeal(1, (one,), O2, 1)) == (True, one)


def test_step_on_terminated_ideal_only_counts():
    I = step1(SPHERE, (1, 0), 1)
    J, stats = step(I, SPHERE)
    assert J.step == 2 and J.generators == I.generators
    assert stats.subsets_examined == 0


def test_run_examples():
    tr = run(SPHERE, (1, 0))
    assert (tr.termination_step, tr.final_gain) == (1, F(1, 2))
    tr = run(PURE2, O2)
    assert (tr.termination_step, tr.final_gain) == (2, F(1, 8))
    assert tr.transcript().splitlines()[-1] == "terminated step 2, eps = 1/8"


@pytest.mark.parametrize("m", [2, 3, 4])
def test_run_pure_models(m):
    tr = run(P(f"2*Re(z2) + z1^{m}*zb1^{m}"), O2)
    assert tr.termination_step == 2
    assert tr.final_gain == F(1, 8 * (m - 1))


def test_ledger_properties_on_pure2():
    tr = run(PURE2, O2)
    for I in tr.steps:
        for g in I.generators:
            assert fold_gain(g) == g.gain
            assert gains_decrease(g)
            assert provenance_leaves(g) <= {"defining", "levi_entry"}
    polys = [set(map(str, I.polys())) for I in tr.steps]
    assert all(a <= b for a, b in zip(polys, polys[1:]))


def test_step_wedges_respect_size_limit():
    tr = run(PURE2, O2)
    for g in tr.steps[1].generators:
        if g.rule == "determinant":
            wedged = [p for p in g.parents
                      if p is not LEVI_ENTRY and p.rule == "gradient" and p.parents[0].rule != "defining"]
            assert len(wedged) <= 1


def test_max_steps_respected():
    tr = run(P("2*Re(z2) + z1^2*zb1^2"), O2, max_steps=1)
    assert not tr.terminated and len(tr.steps) == 1


def test_q_range():
    with pytest.raises(ValueError):
        run(PURE2, O2, q=2)


def test_aggregate_gain():
    a, b = leaf("z1", 1, F(1, 4)), leaf("zb1", 1, F(1, 4))
    assert aggregate([a, b]).gain == F(1, 4)
    c = leaf("z1^2", 1, F(1, 8))
    g = aggregate([a, c])
    assert g.gain is None
    assert evaluate(g.poly, (1,)) == 2


def test_trace_json_deterministic():
    a = json.dumps(run(PURE2, O2).to_json(), sort_keys=True)
    b = json.dumps(run(PURE2, O2).to_json(), sort_keys=True)
    assert a == b
