"""Inequality construction: segmented operators, labels, validation."""

import math
from fractions import Fraction

import pytest

from netbell import network, scenario
from netbell.scenario import (
    PRIMED,
    QUARTER_PI,
    SCENARIOS,
    UNPRIMED,
    Correlator,
    InequalityExpr,
    JointPauliObservable,
    SingleQubitObservable,
    Term,
    build_chsh,
    build_ghz_a,
    build_ghz_b,
    build_nkm,
    build_star_combined,
    build_star_first,
    build_star_nonlinear,
    build_two_source_linear,
    resolve_angles,
    segmented_operator,
)

SQRT2 = math.sqrt(2.0)


def segmented(expr, angles=None):
    """(family, label) -> (coefficient incl. term sign, word) at given angles."""
    out = {}
    for t in expr.terms:
        obs = expr.observables_for(t.family)
        c, w = segmented_operator(t.correlator, obs, expr.topology.n_qubits, angles)
        out[(t.family, t.correlator.label)] = (t.coefficient * c, w)
    return out


def test_chsh_segmented_operators():
    expr = build_chsh()
    ops = segmented(expr)
    assert len(ops) == 2
    c0, w0 = ops[(UNPRIMED, "0")]
    c1, w1 = ops[(UNPRIMED, "1")]
    assert c0 == SQRT2 and str(w0) == "+Z0 Z1"
    assert c1 == SQRT2 and str(w1) == "+X0 X1"


def test_chsh_segmented_at_general_angle():
    expr = build_chsh()
    theta = 0.3
    ops = segmented(expr, {("A", "ZX"): theta})
    assert ops[(UNPRIMED, "0")][0] == pytest.approx(2.0 * math.cos(theta))
    assert ops[(UNPRIMED, "1")][0] == pytest.approx(2.0 * math.sin(theta))


def test_ghz_b_operator_set():
    # the eight signed words factor as {ZZ, XX} x {ZZX, ZXZ, XZZ, -XXX}
    expr = build_ghz_b()
    ops = segmented(expr)
    got = {(1 if c > 0 else -1, w.letters()) for c, w in ops.values()}
    want = {
        (1, "ZZZZX"), (1, "ZZZXZ"), (1, "ZZXZZ"), (-1, "ZZXXX"),
        (1, "XXZZX"), (1, "XXZXZ"), (1, "XXXZZ"), (-1, "XXXXX"),
    }
    assert got == want
    for c, _ in ops.values():
        assert abs(c) == pytest.approx(1.0 / (2.0 * SQRT2), abs=1e-15)


def test_two_source_families():
    exprs = build_two_source_linear()
    first, second = exprs["first"], exprs["second"]
    assert [t.coefficient for t in first.terms] == [1, 1, 1, 1]
    assert [t.coefficient for t in second.terms] == [1, -1, -1, 1]
    # letter maps: B measures the pair in Z/X (first) or Z/Y (second)
    b1 = first.observables_for(UNPRIMED)["B"]
    b2 = second.observables_for(PRIMED)["B"]
    assert b1.letters_for("01") == "ZX" and b1.letters_for("10") == "XZ"
    assert b2.letters_for("11") == "YY"
    combined = exprs["combined"]
    assert len(combined.terms) == 8
    assert combined.families() == (UNPRIMED, PRIMED)
    assert combined.classical_bound == 2.0 and combined.claimed_quantum_max == 4.0


def test_ghz_a_labels_and_exponents():
    expr = build_ghz_a("combined")
    labels = [t.correlator.label for t in expr.terms]
    assert labels == ["000", "001", "100", "110", "000'", "010'", "100'", "101'"]
    for t in expr.terms:
        y = t.correlator.label.rstrip("'")
        e = t.correlator.exponent_map
        assert e["A"] == int(y[0])
        assert e["C"] == (int(y[1]) + int(y[2]) + 1) % 2
        assert t.correlator.joint_map["B"] == y
    # both families reuse the same observables, so angles and inputs are shared
    assert expr.angle_keys() == (("A", "ZX"), ("C", "ZX"))
    assert expr.party_inputs("A") == ("0", "1")
    assert set(expr.party_inputs("B")) == {"000", "001", "100", "110", "010", "101"}
    assert expr.n_strategies_raw() == 4 * 64 * 4


def test_star_first_shape():
    expr = build_star_first(3)
    assert len(expr.terms) == 8
    assert expr.value_scale(UNPRIMED) == 1.0
    assert expr.claimed_quantum_max == pytest.approx(2.0 ** 1.5)
    b = expr.observables_for(UNPRIMED)["B"]
    assert b.letters_for("101") == "XZX"
    ops = segmented(expr)
    c, w = ops[(UNPRIMED, "000")]
    assert c == pytest.approx(2.0 ** -1.5)
    assert w.letters() == "ZZZZZZ"


def test_star_combined_qualifies_branch_inputs():
    expr = build_star_combined(2)
    # branch observables differ between families, so labels carry a family bit
    assert expr.party_inputs("A1") == ("00", "01", "10", "11")
    assert expr.party_inputs("B") == ("000", "001", "010", "011",
                                      "100", "101", "110", "111")
    assert expr.input_label(PRIMED, "A1", "0") == "10"
    assert expr.n_strategies_raw() == 2 ** 4 * 2 ** 8 * 2 ** 4


def test_star_nonlinear_validation():
    assert build_star_nonlinear(3, Fraction(1, 3)).exponent == Fraction(1, 3)
    with pytest.raises(ValueError):
        build_star_nonlinear(3, Fraction(1, 2))  # even denominator
    with pytest.raises(ValueError):
        build_star_nonlinear(3, Fraction(2, 3))  # even numerator
    with pytest.raises(ValueError):
        build_star_nonlinear(3, Fraction(1))  # t = 3 >= 2
    with pytest.raises(ValueError):
        build_star_nonlinear(3, Fraction(5, 3))  # r > 1


def test_star_nonlinear_bounds():
    first = build_star_nonlinear(3, Fraction(1, 3), "first")
    assert first.classical_bound == pytest.approx(4.0)
    assert first.claimed_quantum_max == pytest.approx(2.0 ** 2.5)
    comb = build_star_nonlinear(3, Fraction(1, 3), "combined")
    assert comb.classical_bound == pytest.approx(8.0)
    assert comb.claimed_quantum_max == pytest.approx(2.0 ** 3.5)


def test_nkm_collapse_is_star():
    topo = network.nkm(2, 2, 1, wiring=(), alice_recipients=[0, 0])
    nk = build_nkm(topo)
    st_first = build_star_first(2)
    nk_first = nk["first"]
    assert [t.correlator.label for t in nk_first.terms] == \
        [t.correlator.label for t in st_first.terms]
    assert [t.coefficient for t in nk_first.terms] == \
        [t.coefficient for t in st_first.terms]
    for a, b in zip(nk_first.terms, st_first.terms):
        assert a.correlator.normalization == b.correlator.normalization
        assert a.correlator.exponent_map == b.correlator.exponent_map
    # hub letter maps agree input-for-input even though qubit ids differ
    hub_nk = nk_first.observables_for(UNPRIMED)["B1"]
    hub_st = st_first.observables_for(UNPRIMED)["B"]
    for y in ("00", "01", "10", "11"):
        assert hub_nk.letters_for(y) == hub_st.letters_for(y)
    assert nk_first.claimed_quantum_max == st_first.claimed_quantum_max


def test_nkm_inter_source_letters():
    topo = network.nkm(3, 2, 2, wiring=((2, 0, 1),))
    exprs = build_nkm(topo)
    for fam, expr in exprs.items():
        family = expr.families()[0]
        obs = expr.observables_for(family)
        # hub B1 holds qubits (1, 4): branch bit then fixed link bit 0 -> Z
        assert obs["B1"].letters_for("00") == "ZZ"
        assert obs["B1"].letters_for("10")[1] == "Z"
    withx = build_nkm(topo, inter_bits={2: 1})
    obs = withx["second"].observables_for(PRIMED)
    # the link pair measures X in both families, never Y
    assert obs["B1"].letters_for("01") == "ZX"
    assert obs["B2"].letters_for("01") == "ZX"
    assert obs["B1"].letters_for("11") == "YX"


def test_bilocal_baseline_flags():
    exprs = scenario.build_bilocal_baseline()
    bi, bil = exprs["bi"], exprs["bil"]
    assert bi.exponent == Fraction(1, 2) and bi.absolute
    assert bil.exponent == Fraction(1) and bil.absolute
    assert bi.bound_model == "bilocal" == bil.bound_model
    assert bi.claimed_quantum_max == pytest.approx(SQRT2)


def test_resolve_angles():
    expr = build_chsh()
    assert resolve_angles(expr, None) == {("A", "ZX"): QUARTER_PI}
    assert resolve_angles(expr, {("A", "ZX"): 0.2}) == {("A", "ZX"): 0.2}
    with pytest.raises(KeyError):
        resolve_angles(expr, {("B", "ZX"): 0.2})
    with pytest.raises(ValueError):
        resolve_angles(expr, {("A", "ZX"): 2.0})


def test_expr_validation():
    topo = network.chsh_pair()
    obs = (
        ("A", SingleQubitObservable(0, "ZX")),
        ("B", JointPauliObservable.make((1,), {"0": "Z", "1": "X"})),
    )
    def corr(label, y):
        return Correlator(label, (("A", int(y)),), (("B", y),), Fraction(1))
    dup = (Term(1, corr("0", "0"), UNPRIMED), Term(1, corr("0", "1"), UNPRIMED))
    with pytest.raises(ValueError, match="unique"):
        InequalityExpr("x", "x", topo, ((UNPRIMED, obs),), dup)
    missing = (Term(1, Correlator("0", (("A", 0),), (), Fraction(1)), UNPRIMED),)
    with pytest.raises(ValueError, match="covers"):
        InequalityExpr("x", "x", topo, ((UNPRIMED, obs),), missing)
    ok = (Term(1, corr("0", "0"), UNPRIMED),)
    with pytest.raises(ValueError, match="odd"):
        InequalityExpr("x", "x", topo, ((UNPRIMED, obs),), ok,
                       exponent=Fraction(1, 2))
    with pytest.raises(ValueError):
        Term(2, corr("0", "0"), UNPRIMED)
    with pytest.raises(ValueError):
        Correlator("0", (("A", 2),), (("B", "0"),), Fraction(1))
    with pytest.raises(ValueError):
        SingleQubitObservable(0, "XY")
    with pytest.raises(KeyError):
        JointPauliObservable.make((1,), {"0": "Z"}).letters_for("1")


def test_value_scales():
    assert build_chsh().value_scale(UNPRIMED) == 2.0
    assert build_ghz_b().value_scale(UNPRIMED) == 1.0
    assert build_star_first(4).value_scale(UNPRIMED) == 1.0
    assert scenario.build_bilocal_baseline()["bi"].value_scale(UNPRIMED) == 1.0


def test_registry_builds_everything():
    for name, info in SCENARIOS.items():
        exprs = info.build()
        assert set(exprs) == set(info.families), name
        for expr in exprs.values():
            assert expr.terms and expr.classical_bound > 0
    star_nl = SCENARIOS["star"].build(k=3, r=Fraction(1, 3))
    assert star_nl["first"].exponent == Fraction(1, 3)
