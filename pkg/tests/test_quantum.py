"""Quantum values and angle optimization against closed forms."""

import math
import os
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netbell import quantum, states
from netbell.quantum import (
    claimed_max_check,
    compile_expression,
    evaluate,
    f_theta,
    f_theta_max,
    mahler_check,
    optimize_angles,
)
from netbell.scenario import (
    QUARTER_PI,
    build_bilocal_baseline,
    build_chsh,
    build_ghz_a,
    build_ghz_b,
    build_star_combined,
    build_star_first,
    build_star_nonlinear,
    build_two_source_linear,
    resolve_angles,
)
from netbell.states import network_state, parse_state_spec, smolin

SQRT2 = math.sqrt(2.0)


def natural(expr):
    return network_state(expr.topology)


def test_chsh_closed_form():
    expr = build_chsh()
    state = natural(expr)
    # value(theta) = 2 (cos theta + sin theta)
    for theta in (0.1, 0.5, QUARTER_PI, 1.2):
        got = evaluate(expr, state, {("A", "ZX"): theta})
        assert got == pytest.approx(2.0 * (math.cos(theta) + math.sin(theta)),
                                    abs=1e-12)
    assert evaluate(expr, state) == pytest.approx(2.0 * SQRT2, abs=1e-15)


def test_star_closed_form():
    expr = build_star_first(2)
    state = natural(expr)
    for t1, t2 in ((0.2, 0.9), (QUARTER_PI, 0.4), (1.1, 1.3)):
        got = evaluate(expr, state, {("A1", "ZX"): t1, ("A2", "ZX"): t2})
        want = (math.cos(t1) + math.sin(t1)) * (math.cos(t2) + math.sin(t2))
        assert got == pytest.approx(want, abs=1e-12)


def test_ghz_b_closed_form():
    expr = build_ghz_b()
    state = natural(expr)
    angles = {("A", "ZX"): 0.3, ("C1", "ZX"): 0.7, ("C2", "ZX"): 1.0}
    want = 1.0
    for _, theta in angles.items():
        want *= math.cos(theta) + math.sin(theta)
    assert evaluate(expr, state, angles) == pytest.approx(want, abs=1e-12)
    assert evaluate(expr, state) == pytest.approx(2.0 * SQRT2, abs=1e-15)


def test_two_source_combined_on_mixtures():
    # at the symmetric angles the combined value is exactly 2 + 2q on rho1(q)
    expr = build_two_source_linear()["combined"]
    topo = expr.topology
    values = []
    for q in (0.0, 0.2, 0.5, 0.8, 1.0):
        state = parse_state_spec(f"rho1({q})", topo)
        got = evaluate(expr, state)
        assert got == pytest.approx(2.0 + 2.0 * q, abs=1e-12)
        values.append(got)
    assert all(b > a for a, b in zip(values, values[1:]))


def test_two_source_combined_optimum_needs_pure_state():
    expr = build_two_source_linear()["combined"]
    topo = expr.topology
    best = optimize_angles(expr, parse_state_spec("rho1(1.0)", topo), starts=4)
    assert best.value == pytest.approx(4.0, abs=1e-9)
    worse = optimize_angles(expr, parse_state_spec("rho1(0.4)", topo), starts=4)
    assert worse.value < 4.0 - 0.3


def test_rho2_swaps_the_roles_of_the_families():
    # psi+ pairs keep the Z/Y family at 2 while the Z/X family scales as 2q
    exprs = build_two_source_linear()
    topo = exprs["first"].topology
    for q in (0.0, 0.5, 1.0):
        state = parse_state_spec(f"rho2({q})", topo)
        assert evaluate(exprs["first"], state) == pytest.approx(2.0 * q, abs=1e-12)
        assert evaluate(exprs["second"], state) == pytest.approx(2.0, abs=1e-12)
        assert evaluate(exprs["combined"], state) == pytest.approx(
            2.0 + 2.0 * q, abs=1e-12)


def test_smolin_values_exact():
    exprs = build_two_source_linear()
    sm = smolin()
    assert evaluate(exprs["first"], sm) == 1.0
    assert evaluate(exprs["second"], sm) == 1.0
    assert evaluate(exprs["combined"], sm) == 2.0


def test_smolin_square_root_baseline():
    bi = build_bilocal_baseline()["bi"]
    assert evaluate(bi, smolin()) == pytest.approx(SQRT2, abs=1e-12)
    bil = build_bilocal_baseline()["bil"]
    assert evaluate(bil, smolin()) == pytest.approx(1.0, abs=1e-12)


def test_optimize_chsh():
    expr = build_chsh()
    res = optimize_angles(expr, natural(expr), starts=4)
    assert res.value == pytest.approx(2.0 * SQRT2, abs=1e-9)
    assert res.angles[("A", "ZX")] == pytest.approx(QUARTER_PI, abs=1e-6)
    assert len(res.start_values) == 4
    assert max(res.start_values) == res.value


def test_optimize_lands_exactly_on_quarter_pi():
    # the symmetric start is kept whenever refinement cannot beat it
    expr = build_star_first(3)
    res = optimize_angles(expr, natural(expr), starts=2)
    assert res.value == pytest.approx(2.0 ** 1.5, abs=1e-12)
    for key in expr.angle_keys():
        assert res.angles[key] == QUARTER_PI


def test_optimize_ghz_scenarios():
    a = build_ghz_a("combined")
    res = claimed_max_check(a, starts=4)
    assert res["achieved"] and res["optimized_value"] == pytest.approx(4.0, abs=1e-9)
    b = build_ghz_b()
    res = claimed_max_check(b, starts=4)
    assert res["achieved"]
    assert set(res["angles"]) == {"A:ZX", "C1:ZX", "C2:ZX"}


def test_optimize_nonlinear_star():
    expr = build_star_nonlinear(3, Fraction(1, 3), "first")
    res = optimize_angles(expr, natural(expr), starts=3)
    assert res.value == pytest.approx(2.0 ** 2.5, abs=1e-9)


def test_threaded_optimization_matches_serial(monkeypatch):
    expr = build_star_combined(2)
    state = natural(expr)
    monkeypatch.delenv("NETBELL_THREADS", raising=False)
    serial = optimize_angles(expr, state, starts=6, seed=23)
    monkeypatch.setenv("NETBELL_THREADS", "4")
    threaded = optimize_angles(expr, state, starts=6, seed=23)
    assert serial.value == threaded.value
    assert serial.start_values == threaded.start_values
    assert serial.angles == threaded.angles


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(5)
    cases = [
        (build_chsh(), None),
        (build_two_source_linear()["combined"], None),
        (build_star_nonlinear(3, Fraction(1, 3), "first"), None),
        (build_bilocal_baseline()["bi"], smolin()),
    ]
    for expr, state in cases:
        state = state if state is not None else natural(expr)
        compiled = compile_expression(expr, state)
        keys = expr.angle_keys()
        for _ in range(20):
            angles = {k: float(rng.uniform(0.15, math.pi / 2 - 0.15))
                      for k in keys}
            grad = compiled.gradient(angles)
            h = 1e-6
            for key in keys:
                up = {**angles, key: angles[key] + h}
                dn = {**angles, key: angles[key] - h}
                fd = (compiled.value(up) - compiled.value(dn)) / (2.0 * h)
                assert grad[key] == pytest.approx(fd, abs=1e-6)


def test_f_theta_trade_off():
    for t in (0.5, 1.0, 1.5):
        grid = np.linspace(1e-4, math.pi / 2 - 1e-4, 20001)
        best = max(f_theta(x, t) for x in grid)
        assert f_theta_max(t) == pytest.approx(2.0 ** (1.0 - t / 2.0), abs=0)
        assert best <= f_theta_max(t) + 1e-12
        assert f_theta(QUARTER_PI, t) == pytest.approx(f_theta_max(t), abs=1e-12)
    with pytest.raises(ValueError):
        f_theta_max(2.0)
    with pytest.raises(ValueError):
        f_theta_max(0.0)


def test_mahler_inequality_basics():
    res = mahler_check([1.0, 4.0], [2.0, 8.0])
    assert res["equality"] and res["proportional"]
    res = mahler_check([1.0, 4.0], [4.0, 1.0])
    assert res["gap"] > 0 and not res["equality"]
    with pytest.raises(ValueError):
        mahler_check([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        mahler_check([-1.0], [1.0])


@given(st.lists(st.tuples(st.floats(0.0, 10.0), st.floats(0.0, 10.0)),
                min_size=1, max_size=6))
@settings(max_examples=300)
def test_mahler_inequality_random(pairs):
    xs = [x for x, _ in pairs]
    ys = [y for _, y in pairs]
    res = mahler_check(xs, ys)
    assert res["lhs"] >= res["rhs"] - 1e-12


def test_evaluate_rejects_unknown_angles():
    expr = build_chsh()
    with pytest.raises(KeyError):
        evaluate(expr, natural(expr), {("Q", "ZX"): 0.3})


def test_thread_count_parsing(monkeypatch):
    monkeypatch.delenv("NETBELL_THREADS", raising=False)
    assert quantum.thread_count() == 1
    monkeypatch.setenv("NETBELL_THREADS", "3")
    assert quantum.thread_count() == 3
    monkeypatch.setenv("NETBELL_THREADS", "0")
    assert quantum.thread_count() == 1
