"""Exact quantum values and measurement-angle optimization.

A segmented operator's Pauli word depends only on the exponent pattern, not
on the angles, so expectations are computed once per term and the value as a
function of angles is a weighted product of cosines and sines:

    value = sum_t c_t * powr( base_t * prod_j trig(theta_{k_j}, e_j) * E_t )

with powr the identity, a sign-preserving odd power, or |.|^r.  When every
angle equals pi/4 the trig product is evaluated as 2^(-s/2) so power-of-two
values come out exact.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import states
from .scenario import (QUARTER_PI, AngleMap, InequalityExpr,
                       SingleQubitObservable, resolve_angles,
                       segmented_operator)
from .states import State

ANGLE_MARGIN = 1e-3  # keep searches inside the open quadrant


def thread_count() -> int:
    try:
        n = int(os.environ.get("NETBELL_THREADS", "1"))
    except ValueError:
        return 1
    return max(1, n)


@dataclass(frozen=True)
class _CompiledTerm:
    coefficient: int
    base: float                      # normalization * 2^s, exact in binary
    trig: tuple[tuple[tuple[str, str], int], ...]  # (angle key, exponent bit)
    expectation: float


@dataclass(frozen=True)
class CompiledExpression:
    """Expression with per-term expectations frozen against one state."""

    expr: InequalityExpr
    terms: tuple[_CompiledTerm, ...]

    def value(self, angles: Mapping[tuple[str, str], float]) -> float:
        r = self.expr.exponent
        rf = float(r)
        total = 0.0
        for t in self.terms:
            s = len(t.trig)
            if all(angles[k] == QUARTER_PI for k, _ in t.trig):
                prod = 2.0 ** (-s / 2)
            else:
                prod = 1.0
                for key, e in t.trig:
                    theta = angles[key]
                    prod *= math.sin(theta) if e else math.cos(theta)
            v = t.base * prod * t.expectation
            if self.expr.absolute:
                v = abs(v) ** rf
            elif r != 1:
                v = math.copysign(abs(v) ** rf, v)
            total += t.coefficient * v
        return total

    def gradient(self, angles: Mapping[tuple[str, str], float]) -> dict[tuple[str, str], float]:
        """d(value)/d(theta_key); smooth wherever no correlator sits at 0."""
        r = self.expr.exponent
        rf = float(r)
        grad = {key: 0.0 for key in self.expr.angle_keys()}
        for t in self.terms:
            factors = []
            for key, e in t.trig:
                theta = angles[key]
                f = math.sin(theta) if e else math.cos(theta)
                df = math.cos(theta) if e else -math.sin(theta)
                factors.append((key, f, df))
            prod = 1.0
            for _, f, _ in factors:
                prod *= f
            v = t.base * prod * t.expectation
            if r == 1:
                outer = 1.0 if not self.expr.absolute else math.copysign(1.0, v)
            else:
                av = max(abs(v), 1e-300)
                outer = rf * av ** (rf - 1.0)
                if self.expr.absolute:
                    outer *= math.copysign(1.0, v)
            for i, (key, f, df) in enumerate(factors):
                rest = t.base * t.expectation
                for j, (_, fj, _) in enumerate(factors):
                    rest *= df if j == i else fj
                grad[key] += t.coefficient * outer * rest
        return grad


def compile_expression(expr: InequalityExpr, state: State) -> CompiledExpression:
    compiled = []
    for t in expr.terms:
        obs_map = expr.observables_for(t.family)
        corr = t.correlator
        trig = []
        for party, e in corr.exponents:
            obs = obs_map[party]
            assert isinstance(obs, SingleQubitObservable)
            trig.append(((party, obs.plane), e))
        _, w = segmented_operator(corr, obs_map, expr.topology.n_qubits)
        base = float(corr.normalization * (1 << corr.n_single))
        compiled.append(_CompiledTerm(
            t.coefficient, base, tuple(trig), states.expectation(state, w)))
    return CompiledExpression(expr, tuple(compiled))


def evaluate(expr: InequalityExpr, state: State,
             angles: AngleMap | None = None) -> float:
    """Expression value on a state at given angles (default all pi/4)."""
    resolved = resolve_angles(expr, angles)
    return compile_expression(expr, state).value(resolved)


# -- angle optimization ---------------------------------------------------------


@dataclass(frozen=True)
class OptimizeResult:
    value: float
    angles: dict[tuple[str, str], float]
    start_values: tuple[float, ...]
    sweeps: int


def _golden_max(f, lo: float, hi: float, tol: float = 1e-10):
    """Golden-section maximum of a unimodal-enough section; returns (x, f(x))."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _ascend(compiled: CompiledExpression, start: dict, grid: int,
            max_sweeps: int) -> tuple[float, dict, int]:
    keys = list(start)
    angles = dict(start)
    lo, hi = ANGLE_MARGIN, math.pi / 2 - ANGLE_MARGIN
    value = compiled.value(angles)
    sweeps = 0
    for sweep in range(max_sweeps):
        sweeps = sweep + 1
        improved = 0.0
        for key in keys:
            def section(theta: float) -> float:
                angles[key] = theta
                return compiled.value(angles)

            candidates = list(np.linspace(lo, hi, grid))
            candidates += [QUARTER_PI, angles[key]]
            best_theta = max(candidates, key=section)
            width = (hi - lo) / (grid - 1)
            g_lo = max(lo, best_theta - width)
            g_hi = min(hi, best_theta + width)
            theta, val = _golden_max(section, g_lo, g_hi)
            # exact grid candidates (pi/4 in particular) may beat the
            # refined point by a rounding margin; keep whichever wins
            best_val = section(best_theta)
            if best_val >= val:
                theta, val = best_theta, best_val
            angles[key] = theta
            improved = max(improved, val - value)
            value = val
        if improved < 1e-12:
            break
    return value, angles, sweeps


def optimize_angles(expr: InequalityExpr, state: State,
                    starts: int = 8, seed: int = 11, grid: int = 64,
                    max_sweeps: int = 60) -> OptimizeResult:
    """Multi-start coordinate ascent over the measurement angles.

    Start 0 is the symmetric all-pi/4 point; the rest are seeded uniform
    draws.  Ties resolve to the earliest start, so results are deterministic
    for a given seed regardless of NETBELL_THREADS.
    """
    compiled = compile_expression(expr, state)
    keys = expr.angle_keys()
    if not keys:
        v = compiled.value({})
        return OptimizeResult(v, {}, (v,), 0)
    rng = np.random.Generator(np.random.Philox(key=seed))
    lo, hi = ANGLE_MARGIN, math.pi / 2 - ANGLE_MARGIN
    start_points = [{k: QUARTER_PI for k in keys}]
    for _ in range(max(0, starts - 1)):
        start_points.append(
            {k: float(rng.uniform(lo, hi)) for k in keys})

    def run(point: dict) -> tuple[float, dict, int]:
        return _ascend(compiled, point, grid, max_sweeps)

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, start_points))
    else:
        results = [run(p) for p in start_points]
    best_value, best_angles, best_sweeps = results[0]
    for value, angles, sweeps in results[1:]:
        if value > best_value:
            best_value, best_angles, best_sweeps = value, angles, sweeps
    return OptimizeResult(best_value, best_angles,
                          tuple(rv for rv, _, _ in results), best_sweeps)


def claimed_max_check(expr: InequalityExpr, state: State | None = None,
                      tolerance: float = 1e-9, **kwargs) -> dict:
    """Optimize and compare against the declared quantum maximum."""
    if state is None:
        state = states.network_state(expr.topology)
    result = optimize_angles(expr, state, **kwargs)
    gap = result.value - expr.claimed_quantum_max
    return {
        "inequality": expr.name,
        "claimed_max": expr.claimed_quantum_max,
        "optimized_value": result.value,
        "gap": gap,
        "achieved": abs(gap) <= tolerance,
        "angles": {f"{party}:{plane}": theta
                   for (party, plane), theta in result.angles.items()},
        "start_values": list(result.start_values),
    }


# -- analytic helpers -------------------------------------------------------------


def f_theta(theta: float, t: float) -> float:
    """Per-source trade-off cos^t + sin^t for power parameter t in (0, 2)."""
    return math.cos(theta) ** t + math.sin(theta) ** t


def f_theta_max(t: float) -> float:
    """max_theta f_theta = 2^(1 - t/2), attained at pi/4 for t < 2."""
    if not 0.0 < t < 2.0:
        raise ValueError("trade-off maximum needs 0 < t < 2")
    return 2.0 ** (1.0 - t / 2.0)


def mahler_check(xs: Sequence[float], ys: Sequence[float],
                 tolerance: float = 1e-12) -> dict:
    """Superadditivity of the geometric mean on nonnegative vectors.

    (prod (x_i + y_i))^(1/n) >= (prod x_i)^(1/n) + (prod y_i)^(1/n),
    with equality iff the vectors are proportional.  This is the inequality
    behind the uniform-mixture classical maximum of the power forms.
    """
    if len(xs) != len(ys) or not xs:
        raise ValueError("need two equal-length nonempty vectors")
    if any(x < 0 for x in xs) or any(y < 0 for y in ys):
        raise ValueError("vectors must be nonnegative")
    n = len(xs)
    gm = lambda vs: math.prod(vs) ** (1.0 / n)
    lhs = gm([x + y for x, y in zip(xs, ys)])
    rhs = gm(xs) + gm(ys)
    if lhs < rhs - tolerance:
        raise AssertionError(f"geometric-mean superadditivity violated: "
                             f"{lhs} < {rhs}")
    cross = [x * sum(ys) - y * sum(xs) for x, y in zip(xs, ys)]
    proportional = all(abs(c) <= 1e-9 * (sum(xs) + sum(ys)) for c in cross)
    return {"lhs": lhs, "rhs": rhs, "gap": lhs - rhs,
            "equality": abs(lhs - rhs) <= 1e-9, "proportional": proportional}
