"""Shared oracles and property-test routines.

Everything here recomputes results by a route independent of the library
code under test: brute-force enumeration, truncated series, or direct
simulation.
"""

from __future__ import annotations

import math

import numpy as np

from luryecycle import (
    DataPairSet,
    PeriodicSignal,
    RationalFrequency,
    TransferFunction,
    evaluate,
    impulse_tail_sums,
    interpolate,
    interval_distance,
    loop_transform_data,
    phase_window_holds,
    monotone_interpolable,
    odd_append,
    periodic_response,
    periodic_steady_state,
    realize,
    simulate_linear,
)


def coprime_pairs(beta_max: int) -> list[tuple[int, int]]:
    return [(a, b) for b in range(2, beta_max + 1)
            for a in range(1, b) if math.gcd(a, b) == 1]


def random_stable_tf(rng: np.random.Generator, max_order: int = 4,
                     pole_bound: float = 0.95) -> TransferFunction:
    """Random proper plant with all poles inside |z| <= pole_bound."""
    order = int(rng.integers(1, max_order + 1))
    poles: list[complex] = []
    while len(poles) < order:
        if order - len(poles) >= 2 and rng.random() < 0.5:
            r = pole_bound * math.sqrt(rng.random())
            th = rng.uniform(0.0, math.pi)
            p = r * complex(math.cos(th), math.sin(th))
            poles += [p, p.conjugate()]
        else:
            poles.append(complex(rng.uniform(-pole_bound, pole_bound)))
    den = np.real(np.poly(poles))
    num = rng.normal(size=order + 1)
    if rng.random() < 0.5:
        num[0] = 0.0  # strictly proper half the time
    return TransferFunction(tuple(num.tolist()), tuple(den.tolist()))


def tail_sum_series(plant: TransferFunction, T: int,
                    periods: int = 400) -> np.ndarray:
    """Aliased impulse response by brute-force truncation.

    Simulates the impulse response for periods*T steps and folds it onto
    one period.  Truncation error is O(rho^(periods*T)).
    """
    ss = realize(plant)
    n = T * periods
    imp = np.zeros(n)
    imp[0] = 1.0
    ys, _ = simulate_linear(ss, imp, np.zeros(ss.order))
    return ys[:n].reshape(periods, T).sum(axis=0)


def pl_eval_reference(breakpoints, y: float) -> tuple[float, float]:
    """Direct evaluator for the piecewise-linear graph (no snapping).

    Constant extrapolation outside the span; the full [v_lo, v_hi]
    interval at a breakpoint; the chord from (y_i, v_hi_i) to
    (y_{i+1}, v_lo_{i+1}) strictly between breakpoints.
    """
    bps = list(breakpoints)
    if y <= bps[0].y:
        return ((bps[0].v_lo, bps[0].v_hi) if y == bps[0].y
                else (bps[0].v_lo, bps[0].v_lo))
    if y >= bps[-1].y:
        return ((bps[-1].v_lo, bps[-1].v_hi) if y == bps[-1].y
                else (bps[-1].v_hi, bps[-1].v_hi))
    for left, right in zip(bps, bps[1:]):
        if y == left.y:
            return (left.v_lo, left.v_hi)
        if left.y < y < right.y:
            t = (y - left.y) / (right.y - left.y)
            v = left.v_hi + t * (right.v_lo - left.v_hi)
            return (v, v)
    return (bps[-1].v_lo, bps[-1].v_hi)


def carrier_data(freq: RationalFrequency, delta: float,
                 T: int | None = None) -> DataPairSet:
    """Cycle data of a unit-gain loop whose return phase is offset delta."""
    if T is None:
        T = freq.T
    w = freq.omega
    pairs = tuple((math.cos(w * t), math.cos(w * t + delta))
                  for t in range(T))
    return DataPairSet(pairs)


# ---------------------------------------------------------------------------
# Property suites.  Each one checks an invariant over a randomized or
# exhaustive family, not a single worked example.
# ---------------------------------------------------------------------------

BOUNDARY_BAND = 1e-9


def check_phase_window_matches_data(beta_max: int = 8,
                                    steps: int = 400) -> int:
    """Phase window <=> the cycle data admits a monotone interpolant.

    For every coprime pair and a grid of phase offsets, the closed-form
    window test must agree with the chord test applied to the actual
    cycle data, in both the plain and the odd-appended form.  Grid
    points inside BOUNDARY_BAND of a window edge are skipped: there the
    two sides differ only by rounding.
    """
    checked = 0
    for alpha, beta in coprime_pairs(beta_max):
        freq = RationalFrequency(alpha, beta)
        T = freq.T
        for n in range(-steps, steps + 1):
            delta = n * math.pi / steps
            data = carrier_data(freq, delta)
            if abs(abs(delta) - math.pi / T) > BOUNDARY_BAND:
                expected = phase_window_holds(delta, T)
                assert monotone_interpolable(data) == expected, \
                    (alpha, beta, delta)
                checked += 1
            if abs(abs(delta) - math.pi / (2 * beta)) > BOUNDARY_BAND:
                odd_ok = monotone_interpolable(odd_append(data))
                assert odd_ok == (abs(delta) <= math.pi / (2 * beta)), \
                    (alpha, beta, delta, "odd")
                checked += 1
    return checked


def check_circulant_eigenpair(rng: np.random.Generator,
                              n_plants: int = 50, beta_max: int = 8,
                              tol: float = 1e-8) -> int:
    """The rational-frequency carrier is an eigenvector of the cycle map.

    For the circulant built from the aliased impulse response, the
    complex carrier exp(j*w*t) must be mapped to G(exp(j*w)) times
    itself.  Checked against the direct polynomial-ratio response.
    """
    checked = 0
    pairs = coprime_pairs(beta_max)
    for _ in range(n_plants):
        plant = random_stable_tf(rng)
        ss = realize(plant)
        for alpha, beta in pairs:
            freq = RationalFrequency(alpha, beta)
            T = freq.T
            h = impulse_tail_sums(ss, T)
            z = np.exp(1j * freq.omega)
            carrier = z ** np.arange(T)
            mapped = np.zeros(T, dtype=complex)
            for i in range(T):
                mapped[i] = sum(h[j] * carrier[(i - j) % T]
                                for j in range(T))
            gain = complex(np.polyval(plant.num, z)
                           / np.polyval(plant.den, z))
            assert np.max(np.abs(mapped - gain * carrier)) < tol, \
                (plant.num, plant.den, alpha, beta)
            checked += 1
    return checked


def check_interpolation_invariants(rng: np.random.Generator,
                                   n_sets: int = 200) -> int:
    """Random monotone data always interpolates consistently.

    The interpolant must contain every data pair, agree with the direct
    piecewise-linear evaluator between breakpoints, stay monotone along
    any query sweep, and detect odd symmetry exactly when the data has
    it.  The loop transform of the same data must land inside the
    slope-k class, reaching k exactly when the graph has a riser.
    """
    checked = 0
    for _ in range(n_sets):
        m = int(rng.integers(2, 9))
        odd_case = rng.random() < 0.3
        if odd_case:
            # reflecting through the origin stays monotone only for
            # first-quadrant data, so keep y and v positive here
            ys = np.sort(rng.uniform(0.05, 2.0, size=m))
            vs = np.cumsum(rng.uniform(0.0, 1.0, size=m))
        else:
            ys = np.sort(rng.uniform(-2.0, 2.0, size=m))
            vs = np.cumsum(rng.uniform(0.0, 1.0, size=m)) - 1.0
        pairs = [(float(y), float(v)) for y, v in zip(ys, vs)]
        if rng.random() < 0.4 and m >= 3:
            # duplicate one y with a different v: multivalued point
            j = int(rng.integers(0, m - 1))
            pairs.append((pairs[j][0], pairs[j + 1][1]))
        if odd_case:
            pairs = pairs + [(-y, -v) for y, v in pairs] + [(0.0, 0.0)]
        data = DataPairSet(tuple(pairs))
        assert monotone_interpolable(data)
        phi = interpolate(data)

        for y, v in pairs:
            assert interval_distance(evaluate(phi, y), v) <= 1e-9, (pairs,
                                                                    y, v)
        span = max(abs(y) for y, _ in pairs) + 1.0
        queries = np.sort(rng.uniform(-span, span, size=16))
        last_hi = -math.inf
        for q in queries:
            lo, hi = evaluate(phi, float(q))
            assert lo <= hi + 1e-12
            assert hi >= last_hi - 1e-12, "graph must never step down"
            last_hi = max(last_hi, hi)
            if min(abs(q - b.y) for b in phi.breakpoints) > phi.y_tol:
                ref_lo, ref_hi = pl_eval_reference(phi.breakpoints,
                                                   float(q))
                assert math.isclose(lo, ref_lo, abs_tol=1e-12)
                assert math.isclose(hi, ref_hi, abs_tol=1e-12)
        if odd_case:
            assert phi.odd
            for q in queries:
                lo, hi = evaluate(phi, float(q))
                mlo, mhi = evaluate(phi, float(-q))
                assert math.isclose(lo, -mhi, abs_tol=1e-9)
                assert math.isclose(hi, -mlo, abs_tol=1e-9)

        k = float(rng.uniform(0.5, 20.0))
        phi_k = interpolate(loop_transform_data(data, k))
        peak = phi_k.max_chord_slope()
        assert peak <= k * (1.0 + 1e-9), (pairs, k)
        if any(b.v_hi - b.v_lo > 1e-9 for b in phi.breakpoints):
            # a riser maps to a chord of slope exactly k
            assert peak >= k * (1.0 - 1e-9), (pairs, k)
        for y, v in pairs:
            assert interval_distance(evaluate(phi_k, y + v / k), v) <= 1e-9
        checked += 1
    return checked


def check_steady_state_is_fixed_point(rng: np.random.Generator,
                                      n_cases: int = 50,
                                      tol: float = 1e-9) -> int:
    """Closed-form periodic initial state equals the simulated limit.

    Running the loop for 200 periods from rest must land on the
    closed-form state, and one more period from that state must return
    to it while reproducing the circulant output.
    """
    checked = 0
    for _ in range(n_cases):
        plant = random_stable_tf(rng, pole_bound=0.85)
        ss = realize(plant)
        T = int(rng.integers(1, 9))
        u = PeriodicSignal(tuple(rng.uniform(-1.0, 1.0, size=T)))
        x0 = periodic_steady_state(ss, u)

        long_u = np.tile(u.as_array(), 200)
        _, xs = simulate_linear(ss, long_u, np.zeros(ss.order))
        assert np.max(np.abs(xs[-1] - x0)) < tol

        ys, xs1 = simulate_linear(ss, u.as_array(), x0)
        assert np.max(np.abs(xs1[-1] - x0)) < tol
        want = periodic_response(plant, u).as_array()
        assert np.max(np.abs(ys - want)) < tol
        checked += 1
    return checked
