"""Monotone interpolation of feedback data and the input-shift machinery.

Data pairs (y, v) sample a candidate nonlinearity v = phi(y) with the
feedback sign convention v = -u.  A set is interpolable by a monotone
(possibly multivalued) nonlinearity iff every chord is non-decreasing:
(y_i - y_l)(v_i - v_l) >= 0.  The interpolant is piecewise linear between
breakpoints, takes the whole interval [v_lo, v_hi] at a multivalued
breakpoint, and extrapolates by its nearest value outside the data span.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import cached_property

from .errors import (
    MultivaluedPhiError,
    NoIntersectionError,
    NotMonotoneError,
    SlopeViolationError,
)
from .lti import RationalFrequency

# Y_TOL_FACTOR scales the breakpoint clustering width with the data;
# INTERPOLABLE_TOL absorbs rounding in the chord products; ORIGIN_TOL is the
# containment tolerance for 0 in phi(0); SLOPE_SLACK is the relative
# slack allowed on chord-slope checks.
Y_TOL_FACTOR = 1e-8
INTERPOLABLE_TOL = 1e-10
ORIGIN_TOL = 1e-9
SLOPE_SLACK = 1e-9

__all__ = [
    "Y_TOL_FACTOR",
    "INTERPOLABLE_TOL",
    "ORIGIN_TOL",
    "SLOPE_SLACK",
    "DataPairSet",
    "Breakpoint",
    "PiecewiseNonlinearity",
    "monotone_interpolable",
    "interpolate",
    "evaluate",
    "interval_distance",
    "odd_append",
    "compute_shift",
    "shift_data",
    "loop_transform_data",
]


@dataclass(frozen=True)
class DataPairSet:
    """Finite set of (y, v) samples of a candidate nonlinearity.

    Optional metadata records where the samples came from: the rational
    frequency and the plant response that generated them.
    """

    pairs: tuple[tuple[float, float], ...]
    freq: RationalFrequency | None = None
    response: complex | None = None

    def __post_init__(self):
        pairs = tuple((float(y), float(v)) for y, v in self.pairs)
        if not pairs:
            raise ValueError("a data set needs at least one pair")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def sorted_pairs(self) -> list[tuple[float, float]]:
        return sorted(self.pairs)

    def y_tol(self) -> float:
        """Clustering width: relative to the largest output magnitude."""
        return Y_TOL_FACTOR * max(1.0, max(abs(y) for y, _ in self.pairs))

    def v_tol(self) -> float:
        return Y_TOL_FACTOR * max(1.0, max(abs(v) for _, v in self.pairs))


def monotone_interpolable(data: DataPairSet,
                          tol: float = INTERPOLABLE_TOL) -> bool:
    """All-pairs chord test: (y_i - y_l)(v_i - v_l) >= 0 within tolerance.

    Products down to -tol * scale^2 pass, where scale covers the data
    magnitude, so exact repeats perturbed by rounding are not rejected.
    """
    pts = data.pairs
    scale = max(1.0, max(abs(y) for y, _ in pts), max(abs(v) for _, v in pts))
    floor = -tol * scale * scale
    for i in range(len(pts)):
        yi, vi = pts[i]
        for l in range(i + 1, len(pts)):
            yl, vl = pts[l]
            if (yi - yl) * (vi - vl) < floor:
                return False
    return True


@dataclass(frozen=True)
class Breakpoint:
    """One breakpoint of a piecewise-linear nonlinearity: the value set at
    y is the interval [v_lo, v_hi]."""

    y: float
    v_lo: float
    v_hi: float


@dataclass(frozen=True)
class PiecewiseNonlinearity:
    """Monotone piecewise-linear nonlinearity, possibly multivalued.

    Between breakpoints the graph is the segment from (y_i, v_hi of i) to
    (y_{i+1}, v_lo of i+1); outside the span it continues constant.  A
    finite slope_bound asserts membership of the class with chord slopes
    in [0, slope_bound], which forces every breakpoint single-valued.
    """

    breakpoints: tuple[Breakpoint, ...]
    odd: bool = False
    slope_bound: float = math.inf

    def __post_init__(self):
        bps = tuple(Breakpoint(float(b.y), float(b.v_lo), float(b.v_hi))
                    for b in self.breakpoints)
        if not bps:
            raise ValueError("a nonlinearity needs at least one breakpoint")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slope_bound", float(self.slope_bound))
        if not self.slope_bound > 0:
            raise ValueError("slope_bound must be positive")
        vscale = max(1.0, max(abs(b.v_lo) for b in bps),
                     max(abs(b.v_hi) for b in bps))
        slack = 1e-12 * vscale
        prev = None
        for b in bps:
            if b.v_lo > b.v_hi + slack:
                raise ValueError(f"breakpoint at y={b.y!r} has v_lo > v_hi")
            if prev is not None:
                if b.y <= prev.y:
                    raise ValueError("breakpoint positions must be strictly "
                                     "increasing in y")
                if prev.v_hi > b.v_lo + slack:
                    raise ValueError(
                        f"values decrease between y={prev.y!r} and y={b.y!r}")
            prev = b
        if math.isfinite(self.slope_bound):
            if not self.is_single_valued:
                raise ValueError(
                    "a finite slope class cannot hold a multivalued graph")
            peak = self.max_chord_slope()
            if peak > self.slope_bound * (1.0 + SLOPE_SLACK):
                raise ValueError(
                    f"chord slope {peak:.9g} exceeds the declared bound "
                    f"{self.slope_bound:.9g}")
        if self.odd:
            self._check_odd_symmetry()

    def _check_odd_symmetry(self):
        tol_y = self.y_tol
        vscale = max(1.0, max(abs(b.v_hi) for b in self.breakpoints))
        tol_v = Y_TOL_FACTOR * vscale
        for b in self.breakpoints:
            mirrored = [m for m in self.breakpoints if abs(m.y + b.y) <= tol_y]
            if not any(abs(m.v_lo + b.v_hi) <= tol_v
                       and abs(m.v_hi + b.v_lo) <= tol_v for m in mirrored):
                raise ValueError(
                    f"odd flag set but no mirror of the breakpoint at "
                    f"y={b.y!r} exists")
        lo, hi = self.evaluate(0.0)
        if lo > ORIGIN_TOL or hi < -ORIGIN_TOL:
            raise ValueError("odd flag set but 0 is not in phi(0)")

    @cached_property
    def y_tol(self) -> float:
        """Snap width for evaluation at (nearly) a breakpoint; derived from
        the breakpoints so stored and reloaded graphs agree."""
        return Y_TOL_FACTOR * max(1.0, max(abs(b.y)
                                           for b in self.breakpoints))

    @cached_property
    def _ys(self) -> tuple[float, ...]:
        return tuple(b.y for b in self.breakpoints)

    @property
    def is_single_valued(self) -> bool:
        return all(b.v_lo == b.v_hi for b in self.breakpoints)

    def max_chord_slope(self) -> float:
        """Largest chord slope, math.inf if any breakpoint is multivalued."""
        if not self.is_single_valued:
            return math.inf
        peak = 0.0
        for p, q in zip(self.breakpoints, self.breakpoints[1:]):
            peak = max(peak, (q.v_lo - p.v_hi) / (q.y - p.y))
        return peak

    def evaluate(self, y: float) -> tuple[float, float]:
        """Value set at y as an interval (lo, hi); single points collapse."""
        ys = self._ys
        i = bisect_left(ys, y)
        # Snap to the nearest breakpoint if y is within the cluster width.
        best = None
        for j in (i - 1, i):
            if 0 <= j < len(ys) and abs(y - ys[j]) <= self.y_tol:
                if best is None or abs(y - ys[j]) < abs(y - ys[best]):
                    best = j
        if best is not None:
            b = self.breakpoints[best]
            return (b.v_lo, b.v_hi)
        if y < ys[0]:
            v = self.breakpoints[0].v_lo
            return (v, v)
        if y > ys[-1]:
            v = self.breakpoints[-1].v_hi
            return (v, v)
        left = self.breakpoints[i - 1]
        right = self.breakpoints[i]
        t = (y - left.y) / (right.y - left.y)
        v = left.v_hi + t * (right.v_lo - left.v_hi)
        return (v, v)

    def scalar(self, y: float) -> float:
        """Single value at y; raises if the graph is multivalued."""
        if not self.is_single_valued:
            raise MultivaluedPhiError(
                "graph is multivalued; no scalar value exists")
        return self.evaluate(y)[0]


def evaluate(phi: PiecewiseNonlinearity, y: float) -> tuple[float, float]:
    """Value set of the nonlinearity at y as an interval (lo, hi)."""
    return phi.evaluate(y)


def interval_distance(interval: tuple[float, float], v: float) -> float:
    """Distance from a scalar to a closed interval (0 when contained)."""
    lo, hi = interval
    return max(0.0, lo - v, v - hi)


def _clusters(pts: list[tuple[float, float]], eps: float):
    """Chain points whose consecutive y gaps are within eps."""
    start = 0
    for i in range(1, len(pts) + 1):
        if i == len(pts) or pts[i][0] - pts[i - 1][0] > eps:
            yield pts[start:i]
            start = i


def interpolate(data: DataPairSet,
                slope_bound: float = math.inf) -> PiecewiseNonlinearity:
    """Monotone piecewise-linear interpolant through the data pairs.

    Outputs within the clustering width collapse into one (possibly
    multivalued) breakpoint at their mean.  Raises
    :class:`NotMonotoneError` when the chord test fails.  The odd flag is
    detected from the data: a symmetric breakpoint set whose graph
    contains the origin.
    """
    if not monotone_interpolable(data):
        raise NotMonotoneError(
            "data pairs admit no monotone interpolant (a chord decreases)")
    eps = data.y_tol()
    bps = []
    for cluster in _clusters(data.sorted_pairs(), eps):
        ys = [y for y, _ in cluster]
        vs = [v for _, v in cluster]
        bps.append(Breakpoint(math.fsum(ys) / len(ys), min(vs), max(vs)))
    try:
        trial = PiecewiseNonlinearity(tuple(bps), slope_bound=slope_bound)
    except ValueError as exc:
        # Within the chord-test tolerance but not strictly interpolable.
        raise NotMonotoneError(str(exc)) from exc
    if _looks_odd(trial, eps, data.v_tol()):
        return PiecewiseNonlinearity(tuple(bps), odd=True,
                                     slope_bound=slope_bound)
    return trial


def _looks_odd(phi: PiecewiseNonlinearity, tol_y: float,
               tol_v: float) -> bool:
    bps = phi.breakpoints
    for b in bps:
        if not any(abs(m.y + b.y) <= tol_y
                   and abs(m.v_lo + b.v_hi) <= tol_v
                   and abs(m.v_hi + b.v_lo) <= tol_v for m in bps):
            return False
    lo, hi = phi.evaluate(0.0)
    return lo <= ORIGIN_TOL and hi >= -ORIGIN_TOL


def odd_append(data: DataPairSet) -> DataPairSet:
    """Union of the data with its point reflection through the origin.

    Reflected pairs that duplicate an existing pair within the clustering
    width (in both coordinates) are dropped.
    """
    eps_y = data.y_tol()
    eps_v = data.v_tol()
    kept: list[tuple[float, float]] = []
    for y, v in sorted(list(data.pairs) + [(-y, -v) for y, v in data.pairs]):
        if any(abs(y - y0) <= eps_y and abs(v - v0) <= eps_v
               for y0, v0 in kept):
            continue
        kept.append((y, v))
    return DataPairSet(tuple(kept), freq=data.freq, response=data.response)


def shift_data(data: DataPairSet, xi: float, dc: float) -> DataPairSet:
    """Apply the input shift xi: (y, v) -> (y + xi*dc, v - xi)."""
    return DataPairSet(tuple((y + xi * dc, v - xi) for y, v in data.pairs),
                       freq=data.freq, response=data.response)


def compute_shift(data: DataPairSet, dc: float) -> float:
    """Input shift xi that drags the data curve through the origin.

    Walks the monotone staircase through the data (vertical risers over
    clustered y values, chords between clusters; same clustering as
    :func:`interpolate`) and intersects each segment with the ray
    {s * (dc, -1)}; a point s*(dc, -1) on the curve means shifting the
    input by xi = -s moves it to (0, 0).  With several crossings the one
    with smallest |s| wins.  Raises :class:`NoIntersectionError` when
    the curve misses the ray over the data span.
    """
    pts = data.sorted_pairs()
    if len(pts) < 2:
        raise NoIntersectionError(
            "need at least two data pairs to locate a crossing")
    # Raw sort order inside an equal-y group is decided by rounding
    # noise, so segments must come from the clustered staircase instead.
    verts: list[tuple[float, float]] = []
    for cluster in _clusters(pts, data.y_tol()):
        ys = [y for y, _ in cluster]
        vs = [v for _, v in cluster]
        y_c = math.fsum(ys) / len(ys)
        verts.append((y_c, min(vs)))
        if max(vs) > min(vs):
            verts.append((y_c, max(vs)))
    best_s = None
    for (y0, v0), (y1, v1) in zip(verts, verts[1:]):
        dy = y1 - y0
        dv = v1 - v0
        det = dy + dc * dv
        if det == 0.0:
            continue  # segment parallel to the ray
        tau = -(y0 + dc * v0) / det
        if -1e-12 <= tau <= 1.0 + 1e-12:
            s = -v0 - dv * tau
            if best_s is None or abs(s) < abs(best_s):
                best_s = s
    if best_s is None:
        raise NoIntersectionError(
            f"curve over y in [{verts[0][0]:.6g}, {verts[-1][0]:.6g}] never "
            f"meets the ray through (0, 0) and ({dc:.6g}, -1)")
    xi = -best_s
    shifted = interpolate(shift_data(data, xi, dc))
    if interval_distance(shifted.evaluate(0.0), 0.0) > ORIGIN_TOL:
        raise NoIntersectionError(
            "shifted data does not pass through the origin")
    return xi


def loop_transform_data(data: DataPairSet, k: float) -> DataPairSet:
    """Map samples of a monotone nonlinearity back to the slope-k class.

    Each pair (y, v) becomes (y + v/k, v).  The transformed set must
    interpolate with chord slopes inside [0, k]; otherwise
    :class:`SlopeViolationError` is raised.
    """
    if not (math.isfinite(k) and k > 0):
        raise ValueError("loop transform needs a finite positive slope")
    out = DataPairSet(tuple((y + v / k, v) for y, v in data.pairs),
                      freq=data.freq, response=data.response)
    peak = interpolate(out).max_chord_slope()
    if peak > k * (1.0 + SLOPE_SLACK):
        raise SlopeViolationError(
            f"transformed data needs chord slope {peak:.9g}, outside the "
            f"class limit {k:.9g}")
    return out
