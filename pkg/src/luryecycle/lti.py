"""Discrete-time LTI plants and their steady-state periodic responses.

Transfer functions are rational in z with real coefficients in descending
powers, proper, and with every pole strictly inside the unit circle.  The
periodic machinery folds the impulse response g into tail sums

    h_i = sum_{l >= 0} g_{i + l*T},        i = 0 .. T-1,

so that the steady-state response to a T-periodic input is one circular
convolution, i.e. a circulant matrix product y = C(h) u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import PlantValidationError, SingularMatrixError

# Poles with magnitude >= 1 - POLE_MARGIN are rejected as numerically
# marginal; everything downstream assumes a strict stability margin.
POLE_MARGIN = 1e-9

__all__ = [
    "POLE_MARGIN",
    "TransferFunction",
    "StateSpaceRealization",
    "RationalFrequency",
    "PeriodicSignal",
    "freq_response",
    "dc_gain",
    "realize",
    "impulse_tail_sums",
    "circulant",
    "periodic_response",
]


@dataclass(frozen=True)
class TransferFunction:
    """Proper rational transfer function G(z) = num(z) / den(z).

    Coefficients are stored in descending powers of z.  Construction
    normalizes the denominator to a leading coefficient of 1, strips
    leading zeros from the numerator, and rejects improper fractions and
    poles on or outside the unit circle.
    """

    num: tuple[float, ...]
    den: tuple[float, ...]

    def __post_init__(self):
        den = [float(c) for c in self.den]
        num = [float(c) for c in self.num]
        if not den or den[0] == 0.0:
            raise PlantValidationError(
                "denominator needs a nonzero leading coefficient")
        lead = den[0]
        den = [c / lead for c in den]
        num = [c / lead for c in num]
        while len(num) > 1 and num[0] == 0.0:
            num.pop(0)
        if not num:
            num = [0.0]
        if len(num) > len(den):
            raise PlantValidationError(
                f"improper transfer function: numerator degree {len(num) - 1} "
                f"exceeds denominator degree {len(den) - 1}")
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", tuple(den))
        for p in self.poles:
            if abs(p) >= 1.0 - POLE_MARGIN:
                raise PlantValidationError(
                    f"pole with magnitude {abs(p):.12g} is not strictly "
                    f"inside the unit circle")

    @cached_property
    def poles(self) -> np.ndarray:
        if len(self.den) == 1:
            return np.zeros(0, dtype=complex)
        return np.roots(self.den)

    @property
    def order(self) -> int:
        return len(self.den) - 1

    def add_constant(self, c: float) -> "TransferFunction":
        """Return G(z) + c as a new transfer function (poles unchanged)."""
        pad = [0.0] * (len(self.den) - len(self.num)) + list(self.num)
        num = tuple(a + c * b for a, b in zip(pad, self.den))
        return TransferFunction(num, self.den)


@dataclass(frozen=True)
class RationalFrequency:
    """Frequency omega = alpha*pi/beta with 0 < alpha < beta coprime.

    T is the fundamental period of the sampled carrier cos(omega*k):
    2*beta when alpha is odd, beta when alpha is even.
    """

    alpha: int
    beta: int

    def __post_init__(self):
        if not isinstance(self.alpha, int) or not isinstance(self.beta, int):
            raise ValueError("alpha and beta must be integers")
        if not 0 < self.alpha < self.beta:
            raise ValueError(
                f"need 0 < alpha < beta, got ({self.alpha}, {self.beta})")
        if math.gcd(self.alpha, self.beta) != 1:
            raise ValueError(
                f"alpha={self.alpha} and beta={self.beta} are not coprime")

    @property
    def omega(self) -> float:
        return math.pi * self.alpha / self.beta

    @property
    def T(self) -> int:
        return 2 * self.beta if self.alpha % 2 else self.beta


@dataclass(frozen=True)
class PeriodicSignal:
    """One period of a real T-periodic sequence."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("a periodic signal needs at least one sample")
        object.__setattr__(self, "values", vals)

    @property
    def period(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]


@dataclass(frozen=True, eq=False)
class StateSpaceRealization:
    """SISO state-space form x+ = A x + B u, y = C x + D u with stable A."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.size == 0:
            a = a.reshape(0, 0)
        a = np.atleast_2d(a)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        c = np.asarray(self.c, dtype=float).reshape(-1)
        n = a.shape[0]
        if a.shape != (n, n) or b.shape != (n,) or c.shape != (n,):
            raise PlantValidationError(
                f"inconsistent state-space shapes: A {a.shape}, "
                f"B {b.shape}, C {c.shape}")
        if n:
            rho = max(abs(np.linalg.eigvals(a)))
            if rho >= 1.0 - POLE_MARGIN:
                raise PlantValidationError(
                    f"state matrix spectral radius {rho:.12g} is not strictly "
                    f"inside the unit circle")
        for arr in (a, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", float(self.d))

    @property
    def order(self) -> int:
        return self.a.shape[0]

    def response(self, omega: float) -> complex:
        """D + C (zI - A)^{-1} B at z = e^{j*omega}."""
        if self.order == 0:
            return complex(self.d)
        z = complex(math.cos(omega), math.sin(omega))
        x = np.linalg.solve(z * np.eye(self.order) - self.a,
                            self.b.astype(complex))
        return complex(self.d + self.c @ x)


def freq_response(plant: TransferFunction, omega: float) -> complex:
    """Evaluate G(e^{j*omega}) by direct polynomial evaluation."""
    z = complex(math.cos(omega), math.sin(omega))
    return complex(np.polyval(plant.num, z) / np.polyval(plant.den, z))


def dc_gain(plant: TransferFunction) -> float:
    """G(1), the steady-state gain for a constant input."""
    return freq_response(plant, 0.0).real


def realize(plant: TransferFunction) -> StateSpaceRealization:
    """Controllable companion-form realization of a proper transfer function."""
    den = list(plant.den)
    n = len(den) - 1
    num = [0.0] * (len(den) - len(plant.num)) + list(plant.num)
    d = num[0]
    # Split off the feedthrough; what remains is strictly proper.
    rem = [b - d * a for b, a in zip(num[1:], den[1:])]
    a = np.zeros((n, n))
    b = np.zeros(n)
    if n:
        a[0, :] = [-c for c in den[1:]]
        if n > 1:
            a[1:, :-1] = np.eye(n - 1)
        b[0] = 1.0
    return StateSpaceRealization(a, b, np.array(rem, dtype=float), d)


def impulse_tail_sums(ss: StateSpaceRealization, T: int) -> np.ndarray:
    """Fold the impulse response into h_i = sum_{l>=0} g_{i+l*T}.

    Uses the closed form through (I - A^T)^{-1}; raises
    :class:`SingularMatrixError` if that resolvent does not exist.
    """
    if T < 1:
        raise ValueError("period must be a positive integer")
    h = np.zeros(T)
    h[0] = ss.d
    n = ss.order
    if n == 0:
        return h
    a_pow = np.linalg.matrix_power(ss.a, T)
    try:
        w = np.linalg.solve(np.eye(n) - a_pow, ss.b)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"I - A^{T} is singular") from exc
    v = w
    for i in range(1, T):
        h[i] = ss.c @ v
        v = ss.a @ v
    h[0] += ss.c @ v  # v = A^{T-1} w after the loop
    return h


def circulant(first_column) -> np.ndarray:
    """Circulant matrix with the given first column.

    Column j is the first column rotated down j places, so
    M[i, j] = h[(i - j) mod T].
    """
    col = np.asarray(first_column, dtype=float).reshape(-1)
    if col.size == 0:
        raise ValueError("circulant needs at least one entry")
    T = col.size
    idx = (np.arange(T)[:, None] - np.arange(T)[None, :]) % T
    return col[idx]


def periodic_response(plant: TransferFunction,
                      u: PeriodicSignal) -> PeriodicSignal:
    """Steady-state response to a T-periodic input, one period in and out."""
    h = impulse_tail_sums(realize(plant), u.period)
    y = circulant(h) @ u.as_array()
    return PeriodicSignal(tuple(y))
