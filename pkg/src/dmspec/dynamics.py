"""Exact arithmetic for m-fold expanding circle maps and their backward extensions.

The base dynamics is omega -> m*omega (mod 1) on the circle, m = 2 by default.
Periodic points are rationals k/(m^p - 1); all orbit arithmetic is done on
reduced integer fractions so that iteration is exact.  Backward orbits, which
the forward map does not determine, are parameterized by a digit sequence in
{0, ..., m-1} choosing one preimage per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapacityExceeded, InvalidParameter, MissingDigits

# Exact numerators/denominators are kept within 126 bits so that one map step
# (multiply by m) stays inside a signed 128-bit word.
CAPACITY_BITS = 126


def max_safe_period(m: int = 2) -> int:
    """Largest period p such that m^p - 1 fits the integer capacity bound."""
    p = 1
    while m ** (p + 1) - 1 <= (1 << CAPACITY_BITS):
        p += 1
    return p


@dataclass(frozen=True)
class CirclePoint:
    """A point of the circle stored as a reduced fraction in [0, 1)."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise InvalidParameter(f"denominator must be positive, got {self.denominator}")
        num = self.numerator % self.denominator
        g = math.gcd(num, self.denominator)
        object.__setattr__(self, "numerator", num // g)
        object.__setattr__(self, "denominator", self.denominator // g)

    @classmethod
    def from_fraction(cls, value: Fraction) -> "CirclePoint":
        return cls(value.numerator, value.denominator)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def as_float(self) -> float:
        return self.numerator / self.denominator

    def __float__(self) -> float:
        return self.as_float()


@dataclass(frozen=True)
class PeriodicOrbit:
    """A periodic orbit of the m-fold map, stored from its smallest point."""

    period: int
    points: tuple[CirclePoint, ...]
    map_base: int = 2

    def potential_values(self, f) -> list[float]:
        """Sampling-function values along the orbit, starting at points[0]."""
        return [float(f(p.as_float())) for p in self.points]

    def label(self) -> str:
        p0 = self.points[0]
        return f"{p0.numerator}/{p0.denominator}"


def map_forward(point: CirclePoint, steps: int = 1, m: int = 2) -> CirclePoint:
    """Apply the m-fold map exactly: numerator -> numerator * m^steps mod denominator."""
    if steps < 0:
        raise InvalidParameter("steps must be nonnegative")
    num = point.numerator * pow(m, steps, point.denominator) % point.denominator
    return CirclePoint(num, point.denominator)


def enumerate_orbits(max_period: int, m: int = 2) -> list[PeriodicOrbit]:
    """All periodic orbits of minimal period <= max_period, each listed once.

    Candidates are k/(m^p - 1) for k = 0 .. m^p - 2.  Orbits are deduplicated
    by keeping only the representative whose starting numerator is the orbit
    minimum, and filtered to minimal period exactly p at level p.
    """
    if max_period < 1:
        raise InvalidParameter("max_period must be >= 1")
    safe = max_safe_period(m)
    if max_period > safe:
        raise CapacityExceeded(
            f"m^p - 1 exceeds {CAPACITY_BITS}-bit capacity for p = {max_period}; "
            f"max safe period for m = {m} is {safe}"
        )
    orbits = []
    for p in range(1, max_period + 1):
        d = m ** p - 1
        for k in range(d):
            cycle = [k]
            x = k * m % d
            while x != k:
                if x < k:
                    break
                cycle.append(x)
                x = x * m % d
            else:
                if len(cycle) == p:
                    points = tuple(CirclePoint(q, d) for q in cycle)
                    orbits.append(PeriodicOrbit(period=p, points=points, map_base=m))
    # the zero orbit appears as 0/(m-1); d may be 0 only if m = 1, excluded above
    return orbits


class BackwardDigits:
    """A preimage-choice sequence for backward iteration.

    Digit n in {0, ..., m-1} selects the branch of the n-th backward step.
    Digits may be given explicitly, drawn from a seeded generator, or both
    (explicit digits first, then the generator continues the sequence).
    """

    def __init__(self, digits: Sequence[int] | None = None, seed: int | None = None, m: int = 2):
        if digits is None and seed is None:
            raise InvalidParameter("provide explicit digits, a seed, or both")
        self.m = int(m)
        self.seed = seed
        self._digits = [int(x) for x in (digits or [])]
        for x in self._digits:
            if not 0 <= x < self.m:
                raise InvalidParameter(f"digit {x} outside 0..{self.m - 1}")
        self._rng = np.random.default_rng(seed) if seed is not None else None

    def take(self, n: int) -> list[int]:
        """First n digits, extending from the generator when needed."""
        if n > len(self._digits):
            if self._rng is None:
                raise MissingDigits(
                    f"{n} digits requested but only {len(self._digits)} supplied and no seed given"
                )
            extra = self._rng.integers(0, self.m, size=n - len(self._digits))
            self._digits.extend(int(x) for x in extra)
        return self._digits[:n]


def extend_backward(anchor, digits: BackwardDigits, n: int, m: int = 2):
    """The n-th backward point omega_{-n} determined by the digit sequence.

    Each step inverts the map through the chosen branch,
    omega_{-j} = (omega_{-j+1} + digit_j) / m, so map_forward(omega_{-n}, n)
    recovers the anchor (exactly for rational anchors).
    """
    if n < 1:
        raise InvalidParameter("n must be >= 1")
    return backward_orbit(anchor, digits, n, m=m)[-1]


def backward_orbit(anchor, digits: BackwardDigits, n: int, m: int = 2) -> list:
    """[omega_{-1}, ..., omega_{-n}] along the digit-selected preimage chain."""
    seq = digits.take(n)
    out = []
    if isinstance(anchor, CirclePoint):
        x = anchor.as_fraction()
        for dig in seq:
            x = (x + dig) / m
            out.append(CirclePoint.from_fraction(x))
    elif isinstance(anchor, Fraction):
        x = anchor
        for dig in seq:
            x = (x + dig) / m
            out.append(x)
    else:
        x = float(anchor) % 1.0
        for dig in seq:
            x = (x + dig) / m
            out.append(x)
    return out


def solenoid_forward(anchor, fiber: tuple[float, float], lam: float, m: int = 2):
    """One application of the solid-torus contraction over the m-fold map.

    (omega, x, y) -> (m*omega, lam*x + cos(2*pi*omega)/2, lam*y + sin(2*pi*omega)/2).
    The circle coordinate evolves independently of the fiber; the fiber records
    the history that forward data alone cannot see.
    """
    if not 0.0 < lam < 0.5:
        raise InvalidParameter(f"lambda must lie in (0, 1/2), got {lam}")
    x, y = fiber
    if isinstance(anchor, CirclePoint):
        w = anchor.as_float()
        new_anchor = map_forward(anchor, 1, m=m)
    elif isinstance(anchor, Fraction):
        w = float(anchor)
        new_anchor = (anchor * m) % 1
    else:
        w = float(anchor) % 1.0
        new_anchor = (m * w) % 1.0
    c, s = math.cos(2 * math.pi * w), math.sin(2 * math.pi * w)
    return new_anchor, (lam * x + 0.5 * c, lam * y + 0.5 * s)
