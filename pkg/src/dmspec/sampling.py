"""Sampling functions on the circle and the potentials they generate.

A sampling function is either a trigonometric polynomial (continuous) or a
right-continuous step function.  Potentials are v(n) = f(T^n omega) along the
forward orbit of the m-fold map, extended to negative n through a backward
digit sequence.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dynamics import BackwardDigits, CirclePoint, backward_orbit, map_forward
from .errors import InvalidParameter, MissingDigits

# Beyond this many forward steps a float anchor has shifted out its entire
# mantissa and plain iteration is meaningless; see forward_orbit.
FLOAT_ITERATION_LIMIT = 45

_MANTISSA_BITS = 53
_POWERS = 0.5 ** np.arange(1, _MANTISSA_BITS + 1)


@dataclass(frozen=True)
class TrigPoly:
    """f(w) = constant + sum_k cos_k * cos(2 pi (k+1) w) + sin_k * sin(2 pi (k+1) w)."""

    constant: float = 0.0
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()

    continuous = True

    def __post_init__(self):
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(c) for c in self.sin_coeffs))

    def __call__(self, omega):
        w = np.mod(np.asarray(omega, dtype=float), 1.0)
        out = np.full_like(w, self.constant)
        for k, c in enumerate(self.cos_coeffs):
            if c:
                out += c * np.cos(2 * np.pi * (k + 1) * w)
        for k, c in enumerate(self.sin_coeffs):
            if c:
                out += c * np.sin(2 * np.pi * (k + 1) * w)
        return out if out.ndim else float(out)

    def sup_bound(self) -> float:
        """Upper bound for sup|f| from the coefficient sums."""
        return abs(self.constant) + sum(map(abs, self.cos_coeffs)) + sum(map(abs, self.sin_coeffs))

    def to_json(self) -> dict:
        return {
            "type": "trigpoly",
            "const": self.constant,
            "cos": list(self.cos_coeffs),
            "sin": list(self.sin_coeffs),
        }


@dataclass(frozen=True)
class Step:
    """Right-continuous step function: f = values[i] on [breakpoints[i], breakpoints[i+1])."""

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    continuous = False

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(bp) != len(vals) or not bp:
            raise InvalidParameter("breakpoints and values must have equal positive length")
        if bp[0] != 0.0:
            raise InvalidParameter("first breakpoint must be 0")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])) or bp[-1] >= 1.0:
            raise InvalidParameter("breakpoints must be strictly increasing within [0, 1)")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def __call__(self, omega):
        w = np.mod(np.asarray(omega, dtype=float), 1.0)
        idx = np.searchsorted(self.breakpoints, w, side="right") - 1
        out = np.asarray(self.values)[idx]
        return out if out.ndim else float(out)

    def sup_bound(self) -> float:
        return max(abs(v) for v in self.values)

    def to_json(self) -> dict:
        return {"type": "step", "breaks": list(self.breakpoints), "values": list(self.values)}


SamplingFunction = TrigPoly | Step


def cosine(lam: float) -> TrigPoly:
    """The standard coupling-lam cosine sampling function 2*lam*cos(2 pi w)."""
    return TrigPoly(constant=0.0, cos_coeffs=(2.0 * lam,))


def bernoulli(lam: float) -> Step:
    """The two-valued function lam on [0, 1/2), 0 on [1/2, 1)."""
    return Step(breakpoints=(0.0, 0.5), values=(lam, 0.0))


def from_json(obj: dict) -> SamplingFunction:
    """Parse the sampling-function JSON schema."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise InvalidParameter("sampling spec must be an object with a 'type' field")
    kind = obj["type"]
    if kind == "trigpoly":
        return TrigPoly(
            constant=float(obj.get("const", 0.0)),
            cos_coeffs=tuple(obj.get("cos", ())),
            sin_coeffs=tuple(obj.get("sin", ())),
        )
    if kind == "step":
        try:
            return Step(breakpoints=tuple(obj["breaks"]), values=tuple(obj["values"]))
        except KeyError as exc:
            raise InvalidParameter(f"step spec missing field {exc}") from exc
    raise InvalidParameter(f"unknown sampling type {kind!r}")


@dataclass(frozen=True)
class Potential:
    """Potential values v(n) for n in [n_min, n_max], with their provenance."""

    values: tuple[float, ...]
    n_min: int
    anchor: object
    provenance: str = "forward"

    @property
    def n_max(self) -> int:
        return self.n_min + len(self.values) - 1

    def __getitem__(self, n: int) -> float:
        if not self.n_min <= n <= self.n_max:
            raise IndexError(f"n = {n} outside [{self.n_min}, {self.n_max}]")
        return self.values[n - self.n_min]

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)


def _bits_to_orbit(bits: np.ndarray, count: int) -> np.ndarray:
    """Orbit values from a binary digit stream: w_k = 0.b_{k+1} b_{k+2} ...

    Each value reads a 53-bit window, so consecutive points share the bits the
    doubling map says they must share.
    """
    windows = np.lib.stride_tricks.sliding_window_view(bits, _MANTISSA_BITS)[:count]
    return windows @ _POWERS


def random_orbit(rng: np.random.Generator, count: int, m: int = 2) -> np.ndarray:
    """Forward orbit of a fresh uniformly distributed point, of length count.

    For m = 2 the orbit is realized directly from an i.i.d. fair bit stream
    (the binary digits of a Lebesgue-random point); the window construction
    keeps the exact joint law of the doubling map without mantissa exhaustion.
    """
    if m == 2:
        bits = rng.integers(0, 2, size=count + _MANTISSA_BITS, dtype=np.int64).astype(float)
        return _bits_to_orbit(bits, count)
    digits = rng.integers(0, m, size=count + _MANTISSA_BITS, dtype=np.int64)
    out = np.empty(count)
    for k in range(count):
        x = 0.0
        for j in range(_MANTISSA_BITS - 1, -1, -1):
            x = (x + digits[k + j]) / m
        out[k] = x
    return out


def forward_orbit(omega, count: int, m: int = 2) -> np.ndarray:
    """[omega, T omega, ..., T^(count-1) omega] as floats.

    Rational anchors iterate exactly and convert at the end.  Float anchors
    iterate w -> frac(m w) directly while the mantissa lasts; past
    FLOAT_ITERATION_LIMIT steps (m = 2) the anchor's bits are continued by a
    generator seeded from its bit pattern, a Monte Carlo stand-in justified by
    the map preserving Lebesgue measure.  The result is deterministic in omega.
    """
    if count < 0:
        raise InvalidParameter("count must be nonnegative")
    if isinstance(omega, CirclePoint):
        pt = omega
        out = np.empty(count)
        for k in range(count):
            out[k] = pt.as_float()
            pt = map_forward(pt, 1, m=m)
        return out
    if isinstance(omega, Fraction):
        x = omega % 1
        out = np.empty(count)
        for k in range(count):
            out[k] = float(x)
            x = (x * m) % 1
        return out
    x = float(omega) % 1.0
    if count <= FLOAT_ITERATION_LIMIT:
        out = np.empty(count)
        for k in range(count):
            out[k] = x
            x = (m * x) % 1.0
        return out
    if m == 2:
        mant = int(x * (1 << _MANTISSA_BITS))
        lead = [(mant >> (_MANTISSA_BITS - 1 - j)) & 1 for j in range(_MANTISSA_BITS)]
        seed = struct.unpack("<Q", struct.pack("<d", x))[0]
        tail = np.random.default_rng(seed).integers(0, 2, size=count, dtype=np.int64)
        bits = np.concatenate([np.asarray(lead, dtype=float), tail.astype(float)])
        return _bits_to_orbit(bits, count)
    # for m > 2 the float is treated as the exact dyadic rational it is;
    # exact iteration never collapses since m and 2 are coprime in the digits
    return forward_orbit(Fraction(x), count, m=m)


def potential(
    f: SamplingFunction,
    omega,
    n_min: int = 0,
    n_max: int = 0,
    digits: BackwardDigits | None = None,
    m: int = 2,
) -> Potential:
    """Potential v(n) = f(T^n omega) on the index window [n_min, n_max].

    Negative indices require backward digits selecting the preimage chain.
    """
    if n_min > 0 or n_max < 0 or n_min > n_max:
        raise InvalidParameter("require n_min <= 0 <= n_max")
    if n_min < 0 and digits is None:
        raise MissingDigits("n_min < 0 requires a BackwardDigits sequence")
    fwd = forward_orbit(omega, n_max + 1, m=m)
    vals = list(np.atleast_1d(f(fwd)))
    provenance = "forward"
    if n_min < 0:
        back = backward_orbit(omega, digits, -n_min, m=m)
        back_vals = [float(f(float(w))) for w in back]
        vals = back_vals[::-1] + vals
        provenance = f"two-sided(seed={digits.seed})"
    return Potential(values=tuple(float(v) for v in vals), n_min=n_min,
                     anchor=omega, provenance=provenance)
