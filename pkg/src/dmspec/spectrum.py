"""Periodic band spectra and their union over periodic orbits.

The spectrum of the operator over a period-p orbit is the level set
{E : |disc(E)| <= 2} of the Floquet discriminant, a union of at most p closed
bands.  Edges are located by bracketed bisection on |disc| - 2 over an
adaptively refined Chebyshev scan grid; unions over many orbits approximate
the almost-sure essential spectrum from inside.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cocycle import trace_over_cycle
from .dynamics import PeriodicOrbit, enumerate_orbits
from .errors import InvalidParameter, RootBracketingFailure
from .sampling import SamplingFunction

#: merge tolerance and reporting resolution, as multiples of the edge tolerance
MERGE_FACTOR = 10.0
RESOLUTION_FACTOR = 100.0


@dataclass(frozen=True)
class Band:
    """A closed interval of energies."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidParameter(f"band with lo {self.lo} > hi {self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def covers(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack


@dataclass
class SpectrumApprox:
    """Sorted disjoint bands with derived gap structure."""

    bands: list[Band]
    max_period_used: int
    tol: float = 1e-10

    def __post_init__(self):
        self.bands = sorted(self.bands, key=lambda b: b.lo)
        for prev, nxt in zip(self.bands, self.bands[1:]):
            if prev.hi >= nxt.lo:
                raise InvalidParameter("bands must be disjoint after merging")

    @property
    def hull(self) -> tuple[float, float]:
        return (self.bands[0].lo, self.bands[-1].hi)

    @property
    def gaps(self) -> list[tuple[float, float]]:
        """All open intervals between consecutive bands."""
        return [(a.hi, b.lo) for a, b in zip(self.bands, self.bands[1:])]

    @property
    def resolution(self) -> float:
        """Gaps shorter than this are indistinguishable from bisection jitter."""
        return RESOLUTION_FACTOR * self.tol

    def covers(self, x: float, slack: float = 0.0) -> bool:
        return any(b.covers(x, slack) for b in self.bands)

    def to_json(self) -> dict:
        return {
            "bands": [[b.lo, b.hi] for b in self.bands],
            "max_period_used": self.max_period_used,
            "tol": self.tol,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpectrumApprox":
        return cls(
            bands=[Band(lo, hi) for lo, hi in obj["bands"]],
            max_period_used=int(obj["max_period_used"]),
            tol=float(obj["tol"]),
        )


def _bisect_boundary(disc, inner, outer, tol):
    """Move each (inside, outside) bracket onto the |disc| = 2 boundary."""
    inner = np.asarray(inner, dtype=float).copy()
    outer = np.asarray(outer, dtype=float).copy()
    while np.max(np.abs(outer - inner), initial=0.0) > tol:
        mid = 0.5 * (inner + outer)
        is_in = np.abs(disc(mid)) <= 2.0
        inner = np.where(is_in, mid, inner)
        outer = np.where(is_in, outer, mid)
    return 0.5 * (inner + outer)


def _interior_seed(disc, a, b, fa):
    """A point with |disc| <= 2 inside (a, b), given a sign change of disc.

    Bisection on the sign must pass through the band around the zero; the
    band can be far narrower than the scan spacing, which is exactly the
    case this rescues.
    """
    lo, hi, flo = a, b, fa
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = float(disc(np.array([mid]))[0])
        if abs(fm) <= 2.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(lo)):
            return None
    return None


def _bands_from_disc(disc, degree, scan_lo, scan_hi, tol):
    """Bands of {|disc| <= 2} inside [scan_lo, scan_hi] for a degree-p discriminant."""
    K = max(64 * degree, 64)
    j = np.arange(K)
    nodes = 0.5 * (scan_lo + scan_hi) + 0.5 * (scan_hi - scan_lo) * np.cos(np.pi * j / (K - 1))
    nodes = nodes[::-1]  # ascending
    vals = disc(nodes)
    inside = np.abs(vals) <= 2.0

    inner_pts, outer_pts = [], []
    # crossings of the |disc| = 2 boundary between adjacent nodes
    flip = inside[:-1] != inside[1:]
    for i in np.nonzero(flip)[0]:
        if inside[i]:
            inner_pts.append(nodes[i])
            outer_pts.append(nodes[i + 1])
        else:
            inner_pts.append(nodes[i + 1])
            outer_pts.append(nodes[i])
    # narrow bands hiding between two outside nodes reveal a sign change of disc
    hidden = (~inside[:-1]) & (~inside[1:]) & ((vals[:-1] < 0.0) != (vals[1:] < 0.0))
    for i in np.nonzero(hidden)[0]:
        seed = _interior_seed(disc, nodes[i], nodes[i + 1], vals[i])
        if seed is None:
            continue
        inner_pts.extend([seed, seed])
        outer_pts.extend([nodes[i], nodes[i + 1]])

    if not inner_pts:
        raise RootBracketingFailure(
            f"scan grid of {K} Chebyshev nodes on [{scan_lo}, {scan_hi}] found no "
            f"band of the degree-{degree} discriminant"
        )
    edges = np.sort(_bisect_boundary(disc, inner_pts, outer_pts, tol))

    # classify the intervals between consecutive edges; midpoints alone are
    # unreliable when tol exceeds a band's width, so the known interior
    # points (inside nodes and rescue seeds) also witness their intervals
    pts = np.concatenate([[scan_lo], edges, [scan_hi]])
    mids = 0.5 * (pts[:-1] + pts[1:])
    mid_inside = np.abs(disc(mids)) <= 2.0
    witness_idx = np.searchsorted(pts, np.sort(inner_pts)) - 1
    mid_inside[witness_idx[(witness_idx >= 0) & (witness_idx < len(mids))]] = True
    bands = []
    for i in np.nonzero(mid_inside)[0]:
        lo, hi = float(pts[i]), float(pts[i + 1])
        if bands and lo - bands[-1][1] <= MERGE_FACTOR * tol:
            bands[-1][1] = hi
        else:
            bands.append([lo, hi])
    if not bands or len(bands) > degree:
        raise RootBracketingFailure(
            f"scan grid of {K} Chebyshev nodes on [{scan_lo}, {scan_hi}] isolated "
            f"{len(bands)} bands for a degree-{degree} discriminant"
        )
    return [Band(lo, hi) for lo, hi in bands]


def periodic_bands(orbit: PeriodicOrbit, f: SamplingFunction, tol: float = 1e-10) -> list[Band]:
    """Spectral bands of the periodic operator over one orbit.

    Edges are bisected to absolute tolerance tol; bands touching within
    MERGE_FACTOR * tol are merged.
    """
    if tol <= 0.0:
        raise InvalidParameter("tol must be positive")
    pots = orbit.potential_values(f)
    bound = f.sup_bound()
    scan_lo, scan_hi = -2.0 - bound - 0.5, 2.0 + bound + 0.5
    disc = lambda E: trace_over_cycle(pots, E)
    return _bands_from_disc(disc, orbit.period, scan_lo, scan_hi, tol)


def merge_bands(band_lists, tol: float) -> list[Band]:
    """Union of band intervals, closing gaps up to MERGE_FACTOR * tol."""
    flat = sorted((b.lo, b.hi) for bands in band_lists for b in bands)
    merged: list[list[float]] = []
    for lo, hi in flat:
        if merged and lo - merged[-1][1] <= MERGE_FACTOR * tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [Band(lo, hi) for lo, hi in merged]


def union_spectrum(
    f: SamplingFunction,
    max_period: int,
    tol: float = 1e-10,
    m: int = 2,
    threads: int = 1,
) -> SpectrumApprox:
    """Union of periodic bands over all orbits of minimal period <= max_period."""
    orbits = enumerate_orbits(max_period, m=m)

    def bands_of(orbit):
        try:
            return periodic_bands(orbit, f, tol=tol)
        except RootBracketingFailure as exc:
            raise RootBracketingFailure(
                f"orbit {orbit.label()} (period {orbit.period}): {exc}"
            ) from exc

    if threads == 1:
        band_lists = [bands_of(o) for o in orbits]
    else:
        workers = threads if threads > 0 else None
        with ThreadPoolExecutor(max_workers=workers) as pool:
            band_lists = list(pool.map(bands_of, orbits))
    return SpectrumApprox(
        bands=merge_bands(band_lists, tol), max_period_used=max_period, tol=tol
    )


def gap_report(
    s: SpectrumApprox, include_below_resolution: bool = False
) -> list[tuple[tuple[float, float], float]]:
    """Interior gaps sorted by length, longest first.

    Gaps shorter than the approximation's resolution are bisection artifacts
    and are excluded unless explicitly requested.
    """
    gaps = [(g, g[1] - g[0]) for g in s.gaps]
    if not include_below_resolution:
        gaps = [(g, w) for g, w in gaps if w >= s.resolution]
    return sorted(gaps, key=lambda t: -t[1])
