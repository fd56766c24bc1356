"""Coherent-state pairings over an h-ladder, decay fits and phase-space scans.

A point is judged outside the wavefront set when the pairings
``|(u(h), psi_{x,xi,h})|`` decay faster than any power of h.  Numerically
that is a log-log slope above ``K_detect`` (default 5), or underflow below
``1e-13`` preceded by a steep slope.  On large grids the roundoff level of a
pairing exceeds ``1e-13``; :func:`noise_floor` raises the threshold there.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from semiwf.grid import WaveFunction, hfourier_forward
from semiwf.states import TestBump, Window

UNDERFLOW = 1e-13
K_DETECT = 5.0
R_MAX = 0.5
TAIL_POINTS = 4

RAPID = "rapid_decay"
POLYNOMIAL = "polynomial"
BOUNDED = "bounded_below"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class HLadder:
    values: tuple

    def __post_init__(self):
        v = tuple(float(h) for h in self.values)
        if len(v) < 4:
            raise ValueError("an h-ladder needs at least 4 values")
        if any(not 0 < h < 1 for h in v):
            raise ValueError("ladder values must lie in (0, 1)")
        if any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError("ladder must be strictly decreasing")
        object.__setattr__(self, "values", v)

    @classmethod
    def dyadic(cls, kmin: int = 4, kmax: int = 14) -> "HLadder":
        return cls(tuple(2.0**-k for k in range(kmin, kmax + 1)))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


@dataclass
class PairingSeries:
    ladder: HLadder
    magnitudes: np.ndarray
    points: list
    errors: list = field(default_factory=list)
    floors: np.ndarray | None = None

    @property
    def underflow(self) -> np.ndarray:
        m = np.asarray(self.magnitudes, dtype=float)
        f = UNDERFLOW if self.floors is None else np.asarray(self.floors, dtype=float)
        return np.isfinite(m) & (m < f)


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    residual: float
    classification: str
    tail_slope: float = math.nan
    n_used: int = 0
    n_underflow: int = 0
    underflow_tail: bool = False
    K_detect: float = K_DETECT

    @property
    def decays(self) -> bool:
        """Policy verdict: is the series O(h^inf) as far as the ladder can tell."""
        if self.classification == RAPID:
            return True
        if self.n_underflow and self.underflow_tail:
            if self.n_used >= TAIL_POINTS:
                return self.tail_slope >= self.K_detect / 2
            return self.n_used < 2 or self.slope >= self.K_detect / 2
        if self.classification != BOUNDED and self.n_used >= TAIL_POINTS and self.tail_slope >= self.K_detect:
            return True
        return False

    @property
    def detected(self) -> bool:
        return not self.decays

    def as_dict(self) -> dict:
        d = asdict(self)
        d["decays"] = self.decays
        return d


def _lsq(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    (s, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - (s * x + b)
    return float(s), float(b), float(np.sqrt(np.mean(res**2)))


def noise_floor(u: WaveFunction) -> float:
    """Underflow threshold for pairings with ``u``: at least ``1e-13``, and
    above the FFT roundoff level ``eps sqrt(N) ||u||`` by a factor 16."""
    n = u.grid.num_points
    return max(UNDERFLOW, 16 * np.finfo(float).eps * math.sqrt(n) * float(np.linalg.norm(u.samples) * math.sqrt(u.weight)))


def fit_magnitudes(hs: Sequence[float], mags: Sequence[float], K_detect: float = K_DETECT,
                   R_max: float = R_MAX, floors=UNDERFLOW) -> DecayFit:
    hs = np.asarray(hs, dtype=float)
    m = np.asarray(mags, dtype=float)
    finite = np.isfinite(m)
    under = finite & (m < np.asarray(floors, dtype=float))
    used = finite & ~under
    n_used, n_under = int(used.sum()), int(under.sum())
    used_idx = np.flatnonzero(used)
    under_idx = np.flatnonzero(under)
    tail_ok = bool(n_under) and (n_used == 0 or under_idx.min() > used_idx.max())
    slope = intercept = residual = tail = math.nan
    if n_used >= 2:
        x, y = np.log(hs[used]), np.log(m[used])
        slope, intercept, residual = _lsq(x, y)
        if n_used >= TAIL_POINTS:
            tail = _lsq(x[-TAIL_POINTS:], y[-TAIL_POINTS:])[0]
    if n_used < 4:
        cls = INCONCLUSIVE
    elif slope >= K_detect and residual <= R_max and n_under <= len(m) / 2:
        cls = RAPID
    elif slope <= 0.25 and residual <= R_max:
        cls = BOUNDED
    elif residual <= R_max and slope < K_detect:
        cls = POLYNOMIAL
    else:
        cls = INCONCLUSIVE
    return DecayFit(slope, intercept, residual, cls, tail, n_used, n_under, tail_ok, K_detect)


def stretched_rate(hs, mags, floors=UNDERFLOW) -> float:
    """``c`` in ``|m| ~ C exp(-c / sqrt(h))`` by regression over non-underflowed points (NaN if < 2)."""
    hs = np.asarray(hs, dtype=float)
    m = np.asarray(mags, dtype=float)
    used = np.isfinite(m) & (m >= np.asarray(floors, dtype=float))
    if used.sum() < 2:
        return math.nan
    return -_lsq(hs[used] ** -0.5, np.log(m[used]))[0]


def decay_fit(s: PairingSeries, K_detect: float = K_DETECT, R_max: float = R_MAX) -> DecayFit:
    floors = UNDERFLOW if s.floors is None else s.floors
    return fit_magnitudes(s.ladder.values, s.magnitudes, K_detect, R_max, floors)


# -- pairings --------------------------------------------------------------

def coherent_pairings(u: WaveFunction, w: Window, xs, etas, v: WaveFunction | None = None,
                      tol: float = 1e-22) -> np.ndarray:
    """``(u, phi_{x, eta, h})`` for all ``x in xs``, ``eta in etas``, on the frequency side.

    The closed-form transform of the coherent state is paired with ``F_h u``
    over the dual-grid window where the window transform exceeds ``tol``.
    """
    h = u.h
    if v is None:
        v = hfourier_forward(u)
    xi = u.grid.xi(h)
    dxi = u.grid.dxi(h)
    sh = math.sqrt(h)
    ext = w.fourier_extent(tol) * sh
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    reach = np.max(np.abs(xs)) + min(w.spatial_extent(1e-16), u.grid.half_width) * sh
    if w.kind == "gaussian" and reach > u.grid.half_width:
        raise ValueError(f"probe centres reach {reach:.3g}, beyond grid half width {u.grid.half_width:.3g}")
    if np.max(np.abs(etas)) + ext > u.grid.xi_max(h):
        raise ValueError("probe frequencies exceed the dual grid")
    out = np.zeros((xs.size, etas.size), dtype=complex)
    for j, eta in enumerate(etas):
        lo, hi = np.searchsorted(xi, [eta - ext, eta + ext])
        if hi <= lo:
            continue
        z = xi[lo:hi]
        amp = v.samples[lo:hi] * w.fourier((z - eta) / sh)
        # conj of h^{-1/4} e^{i x (eta - xi)/h} what(...)
        ph = np.exp(1j * np.outer(xs, z - eta) / h)
        out[:, j] = h**-0.25 * dxi * (ph @ amp)
    return out


def spatial_pairing(u: WaveFunction, profile, x0: float, eta: float, extent: float | None = None) -> complex:
    """``(u, h^{-1/4} psi((x-x0)/sqrt h) e^{i x eta/h})`` by the trapezoid rule on u's grid."""
    h = u.h
    x = u.grid.x
    sh = math.sqrt(h)
    if extent is None:
        extent = profile.s if isinstance(profile, TestBump) else profile.spatial_extent(1e-16)
    m = np.abs(x - x0) <= extent * sh
    xm = x[m]
    psi = h**-0.25 * profile.spatial((xm - x0) / sh) * np.exp(1j * xm * eta / h)
    return complex(np.vdot(psi, u.samples[m]) * u.grid.dx)


def pairing(u_family: Callable[[float], WaveFunction], w, point_rule, ladder: HLadder,
            method: str = "frequency") -> PairingSeries:
    """Magnitudes ``|(u(h), psi_{x_h, xi_h, h})|`` along the ladder.

    ``point_rule`` is either a fixed ``(x, xi)`` pair or a callable ``h -> (x, xi)``.
    Failures at individual h are recorded and leave a NaN magnitude.
    """
    rule = point_rule if callable(point_rule) else (lambda h, p=tuple(point_rule): p)
    mags, pts, errs, floors = [], [], [], []
    for h in ladder:
        p = tuple(float(c) for c in rule(h))
        pts.append(p)
        try:
            u = u_family(h)
            floors.append(noise_floor(u))
            if method == "frequency" and isinstance(w, Window):
                val = coherent_pairings(u, w, [p[0]], [p[1]])[0, 0]
            else:
                val = spatial_pairing(u, w, p[0], p[1])
            mags.append(abs(val))
        except (ValueError, MemoryError) as exc:
            mags.append(math.nan)
            errs.append((h, str(exc)))
        if len(floors) < len(mags):
            floors.append(UNDERFLOW)
    return PairingSeries(ladder, np.array(mags), pts, errs, np.array(floors))


# -- scans -----------------------------------------------------------------

@dataclass
class WfScanResult:
    xs: np.ndarray
    xis: np.ndarray
    magnitudes: np.ndarray  # (len(ladder), nx, nxi)
    fits: list  # nx lists of nxi DecayFit
    ladder: HLadder
    config: dict = field(default_factory=dict)
    floors: np.ndarray | None = None

    @property
    def shape(self):
        return (len(self.xs), len(self.xis))

    def classes(self) -> np.ndarray:
        return np.array([[f.classification for f in row] for row in self.fits])

    def detected(self) -> np.ndarray:
        """Cells whose pairings do not decay: the numerical wavefront set."""
        return np.array([[f.detected for f in row] for row in self.fits])

    def detected_points(self) -> list:
        d = self.detected()
        return [(float(self.xs[i]), float(self.xis[j])) for i, j in zip(*np.nonzero(d))]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["x", "xi", "slope", "residual", "class"])
        for i, x in enumerate(self.xs):
            for j, xi in enumerate(self.xis):
                f = self.fits[i][j]
                cls = f.classification if not (f.classification == INCONCLUSIVE and f.decays) else "underflow"
                wr.writerow([f"{x:.17g}", f"{xi:.17g}", f"{f.slope:.17g}", f"{f.residual:.17g}", cls])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "ladder": list(self.ladder.values),
            "xs": [float(v) for v in self.xs],
            "xis": [float(v) for v in self.xis],
            "cells": [[self.fits[i][j].as_dict() for j in range(len(self.xis))] for i in range(len(self.xs))],
            "detected": self.detected_points(),
        }


def cell_centers(lo: float, hi: float, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("counts must be positive")
    if n == 1:
        return np.array([(lo + hi) / 2])
    return lo + (hi - lo) * np.arange(n) / (n - 1)


def wf_scan(u_family: Callable[[float], WaveFunction], w: Window, phase_rect, counts, ladder: HLadder,
            K_detect: float = K_DETECT, R_max: float = R_MAX, workers: int = 1) -> WfScanResult:
    """Decay classification of coherent-state pairings on a rectangular phase-space grid.

    ``phase_rect = (x_lo, x_hi, xi_lo, xi_hi)``; ``counts = (nx, nxi)`` cell
    centres including the edges.
    """
    x_lo, x_hi, xi_lo, xi_hi = phase_rect
    if not (x_hi > x_lo and xi_hi > xi_lo):
        raise ValueError("phase rectangle must have positive extent")
    xs = cell_centers(x_lo, x_hi, counts[0])
    xis = cell_centers(xi_lo, xi_hi, counts[1])

    def one(h):
        try:
            u = u_family(h)
            return coherent_pairings(u, w, xs, xis), noise_floor(u)
        except (ValueError, MemoryError):
            return np.full((xs.size, xis.size), np.nan), UNDERFLOW

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            layers = list(ex.map(one, ladder.values))
    else:
        layers = [one(h) for h in ladder.values]
    mags = np.abs(np.array([m for m, _ in layers]))
    floors = np.array([f for _, f in layers])
    fits = [[fit_magnitudes(ladder.values, mags[:, i, j], K_detect, R_max, floors) for j in range(xis.size)]
            for i in range(xs.size)]
    config = dict(window=asdict(w), phase_rect=list(phase_rect), counts=list(counts), K_detect=K_detect, R_max=R_max)
    return WfScanResult(xs, xis, mags, fits, ladder, config, floors)


def within_one_cell(cells_a, cells_b, dx: float, dxi: float) -> bool:
    """Every point of ``cells_a`` lies within one cell (Chebyshev) of some point of ``cells_b``."""
    if len(cells_a) == 0:
        return True
    if len(cells_b) == 0:
        return False
    a = np.asarray(cells_a, dtype=float)
    b = np.asarray(cells_b, dtype=float)
    dX = np.abs(a[:, None, 0] - b[None, :, 0]) / dx
    dXi = np.abs(a[:, None, 1] - b[None, :, 1]) / dxi
    return bool(np.all(np.min(np.maximum(dX, dXi), axis=1) <= 1.0 + 1e-9))


# -- sector bound ----------------------------------------------------------

@dataclass(frozen=True)
class SectorCheck:
    lhs: float
    rhs: float
    theta: float
    axis: float
    holds: object  # True/False, or None when theta >= pi/2


def sector_check(samples, weights) -> SectorCheck:
    """Check ``|sum w f| >= cos(theta) sum w |f|`` for the smallest sector holding all values."""
    f = np.asarray(samples, dtype=complex).ravel()
    wts = np.broadcast_to(np.asarray(weights, dtype=float), f.shape).ravel()
    if np.any(wts < 0):
        raise ValueError("weights must be nonnegative")
    nz = (f != 0) & (wts > 0)
    if not np.any(nz):
        raise ValueError("sector_check needs at least one nonzero sample")
    ang = np.sort(np.mod(np.angle(f[nz]), 2 * math.pi))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
    k = int(np.argmax(gaps))
    start = ang[(k + 1) % ang.size]
    arc = 2 * math.pi - gaps[k]
    theta = arc / 2
    axis = math.remainder(start + theta, 2 * math.pi)
    lhs = float(abs(np.sum(wts * f)))
    rhs = float(np.sum(wts * np.abs(f)))
    holds = None if theta >= math.pi / 2 else bool(lhs >= math.cos(theta) * rhs - 1e-12 * max(1.0, rhs))
    return SectorCheck(lhs, rhs, float(theta), axis, holds)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if callable(o):
        return getattr(o, "__name__", repr(o))
    raise TypeError(f"not JSON serializable: {type(o)}")
