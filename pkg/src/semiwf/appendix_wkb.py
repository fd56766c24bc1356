"""Predicted and detected wavefront sets of WKB states ``b(x) e^{i Phi(x)/h}``.

The predicted sets are an outer bound ``{(x, Phi'(x)) : x in supp b, Im Phi(x) = 0}``
and an inner bound, the closure of ``{(x, Phi'(x)) : b(x) != 0, Im Phi(x) = 0}``.
Both are rasterized onto the scan grid and compared with a coherent-state scan.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from semiwf.families import WkbFamily
from semiwf.states import TestBump, Window, WkbData, wkb_catalog
from semiwf.wavefront import (HLadder, K_DETECT, R_MAX, cell_centers, decay_fit, pairing, stretched_rate, wf_scan,
                              within_one_cell)

ZERO_TOL = 1e-12


def _refined(lo: float, hi: float, n: int, extra) -> np.ndarray:
    x = np.concatenate([np.linspace(lo, hi, n), np.asarray(extra, dtype=float)])
    return np.unique(x[(x >= lo) & (x <= hi)])


def _rasterize(xs, xis, px, pxi) -> set:
    dx = xs[1] - xs[0] if xs.size > 1 else math.inf
    dxi = xis[1] - xis[0] if xis.size > 1 else math.inf
    cells = set()
    for x, xi in zip(px, pxi):
        i = int(np.argmin(np.abs(xs - x)))
        j = int(np.argmin(np.abs(xis - xi)))
        if abs(xs[i] - x) <= dx / 2 + 1e-12 and abs(xis[j] - xi) <= dxi / 2 + 1e-12:
            cells.add((float(xs[i]), float(xis[j])))
    return cells


@dataclass(frozen=True)
class PredictedWavefront:
    inner: frozenset
    outer: frozenset


def predicted_wavefront(d: WkbData, phase_rect, counts, refine: int = 64) -> PredictedWavefront:
    """Rasterized inner and outer wavefront bounds on the scan grid.

    Zeros of ``Im Phi`` and of ``b`` are located on a grid ``refine`` times
    finer than the scan grid (scan centres included); closures are taken by
    one-point dilation on that grid.  The outer bound uses the declared
    amplitude support, since flat amplitudes such as ``exp(-1/x^2)``
    underflow to exact zeros near the edge of their support.
    """
    x_lo, x_hi, xi_lo, xi_hi = phase_rect
    xs = cell_centers(x_lo, x_hi, counts[0])
    xis = cell_centers(xi_lo, xi_hi, counts[1])
    lo, hi = max(d.support[0], x_lo), min(d.support[1], x_hi)
    if hi < lo:
        return PredictedWavefront(frozenset(), frozenset())
    x = _refined(lo, hi, refine * counts[0], list(xs) + [lo, hi])
    phi = np.asarray(d.phase(x), dtype=complex)
    dphi = np.asarray(d.dphase(x), dtype=complex)
    real = np.abs(phi.imag) <= ZERO_TOL
    if np.any(real & (np.abs(dphi.imag) > 1e-8)):
        raise ValueError("Im Phi vanishes where Phi' is not real; the phase violates Im Phi >= 0")
    nz = np.abs(d.b(x)) > 0
    dil = nz.copy()
    dil[1:] |= nz[:-1]
    dil[:-1] |= nz[1:]
    outer_m = (dil | ((x >= d.support[0]) & (x <= d.support[1]))) & real
    inner_m = nz & real
    inner_m[1:] |= inner_m[:-1] & real[1:]
    inner_m[:-1] |= inner_m[1:] & real[:-1]
    outer = _rasterize(xs, xis, x[outer_m], dphi.real[outer_m])
    inner = _rasterize(xs, xis, x[inner_m], dphi.real[inner_m])
    return PredictedWavefront(frozenset(inner), frozenset(outer))


@dataclass
class WkbConfig:
    phase_rect: tuple = (-2.0, 2.0, -2.0, 2.0)
    counts: tuple = (41, 41)
    probes: list = field(default_factory=lambda: [(0.0, 0.0)])
    probe_window: str = "gaussian"  # or "bump" for the test bump psi with half-width probe_s
    probe_s: float = 0.5
    window_rho: float = 1.0
    K_detect: float = K_DETECT
    R_max: float = R_MAX
    workers: int = 1


@dataclass
class WkbReport:
    name: str
    config: dict
    inner_cells: list
    outer_cells: list
    detected_cells: list
    probes: list
    verdicts: dict

    def to_json(self) -> dict:
        return asdict(self)


def wkb_experiment(d: WkbData | str, config: WkbConfig | None = None, ladder: HLadder | None = None) -> WkbReport:
    """Scan a WKB family, compare with the predicted sandwich and fit probe-point series.

    Probe-point series use Gaussian coherent states by default; the
    compactly supported test bump has a slowly decaying transform, which
    makes off-wavefront probes look polynomial on short ladders.
    """
    if isinstance(d, str):
        d = wkb_catalog(d)
    cfg = config or WkbConfig()
    ladder = ladder or HLadder.dyadic()
    x_lo, x_hi, xi_lo, xi_hi = cfg.phase_rect
    x = np.linspace(d.support[0], d.support[1], 4097)
    slope = float(np.max(np.abs(np.asarray(d.dphase(x), dtype=complex).real)))
    xi_ext = max(abs(xi_lo), abs(xi_hi)) + 1.0
    fam = WkbFamily(d, xi_extent=xi_ext, slope_bound=max(slope, 1.0), x_cover=max(abs(x_lo), abs(x_hi)))
    w = Window("gaussian", cfg.window_rho)
    scan = wf_scan(fam, w, cfg.phase_rect, cfg.counts, ladder, cfg.K_detect, cfg.R_max, cfg.workers)
    detected = scan.detected_points()
    pred = predicted_wavefront(d, cfg.phase_rect, cfg.counts)
    dx = (x_hi - x_lo) / max(cfg.counts[0] - 1, 1)
    dxi = (xi_hi - xi_lo) / max(cfg.counts[1] - 1, 1)
    inner, outer = sorted(pred.inner), sorted(pred.outer)
    probes = []
    for p in cfg.probes:
        if cfg.probe_window == "bump":
            s = pairing(fam, TestBump(cfg.probe_s), tuple(p), ladder, method="spatial")
        else:
            s = pairing(fam, w, tuple(p), ladder)
        fit = decay_fit(s, cfg.K_detect, cfg.R_max)
        rate = stretched_rate(ladder.values, s.magnitudes, s.floors)
        probes.append({"point": list(p), "magnitudes": s.magnitudes.tolist(), "fit": fit.as_dict(),
                       "stretched_rate": rate,
                       "detected": fit.detected, "errors": s.errors})
    verdicts = {
        "inner_in_detected": within_one_cell(inner, detected, dx, dxi),
        "detected_in_outer": within_one_cell(detected, outer, dx, dxi),
    }
    verdicts["sandwich"] = verdicts["inner_in_detected"] and verdicts["detected_in_outer"]
    return WkbReport(d.name, asdict(cfg), inner, outer, detected, probes, verdicts)
