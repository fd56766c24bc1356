"""Twelve end-to-end acceptance checks, shared by the test-suite and ``semiwf selftest``.

Each ``criterion_N`` returns a :class:`CriterionResult`; nothing here
raises on a failed check, so a full run always reports every line.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from semiwf import bounds
from semiwf.appendix_wkb import WkbConfig, wkb_experiment
from semiwf.families import CoherentFamily, WkbFamily
from semiwf.grid import AliasingWarning, grid_for, hfourier_forward, hfourier_inverse, l2_norm
from semiwf.pdo import apply_op_t0, apply_op_t1
from semiwf.states import Window, coherent_state, coherent_state_fourier, wkb_catalog
from semiwf.symbols import (example1_symbol, example2_symbol, gauss_product, modulated_bump, momentum,
                            phase_bump)
from semiwf.theorem1 import Theorem1Config, grid_pairing, radius_ladder, reduced_pairing, theorem1_experiment
from semiwf.wavefront import HLadder, fit_magnitudes, noise_floor, wf_scan, within_one_cell

LADDER = HLadder.dyadic(4, 14)
SEED = 20240611


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.title} ({self.seconds:.1f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t = time.perf_counter()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AliasingWarning)
            res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- 1, 2: transforms ------------------------------------------------------

def _state_catalog(h: float):
    for kind in ("gaussian", "bump_hat"):
        fam = CoherentFamily(Window(kind), 0.3, -0.7)
        yield f"coherent_{kind}", fam(h)
    for name in ("real_quadratic", "linear", "imag_flat", "imag_quadratic", "imag_bump"):
        yield f"wkb_{name}", WkbFamily(wkb_catalog(name))(h)


@_timed
def criterion_1() -> CriterionResult:
    worst = 0.0
    for h in LADDER:
        for name, u in _state_catalog(h):
            v = hfourier_forward(u)
            n = l2_norm(u)
            unit = abs(l2_norm(v) - n) / n
            inv = l2_norm(type(u)(u.grid, h, hfourier_inverse(v).samples - u.samples)) / n
            worst = max(worst, unit, inv)
    return CriterionResult(1, "Fourier unitarity and inversion <= 1e-10", worst <= 1e-10, {"max_rel_error": worst})


@_timed
def criterion_2() -> CriterionResult:
    worst = 0.0
    for kind in ("gaussian", "bump_hat"):
        w = Window(kind)
        for x0, xi0 in [(0.0, 0.0), (0.5, -1.0), (-0.3, 0.7)]:
            for h in (2**-4, 2**-6, 2**-8, 2**-10):
                sh = math.sqrt(h)
                g = grid_for(h, abs(x0) + w.spatial_extent(1e-14) * sh, abs(xi0) + w.fourier_extent() * sh,
                             max_dx=h / (4 * abs(xi0) + 1))
                num = hfourier_forward(coherent_state(w, x0, xi0, h, g)).samples
                ref = coherent_state_fourier(w, x0, xi0, h, g).samples
                worst = max(worst, float(np.linalg.norm(num - ref) / np.linalg.norm(ref)))
    return CriterionResult(2, "coherent-state transform matches closed form <= 1e-8", worst <= 1e-8,
                           {"max_rel_l2": worst})


# -- 3: locality -----------------------------------------------------------

def _box_distance(p, box):
    x, xi = p
    xl, xh, gl, gh = box
    return math.hypot(max(xl - x, 0.0, x - xh), max(gl - xi, 0.0, xi - gh))


def locality_centers(n: int = 10, r0: float = 1.0, seed: int = SEED, a=None):
    a = a or phase_bump()
    box = a.box(0.5)
    reach = max(abs(v) for v in box) + r0 + 0.5
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        p = tuple(rng.uniform(-reach, reach, size=2))
        if r0 < _box_distance(p, box) <= r0 + 0.5:
            out.append((float(p[0]), float(p[1])))
    return out


def locality_fit(a, center, t: int, ladder: HLadder = LADDER, K_detect: float = 5.0):
    w = Window("gaussian")
    fam = CoherentFamily(w, center[0], center[1])
    apply = apply_op_t1 if t == 1 else apply_op_t0
    mags, floors = [], []
    for h in ladder:
        u = fam(h)
        v = apply(a, u)
        mags.append(l2_norm(v))
        floors.append(noise_floor(u))
    return fit_magnitudes(ladder.values, mags, K_detect, floors=floors), mags


@_timed
def criterion_3() -> CriterionResult:
    # unit-radius bump: the frequency tail of a radius-r bump decays like exp(-sqrt(2 r d / h))
    a = phase_bump(0.0, 0.0, 1.0, 1.0)
    rows, ok = [], True
    for c in locality_centers(a=a):
        for t in (0, 1):
            fit, mags = locality_fit(a, c, t)
            good = fit.decays and (fit.n_used < 2 or fit.slope >= 5.0)
            ok &= good
            rows.append({"center": c, "t": t, "slope": fit.slope, "n_used": fit.n_used, "ok": good})
    return CriterionResult(3, "operator locality: ||Op(a) phi|| slope >= 5 away from supp a", ok, {"rows": rows})


# -- 4: coherent-state scan ------------------------------------------------

def coherent_scan(rho: float = 1.0, K_detect: float = 5.0, workers: int = 4, point=(0.5, -1.0)):
    w = Window("gaussian", rho)
    fam = CoherentFamily(w, point[0], point[1], xi_extent=2.5, x_cover=2.0)
    return wf_scan(fam, w, (-2.0, 2.0, -2.0, 2.0), (41, 41), LADDER, K_detect=K_detect, workers=workers)


def scan_verdict(res, point=(0.5, -1.0)) -> bool:
    d = res.detected_points()
    return bool(d) and within_one_cell(d, [point], 0.1, 0.1)


@_timed
def criterion_4(workers: int = 4) -> CriterionResult:
    res = coherent_scan(workers=workers)
    return CriterionResult(4, "coherent-state scan detects only (0.5, -1)", scan_verdict(res),
                           {"detected": res.detected_points()})


# -- 5, 6: examples --------------------------------------------------------

def example1_report(rho: float = 1.0, K_detect: float = 5.0):
    return theorem1_experiment(example1_symbol(), LADDER, Theorem1Config(radii=[0.5, 0.25], rho=rho, K_detect=K_detect))


def example2_report(rho: float = 1.0, K_detect: float = 5.0):
    return theorem1_experiment(example2_symbol(), LADDER, Theorem1Config(radii=radius_ladder(), rho=rho, K_detect=K_detect))


def fixed_fit_at(rep, K_detect: float):
    """The report's fixed-centre series refitted at another detection threshold."""
    hs = rep.alpha_estimates[0].hs
    return fit_magnitudes(hs, rep.fixed_center_magnitudes, K_detect, floors=rep.fixed_center_floors)


def example1_verdict(rep, fixed=None) -> bool:
    f = fixed or rep.fixed_center_fit
    return bool(f.decays and f.slope >= 5.0 and rep.checks["shifted_slope_ok"] and rep.checks["tail_lower_bound_ok"])


def example2_verdict(rep, fixed=None) -> bool:
    alphas = [e.alpha for e in rep.alpha_estimates]
    stair = all(b > a for a, b in zip(alphas, alphas[1:]))
    return bool(example1_verdict(rep, fixed) and stair)


def _example_detail(rep) -> dict:
    return {
        "alpha": [e.alpha for e in rep.alpha_estimates],
        "raw_slope": [e.raw_slope for e in rep.alpha_estimates],
        "fixed_slope": rep.fixed_center_fit.slope,
        "fixed_decays": rep.fixed_center_fit.decays,
        "checks": rep.checks,
        "lower_bound_holds": [s["lower_bound_holds"] for s in rep.shifted],
    }


@_timed
def criterion_5() -> CriterionResult:
    rep = example1_report()
    return CriterionResult(5, "example 1: fixed centre decays, shifted centres bounded below", example1_verdict(rep),
                           _example_detail(rep))


@_timed
def criterion_6() -> CriterionResult:
    rep = example2_report()
    return CriterionResult(6, "example 2: same dichotomy, alpha staircase", example2_verdict(rep), _example_detail(rep))


# -- 7: cross-oracle -------------------------------------------------------

CROSS_CASES = [
    (phase_bump(0.2, 0.1), (0.1, 0.2)),
    (gauss_product(0.1, 0.2, 0.7, 0.9), (0.3, 0.1)),
    (momentum(), (0.2, 0.6)),
    (example2_symbol(), (0.5 - 1 / 255, 0.0)),
    (modulated_bump(), (0.1, 0.1)),
]


@_timed
def criterion_7() -> CriterionResult:
    worst_x = worst_d = 0.0
    for a, c in CROSS_CASES:
        for h in (2**-4, 2**-6, 2**-8):
            r = reduced_pairing(a, c, h)
            r2 = reduced_pairing(a, c, h, quad_nodes=2 * 513 - 1)
            g = grid_pairing(a, c, h)
            worst_x = max(worst_x, abs(r - g) / abs(r))
            worst_d = max(worst_d, abs(r - r2) / abs(r))
    ok = worst_x <= 1e-6 and worst_d < 1e-9
    return CriterionResult(7, "reduced pairing vs grid pairing <= 1e-6; node doubling < 1e-9", ok,
                           {"max_cross": worst_x, "max_doubling": worst_d})


# -- 8, 9: WKB -------------------------------------------------------------

@_timed
def criterion_8(workers: int = 4) -> CriterionResult:
    rep = wkb_experiment("real_quadratic", WkbConfig(workers=workers))
    return CriterionResult(8, "real quadratic phase: detected set is the diagonal", rep.verdicts["sandwich"],
                           {"verdicts": rep.verdicts, "n_detected": len(rep.detected_cells),
                            "n_inner": len(rep.inner_cells), "n_outer": len(rep.outer_cells)})


@_timed
def criterion_9() -> CriterionResult:
    cfg = WkbConfig(counts=(5, 5))
    flat = wkb_experiment("imag_flat", cfg).probes[0]
    quad = wkb_experiment("imag_quadratic", cfg).probes[0]
    a = flat["fit"]["classification"] == "rapid_decay"
    b = quad["fit"]["classification"] == "polynomial" and abs(quad["fit"]["slope"] - 1.25) <= 0.05
    return CriterionResult(9, "flat amplitude rapid_decay; x^2 amplitude polynomial slope 1.25", a and b, {
        "flat_class": flat["fit"]["classification"], "flat_decays": flat["fit"]["decays"],
        "flat_slope": flat["fit"]["slope"], "flat_residual": flat["fit"]["residual"],
        "flat_underflow": flat["fit"]["n_underflow"], "flat_stretched_rate": flat["stretched_rate"],
        "quad_class": quad["fit"]["classification"], "quad_slope": quad["fit"]["slope"],
    })


# -- 10, 11 ----------------------------------------------------------------

@_timed
def criterion_10() -> CriterionResult:
    eps = bounds.epsilon_recurrence(200)
    prefix = eps[:4] == [1.0, 0.5, 0.375, 0.3046875]
    x = np.arange(0.0, 20.0, 1e-3)
    sin_ratio = bounds.gradient_estimate_ratio(np.sin(x), 1e-3).ratio
    checks = [
        bounds.prop2_scaling_check(phase_bump(power=2.0), 2.0),
        bounds.prop2_scaling_check(phase_bump(power=2.0, delta=0.3), 2.0),
        bounds.prop2_scaling_check(modulated_bump(), 2.0),
    ]
    slopes = [c.slope for c in checks]
    scal = abs(slopes[0] - 2) <= 0.02 and abs(slopes[1] - 2) <= 0.05 and slopes[2] >= 1.8 and all(c.holds for c in checks)
    ok = prefix and eps[200] < 0.01 and abs(sin_ratio - 1) <= 1e-6 and scal
    return CriterionResult(10, "recurrence prefix, eps_200 < 0.01, sin ratio, scaling slopes", ok,
                           {"eps_prefix": eps[:4], "eps_200": eps[200], "sin_ratio": sin_ratio, "slopes": slopes})


@_timed
def criterion_11() -> CriterionResult:
    rows, ok = [], True
    for a in (gauss_product(0.1, 0.2, 0.7, 0.9), phase_bump(0.0, 0.0, 1.0, 1.0)):
        fam = CoherentFamily(Window("gaussian"), 0.2, 0.3)
        mags = []
        for h in LADDER:
            u = fam(h)
            mags.append(l2_norm(type(u)(u.grid, h, apply_op_t1(a, u).samples - apply_op_t0(a, u).samples)))
        fit = fit_magnitudes(LADDER.values, mags)
        ok &= fit.slope >= 0.9
        rows.append({"symbol": a.kind, "slope": fit.slope})
    return CriterionResult(11, "||(Op_1 - Op_0)(a) u|| slope >= 0.9", ok, {"rows": rows})


# -- 12: robustness --------------------------------------------------------

@_timed
def criterion_12(workers: int = 4) -> CriterionResult:
    Ks, rhos = (4.0, 6.0, 8.0), (0.5, 1.0, 2.0)
    base = {4: scan_verdict(coherent_scan(workers=workers)),
            5: example1_verdict(example1_report()), 6: example2_verdict(example2_report())}
    table = {}
    for rho in rhos:
        scan = coherent_scan(rho=rho, workers=workers)
        r1, r2 = example1_report(rho=rho), example2_report(rho=rho)
        for K in Ks:
            det = [(float(x), float(xi)) for i, x in enumerate(scan.xs) for j, xi in enumerate(scan.xis)
                   if not fit_magnitudes(LADDER.values, scan.magnitudes[:, i, j], K, floors=scan.floors).decays]
            v4 = bool(det) and within_one_cell(det, [(0.5, -1.0)], 0.1, 0.1)
            v5 = example1_verdict(r1, fixed_fit_at(r1, K))
            v6 = example2_verdict(r2, fixed_fit_at(r2, K))
            table[f"rho={rho},K={K}"] = (v4, v5, v6)
    ok = all(v == (base[4], base[5], base[6]) for v in table.values())
    return CriterionResult(12, "criteria 4-6 verdicts stable for K in {4,6,8}, rho in {0.5,1,2}", ok,
                           {"base": base, "table": table})


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


def run_all(numbers=None, echo=print) -> list:
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        if numbers and i not in numbers:
            continue
        res = fn()
        if echo:
            echo(res.line())
        out.append(res)
    return out
