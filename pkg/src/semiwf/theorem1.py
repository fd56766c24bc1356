"""Exponent estimates, h-dependent centres and the reduced pairing integral.

For a symbol ``a`` with ``(0, 0)`` in its essential support the coherent
state ``phi_{0,0,h}`` can be annihilated to ``O(h^inf)`` by ``Op_{1,h}(a)``,
whereas centres ``(x_h, xi_h)`` chosen where ``|a|`` is largest on a small
ball keep the pairing ``(Op_{1,h}(a) phi_{c,h}, psi_{c,h})`` bounded below
by a power of h.  This module measures both sides.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from semiwf.grid import grid_for
from semiwf.pdo import apply_op_t1
from semiwf.states import TestBump, Window, coherent_state
from semiwf.symbols import Symbol, ball_lattice, default_spacing, sup_on_ball
from semiwf.wavefront import (DecayFit, HLadder, K_DETECT, R_MAX, coherent_pairings, fit_magnitudes,
                              noise_floor, sector_check, spatial_pairing)

DEFAULT_EPS = 0.1
DEFAULT_RESOLUTION = 256
MAX_QUAD_NODES = 4097
DEFAULT_QUAD_NODES = 513
LEMMA2_FRACTION = 0.8


def radius_ladder(n: int = 4, r1: float = 0.5) -> list:
    """``r_j = r1 * 2^{-(j-1)}`` for ``j = 1..n``."""
    return [r1 * 2.0 ** -(j - 1) for j in range(1, n + 1)]


def check_eps(eps: float, delta: float = 0.0):
    bound = 0.5 * (0.5 - delta)
    if not 0 < eps < bound:
        raise ValueError(f"eps must lie in (0, {bound:g}) for delta = {delta:g}, got {eps}")


def _lsq(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    (s, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(s), float(b), float(np.sqrt(np.mean((y - s * x - b) ** 2)))


@dataclass(frozen=True)
class AlphaEstimate:
    """Fitted exponent of ``sup_{B(r)} |a(.; h)|`` against h.

    ``alpha`` is the regression slope clipped below at 0 (every bounded
    symbol is ``O(h^0)``); ``raw_slope`` keeps the unclipped value.  Ladder
    points where the sup vanishes before the support has entered the ball
    are excluded; ``alpha = inf`` when the sup is zero at the smallest h.
    """

    radius: float
    alpha: float
    raw_slope: float
    intercept: float
    residual: float
    hs: tuple
    sups: tuple
    n_used: int

    def as_dict(self) -> dict:
        return asdict(self)


def estimate_alpha(a: Symbol, radii, ladder: HLadder, resolution: int = DEFAULT_RESOLUTION,
                   spacing: float | None = None) -> list:
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or any(b >= c for c, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly decreasing")
    if spacing is None:
        spacing = default_spacing(radii[0], resolution)
    hs = np.array(ladder.values)
    out = []
    for r in radii:
        sups = np.array([sup_on_ball(a, r, h, resolution, spacing=spacing) for h in hs])
        if sups[-1] <= 0:
            out.append(AlphaEstimate(r, math.inf, math.inf, math.nan, math.nan, tuple(hs), tuple(sups), 0))
            continue
        # longest run of positive sups ending at the smallest h
        start = len(sups)
        while start > 0 and sups[start - 1] > 0:
            start -= 1
        x, y = np.log(hs[start:]), np.log(sups[start:])
        if x.size >= 2:
            s, b, res = _lsq(x, y)
        else:
            s, b, res = float(y[0] / x[0]), 0.0, 0.0
        out.append(AlphaEstimate(r, max(s, 0.0), s, b, res, tuple(hs), tuple(sups), int(x.size)))
    return out


class Lemma2Error(ValueError):
    """The lower bound ``|a(x_h, xi_h; h)| >= h^{alpha + eps}`` fails too often."""


@dataclass(frozen=True)
class CenterSelection:
    radius: float
    eps: float
    alpha: float
    hs: tuple
    centers: tuple
    values: tuple
    bound_holds: tuple

    @property
    def fraction(self) -> float:
        return float(np.mean(self.bound_holds))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["fraction"] = self.fraction
        return d


def select_centers(a: Symbol, r: float, eps: float, ladder: HLadder, resolution: int = DEFAULT_RESOLUTION,
                   alpha: float | None = None, spacing: float | None = None, strict: bool = True) -> CenterSelection:
    """Per-h argmax of ``|a|`` over the lattice of ``B(r)``.

    Where the sup vanishes the centre defaults to the origin.  With
    ``strict`` a :class:`Lemma2Error` is raised when the bound
    ``|a| >= h^{alpha+eps}`` fails at more than 20% of the ladder.
    """
    check_eps(eps, a.delta)
    if alpha is None:
        alpha = estimate_alpha(a, [r], ladder, resolution, spacing)[0].alpha
    if not math.isfinite(alpha):
        raise ValueError(f"sup of |a| vanishes on B({r}) at small h; no centres to select")
    centers, values, holds = [], [], []
    for h in ladder:
        v, c = sup_on_ball(a, r, h, resolution, spacing=spacing, return_argmax=True)
        if v <= 0:
            c = (0.0, 0.0)
        centers.append(c)
        values.append(v)
        holds.append(bool(v >= h ** (alpha + eps)))
    sel = CenterSelection(r, eps, alpha, tuple(ladder.values), tuple(centers), tuple(values), tuple(holds))
    if strict and sel.fraction < LEMMA2_FRACTION:
        raise Lemma2Error(f"bound |a| >= h^(alpha+eps) holds at only {sel.fraction:.0%} of ladder points")
    return sel


def gradient_sup(a: Symbol, r: float, h: float, spacing: float) -> float:
    """Lattice sup over ``B(r)`` of ``|grad a|`` by fourth-order central differences."""
    X, XI = ball_lattice(r, spacing)
    t = spacing / 4
    c = np.array([1.0, -8.0, 8.0, -1.0]) / (12 * t)
    offs = np.array([-2.0, -1.0, 1.0, 2.0]) * t
    dx = sum(ci * a(X + o, XI, h) for ci, o in zip(c, offs))
    dxi = sum(ci * a(X, XI + o, h) for ci, o in zip(c, offs))
    return float(np.max(np.hypot(np.abs(dx), np.abs(dxi))))


@dataclass(frozen=True)
class GradientCheck:
    radius: float
    margin: float
    alpha: float
    slope: float
    sups: tuple
    holds: bool


def gradient_check(a: Symbol, r: float, ladder: HLadder, alpha: float, margin: float | None = None,
                   resolution: int = DEFAULT_RESOLUTION, tol: float = 0.2) -> GradientCheck:
    """Slope of ``log sup_{B(r+s)} |h^delta grad a|`` against ``alpha - tol``; ``s = r/2`` by default."""
    s = r / 2 if margin is None else margin
    R = r + s
    spacing = default_spacing(R, resolution)
    hs = np.array(ladder.values)
    sups = np.array([h**a.delta * gradient_sup(a, R, h, spacing) for h in hs])
    pos = sups > 0
    slope = _lsq(np.log(hs[pos]), np.log(sups[pos]))[0] if pos.sum() >= 2 else math.inf
    return GradientCheck(r, s, alpha, slope, tuple(sups), bool(slope >= alpha - tol))


# -- reduced pairing -------------------------------------------------------

def _nodes(lo: float, hi: float, n: int):
    t, wt = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * t + 0.5 * (hi + lo), 0.5 * (hi - lo) * wt


def _reduced_grid(a: Symbol, center, h: float, psi: TestBump, w: Window, quad_nodes: int):
    if not w.compact_fourier:
        raise ValueError("reduced_pairing needs a window with compactly supported transform")
    if quad_nodes < 65:
        raise ValueError("quad_nodes must be at least 65")
    if quad_nodes > MAX_QUAD_NODES:
        raise ValueError(f"quad_nodes {quad_nodes} exceeds budget {MAX_QUAD_NODES}")
    xc, xic = center
    sh = math.sqrt(h)
    xl, xh, gl, gh = a.box(h)
    X0, X1 = max(-psi.s, (xl - xc) / sh), min(psi.s, (xh - xc) / sh)
    E0, E1 = max(-w.rho, (gl - xic) / sh), min(w.rho, (gh - xic) / sh)
    if X1 <= X0 or E1 <= E0:
        return None
    X, wX = _nodes(X0, X1, quad_nodes)
    E, wE = _nodes(E0, E1, quad_nodes)
    XX, EE = np.meshgrid(X, E, indexing="ij")
    A = a(xc + sh * XX, xic + sh * EE, h)
    kernel = psi(XX) * w.fourier(EE) * np.exp(1j * XX * EE)
    return A, kernel, np.outer(wX, wE), XX, EE


def reduced_integral(a: Symbol, center, h: float, psi: TestBump | None = None, w: Window | None = None,
                     quad_nodes: int = DEFAULT_QUAD_NODES) -> complex:
    """``∬ a(x_c + sqrt(h) X, xi_c + sqrt(h) Xi; h) psi(X) what(Xi) e^{i X Xi} dX dXi``."""
    psi = psi or TestBump()
    w = w or Window()
    g = _reduced_grid(a, center, h, psi, w, quad_nodes)
    if g is None:
        return 0j
    A, kernel, wts, _, _ = g
    return complex(np.sum(A * kernel * wts))


def reduced_pairing(a: Symbol, center, h: float, psi: TestBump | None = None, w: Window | None = None,
                    quad_nodes: int = DEFAULT_QUAD_NODES) -> complex:
    """``(Op_{1,h}(a) phi_{c,h}, psi_{c,h})`` by tensor Gauss-Legendre quadrature of the rescaled integral."""
    return reduced_integral(a, center, h, psi, w, quad_nodes) / math.sqrt(2 * math.pi)


def kernel_mass(psi: TestBump | None = None, w: Window | None = None, quad_nodes: int = 257) -> float:
    """``∬ psi(X) what(Xi) dX dXi``."""
    psi = psi or TestBump()
    w = w or Window()
    X, wX = _nodes(-psi.s, psi.s, quad_nodes)
    E, wE = _nodes(-w.rho, w.rho, quad_nodes)
    return float(np.sum(psi(X) * wX) * np.sum(w.fourier(E) * wE))


def grid_pairing(a: Symbol, center, h: float, psi: TestBump | None = None, w: Window | None = None,
                 tol: float = 1e-13, points_per_probe: int = 128) -> complex:
    """Same pairing computed on a grid: FFT operator, then trapezoid against ``psi_{c,h}``."""
    psi = psi or TestBump()
    w = w or Window()
    xc, xic = center
    sh = math.sqrt(h)
    xe = abs(xc) + w.spatial_extent(tol) * sh
    xie = abs(xic) + w.fourier_extent() * sh
    max_dx = min(h / (4 * abs(xic) + 1), 2 * psi.s * sh / points_per_probe)
    g = grid_for(h, xe, xie, max_dx=max_dx)
    u = apply_op_t1(a, coherent_state(w, xc, xic, h, g))
    return spatial_pairing(u, psi, xc, xic)


def default_probe(w: Window, s: float = 0.5) -> TestBump:
    """Test bump with ``s * rho <= pi/6`` so that ``|X Xi| <= pi/6`` on the kernel support."""
    return TestBump(min(s, math.pi / (6 * w.rho)))


# -- sector diagnostics ----------------------------------------------------

@dataclass(frozen=True)
class SectorDiag:
    h: float
    kernel_spread: float  # max |arg e^{i X Xi}| where psi * what > 0
    symbol_spread: float  # max |arg a(.)/a(c)| over the kernel support
    total_spread: float   # max |arg integrand - arg a(c)|
    within_pi_3: bool
    lhs: float
    rhs: float
    lemma3_holds: object


def sector_diagnostics(a: Symbol, center, h: float, psi: TestBump, w: Window, quad_nodes: int = DEFAULT_QUAD_NODES) -> SectorDiag:
    g = _reduced_grid(a, center, h, psi, w, quad_nodes)
    ac = complex(a(center[0], center[1], h))
    if g is None or ac == 0:
        return SectorDiag(h, math.nan, math.nan, math.nan, False, 0.0, 0.0, None)
    A, kernel, wts, XX, EE = g
    m = (np.abs(kernel) > 0) & (np.abs(A) > 0)
    kspread = float(np.max(np.abs(XX * EE)[m]))
    sspread = float(np.max(np.abs(np.angle(A[m] / ac))))
    f = A * kernel
    tspread = float(np.max(np.abs(np.angle(f[m] / ac))))
    sc = sector_check(f[m], wts[m])
    return SectorDiag(h, kspread, sspread, tspread, bool(tspread <= math.pi / 3 + 1e-12), sc.lhs, sc.rhs, sc.holds)


# -- fixed-centre series ---------------------------------------------------

def fixed_center_magnitudes(a: Symbol, ladder: HLadder, point=(0.0, 0.0), w: Window | None = None):
    """``|(Op_{1,h}(a) phi_{p,h}, phi_{p,h})|`` with Gaussian states and probes, on a grid.

    Returns ``(magnitudes, floors)``.
    """
    w = w or Window("gaussian")
    x0, xi0 = point
    mags, floors = [], []
    for h in ladder:
        sh = math.sqrt(h)
        g = grid_for(h, abs(x0) + w.spatial_extent(1e-16) * sh, abs(xi0) + w.fourier_extent() * sh,
                     max_dx=h / (4 * abs(xi0) + 1))
        u = apply_op_t1(a, coherent_state(w, x0, xi0, h, g))
        mags.append(abs(coherent_pairings(u, w, [x0], [xi0])[0, 0]))
        floors.append(noise_floor(u))
    return np.array(mags), np.array(floors)


# -- experiment ------------------------------------------------------------

@dataclass
class Theorem1Config:
    radii: list = field(default_factory=lambda: [0.5, 0.25])
    eps: float = DEFAULT_EPS
    resolution: int = DEFAULT_RESOLUTION
    rho: float = 1.0
    quad_nodes: int = DEFAULT_QUAD_NODES
    K_detect: float = K_DETECT
    R_max: float = R_MAX
    tail_points: int = 3


@dataclass
class Theorem1Report:
    symbol: str
    config: dict
    alpha_estimates: list
    centers: list
    fixed_center_fit: DecayFit
    fixed_center_magnitudes: list
    fixed_center_floors: list
    shifted: list  # per radius: fit, integrals, lower-bound checks
    sector_diag: list
    verdict: bool
    checks: dict

    def to_json(self) -> dict:
        return {
            "symbol": self.symbol,
            "config": self.config,
            "alpha_estimates": [e.as_dict() for e in self.alpha_estimates],
            "centers": [c.as_dict() for c in self.centers],
            "fixed_center_fit": self.fixed_center_fit.as_dict(),
            "fixed_center_magnitudes": list(self.fixed_center_magnitudes),
            "fixed_center_floors": list(self.fixed_center_floors),
            "shifted_center_fit": self.shifted,
            "sector_diag": [asdict(d) for d in self.sector_diag],
            "verdict": self.verdict,
            "checks": self.checks,
        }


def theorem1_experiment(a: Symbol, ladder: HLadder | None = None, config: Theorem1Config | None = None) -> Theorem1Report:
    """Fixed-centre decay versus shifted-centre lower bounds for one symbol.

    The verdict requires (i) the fixed-centre series at the origin to decay,
    and for every radius (ii) the shifted-centre pairing slope to stay below
    ``alpha + eps + 0.5`` and (iii) ``|∬ ...| >= h^{alpha+eps} ∬ psi what / 4``
    at the ``tail_points`` smallest ladder values.
    """
    ladder = ladder or HLadder.dyadic()
    cfg = config or Theorem1Config()
    check_eps(cfg.eps, a.delta)
    w = Window("bump_hat", cfg.rho)
    psi = default_probe(w)
    mass = kernel_mass(psi, w)
    hs = np.array(ladder.values)
    spacing = default_spacing(max(cfg.radii), cfg.resolution)

    alphas = estimate_alpha(a, cfg.radii, ladder, cfg.resolution, spacing)
    fmags, floors = fixed_center_magnitudes(a, ladder)
    ffit = fit_magnitudes(hs, fmags, cfg.K_detect, cfg.R_max, floors)

    centers, shifted, diags = [], [], []
    ok = ffit.decays
    checks = {"fixed_center_decays": ffit.decays}
    for est in alphas:
        sel = select_centers(a, est.radius, cfg.eps, ladder, cfg.resolution, alpha=est.alpha,
                             spacing=spacing, strict=False)
        centers.append(sel)
        ints = np.array([reduced_integral(a, c, h, psi, w, cfg.quad_nodes) for c, h in zip(sel.centers, hs)])
        mags = np.abs(ints) / math.sqrt(2 * math.pi)
        sfit = fit_magnitudes(hs, mags, cfg.K_detect, cfg.R_max)
        target = 0.25 * hs ** (est.alpha + cfg.eps) * mass
        lower = [bool(v >= t) for v, t in zip(np.abs(ints), target)]
        tail = lower[-cfg.tail_points:]
        slope_ok = bool(np.isfinite(sfit.slope) and sfit.slope <= est.alpha + cfg.eps + 0.5)
        shifted.append({
            "radius": est.radius,
            "fit": sfit.as_dict(),
            "magnitudes": mags.tolist(),
            "integrals_abs": np.abs(ints).tolist(),
            "lower_bound_targets": target.tolist(),
            "lower_bound_holds": lower,
            "slope_ok": slope_ok,
            "tail_lower_bound_ok": all(tail),
            "lemma2_fraction": sel.fraction,
        })
        diags.append(sector_diagnostics(a, sel.centers[-1], hs[-1], psi, w, cfg.quad_nodes))
        ok = ok and slope_ok and all(tail)
    checks["shifted_slope_ok"] = all(s["slope_ok"] for s in shifted)
    checks["tail_lower_bound_ok"] = all(s["tail_lower_bound_ok"] for s in shifted)
    checks["lemma2_fraction_ok"] = all(s["lemma2_fraction"] >= LEMMA2_FRACTION for s in shifted)
    return Theorem1Report(a.kind, asdict(cfg), alphas, centers, ffit, fmags.tolist(), floors.tolist(), shifted, diags,
                          bool(ok), checks)

