"""Exponent bootstrap recurrence and the sup-norm gradient interpolation estimate."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import erf

from semiwf.states import smooth_bump
from semiwf.symbols import Symbol
from semiwf.wavefront import HLadder

_EPS = np.finfo(float).eps


def epsilon_recurrence(n_max: int) -> list:
    """``eps_0 = 1`` and ``1 - eps_{n+1} = 1/2 + (1 - eps_n)^2 / 2``; returns ``eps_0..eps_{n_max}``."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    out = [1.0]
    for _ in range(n_max):
        q = 1.0 - out[-1]
        out.append(1.0 - (0.5 + 0.5 * q * q))
    return out


# -- gradient estimate -----------------------------------------------------

def _d1(f, t):
    return (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * t)


def _d2(f, t):
    return (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * t * t)


def _sup(v) -> float:
    """Max of ``|v|`` refined by a parabola through the discrete peak and its neighbours."""
    a = np.abs(v)
    k = int(np.argmax(a))
    if 0 < k < a.size - 1:
        y0, y1, y2 = a[k - 1], a[k], a[k + 1]
        den = y0 - 2 * y1 + y2
        if den < 0:
            return float(y1 - 0.125 * (y2 - y0) ** 2 / den)
    return float(a[k])


@dataclass(frozen=True)
class GradientEstimate:
    sup_f: float
    sup_df: float
    sup_d2f: float
    ratio: float  # NaN when f'' vanishes (affine f)
    degenerate: bool
    richardson: float  # relative change of the derivative sups when the spacing is doubled

    def as_dict(self) -> dict:
        return asdict(self)


def gradient_estimate_ratio(f, dx: float) -> GradientEstimate:
    """``||f'|| / sqrt(||f|| ||f''||)`` for uniformly spaced samples ``f``.

    Derivatives are fourth-order central differences on interior points;
    ``richardson`` compares them with the same stencils at spacing ``2 dx``.
    """
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size < 9:
        raise ValueError("need at least 9 samples of a real function")
    if not dx > 0:
        raise ValueError("dx must be positive")
    sf = _sup(f)
    s1, s2 = _sup(_d1(f, dx)), _sup(_d2(f, dx))
    c1, c2 = _sup(_d1(f[::2], 2 * dx)), _sup(_d2(f[::2], 2 * dx))
    rich = max(abs(c1 - s1) / max(s1, 1e-300), abs(c2 - s2) / max(s2, 1e-300))
    degenerate = s2 <= 1e3 * _EPS * max(sf, 1e-300) / dx**2
    ratio = math.nan if degenerate or sf == 0 else s1 / math.sqrt(sf * s2)
    return GradientEstimate(sf, s1, s2, ratio, bool(degenerate), float(rich))


def _gauss_deriv(x):
    return -x * np.exp(-x**2 / 2)


TEST_FUNCTIONS = {
    "sin": np.sin,
    "cos2": lambda x: np.cos(2 * x),
    "gaussian": lambda x: np.exp(-x**2),
    "lorentzian": lambda x: 1 / (1 + x**2),
    "tanh": np.tanh,
    "sech": lambda x: 1 / np.cosh(x),
    "gauss_deriv": _gauss_deriv,
    "damped_sin": lambda x: np.sin(x) * np.exp(-x**2 / 8),
    "bump": lambda x: smooth_bump(x / 3),
    "two_tone": lambda x: np.sin(3 * x) + 0.5 * np.sin(x),
    "arctan": np.arctan,
    "erf": erf,
    "ratio_trig": lambda x: np.cos(x) / (2 + np.sin(x)),
    "exp_sin": lambda x: np.exp(np.sin(x)),
    "sinc": np.sinc,
    "lorentz2": lambda x: (1 + x**2) ** -2,
    "odd_rational": lambda x: x / (1 + x**2),
    "quartic_gauss": lambda x: np.exp(-x**4),
    "hermite2": lambda x: (4 * x**2 - 2) * np.exp(-x**2 / 2),
    "beat": lambda x: np.cos(x) * np.cos(1.3 * x),
}

CATALOG_DOMAIN = (-12.0, 12.0)


def catalog_ratios(dx: float = 1e-3, domain=CATALOG_DOMAIN) -> dict:
    x = np.arange(domain[0], domain[1] + dx / 2, dx)
    return {name: gradient_estimate_ratio(f(x), dx).ratio for name, f in TEST_FUNCTIONS.items()}


def empirical_constant(dx: float = 1e-3, domain=CATALOG_DOMAIN) -> float:
    """``C_emp``: the largest ratio over :data:`TEST_FUNCTIONS`.  A measured value, not a sharp constant."""
    return max(catalog_ratios(dx, domain).values())


# -- symbol scaling --------------------------------------------------------

@dataclass(frozen=True)
class ScalingReport:
    kind: str
    alpha: float
    eps: float
    delta: float
    slope: float
    threshold: float
    holds: bool
    sups: tuple

    def as_dict(self) -> dict:
        return asdict(self)


def scaled_gradient_sup(a: Symbol, h: float, box=None, resolution: int = 257) -> float:
    """Sup over a lattice of the symbol's box of ``|h^delta grad a|``, by fourth-order differences."""
    xl, xh, gl, gh = a.box(h) if box is None else box
    xl, xh = max(xl, -2.0), min(xh, 2.0)
    gl, gh = max(gl, -2.0), min(gh, 2.0)
    x = np.linspace(xl, xh, resolution)
    xi = np.linspace(gl, gh, resolution)
    t = min(x[1] - x[0], xi[1] - xi[0]) / 4
    X, XI = np.meshgrid(x, xi, indexing="ij")
    c = np.array([1.0, -8.0, 8.0, -1.0]) / (12 * t)
    offs = np.array([-2.0, -1.0, 1.0, 2.0]) * t
    dx = sum(ci * a(X + o, XI, h) for ci, o in zip(c, offs))
    dxi = sum(ci * a(X, XI + o, h) for ci, o in zip(c, offs))
    return float(h**a.delta * np.max(np.hypot(np.abs(dx), np.abs(dxi))))


def prop2_scaling_check(a: Symbol, alpha: float, ladder: HLadder | None = None, eps: float = 0.1,
                        resolution: int = 257, tol: float = 0.05) -> ScalingReport:
    """Slope of ``log ||h^delta grad a||_inf`` against ``log h``, compared with ``alpha (1 - eps) - tol``."""
    ladder = ladder or HLadder.dyadic()
    hs = np.array(ladder.values)
    sups = np.array([scaled_gradient_sup(a, h, resolution=resolution) for h in hs])
    pos = sups > 0
    if pos.sum() < 2:
        raise ValueError("gradient vanishes on the ladder")
    A = np.vstack([np.log(hs[pos]), np.ones(pos.sum())]).T
    slope = float(np.linalg.lstsq(A, np.log(sups[pos]), rcond=None)[0][0])
    thr = alpha * (1 - eps) - tol
    return ScalingReport(a.kind, alpha, eps, a.delta, slope, thr, bool(slope >= thr), tuple(sups))
