"""Catalog of phase-space symbols ``a(x, xi; h)``.

Every catalog symbol is a finite sum of separable terms ``f(x; h) g(xi; h)``,
which the operator module uses for its FFT fast path.  Symbols also carry a
bounding box of their support (when bounded) so that quadratures and
operator rows can skip regions where the symbol vanishes identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from semiwf.states import smooth_bump

Term = tuple  # (f(x, h), g(xi, h))


@dataclass(frozen=True)
class Symbol:
    kind: str
    params: dict = field(default_factory=dict)
    delta: float = 0.0
    terms: Callable[[float], list] = field(default=None, repr=False)
    x_bounds: Optional[Callable[[float], tuple]] = field(default=None, repr=False)
    xi_bounds: Optional[Callable[[float], tuple]] = field(default=None, repr=False)
    ess_supp_oracle: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        if not 0 <= self.delta < 0.5:
            raise ValueError(f"delta must lie in [0, 1/2), got {self.delta}")

    def __call__(self, x, xi, h):
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(np.broadcast(x, xi).shape, dtype=complex)
        for f, g in self.terms(h):
            out = out + np.asarray(f(x, h)) * np.asarray(g(xi, h))
        return out

    def box(self, h):
        """``(x_lo, x_hi, xi_lo, xi_hi)``; infinite where unbounded."""
        xl, xh = self.x_bounds(h) if self.x_bounds else (-math.inf, math.inf)
        gl, gh = self.xi_bounds(h) if self.xi_bounds else (-math.inf, math.inf)
        return xl, xh, gl, gh


def eval_symbol(a: Symbol, x, xi, h: float):
    if not 0 < h < 1:
        raise ValueError("h must lie in (0, 1)")
    return a(x, xi, h)


def _one(z, h):
    return np.ones_like(np.asarray(z, dtype=float))


def constant(c: complex = 1.0) -> Symbol:
    return Symbol("constant", {"c": c}, terms=lambda h: [(lambda x, h: c * _one(x, h), _one)])


def phase_bump(x0: float = 0.0, xi0: float = 0.0, rx: float = 0.5, rxi: float = 0.5,
               power: float = 0.0, delta: float = 0.0) -> Symbol:
    """``h^power B((x-x0)/(rx h^delta)) B((xi-xi0)/(rxi h^delta))`` with ``B(0) = 1``."""

    def terms(h):
        s = h**delta
        return [(lambda x, h: h**power * smooth_bump((x - x0) / (rx * s)),
                 lambda xi, h: smooth_bump((xi - xi0) / (rxi * s)))]

    def oracle(x, xi):
        return "in" if (abs(x - x0) <= rx and abs(xi - xi0) <= rxi) else "out"

    return Symbol("phase_bump", dict(x0=x0, xi0=xi0, rx=rx, rxi=rxi, power=power, delta=delta), delta,
                  terms=terms,
                  x_bounds=lambda h: (x0 - rx * h**delta, x0 + rx * h**delta),
                  xi_bounds=lambda h: (xi0 - rxi * h**delta, xi0 + rxi * h**delta),
                  ess_supp_oracle=oracle if power == 0 and delta == 0 else None)


def gauss_product(x0: float = 0.0, xi0: float = 0.0, sx: float = 1.0, sxi: float = 1.0) -> Symbol:
    """Smooth h-independent symbol ``exp(-(x-x0)^2/sx^2 - (xi-xi0)^2/sxi^2)``."""
    return Symbol("gauss_product", dict(x0=x0, xi0=xi0, sx=sx, sxi=sxi),
                  terms=lambda h: [(lambda x, h: np.exp(-((x - x0) / sx) ** 2),
                                    lambda xi, h: np.exp(-((xi - xi0) / sxi) ** 2))])


def momentum() -> Symbol:
    return Symbol("momentum", terms=lambda h: [(_one, lambda xi, h: np.asarray(xi, dtype=float))])


def multiplier(f: Callable, name: str = "multiplier") -> Symbol:
    return Symbol(name, terms=lambda h: [(lambda x, h: f(x), _one)])


def modulated_bump(power: float = 2.0, delta: float = 0.3, rx: float = 0.5, rxi: float = 0.5) -> Symbol:
    """``h^power sin(x / h^delta) B(x/rx) B(xi/rxi)``; lies in the class with index delta."""
    return Symbol("modulated_bump", dict(power=power, delta=delta, rx=rx, rxi=rxi), delta,
                  terms=lambda h: [(lambda x, h: h**power * np.sin(x / h**delta) * smooth_bump(x / rx),
                                    lambda xi, h: smooth_bump(xi / rxi))],
                  x_bounds=lambda h: (-rx, rx), xi_bounds=lambda h: (-rxi, rxi))


def edge_profile(t):
    """``exp(-1/t - t)`` for ``t > 0`` and 0 otherwise; support exactly ``[0, inf)``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = t > 0
    out[m] = np.exp(-1.0 / t[m] - t[m])
    return out


def example1_symbol() -> Symbol:
    """``a(x, xi; h) = g(x - h^{1/4}) beta(xi)``: support slides onto the origin as h -> 0."""

    def oracle(x, xi):
        return "in" if (x >= 0 and abs(xi) <= 2) else "out"

    return Symbol("example1", {},
                  terms=lambda h: [(lambda x, h: edge_profile(x - h**0.25),
                                    lambda xi, h: smooth_bump(xi / 2.0))],
                  x_bounds=lambda h: (h**0.25, math.inf), xi_bounds=lambda h: (-2.0, 2.0),
                  ess_supp_oracle=oracle)


def default_truncation(h: float) -> int:
    return int(math.floor(math.log2(1.0 / h) + 1e-12))


def example2_center(j: int) -> float:
    return 2.0**-j


def example2_radius(j: int) -> float:
    return 2.0 ** (-j - 2)


def example2_symbol(J_rule: Callable[[float], int] = default_truncation) -> Symbol:
    """Truncated Borel sum ``sum_{j <= J(h)} h^j a_j`` with bumps receding to the origin.

    ``a_j`` is a product bump of half-width ``2^{-j-2}`` centred at
    ``(2^{-j}, 0)``; the supports are pairwise disjoint and their distance
    to the origin, ``3 * 2^{-j-2}``, tends to zero.
    """

    def terms(h):
        out = []
        for j in range(J_rule(h) + 1):
            c, r = example2_center(j), example2_radius(j)
            out.append((lambda x, h, j=j, c=c, r=r: h**j * smooth_bump((x - c) / r),
                        lambda xi, h, r=r: smooth_bump(xi / r)))
        return out

    def oracle(x, xi):
        if x == 0 and xi == 0:
            return "in"
        for j in range(64):
            if abs(x - example2_center(j)) <= example2_radius(j) and abs(xi) <= example2_radius(j):
                return "in"
        return "out"

    return Symbol("example2", {"J_rule": getattr(J_rule, "__name__", "custom")},
                  terms=terms,
                  x_bounds=lambda h: (example2_center(J_rule(h)) - example2_radius(J_rule(h)), 1.25),
                  xi_bounds=lambda h: (-0.25, 0.25),
                  ess_supp_oracle=oracle)


CATALOG = {
    "constant": constant,
    "phase_bump": phase_bump,
    "gauss_product": gauss_product,
    "momentum": momentum,
    "modulated_bump": modulated_bump,
    "example1": example1_symbol,
    "example2": example2_symbol,
}


def from_catalog(name: str, **params) -> Symbol:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown symbol {name!r}; choose from {sorted(CATALOG)}") from None
    return factory(**params)


def ball_lattice(r: float, spacing: float):
    """Points ``(k*spacing, l*spacing)`` strictly inside the disc of radius r."""
    n = int(math.floor(r / spacing))
    t = spacing * np.arange(-n, n + 1)
    X, XI = np.meshgrid(t, t, indexing="ij")
    m = X**2 + XI**2 < r**2
    return X[m], XI[m]


def default_spacing(r: float, resolution: int) -> float:
    return 2.0 * r / (resolution - 1)


def sup_on_ball(a: Symbol, r: float, h: float, resolution: int = 128, spacing: float | None = None,
                return_argmax: bool = False):
    """Grid estimate of ``sup_{x^2 + xi^2 < r^2} |a(x, xi; h)|``.

    The lattice is ``spacing * Z^2``; pass a common ``spacing`` when comparing
    radii so that smaller balls use a subset of the nodes of larger ones.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    if resolution < 64:
        raise ValueError("resolution must be at least 64 points per axis")
    if spacing is None:
        spacing = default_spacing(r, resolution)
    X, XI = ball_lattice(r, spacing)
    vals = np.abs(a(X, XI, h))
    k = int(np.argmax(vals))
    if return_argmax:
        return float(vals[k]), (float(X[k]), float(XI[k]))
    return float(vals[k])
