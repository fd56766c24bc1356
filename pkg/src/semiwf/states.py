"""Window profiles, coherent states and WKB states."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import make_interp_spline

from semiwf.grid import SpatialGrid, WaveFunction

BUMP_HAT_RESOLUTION = 2**16
_PI_QUARTER = math.pi ** -0.25


def smooth_bump(t):
    """``exp(1 - 1/(1 - t^2))`` on ``|t| < 1``, zero elsewhere; equals 1 at 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = np.abs(t) < 1
    out[m] = np.exp(1.0 - 1.0 / (1.0 - t[m] ** 2))
    return out


def flat_step(t):
    """Smooth step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    f = lambda s: np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    a, b = f(t), f(1.0 - t)
    return a / (a + b)


def plateau_cutoff(x, inner: float = 0.5, outer: float = 1.0):
    """Equals 1 on ``|x| <= inner``, 0 on ``|x| >= outer``, smooth in between."""
    return flat_step((outer - np.abs(np.asarray(x, dtype=float))) / (outer - inner))


@lru_cache(maxsize=None)
def _bump_hat_table(resolution: int):
    # unit-radius profile; tail at |x| = 1600 is ~exp(-57)
    dx = 0.05
    x = (np.arange(resolution) - resolution // 2) * dx
    xi = 2 * math.pi * np.fft.fftshift(np.fft.fftfreq(resolution, d=dx))
    what = smooth_bump(xi) / math.e
    # w(x_k) = (2 pi)^{-1/2} dxi sum_j what_j exp(i x_k xi_j); both grids start at -M/2
    vals = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(what))) * resolution
    vals = (vals * (xi[1] - xi[0]) / math.sqrt(2 * math.pi)).real
    half = resolution // 2
    spline = make_interp_spline(x[half:], vals[half:], k=7)
    return spline, float(x[-1])


@dataclass(frozen=True)
class Window:
    """Schwartz profile used to build coherent states.

    ``bump_hat`` has Fourier transform ``exp(-1/(1-(xi/rho)^2))`` on
    ``|xi| < rho`` (nonnegative, compactly supported); ``gaussian`` has
    transform ``(pi rho^2)^{-1/4} exp(-xi^2/(2 rho^2))`` and is L2-normalized,
    so ``rho = 1`` gives the self-dual ``pi^{-1/4} exp(-x^2/2)``.
    """

    kind: str = "bump_hat"
    rho: float = 1.0
    resolution: int = BUMP_HAT_RESOLUTION

    def __post_init__(self):
        if self.kind not in ("bump_hat", "gaussian"):
            raise ValueError(f"unknown window kind {self.kind!r}")
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    @property
    def compact_fourier(self) -> bool:
        return self.kind == "bump_hat"

    def fourier(self, eta):
        eta = np.asarray(eta, dtype=float)
        if self.kind == "gaussian":
            return _PI_QUARTER / math.sqrt(self.rho) * np.exp(-0.5 * (eta / self.rho) ** 2)
        return smooth_bump(eta / self.rho) / math.e

    def spatial(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            return _PI_QUARTER * math.sqrt(self.rho) * np.exp(-0.5 * (self.rho * x) ** 2)
        spline, xmax = _bump_hat_table(self.resolution)
        s = np.abs(x) * self.rho
        out = np.zeros_like(s)
        m = s <= xmax
        out[m] = self.rho * spline(s[m])
        return out

    def fourier_extent(self, tol: float = 1e-22) -> float:
        """Half-width outside which the Fourier profile is below ``tol``."""
        if self.kind == "bump_hat":
            return self.rho
        return self.rho * math.sqrt(-2.0 * math.log(tol))

    def spatial_extent(self, tol: float = 1e-12) -> float:
        """Half-width carrying all but ``tol`` of the L2 norm (relative)."""
        if self.kind == "gaussian":
            return (math.sqrt(-2.0 * math.log(tol)) + 1.0) / self.rho
        # |w(x)| ~ exp(-sqrt(2 rho x)), so tail mass falls below tol at
        # sqrt(2 rho x) ~ -log(tol) + a safety margin
        return (-math.log(tol) + 4.0) ** 2 / (2.0 * self.rho)

    def norm(self) -> float:
        if self.kind == "gaussian":
            return 1.0
        return _bump_hat_norm(self.rho)


@lru_cache(maxsize=None)
def _bump_hat_norm(rho: float) -> float:
    from scipy.integrate import quad

    val, _ = quad(lambda t: (smooth_bump(np.array([t]))[0] / math.e) ** 2, -1, 1, epsabs=1e-15, epsrel=1e-13)
    return math.sqrt(val * rho)


@dataclass(frozen=True)
class TestBump:
    """Nonnegative compactly supported test profile with ``psi(0) = 1``."""

    __test__ = False
    s: float = 0.5

    def __call__(self, x):
        return smooth_bump(np.asarray(x, dtype=float) / self.s)

    spatial = __call__


@dataclass(frozen=True)
class WkbData:
    """Amplitude ``b`` and phase ``Phi`` (Im Phi >= 0) of ``b(x) exp(i Phi(x)/h)``."""

    amplitude: Callable = field(repr=False)
    phase: Callable = field(repr=False)
    dphase: Callable = field(repr=False)
    support: tuple = (-1.0, 1.0)
    name: str = "wkb"

    def b(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.amplitude(x), dtype=complex)
        return np.where((x >= self.support[0]) & (x <= self.support[1]), out, 0.0)


def _check_center(grid: SpatialGrid, x0: float, xi0: float, h: float):
    if abs(x0) >= grid.half_width:
        raise ValueError(f"center x0={x0} outside grid of half width {grid.half_width}")
    if grid.dx > h / (4 * abs(xi0) + 1):
        raise ValueError(f"grid spacing {grid.dx:.3g} does not resolve phase xi0/h (need <= {h / (4 * abs(xi0) + 1):.3g})")


def coherent_state(w: Window, x0: float, xi0: float, h: float, grid: SpatialGrid) -> WaveFunction:
    _check_center(grid, x0, xi0, h)
    x = grid.x
    sh = math.sqrt(h)
    u = h**-0.25 * w.spatial((x - x0) / sh) * np.exp(1j * x * (xi0 / h))
    return WaveFunction(grid, h, u)


def coherent_state_fourier(w: Window, x0: float, xi0: float, h: float, grid: SpatialGrid) -> WaveFunction:
    """Closed form of the semiclassical transform of ``coherent_state``."""
    _check_center(grid, x0, xi0, h)
    xi = grid.xi(h)
    v = h**-0.25 * w.fourier((xi - xi0) / math.sqrt(h)) * np.exp(1j * x0 * (xi0 - xi) / h)
    return WaveFunction(grid, h, v, space="xi")


def wkb_state(d: WkbData, h: float, grid: SpatialGrid) -> WaveFunction:
    x = grid.x
    inside = (x >= d.support[0]) & (x <= d.support[1])
    phi = np.asarray(d.phase(x), dtype=complex)
    if np.any(phi.imag[inside] < -1e-14):
        raise ValueError("phase has negative imaginary part on the amplitude support")
    slope = np.max(np.abs(np.asarray(d.dphase(x[inside]), dtype=complex).real), initial=0.0)
    if grid.dx * slope / h > 0.25:
        raise ValueError(f"grid does not resolve the phase: dx*max|Re Phi'|/h = {grid.dx * slope / h:.3g}")
    b = d.b(x)
    u = np.zeros_like(b)
    u[inside] = b[inside] * np.exp(1j * phi[inside] / h)
    return WaveFunction(grid, h, u)


def wkb_catalog(name: str) -> WkbData:
    """Named WKB examples used by the experiments."""
    if name == "real_quadratic":
        return WkbData(lambda x: smooth_bump(x), lambda x: 0.5 * x**2 + 0j, lambda x: x + 0j, (-1.0, 1.0), name)
    if name == "linear":
        return WkbData(lambda x: smooth_bump(x), lambda x: 1.0 * x + 0j, lambda x: np.ones_like(x) + 0j, (-1.0, 1.0), name)
    if name == "imag_flat":
        # b = exp(-1/x^2) near 0: vanishes to infinite order where Im Phi = 0
        def amp(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore", over="ignore"):
                e = np.where(x != 0, np.exp(-1.0 / np.where(x != 0, x, 1.0) ** 2), 0.0)
            return e * plateau_cutoff(x)
        return WkbData(amp, lambda x: 1j * x**2, lambda x: 2j * x, (-1.0, 1.0), name)
    if name == "imag_quadratic":
        return WkbData(lambda x: x**2 * plateau_cutoff(x), lambda x: 1j * x**2, lambda x: 2j * x, (-1.0, 1.0), name)
    if name == "imag_bump":
        return WkbData(lambda x: smooth_bump(x), lambda x: 1j * x**2, lambda x: 2j * x, (-1.0, 1.0), name)
    raise KeyError(f"unknown WKB example {name!r}")
