"""Uniform 1D sampling, the semiclassical Fourier transform and L2 geometry.

Spatial samples live at ``x_k = -L + 2 L k / N``.  At semiclassical
parameter ``h`` the dual frequency grid is ``xi_m = m * pi * h / L`` for
``m = -N/2 .. N/2 - 1``.  With these conventions

    F_h u(xi_m) = (2 pi h)^{-1/2} dx sum_k u_k exp(-i x_k xi_m / h)
                = (2 pi h)^{-1/2} dx (-1)^m FFT(u)[m]

so the transform is exactly unitary between the two trapezoid-weighted
sample spaces.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

TRUNCATION_TOL = 1e-12


class AliasingWarning(UserWarning):
    """A state is not contained in the central half of its grid."""


@dataclass(frozen=True)
class SpatialGrid:
    half_width: float
    num_points: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        n = int(self.num_points)
        if n < 8 or n & (n - 1):
            raise ValueError(f"num_points must be a power of two >= 8, got {self.num_points}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.num_points

    @property
    def x(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.num_points)

    def dxi(self, h: float) -> float:
        return math.pi * h / self.half_width

    def xi(self, h: float) -> np.ndarray:
        m = np.arange(-self.num_points // 2, self.num_points // 2)
        return m * self.dxi(h)

    def xi_max(self, h: float) -> float:
        """Upper edge of the dual grid, ``pi h N / (2 L)``."""
        return math.pi * h * self.num_points / (2.0 * self.half_width)


@dataclass(frozen=True)
class WaveFunction:
    """Samples of one member ``u(h)`` of a family, in position or frequency space."""

    grid: SpatialGrid
    h: float
    samples: np.ndarray = field(repr=False)
    space: str = "x"

    def __post_init__(self):
        if not 0 < self.h < 1:
            raise ValueError(f"h must lie in (0, 1), got {self.h}")
        s = np.asarray(self.samples, dtype=complex)
        if s.shape != (self.grid.num_points,):
            raise ValueError(f"expected {self.grid.num_points} samples, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples contain NaN or Inf")
        if self.space not in ("x", "xi"):
            raise ValueError(f"space must be 'x' or 'xi', got {self.space!r}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def weight(self) -> float:
        return self.grid.dx if self.space == "x" else self.grid.dxi(self.h)

    @property
    def points(self) -> np.ndarray:
        return self.grid.x if self.space == "x" else self.grid.xi(self.h)

    def truncation_ratio(self) -> float:
        """Fraction of the L2 norm carried outside the central half of the grid."""
        p = self.points
        half = self.grid.half_width / 2 if self.space == "x" else self.grid.xi_max(self.h) / 2
        outside = np.abs(p) > half
        total = np.sum(np.abs(self.samples) ** 2)
        if total == 0:
            return 0.0
        return float(np.sqrt(np.sum(np.abs(self.samples[outside]) ** 2) / total))

    def truncated(self) -> bool:
        return self.truncation_ratio() > TRUNCATION_TOL


def make_grid(L: float, N: int) -> SpatialGrid:
    return SpatialGrid(float(L), int(N))


def next_pow2(n: float) -> int:
    return 1 << max(3, math.ceil(math.log2(max(n, 8))))


def grid_for(h: float, x_extent: float, xi_extent: float, oversample: float = 4.0,
             max_dx: float | None = None) -> SpatialGrid:
    """Smallest power-of-two grid with ``[-x_extent, x_extent]`` inside its central half.

    The dual grid is made to cover ``[-xi_extent, xi_extent]`` with ``oversample``
    headroom, i.e. ``N >= oversample * xi_extent * L / (pi h)``.
    """
    L = 2.0 * x_extent
    n = oversample * xi_extent * L / (math.pi * h)
    if max_dx is not None:
        n = max(n, 2.0 * L / max_dx)
    return SpatialGrid(L, next_pow2(n))


def _sign(n: int) -> np.ndarray:
    m = np.arange(-n // 2, n // 2)
    return np.where(m % 2 == 0, 1.0, -1.0)


def hfourier_forward(u: WaveFunction) -> WaveFunction:
    if u.space != "x":
        raise ValueError("hfourier_forward expects a position-space WaveFunction")
    if u.truncated():
        warnings.warn(f"state not contained in central half of grid (ratio {u.truncation_ratio():.2e})",
                      AliasingWarning, stacklevel=2)
    g, h = u.grid, u.h
    c = g.dx / math.sqrt(2.0 * math.pi * h)
    v = c * _sign(g.num_points) * np.fft.fftshift(np.fft.fft(u.samples))
    return WaveFunction(g, h, v, space="xi")


def hfourier_inverse(v: WaveFunction) -> WaveFunction:
    if v.space != "xi":
        raise ValueError("hfourier_inverse expects a frequency-space WaveFunction")
    g, h = v.grid, v.h
    c = g.dxi(h) * g.num_points / math.sqrt(2.0 * math.pi * h)
    u = c * np.fft.ifft(np.fft.ifftshift(_sign(g.num_points) * v.samples))
    return WaveFunction(g, h, u, space="x")


def l2_inner(u: WaveFunction, v: WaveFunction) -> complex:
    """Trapezoid approximation of ``int u conj(v)``."""
    if u.grid != v.grid or u.h != v.h or u.space != v.space:
        raise ValueError("l2_inner: grid, h or space mismatch")
    return complex(np.vdot(v.samples, u.samples) * u.weight)


def l2_norm(u: WaveFunction) -> float:
    return float(np.sqrt(np.sum(np.abs(u.samples) ** 2) * u.weight))
