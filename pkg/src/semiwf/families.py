"""Families ``h -> u(h)`` on automatically sized grids."""

from __future__ import annotations

import math
from dataclasses import dataclass

from semiwf.grid import WaveFunction, grid_for
from semiwf.states import Window, WkbData, coherent_state, wkb_state

MAX_POINTS = 2**23


def _check_budget(g):
    if g.num_points > MAX_POINTS:
        raise ValueError(f"grid of {g.num_points} points exceeds budget {MAX_POINTS}")
    return g


@dataclass(frozen=True)
class CoherentFamily:
    """``h -> scale(h) * phi_{x0, xi0, h}``; ``xi_extent`` widens the dual grid for scans."""

    window: Window
    x0: float
    xi0: float
    xi_extent: float = 0.0
    power: float = 0.0
    x_cover: float = 0.0
    tol: float = 1e-12

    def grid(self, h):
        sh = math.sqrt(h)
        xe = max(abs(self.x0) + self.window.spatial_extent(self.tol) * sh, (self.x_cover + 10 * sh) / 2)
        xie = max(self.xi_extent, abs(self.xi0) + self.window.fourier_extent() * sh)
        return _check_budget(grid_for(h, xe, xie, max_dx=h / (4 * abs(self.xi0) + 1)))

    def __call__(self, h) -> WaveFunction:
        u = coherent_state(self.window, self.x0, self.xi0, h, self.grid(h))
        if self.power:
            u = WaveFunction(u.grid, h, h**self.power * u.samples)
        return u


@dataclass(frozen=True)
class WkbFamily:
    data: WkbData
    xi_extent: float = 3.0
    slope_bound: float = 1.0
    points_per_scale: int = 64
    x_cover: float = 0.0

    def grid(self, h):
        lo, hi = self.data.support
        xe = max(abs(lo), abs(hi), (self.x_cover + 10 * math.sqrt(h)) / 2)
        max_dx = min(h / (4 * max(self.slope_bound, 1e-300)), math.sqrt(h) / self.points_per_scale)
        return _check_budget(grid_for(h, xe, self.xi_extent, max_dx=max_dx))

    def __call__(self, h) -> WaveFunction:
        return wkb_state(self.data, h, self.grid(h))
