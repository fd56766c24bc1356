"""Numerical semiclassical wavefront-set toolkit (one space dimension)."""

from semiwf.grid import SpatialGrid, WaveFunction, make_grid, hfourier_forward, hfourier_inverse, l2_inner, l2_norm
from semiwf.states import Window, TestBump, WkbData, coherent_state, coherent_state_fourier, wkb_state
from semiwf.symbols import Symbol, eval_symbol, example1_symbol, example2_symbol, sup_on_ball

__all__ = [
    "SpatialGrid",
    "WaveFunction",
    "make_grid",
    "hfourier_forward",
    "hfourier_inverse",
    "l2_inner",
    "l2_norm",
    "Window",
    "TestBump",
    "WkbData",
    "coherent_state",
    "coherent_state_fourier",
    "wkb_state",
    "Symbol",
    "eval_symbol",
    "example1_symbol",
    "example2_symbol",
    "sup_on_ball",
]

__version__ = "0.1.0"
