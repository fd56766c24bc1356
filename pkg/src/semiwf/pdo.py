"""Quantizations ``Op_{t,h}(a)`` applied to sampled states.

``apply_op_t1`` and ``apply_op_t0`` use the separable decomposition of the
symbol (``f(x) g(xi)`` terms) and cost O(N log N) per term; pass
``method="reference"`` for the row-by-row O(N^2) evaluation, which only
uses pointwise symbol values.  ``apply_op_general`` is the direct double
sum for arbitrary ``t`` and is restricted to small grids.
"""

from __future__ import annotations

import math

import numpy as np

from semiwf.grid import WaveFunction, _sign, hfourier_forward, hfourier_inverse
from semiwf.symbols import Symbol

GENERAL_MAX_POINTS = 2048
_ROW_CHUNK = 64


def _fast(a: Symbol, u: WaveFunction, t: int) -> WaveFunction:
    g, h = u.grid, u.h
    x, xi = g.x, g.xi(h)
    out = np.zeros(g.num_points, dtype=complex)
    if t == 1:
        v = hfourier_forward(u).samples
        for f, gx in a.terms(h):
            w = WaveFunction(g, h, np.asarray(gx(xi, h)) * v, space="xi")
            out += np.asarray(f(x, h)) * hfourier_inverse(w).samples
    else:
        for f, gx in a.terms(h):
            fu = WaveFunction(g, h, np.asarray(f(x, h)) * u.samples)
            v = hfourier_forward(fu).samples * np.asarray(gx(xi, h))
            out += hfourier_inverse(WaveFunction(g, h, v, space="xi")).samples
    return WaveFunction(g, h, out)


def _rows(a: Symbol, u: WaveFunction, rows: np.ndarray | None):
    g = u.grid
    idx = np.arange(g.num_points) if rows is None else np.asarray(rows)
    return idx


def _reference_t1(a: Symbol, u: WaveFunction, rows=None) -> WaveFunction:
    g, h = u.grid, u.h
    n = g.num_points
    x, xi = g.x, g.xi(h)
    v = hfourier_forward(u).samples * _sign(n)
    m = np.arange(-n // 2, n // 2)
    c = g.dxi(h) / math.sqrt(2 * math.pi * h)
    out = np.zeros(n, dtype=complex)
    idx = _rows(a, u, rows)
    for s in range(0, len(idx), _ROW_CHUNK):
        j = idx[s:s + _ROW_CHUNK]
        A = a(x[j][:, None], xi[None, :], h)
        E = np.exp(2j * math.pi * np.outer(j, m) / n)
        out[j] = c * np.sum(A * E * v[None, :], axis=1)
    return WaveFunction(g, h, out)


def _reference_t0(a: Symbol, u: WaveFunction) -> WaveFunction:
    g, h = u.grid, u.h
    n = g.num_points
    x, xi = g.x, g.xi(h)
    k = np.arange(n)
    m = np.arange(-n // 2, n // 2)
    c = g.dx / math.sqrt(2 * math.pi * h)
    v = np.zeros(n, dtype=complex)
    for s in range(0, n, _ROW_CHUNK):
        mm = m[s:s + _ROW_CHUNK]
        A = a(x[None, :], xi[s:s + _ROW_CHUNK][:, None], h)
        E = np.exp(-2j * math.pi * np.outer(mm, k) / n) * np.where(mm % 2 == 0, 1.0, -1.0)[:, None]
        v[s:s + _ROW_CHUNK] = c * np.sum(A * E * u.samples[None, :], axis=1)
    return hfourier_inverse(WaveFunction(g, h, v, space="xi"))


def apply_op_t1(a: Symbol, u: WaveFunction, method: str = "fast") -> WaveFunction:
    """``F_h^{-1}(a(x, xi) F_h u)`` evaluated at each output point x."""
    if method == "fast":
        return _fast(a, u, 1)
    if method == "reference":
        return _reference_t1(a, u)
    raise ValueError(f"unknown method {method!r}")


def apply_op_t0(a: Symbol, u: WaveFunction, method: str = "fast") -> WaveFunction:
    """``F_h^{-1}(F_h(a(y, xi) u(y)))``: multiply before transforming."""
    if method == "fast":
        return _fast(a, u, 0)
    if method == "reference":
        return _reference_t0(a, u)
    raise ValueError(f"unknown method {method!r}")


def apply_op_general(a: Symbol, t: float, u: WaveFunction) -> WaveFunction:
    """Direct double sum of ``a(t x + (1-t) y, xi) exp(i (x-y) xi / h) u(y)``."""
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    g, h = u.grid, u.h
    n = g.num_points
    if n > GENERAL_MAX_POINTS:
        raise ValueError(f"apply_op_general is limited to N <= {GENERAL_MAX_POINTS}, got {n}")
    x, xi = g.x, g.xi(h)
    k = np.arange(n)
    m = np.arange(-n // 2, n // 2)
    sgn = np.where(m % 2 == 0, 1.0, -1.0)
    # exp(-i y_k xi_m / h) and exp(i x_j xi_m / h) via the grid offset identity
    Ey = np.exp(-2j * math.pi * np.outer(k, m) / n) * sgn[None, :]
    c = g.dx * g.dxi(h) / (2 * math.pi * h)
    out = np.empty(n, dtype=complex)
    for j in range(n):
        A = a((t * x[j] + (1 - t) * x)[:, None], xi[None, :], h)
        inner = np.sum(A * Ey * u.samples[:, None], axis=0)
        ex = np.exp(2j * math.pi * j * m / n) * sgn
        out[j] = c * np.sum(inner * ex)
    return WaveFunction(g, h, out)
