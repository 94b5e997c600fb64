"""Elementary spectral operators: projections, multipliers, dealiased products.

Conventions: the inner product is (u|v) = (1/2pi) int u conj(v) dx, so
Parseval is coefficient-wise, (u|v) = sum_k u_k conj(v_k), and single
modes e^{ikx} have unit L2 norm.  The analytic projection keeps modes
k >= 0 (the k = 0 mode belongs to the plus part).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .fields import GridSpec, TorusField

ABS_D = "abs_d"
DERIVATIVE = "d"
INVERT_D0 = "d0_inv"

_MULTIPLIERS = (ABS_D, DERIVATIVE, INVERT_D0)


@lru_cache(maxsize=None)
def _padded_slots(grid: GridSpec) -> np.ndarray:
    """Positions of band modes inside the padded spectrum (k mod M)."""
    return np.asarray(grid.modes() % grid.padded_len)


def to_grid_values(f: TorusField) -> np.ndarray:
    """Values of f at the padded quadrature points x_j = 2 pi j / M."""
    grid = f.grid
    padded = np.zeros(grid.padded_len, dtype=np.complex128)
    padded[_padded_slots(grid)] = f.coeff
    return np.fft.ifft(padded) * grid.padded_len


def from_grid_values(grid: GridSpec, values: np.ndarray) -> TorusField:
    """Band coefficients of a function sampled on the padded grid.

    Exact whenever the sampled function is a trigonometric polynomial of
    degree < padded_len - max_mode (no aliased copy reaches the band).
    """
    spectrum = np.fft.fft(values) / grid.padded_len
    return TorusField(grid, spectrum[_padded_slots(grid)])


def grid_mean(values: np.ndarray) -> complex:
    """Quadrature for (1/2pi) int g dx on the padded grid (exact for
    trigonometric polynomials of degree < padded_len)."""
    return complex(np.mean(values))


def inner(f: TorusField, g: TorusField) -> complex:
    """(f|g) = sum_k f_k conj(g_k)."""
    f._check_grid(g)
    return complex(np.vdot(g.coeff, f.coeff))


def project_plus(f: TorusField) -> TorusField:
    """Keep modes k >= 0 (analytic part)."""
    coeff = f.coeff.copy()
    coeff[: f.grid.max_mode] = 0.0
    return TorusField(f.grid, coeff)


def project_minus(f: TorusField) -> TorusField:
    """Keep modes k < 0; complements project_plus."""
    coeff = f.coeff.copy()
    coeff[f.grid.max_mode:] = 0.0
    return TorusField(f.grid, coeff)


def apply_multiplier(f: TorusField, which: str) -> TorusField:
    """Fourier multiplier: |k| (abs_d), k (d), or 1/k with k=0 zeroed (d0_inv)."""
    k = f.grid.modes()
    if which == ABS_D:
        return TorusField(f.grid, f.coeff * np.abs(k))
    if which == DERIVATIVE:
        return TorusField(f.grid, f.coeff * k)
    if which == INVERT_D0:
        inv = np.zeros_like(k, dtype=np.float64)
        nonzero = k != 0
        inv[nonzero] = 1.0 / k[nonzero]
        return TorusField(f.grid, f.coeff * inv)
    raise ValueError(f"unknown multiplier {which!r}, expected one of {_MULTIPLIERS}")


def conjugate(f: TorusField) -> TorusField:
    """The function conj(f): coefficients conj(f_{-k})."""
    return TorusField(f.grid, np.conj(f.coeff[::-1]))


def reflect(f: TorusField) -> TorusField:
    """The function f(-x): coefficients f_{-k}."""
    return TorusField(f.grid, f.coeff[::-1])


def product(f: TorusField, g: TorusField) -> TorusField:
    """Exact band coefficients of the pointwise product f*g (degree <= 2N)."""
    f._check_grid(g)
    return from_grid_values(f.grid, to_grid_values(f) * to_grid_values(g))


def triple_product(f: TorusField, g: TorusField, h: TorusField) -> TorusField:
    """Exact band coefficients of the pointwise product f*g*h.

    Computed in a single pass on the padded grid; the product has degree
    <= 3N < padded_len - N, so the retained band is alias-free.
    """
    f._check_grid(g)
    f._check_grid(h)
    vals = to_grid_values(f) * to_grid_values(g) * to_grid_values(h)
    return from_grid_values(f.grid, vals)


def cubic_term(a: TorusField, b: TorusField, c: TorusField) -> TorusField:
    """Band coefficients of a * conj(b) * c (the cubic nonlinearity).

    Conjugate-linear in the second argument, linear in the first and third.
    """
    a._check_grid(b)
    a._check_grid(c)
    vals = to_grid_values(a) * np.conj(to_grid_values(b)) * to_grid_values(c)
    return from_grid_values(a.grid, vals)
