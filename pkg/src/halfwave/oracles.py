"""Independent ground truths: plane-wave solutions and a no-FFT integrator.

Single modes solve every problem in closed form (the nonlinearity
reduces to a constant phase speed), giving exact references.  The
Galerkin reference integrator shares nothing with the production path
except the field type: explicit midpoint in time, direct convolution
sums for the nonlinearity, no integrating factor.  Agreement between
the two paths is evidence, not shared bias.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import TorusField
from .problems import (
    FREE_HALF_WAVE,
    HALF_WAVE,
    HALF_WAVE_GAUGED,
    HALF_WAVE_SCALED,
    SZEGO_PLAIN,
    SZEGO_TRANSPORT,
    EvolutionProblem,
    linear_symbol,
)


@dataclass(frozen=True)
class PlaneWaveSpec:
    """Single-mode initial state c e^{ikx} for a tagged problem."""

    amplitude: complex
    mode: int
    problem: EvolutionProblem

    def __post_init__(self):
        if self.problem.kind in (SZEGO_PLAIN, SZEGO_TRANSPORT) and self.mode < 0:
            raise ValueError("Szego problems require a nonnegative mode")


def plane_wave_frequency(spec: PlaneWaveSpec) -> float:
    """Phase speed: u(t) = c e^{ikx} e^{-i omega t}."""
    k, c, p = spec.mode, spec.amplitude, spec.problem
    a2 = abs(c) ** 2
    if p.kind == HALF_WAVE:
        return abs(k) + a2
    if p.kind == HALF_WAVE_SCALED:
        return abs(k) + p.eps**2 * a2
    if p.kind == HALF_WAVE_GAUGED:
        return abs(k) + p.eps**2 * (a2 - 2.0 * p.q0)
    if p.kind == SZEGO_PLAIN:
        return a2
    if p.kind == SZEGO_TRANSPORT:
        return k + p.eps**2 * (a2 - 2.0 * p.q0)
    if p.kind == FREE_HALF_WAVE:
        return abs(k)
    raise ValueError(f"unknown problem kind {p.kind!r}")


def plane_wave_solution(spec: PlaneWaveSpec, t: float, grid) -> TorusField:
    omega = plane_wave_frequency(spec)
    return TorusField.from_modes(
        grid, {spec.mode: spec.amplitude * np.exp(-1j * omega * t)}
    )


def _convolve_cubic(a: np.ndarray, b: np.ndarray, c: np.ndarray, n: int) -> np.ndarray:
    """Band coefficients of a * conj(b) * c by direct convolution sums."""
    ac = np.convolve(a, c)                      # modes -2N .. 2N
    full = np.convolve(ac, np.conj(b)[::-1])    # modes -3N .. 3N
    return full[2 * n: 4 * n + 1]


def galerkin_reference(
    problem: EvolutionProblem, u0: TorusField, t_end: float, dt: float
) -> TorusField:
    """Explicit midpoint with convolution-sum nonlinearity.

    Requires a small grid (the convolution is O(N^2) per evaluation) and
    a step resolving the fastest linear frequency, dt <= 0.1 / N.
    """
    n = u0.grid.max_mode
    if n > 32:
        raise ValueError("galerkin_reference is restricted to max_mode <= 32")
    if dt > 0.1 / n:
        raise ValueError(f"dt must resolve the linear frequency: dt <= {0.1 / n}")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")

    symbol = linear_symbol(problem, u0.grid)
    kind = problem.kind
    eps2 = problem.eps**2 if problem.eps is not None else None
    plus = u0.grid.modes() >= 0

    def deriv(c):
        if kind == FREE_HALF_WAVE:
            nl = 0.0
        else:
            cubic = _convolve_cubic(c, c, c, n)
            if kind == HALF_WAVE:
                nl = cubic
            elif kind == HALF_WAVE_SCALED:
                nl = eps2 * cubic
            elif kind == HALF_WAVE_GAUGED:
                nl = eps2 * (cubic - 2.0 * problem.q0 * c)
            elif kind == SZEGO_PLAIN:
                nl = np.where(plus, cubic, 0.0)
            elif kind == SZEGO_TRANSPORT:
                nl = eps2 * (np.where(plus, cubic, 0.0) - 2.0 * problem.q0 * c)
            else:
                raise ValueError(f"unknown problem kind {kind!r}")
        return -1j * (symbol * c + nl)

    n_steps = max(1, int(np.ceil(t_end / dt - 1e-12))) if t_end > 0 else 0
    h = t_end / n_steps if n_steps else 0.0
    c = u0.coeff.copy()
    for _ in range(n_steps):
        half = c + 0.5 * h * deriv(c)
        c = c + h * deriv(half)
        if not np.all(np.isfinite(c)):
            raise RuntimeError("galerkin_reference: non-finite state")
    return TorusField(u0.grid, c)
