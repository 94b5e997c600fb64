"""The evolution problems and their conserved energies.

Six flows share one state type.  Writing L for the linear multiplier and
N(u) for the nonlinearity, each problem is du/dt = -i (L u + N(u)):

  half_wave          i du/dt - |D|u = |u|^2 u
  half_wave_scaled   i du/dt - |D|u = eps^2 |u|^2 u
  half_wave_gauged   i du/dt - |D|u = eps^2 (|u|^2 - 2 q0) u
  szego_plain        i dw/dt       = P_+(|w|^2 w)
  szego_transport    i dv/dt - D v = eps^2 (P_+(|v|^2 v) - 2 q0 v)
  free_half_wave     i du/dt - |D|u = 0

q0 is the conserved squared L2 norm of the initial state entering the
gauge; with eps = 1 and q0 = 0 the transport problem is the plain
transport-form Szego equation.  Each flow conserves its own Hamiltonian
(see energy), the charge Q = ||u||_{L2}^2 and the momentum
sum_k k |u_k|^2; the Szego-type energies are the conserved quantity on
analytic states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import GridSpec, TorusField
from .norms import BESOV, L4, charge, norm
from .operators import cubic_term, project_plus

HALF_WAVE = "half_wave"
HALF_WAVE_SCALED = "half_wave_scaled"
HALF_WAVE_GAUGED = "half_wave_gauged"
SZEGO_PLAIN = "szego_plain"
SZEGO_TRANSPORT = "szego_transport"
FREE_HALF_WAVE = "free_half_wave"

_NEEDS_EPS = {HALF_WAVE_SCALED, HALF_WAVE_GAUGED, SZEGO_TRANSPORT}
_NEEDS_Q0 = {HALF_WAVE_GAUGED, SZEGO_TRANSPORT}


@dataclass(frozen=True)
class EvolutionProblem:
    """Tagged description of which flow a run integrates."""

    kind: str
    eps: float | None = None
    q0: float | None = None

    def __post_init__(self):
        if self.kind in _NEEDS_EPS:
            if self.eps is None or not self.eps > 0:
                raise ValueError(f"{self.kind} requires eps > 0, got {self.eps}")
        elif self.eps is not None:
            raise ValueError(f"{self.kind} does not take eps")
        if self.kind in _NEEDS_Q0:
            if self.q0 is None or self.q0 < 0:
                raise ValueError(f"{self.kind} requires q0 >= 0, got {self.q0}")
        elif self.q0 is not None:
            raise ValueError(f"{self.kind} does not take q0")

    @classmethod
    def half_wave(cls):
        return cls(HALF_WAVE)

    @classmethod
    def half_wave_scaled(cls, eps: float):
        return cls(HALF_WAVE_SCALED, eps=eps)

    @classmethod
    def half_wave_gauged(cls, eps: float, q0: float):
        return cls(HALF_WAVE_GAUGED, eps=eps, q0=q0)

    @classmethod
    def szego_plain(cls):
        return cls(SZEGO_PLAIN)

    @classmethod
    def szego_transport(cls, eps: float = 1.0, q0: float = 0.0):
        return cls(SZEGO_TRANSPORT, eps=eps, q0=q0)

    @classmethod
    def free_half_wave(cls):
        return cls(FREE_HALF_WAVE)


def linear_symbol(problem: EvolutionProblem, grid: GridSpec) -> np.ndarray:
    """Multiplier of the linear part: |k|, k, or 0 per problem."""
    k = grid.modes()
    if problem.kind in (HALF_WAVE, HALF_WAVE_SCALED, HALF_WAVE_GAUGED, FREE_HALF_WAVE):
        return np.abs(k).astype(np.float64)
    if problem.kind == SZEGO_TRANSPORT:
        return k.astype(np.float64)
    if problem.kind == SZEGO_PLAIN:
        return np.zeros_like(k, dtype=np.float64)
    raise ValueError(f"unknown problem kind {problem.kind!r}")


def nonlinear_term(problem: EvolutionProblem, u: TorusField) -> TorusField:
    """The N(u) of the tagged equation (the right-hand side minus L u)."""
    kind = problem.kind
    if kind == FREE_HALF_WAVE:
        return TorusField.zeros(u.grid)
    cubic = cubic_term(u, u, u)
    if kind == HALF_WAVE:
        return cubic
    if kind == HALF_WAVE_SCALED:
        return problem.eps**2 * cubic
    if kind == HALF_WAVE_GAUGED:
        return problem.eps**2 * (cubic - 2.0 * problem.q0 * u)
    if kind == SZEGO_PLAIN:
        return project_plus(cubic)
    if kind == SZEGO_TRANSPORT:
        return problem.eps**2 * (project_plus(cubic) - 2.0 * problem.q0 * u)
    raise ValueError(f"unknown problem kind {kind!r}")


def rhs(problem: EvolutionProblem, u: TorusField) -> TorusField:
    """du/dt = -i (L u + N(u))."""
    lin = linear_symbol(problem, u.grid) * u.coeff
    return TorusField(u.grid, -1j * (lin + nonlinear_term(problem, u).coeff))


def energy(problem: EvolutionProblem, u: TorusField) -> float:
    """The Hamiltonian conserved by the tagged flow.

    half_wave:        (|D|u,u)/2 + ||u||_{L4}^4 / 4
    half_wave_scaled: (|D|u,u)/2 + eps^2 ||u||_{L4}^4 / 4
    half_wave_gauged: (|D|u,u)/2 + eps^2 (||u||_{L4}^4 - 2 ||u||_{L2}^4)/4
    szego_plain:      ||w||_{L4}^4 / 4                       (analytic states)
    szego_transport:  (Dv,v)/2 + eps^2 (||v||_{L4}^4/4 - q0 ||v||_{L2}^2)
    free_half_wave:   (|D|u,u)/2
    """
    k = u.grid.modes()
    abs_quad = float(np.sum(np.abs(k) * np.abs(u.coeff) ** 2))
    kind = problem.kind
    if kind == FREE_HALF_WAVE:
        return 0.5 * abs_quad
    quartic = norm(u, L4) ** 4
    if kind == HALF_WAVE:
        return 0.5 * abs_quad + 0.25 * quartic
    if kind == HALF_WAVE_SCALED:
        return 0.5 * abs_quad + 0.25 * problem.eps**2 * quartic
    if kind == HALF_WAVE_GAUGED:
        q = charge(u)
        return 0.5 * abs_quad + 0.25 * problem.eps**2 * (quartic - 2.0 * q**2)
    if kind == SZEGO_PLAIN:
        return 0.25 * quartic
    if kind == SZEGO_TRANSPORT:
        signed_quad = float(np.sum(k * np.abs(u.coeff) ** 2))
        return 0.5 * signed_quad + problem.eps**2 * (0.25 * quartic - problem.q0 * charge(u))
    raise ValueError(f"unknown problem kind {kind!r}")


def gauge_transform(u: TorusField, t: float, eps: float, q0: float) -> TorusField:
    """Multiply by the phase e^{2 i t eps^2 q0}.

    Maps solutions of the scaled half-wave flow to solutions of the
    gauged flow with the same q0 = ||u(0)||_{L2}^2, and is an isometry
    for every norm in this package.
    """
    return TorusField(u.grid, u.coeff * np.exp(2j * t * eps**2 * q0))


def default_time_step(problem: EvolutionProblem, u0: TorusField) -> float:
    """dt = min(0.01, 0.1 / (eps^2 max(1, ||u0||_{B111}^2))).

    The integrating factor makes the linear phase exact, so the step is
    set by the nonlinear timescale ~ 1/eps^2; unscaled problems use
    eps = 1.
    """
    eps = problem.eps if problem.eps is not None else 1.0
    b = norm(u0, BESOV)
    return min(0.01, 0.1 / (eps**2 * max(1.0, b**2)))
