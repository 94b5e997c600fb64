import numpy as np
import pytest

from halfwave import (
    EvolutionProblem,
    TorusField,
    default_time_step,
    energy,
    gauge_transform,
    norm,
    rhs,
)
from halfwave.norms import SOBOLEV
from halfwave.problems import linear_symbol

from conftest import random_field


def test_problem_validation():
    with pytest.raises(ValueError):
        EvolutionProblem.half_wave_scaled(0.0)
    with pytest.raises(ValueError):
        EvolutionProblem.half_wave_gauged(0.1, -1.0)
    with pytest.raises(ValueError):
        EvolutionProblem("half_wave", eps=0.1)
    # transport with eps=1, q0=0 is the plain transport-form equation
    EvolutionProblem.szego_transport()


def test_linear_symbols(grid16):
    k = grid16.modes()
    assert np.array_equal(linear_symbol(EvolutionProblem.half_wave(), grid16), np.abs(k))
    assert np.array_equal(linear_symbol(EvolutionProblem.szego_transport(), grid16), k)
    assert np.all(linear_symbol(EvolutionProblem.szego_plain(), grid16) == 0)


class TestRhs:
    def test_half_wave_plane_wave(self, grid16):
        c, k = 0.5 + 0.1j, 2
        u = TorusField.from_modes(grid16, {k: c})
        out = rhs(EvolutionProblem.half_wave(), u)
        assert out.mode(k) == pytest.approx(-1j * (abs(k) + abs(c) ** 2) * c)

    def test_szego_plane_wave(self, grid16):
        c, k = 0.3, 4
        u = TorusField.from_modes(grid16, {k: c})
        out = rhs(EvolutionProblem.szego_plain(), u)
        assert out.mode(k) == pytest.approx(-1j * abs(c) ** 2 * c)

    def test_free_flow_is_linear(self, grid16, rng):
        u = random_field(grid16, rng)
        out = rhs(EvolutionProblem.free_half_wave(), u)
        want = -1j * np.abs(grid16.modes()) * u.coeff
        assert np.allclose(out.coeff, want, atol=1e-14)

    def test_szego_rhs_is_analytic(self, grid16, rng):
        u = random_field(grid16, rng)
        out = rhs(EvolutionProblem.szego_plain(), u)
        n = grid16.max_mode
        assert np.all(out.coeff[:n] == 0)


class TestEnergy:
    def test_half_wave_single_mode(self, grid16):
        eps = 0.25
        u = TorusField.from_modes(grid16, {1: eps})
        assert energy(EvolutionProblem.half_wave(), u) == pytest.approx(
            0.5 * eps**2 + 0.25 * eps**4
        )

    def test_free_energy_quadratic(self, grid16, rng):
        u = random_field(grid16, rng)
        k = grid16.modes()
        want = 0.5 * float(np.sum(np.abs(k) * np.abs(u.coeff) ** 2))
        assert energy(EvolutionProblem.free_half_wave(), u) == pytest.approx(want)

    def test_gauged_energy_matches_quadrature(self, grid16):
        eps = 0.3
        u = TorusField.from_modes(grid16, {0: eps, 1: eps})
        q = 2 * eps**2
        # H0 + eps^2 (L4^4 - 2 Q^2)/4 with L4^4 = 6 eps^4 by hand
        want = 0.5 * eps**2 + eps**2 * 0.25 * (6 * eps**4 - 2 * q**2)
        got = energy(EvolutionProblem.half_wave_gauged(eps, q), u)
        assert got == pytest.approx(want, rel=1e-12)


def test_gauge_transform_phase(grid16, rng):
    u = random_field(grid16, rng)
    assert gauge_transform(u, 0.0, 0.2, 1.0) == u
    moved = gauge_transform(u, 2.0, 0.2, 1.5)
    for s in (-0.5, 0.5, 1.5):
        assert norm(moved, SOBOLEV, s=s) == pytest.approx(norm(u, SOBOLEV, s=s))
    phase = np.exp(2j * 2.0 * 0.2**2 * 1.5)
    assert np.allclose(moved.coeff, phase * u.coeff)


def test_default_time_step_scales_with_eps(grid16):
    u = TorusField.from_modes(grid16, {1: 1.0, 0: 0.5})
    small = default_time_step(EvolutionProblem.half_wave_scaled(0.01), u)
    assert small == pytest.approx(0.01)
    big_coupling = default_time_step(EvolutionProblem.half_wave_scaled(10.0), u)
    assert big_coupling < 0.01
