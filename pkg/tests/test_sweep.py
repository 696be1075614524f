import math

import numpy as np
import pytest

from graphene_coupler.cmt import CMTSystem, transfer_metrics
from graphene_coupler.coupling import coupling_coefficients
from graphene_coupler.errors import ConfigError, InsufficientPoints, NonPositiveFrequency
from graphene_coupler.modes import modes_for
from graphene_coupler.sweep import NO_MODES, OK, SweepGrid, cell_spec, fit_exponential, sweep_grid


def test_single_cell_matches_direct_pipeline(default_spec):
    result = sweep_grid(SweepGrid((200.0,), (50.0,), default_spec))
    cell = result.cells[0]
    direct = transfer_metrics(CMTSystem.from_coupling(coupling_coefficients(default_spec, 1, 1)).symmetrized())
    assert cell.status == OK
    assert cell.fT == direct.transition_frequency_fT
    assert cell.L == direct.transfer_length_L


def test_cell_spec_keeps_k1d(default_spec):
    spec = cell_spec(default_spec, 300.0, 40.0)
    k1 = (spec.electron_energy_E - spec.source.gate_potential_V) / 658.2119569
    assert k1 * 300 == pytest.approx(4.96 * math.pi, rel=1e-12)
    fixed = cell_spec(default_spec, 300.0, 40.0, fixed_energy=True)
    assert fixed.electron_energy_E == default_spec.electron_energy_E
    assert cell_spec(default_spec, 200.0, 50.0) == default_spec


def test_fT_falls_with_separation(default_spec):
    result = sweep_grid(SweepGrid((200.0,), np.arange(30.0, 101.0, 10.0), default_spec))
    fT = [c.fT for c in result.cells]
    assert all(a > b for a, b in zip(fT, fT[1:]))


def test_sweep_fit_quality(default_spec):
    Ds = np.arange(30.0, 101.0, 5.0)
    cells = sweep_grid(SweepGrid((200.0,), Ds, default_spec)).cells
    fit = fit_exponential(Ds, [c.fT for c in cells])
    assert fit.r_squared > 0.99
    assert fit.gamma > 0


@pytest.mark.xfail(strict=True, reason="overlap carries a D exp(-kappa D) prefactor that biases the slope by ~13%")
def test_sweep_gamma_near_kappa(default_spec):
    Ds = np.arange(30.0, 101.0, 5.0)
    cells = sweep_grid(SweepGrid((200.0,), Ds, default_spec)).cells
    kappa = modes_for(default_spec, "source")[0].kappa
    assert fit_exponential(Ds, [c.fT for c in cells]).gamma == pytest.approx(kappa, rel=0.10)


@pytest.mark.xfail(strict=True, reason="scalar matching gives L ~ 12700 nm, a factor ~19 above 654 nm")
def test_default_fT_order_of_magnitude(default_spec):
    cell = sweep_grid(SweepGrid((200.0,), (50.0,), default_spec)).cells[0]
    assert 1.53e12 / 5 <= cell.fT <= 1.53e12 * 5


@pytest.mark.parametrize("omega0, gamma", [(0.02, 0.05), (1e-3, 0.011), (0.3, 0.2)])
def test_fit_recovers_synthetic(omega0, gamma):
    D = np.linspace(30, 100, 15)
    fT = 2 * 1e15 * omega0 / math.pi * np.exp(-gamma * D)
    fit = fit_exponential(D, fT)
    assert fit.omega0 == pytest.approx(omega0, rel=1e-10)
    assert fit.gamma == pytest.approx(gamma, rel=1e-10)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_errors():
    with pytest.raises(InsufficientPoints):
        fit_exponential([1, 2], [1e12, 1e11])
    with pytest.raises(NonPositiveFrequency):
        fit_exponential([1, 2, 3], [1e12, 0.0, 1e10])
    with pytest.raises(NonPositiveFrequency):
        fit_exponential([1, 2, 3], [1e12, math.nan, 1e10])


def test_soft_failures_are_isolated(default_spec):
    grid = SweepGrid((1.0, 200.0), (40.0, 50.0), default_spec, mode_pair=(2, 2), fixed_energy=True)
    result = sweep_grid(grid)
    assert [c.status for c in result.row(1.0)] == [NO_MODES, NO_MODES]
    assert all(math.isnan(c.fT) for c in result.row(1.0))
    alone = sweep_grid(SweepGrid((200.0,), (40.0, 50.0), default_spec, mode_pair=(2, 2), fixed_energy=True))
    assert repr(result.row(200.0)) == repr(alone.cells)


@pytest.mark.parametrize("d, D", [((200.0, 100.0), (50.0,)), ((200.0,), ()), ((200.0,), (50.0, 50.0))])
def test_axes_must_ascend(default_spec, d, D):
    with pytest.raises(ConfigError):
        SweepGrid(d, D, default_spec)


def test_serial_equals_parallel(default_spec):
    grid = SweepGrid((150.0, 200.0, 250.0), (30.0, 50.0, 70.0), default_spec)
    assert repr(sweep_grid(grid, workers=1).cells) == repr(sweep_grid(grid, workers=3).cells)
