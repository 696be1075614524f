"""Transfer frequency over a (well width, separation) grid and the distance fit."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cmt import CMTSystem, transfer_metrics
from .coupling import coupling_coefficients
from .device import CouplerSpec, WaveguideSpec, channel_wavevector
from .errors import (ConfigError, InsufficientPoints, ModeNotFound, NoModesFound,
                     NonPositiveFrequency, ZeroCoupling)
from .quantities import V_F_NM_S, energy_from_wavevector

OK = "ok"
NO_MODES = "NoModes"
ZERO_COUPLING = "ZeroCoupling"


def _strictly_ascending(values) -> bool:
    return len(values) > 0 and all(b > a for a, b in zip(values[:-1], values[1:]))


@dataclass(frozen=True)
class SweepGrid:
    d_values: tuple
    D_values: tuple
    base_spec: CouplerSpec
    mode_pair: tuple = (1, 1)
    fixed_energy: bool = False

    def __post_init__(self):
        object.__setattr__(self, "d_values", tuple(float(v) for v in self.d_values))
        object.__setattr__(self, "D_values", tuple(float(v) for v in self.D_values))
        for name in ("d_values", "D_values"):
            if not _strictly_ascending(getattr(self, name)):
                raise ConfigError(f"{name} must be non-empty and strictly ascending")


@dataclass(frozen=True)
class SweepCell:
    d: float
    D: float
    fT: float = math.nan
    L: float = math.nan
    coupling_energy_meV: float = math.nan
    status: str = OK


@dataclass
class SweepResult:
    grid: SweepGrid
    cells: list = field(default_factory=list)

    def row(self, d: float) -> list:
        return [c for c in self.cells if c.d == d]


@dataclass(frozen=True)
class ExponentialFit:
    omega0: float     # nm^-1
    gamma: float      # nm^-1
    r_squared: float


def cell_spec(base: CouplerSpec, d: float, D: float, fixed_energy: bool = False) -> CouplerSpec:
    """Spec for one grid cell: both wells of width ``d`` at separation ``D``.

    Unless ``fixed_energy`` is set, the energy is re-derived so that the
    product k1 * d of the base spec is preserved.
    """
    E = base.electron_energy_E
    if not fixed_energy and d != base.source.width_d:
        k1d = channel_wavevector(base, "source") * base.source.width_d
        E = energy_from_wavevector(k1d / d, base.source.gate_potential_V)
    return CouplerSpec(
        WaveguideSpec(d, base.source.gate_potential_V, base.source.label),
        WaveguideSpec(d, base.drain.gate_potential_V, base.drain.label),
        D, base.barrier_V0, E, base.barrier_mass_ratio,
    )


def evaluate_cell(base: CouplerSpec, d: float, D: float, mode_pair=(1, 1), fixed_energy=False) -> SweepCell:
    try:
        spec = cell_spec(base, d, D, fixed_energy)
        result = coupling_coefficients(spec, *mode_pair)
        metrics = transfer_metrics(CMTSystem.from_coupling(result).symmetrized())
    except (NoModesFound, ModeNotFound):
        return SweepCell(d, D, status=NO_MODES)
    except ZeroCoupling:
        return SweepCell(d, D, status=ZERO_COUPLING)
    return SweepCell(d, D, metrics.transition_frequency_fT, metrics.transfer_length_L,
                     result.coupling_energy_meV)


def _evaluate_job(job):
    return evaluate_cell(*job)


def sweep_grid(grid: SweepGrid, workers: int = 1) -> SweepResult:
    """Evaluate every cell; output order is row-major in (d, D).

    ``workers > 1`` fans the cells out over a process pool; results land in
    pre-indexed slots so the schedule cannot affect the output.
    """
    jobs = [(grid.base_spec, d, D, tuple(grid.mode_pair), grid.fixed_energy)
            for d in grid.d_values for D in grid.D_values]
    slots = [None] * len(jobs)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_evaluate_job, job): i for i, job in enumerate(jobs)}
            for fut, i in futures.items():
                slots[i] = fut.result()
    else:
        for i, job in enumerate(jobs):
            slots[i] = _evaluate_job(job)
    return SweepResult(grid, slots)


def fit_exponential(D_values, fT_values) -> ExponentialFit:
    """Least-squares fit of ln fT = ln(2 v_F omega0 / pi) - gamma D."""
    D = np.asarray(D_values, dtype=float)
    fT = np.asarray(fT_values, dtype=float)
    if D.shape != fT.shape:
        raise ConfigError("D and fT must have the same length")
    if D.size < 3:
        raise InsufficientPoints(f"need at least 3 points, got {D.size}")
    if np.any(~(fT > 0)):
        raise NonPositiveFrequency("all transition frequencies must be positive")
    y = np.log(fT)
    Dm, ym = D.mean(), y.mean()
    sxx = np.sum((D - Dm) ** 2)
    if sxx == 0:
        raise ConfigError("D values must not all coincide")
    slope = np.sum((D - Dm) * (y - ym)) / sxx
    intercept = ym - slope * Dm
    ss_res = np.sum((y - intercept - slope * D) ** 2)
    ss_tot = np.sum((y - ym) ** 2)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ExponentialFit(
        omega0=math.pi * math.exp(intercept) / (2.0 * V_F_NM_S),
        gamma=float(-slope),
        r_squared=float(min(max(r2, 0.0), 1.0)),
    )
