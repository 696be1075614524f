"""Transverse bound modes of a single graphene well.

The scalar profile ``u`` oscillates inside the well with wavevector ``k_x``
and decays as ``exp(-kappa * distance)`` into the barrier, where the decay
rate follows from the propagation constant ``beta``:

    beta**2  = k_well**2 - k_x**2
    kappa**2 = beta**2 + k0_squared

``k0_squared`` is the signed barrier quantity from
:func:`graphene_coupler.device.barrier_k0_squared`.  Matching ``u`` and
``u'`` at the well edges gives the usual even/odd finite-well conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .device import CouplerGeometry, CouplerSpec, Which, barrier_k0_squared, channel_wavevector
from .errors import ConfigError, NoModesFound, OutOfDomain

N_SCAN = 4096
MAX_SCAN = 2**20
BISECT_RTOL = 1e-12


class Parity(str, Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"


@dataclass(frozen=True)
class DispersionContext:
    well_width_d: float
    k_well: float
    k0_squared: float

    def __post_init__(self):
        if not self.well_width_d > 0:
            raise ConfigError(f"well width must be positive, got {self.well_width_d}")
        if not self.k_well > 0:
            raise ConfigError(f"well wavevector must be positive, got {self.k_well}")
        if not self.k_well**2 + min(self.k0_squared, 0.0) > 0:
            raise NoModesFound("empty confinement window: beta cannot exceed the barrier wavevector")

    @classmethod
    def from_spec(cls, spec: CouplerSpec, which: Which) -> "DispersionContext":
        return cls(spec.waveguide(which).width_d, channel_wavevector(spec, which), barrier_k0_squared(spec))

    @property
    def kx_max(self) -> float:
        """Upper end of the k_x window (kappa -> 0 above the barrier, beta -> 0 below)."""
        return math.sqrt(self.k_well**2 + min(self.k0_squared, 0.0))

    def kappa_squared(self, k_x):
        return self.k_well**2 - np.square(k_x) + self.k0_squared

    def poles(self, parity: Parity) -> np.ndarray:
        """Positions in (0, kx_max) where the residual diverges."""
        step = 2.0 * math.pi / self.well_width_d
        first = 0.5 * step if parity is Parity.SYMMETRIC else step
        return np.arange(first, self.kx_max, step)


@dataclass(frozen=True)
class GuidedMode:
    mode_index_m: int
    parity: Parity
    k_x: float
    beta: float
    kappa: float
    theta_deg: float
    norm_inside: float
    norm_outside: float
    width_d: float
    k_well: float

    @property
    def kx_d(self) -> float:
        return self.k_x * self.width_d

    @property
    def symmetric(self) -> bool:
        return self.parity is Parity.SYMMETRIC


def _residual(k_x, d, k0_squared, k_well, parity):
    kappa = np.sqrt(np.maximum(k_well**2 - np.square(k_x) + k0_squared, 0.0))
    half = 0.5 * d * k_x
    if parity is Parity.SYMMETRIC:
        return k_x * np.tan(half) - kappa
    return -k_x / np.tan(half) - kappa


def dispersion_residual(k_x, ctx: DispersionContext, parity: Parity):
    """Matching-condition residual; guided modes are its roots.

    symmetric:      k_x tan(k_x d/2) - kappa
    antisymmetric: -k_x cot(k_x d/2) - kappa
    """
    parity = Parity(parity)
    k_x = np.asarray(k_x, dtype=float)
    if np.any(k_x <= 0) or np.any(ctx.kappa_squared(k_x) < 0):
        raise OutOfDomain(f"k_x outside (0, {ctx.kx_max}]")
    out = _residual(k_x, ctx.well_width_d, ctx.k0_squared, ctx.k_well, parity)
    return float(out) if out.ndim == 0 else out


def _bisect(f, lo, hi, flo):
    while hi - lo > BISECT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_branch(ctx: DispersionContext, parity: Parity, n_scan: int) -> list[float]:
    # Sampling is split at the poles; each pole-free segment starts at
    # -inf (or the k_x -> 0 limit) and ends at +inf (or the window edge).
    d, k0sq, kw = ctx.well_width_d, ctx.k0_squared, ctx.k_well

    def f(x):
        return float(_residual(x, d, k0sq, kw, parity))

    kmax = ctx.kx_max
    grid = np.linspace(0.0, kmax, n_scan + 1)[1:]
    values = _residual(grid, d, k0sq, kw, parity)
    poles = ctx.poles(parity)
    edges = np.concatenate(([0.0], poles, [kmax]))

    roots = []
    for i in range(len(edges) - 1):
        a, b = edges[i], edges[i + 1]
        lo_i = np.searchsorted(grid, a, side="right")
        hi_i = np.searchsorted(grid, b, side="left")
        if i == 0:
            kappa0 = math.sqrt(kw**2 + k0sq) if kw**2 + k0sq > 0 else 0.0
            left = -kappa0 if parity is Parity.SYMMETRIC else -2.0 / d - kappa0
        else:
            left = -math.inf
        last = i == len(edges) - 2
        xs = np.concatenate(([a], grid[lo_i:hi_i], [kmax if last else b]))
        vs = np.concatenate(([left], values[lo_i:hi_i], [f(kmax) if last else math.inf]))
        v0, v1 = vs[:-1], vs[1:]
        hits = np.nonzero(((v0 < 0) & (v1 > 0)) | ((v0 > 0) & (v1 < 0)) | (v0 == 0.0))[0]
        for j in hits:
            if vs[j] == 0.0:
                if j > 0:
                    roots.append(float(xs[j]))
                continue
            flo = vs[j] if math.isfinite(vs[j]) else math.copysign(1.0, vs[j])
            roots.append(_bisect(f, float(xs[j]), float(xs[j + 1]), float(flo)))
    return roots


def _build_mode(index: int, parity: Parity, k_x: float, ctx: DispersionContext) -> GuidedMode:
    d = ctx.well_width_d
    beta = math.sqrt(max(ctx.k_well**2 - k_x**2, 0.0))
    kappa = math.sqrt(max(beta**2 + ctx.k0_squared, 0.0))
    half = 0.5 * k_x * d
    if parity is Parity.SYMMETRIC:
        edge = math.cos(half)
        inner = 0.5 * d + math.sin(k_x * d) / (2.0 * k_x)
    else:
        edge = math.sin(half)
        inner = 0.5 * d - math.sin(k_x * d) / (2.0 * k_x)
    # cos^2 or sin^2 over the well plus two exponential tails
    total = inner + edge**2 / kappa
    norm = 1.0 / math.sqrt(total)
    return GuidedMode(
        mode_index_m=index,
        parity=parity,
        k_x=k_x,
        beta=beta,
        kappa=kappa,
        theta_deg=angle_from_wavevectors(k_x, ctx.k_well),
        norm_inside=norm,
        norm_outside=norm * edge,
        width_d=d,
        k_well=ctx.k_well,
    )


def _scan_all(ctx, n_scan):
    found = []
    for parity in Parity:
        found.extend((k, parity) for k in _scan_branch(ctx, parity, n_scan))
    found.sort(key=lambda item: item[0])
    return found


def find_modes(ctx: DispersionContext, n_scan: int = N_SCAN) -> list[GuidedMode]:
    """All guided modes of the well, sorted by increasing k_x and indexed from 1.

    The scan density doubles until two consecutive densities agree on the
    mode count (capped at ``MAX_SCAN`` samples per branch).
    """
    found = _scan_all(ctx, n_scan)
    while n_scan < MAX_SCAN:
        n_scan *= 2
        finer = _scan_all(ctx, n_scan)
        if len(finer) == len(found):
            break
        found = finer
    found = [(k, p) for k, p in found if ctx.kappa_squared(k) > 0 and k < ctx.k_well]
    if not found:
        raise NoModesFound(
            f"no guided modes for d={ctx.well_width_d} nm, k_well={ctx.k_well} nm^-1"
        )
    return [_build_mode(i + 1, p, float(k), ctx) for i, (k, p) in enumerate(found)]


def modes_for(spec: CouplerSpec, which: Which) -> list[GuidedMode]:
    return find_modes(DispersionContext.from_spec(spec, which))


def angle_from_wavevectors(k_x: float, k_well: float) -> float:
    """Injection angle in degrees, ``asin(beta / k_well)``."""
    beta = math.sqrt(max(k_well**2 - k_x**2, 0.0))
    return math.degrees(math.asin(min(beta / k_well, 1.0)))


def injection_angle(mode: GuidedMode) -> float:
    return math.degrees(math.asin(min(mode.beta / mode.k_well, 1.0)))


def local_profile(mode: GuidedMode, xi):
    """Profile at offset ``xi`` from the well center (nm^-1/2)."""
    xi = np.asarray(xi, dtype=float)
    half = 0.5 * mode.width_d
    inside = np.abs(xi) <= half
    tail = mode.norm_outside * np.exp(-mode.kappa * np.maximum(np.abs(xi) - half, 0.0))
    if mode.symmetric:
        core = mode.norm_inside * np.cos(mode.k_x * xi)
    else:
        core = mode.norm_inside * np.sin(mode.k_x * xi)
        tail = np.where(xi < 0, -tail, tail)
    out = np.where(inside, core, tail)
    return float(out) if out.ndim == 0 else out


def evaluate_profile(mode: GuidedMode, geometry: CouplerGeometry, which_well: Which, x):
    """Profile of ``mode`` placed in ``which_well``, evaluated at positions ``x``.

    The drain well is the mirror image of the source well, so drain
    profiles use the reflected local coordinate.  Symmetric modes are
    unaffected; antisymmetric ones flip sign, which keeps same-parity
    overlaps of identical wells positive.
    """
    center = geometry.center(which_well)
    xi = np.asarray(x, dtype=float) - center
    if which_well == "drain":
        xi = -xi
    return local_profile(mode, xi)
