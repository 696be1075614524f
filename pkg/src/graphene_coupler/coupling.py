"""Overlap integrals and coupled-mode coefficients between the two wells."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .device import CouplerGeometry, CouplerSpec, Which, barrier_k0_squared, channel_wavevector
from .errors import ModeNotFound
from .modes import GuidedMode, modes_for
from .quantities import HBAR_VF


@dataclass(frozen=True)
class CouplingResult:
    C12: float                   # nm^-1
    C21: float                   # nm^-1
    overlap: float
    coupling_energy_meV: float
    mode_pair: tuple[int, int]
    detuning_delta: float        # beta_1m - beta_2n, nm^-1
    source_mode: GuidedMode
    drain_mode: GuidedMode


# A profile on one interval is a sum of terms  coef * exp(rate * (x - ref)).
def _pieces(mode: GuidedMode, center: float, mirrored: bool):
    """Breakpoints and per-interval exponential terms of a placed profile.

    Returns ``(left_edge, right_edge, left_tail, core, right_tail)`` where
    each of the last three is a list of ``(coef, rate, ref)``.
    """
    half = 0.5 * mode.width_d
    lo, hi = center - half, center + half
    A, B, k = mode.norm_inside, mode.norm_outside, mode.k_x
    s = -1.0 if mirrored else 1.0
    odd = not mode.symmetric
    # xi = s (x - center);  cos/sin(k xi) expanded in exp(+-i k s (x - center))
    if odd:
        core = [(A / 2j, 1j * k * s, center), (-A / 2j, -1j * k * s, center)]
    else:
        core = [(A / 2, 1j * k * s, center), (A / 2, -1j * k * s, center)]
    # the odd tail carries a minus sign on the side where xi < 0
    right_sign = -1.0 if (odd and mirrored) else 1.0
    left_sign = -1.0 if (odd and not mirrored) else 1.0
    right = [(right_sign * B, -mode.kappa, hi)]
    left = [(left_sign * B, mode.kappa, lo)]
    return lo, hi, left, core, right


def _one_minus_exp_over(z: complex, length: float) -> complex:
    """(1 - exp(-z L)) / z for Re z >= 0, accurate as z L -> 0."""
    w = z * length
    if abs(w) < 1e-4:
        return length * (1 - w / 2 + w * w / 6 - w * w * w / 24)
    # 1 - e^{-w} = -(expm1(-a) cos b + (cos b - 1)) + i e^{-a} sin b  with w = a + ib
    a, b = -w.real, -w.imag
    em1 = math.expm1(a)
    cosm1 = -2.0 * math.sin(0.5 * b) ** 2
    value = em1 * math.cos(b) + cosm1 + 1j * math.exp(a) * math.sin(b)
    return -value / z


def _segment_integral(t1, t2, x0: float, x1: float) -> complex:
    """Integral of the product of two exponential terms over [x0, x1] (ends may be infinite)."""
    c1, r1, p1 = t1
    c2, r2, p2 = t2
    rate = r1 + r2
    coef = c1 * c2

    def log_at(x):
        return r1 * (x - p1) + r2 * (x - p2)

    if math.isinf(x0):
        # left-unbounded: requires growth to the right
        return coef * cmath.exp(log_at(x1)) / rate
    if math.isinf(x1):
        return coef * cmath.exp(log_at(x0)) / (-rate)
    length = x1 - x0
    if rate.real <= 0:
        return coef * cmath.exp(log_at(x0)) * _one_minus_exp_over(-rate, length)
    return coef * cmath.exp(log_at(x1)) * _one_minus_exp_over(rate, length)


def _terms_on(pieces, x0, x1):
    lo, hi, left, core, right = pieces
    if x1 <= lo:
        return left
    if x0 >= hi:
        return right
    return core


def placed_overlap(mode_a: GuidedMode, center_a: float, mirrored_a: bool,
                   mode_b: GuidedMode, center_b: float, mirrored_b: bool) -> float:
    """Closed-form integral over the real line of two placed profiles."""
    pa = _pieces(mode_a, center_a, mirrored_a)
    pb = _pieces(mode_b, center_b, mirrored_b)
    cuts = sorted({pa[0], pa[1], pb[0], pb[1]})
    bounds = [-math.inf] + cuts + [math.inf]
    total = 0j
    for x0, x1 in zip(bounds[:-1], bounds[1:]):
        if x1 <= x0:
            continue
        for ta in _terms_on(pa, x0, x1):
            for tb in _terms_on(pb, x0, x1):
                total += _segment_integral(ta, tb, x0, x1)
    return total.real


def overlap_integral(mode1: GuidedMode, mode2: GuidedMode, geometry: CouplerGeometry,
                     wells: tuple[Which, Which] = ("source", "drain")) -> float:
    """Overlap of ``mode1`` placed in ``wells[0]`` with ``mode2`` placed in ``wells[1]``."""
    w1, w2 = wells
    return placed_overlap(mode1, geometry.center(w1), w1 == "drain",
                          mode2, geometry.center(w2), w2 == "drain")


def coupling_energy(C_geometric_mean: float) -> float:
    """Coupling strength in meV for a coupling coefficient in nm^-1."""
    return HBAR_VF * C_geometric_mean


def _pick(modes, index, which):
    if not 1 <= index <= len(modes):
        raise ModeNotFound(f"{which} well has {len(modes)} guided mode(s); mode {index} requested")
    return modes[index - 1]


def coupling_coefficients(spec: CouplerSpec, m: int, n: int) -> CouplingResult:
    """Coupled-mode coefficients between source mode ``m`` and drain mode ``n``.

    C12 = (k2^2 - k0^2) / (2 beta_1m) * overlap
    C21 = (k1^2 - k0^2) / (2 beta_2n) * overlap
    """
    src = _pick(modes_for(spec, "source"), m, "source")
    drn = _pick(modes_for(spec, "drain"), n, "drain")
    k1 = channel_wavevector(spec, "source")
    k2 = channel_wavevector(spec, "drain")
    k0sq = barrier_k0_squared(spec)
    ov = overlap_integral(src, drn, spec.geometry())
    C12 = 0.5 * (k2**2 - k0sq) / src.beta * ov
    C21 = 0.5 * (k1**2 - k0sq) / drn.beta * ov
    return CouplingResult(
        C12=C12,
        C21=C21,
        overlap=ov,
        coupling_energy_meV=coupling_energy(math.sqrt(abs(C12 * C21))),
        mode_pair=(m, n),
        detuning_delta=src.beta - drn.beta,
        source_mode=src,
        drain_mode=drn,
    )
