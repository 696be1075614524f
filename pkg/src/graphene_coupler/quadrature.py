"""Adaptive Simpson quadrature, used to cross-check the closed-form overlaps."""

from __future__ import annotations

import numpy as np

from .device import CouplerGeometry, Which
from .modes import GuidedMode, evaluate_profile


def _simpson_pair(f, lo, hi):
    mid = 0.5 * (lo + hi)
    h = hi - lo
    fa, fm, fb = f(lo), f(mid), f(hi)
    fl, fr = f(0.5 * (lo + mid)), f(0.5 * (mid + hi))
    coarse = h / 6.0 * (fa + 4.0 * fm + fb)
    fine = h / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb)
    return coarse, fine, mid


def adaptive_simpson(f, a: float, b: float, panels: int = 64, atol: float = 1e-14,
                     max_level: int = 60) -> float:
    """Integrate a vectorized ``f`` over [a, b].

    Starts from ``panels`` equal panels and bisects every panel whose
    coarse/fine Simpson estimates disagree by more than ``15 * tol``, with
    the tolerance split in proportion to panel width.
    """
    if b <= a:
        return 0.0
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1], edges[1:]
    width = b - a
    total = 0.0
    for _ in range(max_level):
        coarse, fine, mid = _simpson_pair(f, lo, hi)
        tol = atol * (hi - lo) / width
        err = fine - coarse
        done = np.abs(err) <= 15.0 * tol
        total += float(np.sum(fine[done] + err[done] / 15.0))
        if done.all():
            return total
        keep = ~done
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
    coarse, fine, _ = _simpson_pair(f, lo, hi)
    return total + float(np.sum(fine))


def quadrature_overlap(mode1: GuidedMode, mode2: GuidedMode, geometry: CouplerGeometry,
                       wells: tuple[Which, Which] = ("source", "drain"), rtol: float = 1e-13,
                       tail_lengths: float = 40.0) -> float:
    """Overlap integral by adaptive Simpson over the kink-free pieces.

    The infinite tails are truncated ``tail_lengths`` decay lengths beyond
    the outermost well edge.
    """
    w1, w2 = wells

    def integrand(x):
        return evaluate_profile(mode1, geometry, w1, x) * evaluate_profile(mode2, geometry, w2, x)

    cuts = sorted(set(geometry.interval(w1)) | set(geometry.interval(w2)))
    reach = tail_lengths / min(mode1.kappa, mode2.kappa)
    bounds = [cuts[0] - reach] + cuts + [cuts[-1] + reach]
    pieces = [(x0, x1) for x0, x1 in zip(bounds[:-1], bounds[1:]) if x1 > x0]
    # tolerance scale: integral of |integrand| from a fixed composite rule
    scale = 0.0
    for x0, x1 in pieces:
        xs = np.linspace(x0, x1, 2049)
        scale += np.trapezoid(np.abs(integrand(xs)), xs)
    atol = rtol * max(scale, 1e-300)
    return sum(adaptive_simpson(integrand, x0, x1, atol=atol * (x1 - x0) / (bounds[-1] - bounds[0]))
               for x0, x1 in pieces)
