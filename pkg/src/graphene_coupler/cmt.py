"""Two-level coupled-mode dynamics along the propagation direction y.

The integrated system is the phase-explicit first-order form

    da1/dy = -i C12 a2 exp(+i delta y)
    da2/dy = -i C21 a1 exp(-i delta y)

with delta = beta_1m - beta_2n.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .coupling import CouplingResult, coupling_coefficients
from .device import CouplerSpec
from .errors import ConfigError, NonHermitian, StepTooLarge, ZeroCoupling
from .quantities import V_F_NM_S

HERMITIAN_RTOL = 1e-10
STEP_GUARD = 0.1


@dataclass(frozen=True)
class CMTSystem:
    C12: float
    C21: float
    delta: float = 0.0

    @classmethod
    def from_coupling(cls, result: CouplingResult) -> "CMTSystem":
        return cls(result.C12, result.C21, result.detuning_delta)

    @property
    def hermitian(self) -> bool:
        scale = max(abs(self.C12), abs(self.C21))
        return abs(self.C12 - self.C21) <= HERMITIAN_RTOL * scale

    def symmetrized(self) -> "CMTSystem":
        """Hermitian approximation with C = sqrt(C12 C21) (sign of C12 kept).

        a2 is rescaled by sqrt(C21/C12) in this approximation, so the
        drain probability it predicts is off by that factor squared.
        """
        c = math.copysign(math.sqrt(abs(self.C12 * self.C21)), self.C12)
        return CMTSystem(c, c, self.delta)

    @property
    def coupling(self) -> float:
        if not self.hermitian:
            raise NonHermitian(f"C12={self.C12} != C21={self.C21}; use symmetrized()")
        return 0.5 * (self.C12 + self.C21)

    @property
    def rabi_rate(self) -> float:
        """Generalized rate sqrt(C^2 + (delta/2)^2) in nm^-1."""
        return math.hypot(self.coupling, 0.5 * self.delta)


@dataclass
class PropagationTrace:
    y_samples: np.ndarray
    a1: np.ndarray
    a2: np.ndarray

    @property
    def p1(self) -> np.ndarray:
        return np.abs(self.a1) ** 2

    @property
    def p2(self) -> np.ndarray:
        return np.abs(self.a2) ** 2

    @property
    def norm_drift(self) -> float:
        total = self.p1 + self.p2
        return float(np.max(np.abs(total - total[0])))

    def guided_fields(self, beta1: float, beta2: float):
        """Longitudinal fields a_i(y) exp(-i beta_i y) of the two guided modes."""
        y = self.y_samples
        return self.a1 * np.exp(-1j * beta1 * y), self.a2 * np.exp(-1j * beta2 * y)


@dataclass(frozen=True)
class TransferMetrics:
    transfer_length_L: float       # nm
    transition_frequency_fT: float  # s^-1
    max_transfer: float
    transfer_order_n: int = 0


def propagate(system: CMTSystem, a0=(1.0, 0.0), y_max: float = 1000.0, dy: float = 1.0) -> PropagationTrace:
    """Classical RK4 integration from y = 0 to ``y_max``.

    The step is shrunk to ``y_max / ceil(y_max / dy)`` so the last sample
    lands on ``y_max``.  Steps with ``dy * max(|C12|, |C21|, |delta|) > 0.1``
    are refused.
    """
    if not dy > 0:
        raise ConfigError(f"dy must be positive, got {dy}")
    if not y_max >= dy:
        raise ConfigError(f"y_max ({y_max}) must be at least dy ({dy})")
    rate = max(abs(system.C12), abs(system.C21), abs(system.delta))
    if dy * rate > STEP_GUARD:
        raise StepTooLarge(f"dy * max rate = {dy * rate:.3g} exceeds {STEP_GUARD}")
    a1, a2 = complex(a0[0]), complex(a0[1])
    if a1 == 0 and a2 == 0:
        raise ConfigError("initial amplitudes must not both vanish")

    n = math.ceil(y_max / dy - 1e-9)
    h = y_max / n
    c12, c21, delta = system.C12, system.C21, system.delta
    rot = cmath.exp(1j * delta * h / 2)  # phase advance of exp(i delta y) per half step

    ys = [0.0]
    out1, out2 = [a1], [a2]
    phase = 1.0 + 0j  # exp(i delta y) at the start of the step
    for k in range(n):
        ph_mid = phase * rot
        ph_end = ph_mid * rot
        k1a = -1j * c12 * phase * a2
        k1b = -1j * c21 * phase.conjugate() * a1
        k2a = -1j * c12 * ph_mid * (a2 + 0.5 * h * k1b)
        k2b = -1j * c21 * ph_mid.conjugate() * (a1 + 0.5 * h * k1a)
        k3a = -1j * c12 * ph_mid * (a2 + 0.5 * h * k2b)
        k3b = -1j * c21 * ph_mid.conjugate() * (a1 + 0.5 * h * k2a)
        k4a = -1j * c12 * ph_end * (a2 + h * k3b)
        k4b = -1j * c21 * ph_end.conjugate() * (a1 + h * k3a)
        a1 = a1 + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
        a2 = a2 + h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        # recompute from y to keep the phase free of accumulated rounding
        phase = cmath.exp(1j * delta * (k + 1) * h)
        ys.append((k + 1) * h)
        out1.append(a1)
        out2.append(a2)
    return PropagationTrace(np.array(ys), np.array(out1), np.array(out2))


def analytic_rabi(system: CMTSystem, y, a0=(1.0, 0.0)):
    """Closed-form amplitudes (a1, a2) at ``y`` for a Hermitian system.

    In the frame a1 = exp(i delta y/2) c1, a2 = exp(-i delta y/2) c2 the
    dynamics is i dc/dy = H c with constant H = [[delta/2, C], [C, -delta/2]].
    """
    C = system.coupling
    half = 0.5 * system.delta
    omega = math.hypot(C, half)
    y = np.asarray(y, dtype=float)
    c1, c2 = complex(a0[0]), complex(a0[1])
    if omega == 0.0:
        return np.full(y.shape, c1), np.full(y.shape, c2)
    cos, sin = np.cos(omega * y), np.sin(omega * y)
    # exp(-i H y) = cos(w y) I - i sin(w y) H / w
    b1 = cos * c1 - 1j * sin / omega * (half * c1 + C * c2)
    b2 = cos * c2 - 1j * sin / omega * (C * c1 - half * c2)
    return np.exp(1j * half * y) * b1, np.exp(-1j * half * y) * b2


def transfer_metrics(system: CMTSystem, order_n: int = 0) -> TransferMetrics:
    """Length of the ``order_n``-th maximum of |a2|^2 starting from a0 = (1, 0)."""
    C = system.coupling
    if C == 0.0:
        raise ZeroCoupling("coupling coefficient is zero: no transfer length")
    if order_n < 0:
        raise ConfigError("transfer order must be non-negative")
    omega = system.rabi_rate
    L = (2 * order_n + 1) * math.pi / (2.0 * omega)
    return TransferMetrics(
        transfer_length_L=L,
        transition_frequency_fT=V_F_NM_S / L,
        max_transfer=(C / omega) ** 2,
        transfer_order_n=order_n,
    )


def transition_frequency(L: float) -> float:
    """f_T = v_F / L for a transfer length in nm."""
    return V_F_NM_S / L


@dataclass(frozen=True)
class SwitchingPoint:
    gate_offset: float   # meV added to the drain gate
    max_transfer: float
    transfer_length_L: float
    C12: float
    C21: float
    delta: float


def switching_curve(spec: CouplerSpec, mode_pair=(1, 1), gate_offsets=(0.0,)) -> list[SwitchingPoint]:
    """Drain-gate detuning scan.

    Each offset rebuilds the drain modes and couplings.  Transfer numbers
    come from the symmetrized system, C = sqrt(C12 C21), which is exact
    when the two wells match.
    """
    m, n = mode_pair
    base_V2 = spec.drain.gate_potential_V
    rows = []
    for dv in gate_offsets:
        shifted = spec.with_drain_gate(base_V2 + dv)
        result = coupling_coefficients(shifted, m, n)
        system = CMTSystem.from_coupling(result)
        metrics = transfer_metrics(system.symmetrized())
        rows.append(SwitchingPoint(float(dv), metrics.max_transfer, metrics.transfer_length_L,
                                   result.C12, result.C21, result.detuning_delta))
    return rows


def helmholtz_residual(field: np.ndarray, y: np.ndarray, beta: float) -> float:
    """Largest |f'' + beta^2 f| with f'' from the central second difference."""
    h = y[1] - y[0]
    second = (field[2:] - 2.0 * field[1:-1] + field[:-2]) / h**2
    return float(np.max(np.abs(second + beta**2 * field[1:-1])))
