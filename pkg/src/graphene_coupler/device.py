"""Device description: two graphene wells separated by a semiconductor barrier.

Coordinates put the barrier gap at ``[-D/2, D/2]``; the source well occupies
``[-D/2 - d1, -D/2]`` and the drain well ``[D/2, D/2 + d2]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Mapping

from .errors import ConfigError, EnergyBelowGate, MissingField, NonPositiveWidth
from .quantities import HBAR2_OVER_2ME, energy_from_wavevector, wavevector_from_energy

Which = Literal["source", "drain"]

DEFAULT_MASS_RATIO = 0.067  # GaAs conduction band

DEVICE_KEYS = (
    "well_width_nm",
    "drain_width_nm",
    "separation_nm",
    "barrier_meV",
    "source_gate_meV",
    "drain_gate_meV",
    "mass_ratio",
    "energy_meV",
    "k1d_over_pi",
)


@dataclass(frozen=True)
class WaveguideSpec:
    width_d: float
    gate_potential_V: float
    label: str = ""

    def __post_init__(self):
        if not self.width_d > 0:
            raise NonPositiveWidth(f"waveguide {self.label!r}: width must be positive, got {self.width_d}")


@dataclass(frozen=True)
class CouplerSpec:
    source: WaveguideSpec
    drain: WaveguideSpec
    separation_D: float
    barrier_V0: float
    electron_energy_E: float
    barrier_mass_ratio: float = DEFAULT_MASS_RATIO
    barrier_warning: bool = field(init=False)

    def __post_init__(self):
        if not self.separation_D >= 0:
            raise ConfigError(f"separation must be non-negative, got {self.separation_D}")
        if not self.barrier_mass_ratio > 0:
            raise ConfigError(f"mass ratio must be positive, got {self.barrier_mass_ratio}")
        vmax = max(self.source.gate_potential_V, self.drain.gate_potential_V)
        if not self.electron_energy_E > vmax:
            raise EnergyBelowGate(
                f"electron energy {self.electron_energy_E} meV must exceed both gate potentials (max {vmax} meV)"
            )
        # barrier below a gate potential: no confinement expected, flag only
        object.__setattr__(self, "barrier_warning", self.barrier_V0 <= vmax)

    def waveguide(self, which: Which) -> WaveguideSpec:
        if which == "source":
            return self.source
        if which == "drain":
            return self.drain
        raise ValueError(f"which must be 'source' or 'drain', got {which!r}")

    def with_drain_gate(self, V2: float) -> "CouplerSpec":
        drain = WaveguideSpec(self.drain.width_d, V2, self.drain.label)
        return CouplerSpec(self.source, drain, self.separation_D, self.barrier_V0,
                           self.electron_energy_E, self.barrier_mass_ratio)

    def geometry(self) -> "CouplerGeometry":
        return CouplerGeometry.from_spec(self)


@dataclass(frozen=True)
class CouplerGeometry:
    well1_interval: tuple[float, float]
    well2_interval: tuple[float, float]

    @classmethod
    def from_spec(cls, spec: CouplerSpec) -> "CouplerGeometry":
        half = 0.5 * spec.separation_D
        return cls((-half - spec.source.width_d, -half), (half, half + spec.drain.width_d))

    def interval(self, which: Which) -> tuple[float, float]:
        return self.well1_interval if which == "source" else self.well2_interval

    def center(self, which: Which) -> float:
        lo, hi = self.interval(which)
        return 0.5 * (lo + hi)


def build_spec(config: Mapping) -> CouplerSpec:
    """Validated :class:`CouplerSpec` from a flat key-value mapping.

    Required keys: ``well_width_nm``, ``separation_nm``, ``barrier_meV``,
    ``source_gate_meV`` and exactly one of ``energy_meV`` / ``k1d_over_pi``.
    ``drain_width_nm`` and ``drain_gate_meV`` default to the source values.
    When ``k1d_over_pi`` is given the energy follows from the source-channel
    wavevector ``k1 = k1d_over_pi * pi / d``.
    """
    unknown = set(config) - set(DEVICE_KEYS)
    if unknown:
        raise ConfigError(f"unknown device keys: {sorted(unknown)}")

    def get(key, default=None, required=False):
        value = config.get(key, default)
        if value is None:
            if required:
                raise MissingField(f"missing required field {key!r}")
            return None
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"field {key!r} must be a number, got {value!r}") from None

    d1 = get("well_width_nm", required=True)
    d2 = get("drain_width_nm", d1)
    D = get("separation_nm", required=True)
    V0 = get("barrier_meV", required=True)
    V1 = get("source_gate_meV", required=True)
    V2 = get("drain_gate_meV", V1)
    ratio = get("mass_ratio", DEFAULT_MASS_RATIO)
    E = get("energy_meV")
    k1d = get("k1d_over_pi")

    source = WaveguideSpec(d1, V1, "source")
    drain = WaveguideSpec(d2, V2, "drain")
    if E is None and k1d is None:
        raise MissingField("either energy_meV or k1d_over_pi is required")
    if E is not None and k1d is not None:
        raise ConfigError("give energy_meV or k1d_over_pi, not both")
    if E is None:
        if not k1d > 0:
            raise EnergyBelowGate(f"k1d_over_pi must be positive, got {k1d}")
        E = energy_from_wavevector(k1d * math.pi / d1, V1)
    return CouplerSpec(source, drain, D, V0, E, ratio)


def channel_wavevector(spec: CouplerSpec, which: Which) -> float:
    """Carrier wavevector (nm^-1) inside the source or drain channel."""
    return wavevector_from_energy(spec.electron_energy_E, spec.waveguide(which).gate_potential_V)


def barrier_k0_squared(spec: CouplerSpec) -> float:
    """Signed squared barrier wavevector ``-2 m_eff (E - V0) / hbar^2``.

    Positive below the barrier top (evanescent), negative above it.
    """
    return -(spec.electron_energy_E - spec.barrier_V0) * spec.barrier_mass_ratio / HBAR2_OVER_2ME
