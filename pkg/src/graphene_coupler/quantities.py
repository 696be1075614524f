"""Physical constants in the working unit system.

Energies are in meV, lengths in nm, wavevectors in nm^-1 and frequencies
in s^-1.
"""

from dataclasses import dataclass

HBAR_MEV_S = 6.582119569e-13      # reduced Planck constant (meV s), exact SI
HBARC_MEV_NM = 197326.9804        # hbar*c (meV nm)
ME_C2_MEV = 510998950.0           # electron rest energy (meV)
FERMI_VELOCITY_M_S = 1.0e6        # graphene Fermi velocity (m/s)
NM_PER_M = 1.0e9


@dataclass(frozen=True)
class PhysicalConstants:
    hbar_vF: float          # meV nm
    hbar2_over_2me: float   # meV nm^2
    v_F: float              # m/s

    @property
    def v_F_nm_per_s(self) -> float:
        return self.v_F * NM_PER_M


CONSTANTS = PhysicalConstants(
    hbar_vF=HBAR_MEV_S * FERMI_VELOCITY_M_S * NM_PER_M,
    hbar2_over_2me=HBARC_MEV_NM**2 / (2.0 * ME_C2_MEV),
    v_F=FERMI_VELOCITY_M_S,
)

HBAR_VF = CONSTANTS.hbar_vF
HBAR2_OVER_2ME = CONSTANTS.hbar2_over_2me
V_F_NM_S = CONSTANTS.v_F_nm_per_s


def energy_from_wavevector(k, V):
    """Carrier energy (meV) of a graphene electron with wavevector ``k``
    (nm^-1) above the local potential ``V`` (meV)."""
    return V + HBAR_VF * k


def wavevector_from_energy(E, V):
    """Inverse of :func:`energy_from_wavevector`."""
    return (E - V) / HBAR_VF
