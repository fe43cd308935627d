"""Physical constants, ion species registry, and unit conversions.

All quantities are SI internally. Frequencies are *angular* (rad/s)
everywhere inside the library; the CLI converts ordinary frequencies in
MHz at the boundary. CODATA-2018 values are used and echoed into run
manifests so outputs are traceable to a constants version.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import scipy.constants as _sc

from .errors import DomainError, UnknownSpeciesError

CODATA_VERSION = "CODATA-2018"

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Constants:
    """Fundamental constants (SI units)."""

    elementary_charge: float = _sc.elementary_charge        # C
    vacuum_permittivity: float = _sc.epsilon_0               # F/m
    vacuum_permeability: float = _sc.mu_0                    # H/m
    reduced_planck: float = _sc.hbar                         # J s
    boltzmann: float = _sc.k                                 # J/K
    bohr_magneton: float = _sc.physical_constants["Bohr magneton"][0]  # J/T
    atomic_mass_unit: float = _sc.atomic_mass                # kg
    electron_mass: float = _sc.m_e                           # kg

    def __post_init__(self):
        for name, value in self.as_dict().items():
            if not value > 0.0:
                raise DomainError(f"constant {name} must be positive")

    def as_dict(self):
        return {
            "elementary_charge": self.elementary_charge,
            "vacuum_permittivity": self.vacuum_permittivity,
            "vacuum_permeability": self.vacuum_permeability,
            "reduced_planck": self.reduced_planck,
            "boltzmann": self.boltzmann,
            "bohr_magneton": self.bohr_magneton,
            "atomic_mass_unit": self.atomic_mass_unit,
            "electron_mass": self.electron_mass,
        }


CONST = Constants()

# Coulomb coupling e^2/(4 pi eps0), used in nearly every energy scale here.
COULOMB = CONST.elementary_charge**2 / (4.0 * math.pi * CONST.vacuum_permittivity)


@dataclass(frozen=True)
class IonSpecies:
    """A singly (or multiply) charged atomic ion.

    gamma is the gyromagnetic ratio of the spin channel used as the
    effective spin-1/2, in rad/(s T); None if not specified.
    """

    name: str
    mass_u: float
    charge_multiple: int = 1
    gamma: float | None = None

    def __post_init__(self):
        if not self.mass_u > 0.0:
            raise DomainError(f"{self.name}: mass must be positive")
        if self.charge_multiple < 1:
            raise DomainError(f"{self.name}: charge multiple must be >= 1")

    @property
    def mass(self) -> float:
        """Ion mass in kg."""
        return self.mass_u * CONST.atomic_mass_unit

    @property
    def charge(self) -> float:
        """Ion charge in C."""
        return self.charge_multiple * CONST.elementary_charge


@dataclass(frozen=True)
class TrapConfig:
    """Secular angular frequencies (rad/s) of a linear Paul trap.

    nu_z is the axial centre-of-mass frequency; nu_x, nu_y are radial.
    """

    nu_z: float
    nu_x: float
    nu_y: float

    def __post_init__(self):
        if min(self.nu_z, self.nu_x, self.nu_y) <= 0.0:
            raise DomainError("trap frequencies must be positive")

    @property
    def linear_chain_regime(self) -> bool:
        return self.nu_x > self.nu_z and self.nu_y > self.nu_z

    def require_linear_chain(self):
        if not self.linear_chain_regime:
            raise DomainError(
                "radial confinement must exceed axial for a linear chain: "
                f"nu_z={self.nu_z:.3e}, nu_x={self.nu_x:.3e}, nu_y={self.nu_y:.3e}"
            )


def trap_from_mhz(f_z_mhz, f_x_mhz=None, f_y_mhz=None) -> TrapConfig:
    """Build a TrapConfig from ordinary frequencies in MHz."""
    if f_x_mhz is None:
        f_x_mhz = 10.0 * f_z_mhz
    if f_y_mhz is None:
        f_y_mhz = f_x_mhz
    return TrapConfig(
        nu_z=mhz_to_angular(f_z_mhz),
        nu_x=mhz_to_angular(f_x_mhz),
        nu_y=mhz_to_angular(f_y_mhz),
    )


# Masses from the AME2020 atomic mass evaluation, rounded to 6 decimals.
# The electron-mass correction is below every tolerance used here.
_BUILTIN_SPECIES = {
    "Be-9": IonSpecies("Be-9", 9.012183),
    "Mg-25": IonSpecies("Mg-25", 24.985837),
    "Ca-40": IonSpecies("Ca-40", 39.962591),
    "Sr-88": IonSpecies("Sr-88", 87.905612),
    "Yb-171": IonSpecies("Yb-171", 170.936330),
    "Yb-172": IonSpecies("Yb-172", 171.936386),
}


def species_lookup(name: str, registry=None) -> IonSpecies:
    """Look up an immutable species record by name (e.g. 'Yb-171')."""
    table = _BUILTIN_SPECIES if registry is None else registry
    try:
        return table[name]
    except KeyError:
        known = ", ".join(sorted(table))
        raise UnknownSpeciesError(f"unknown species {name!r}; known: {known}") from None


def registry_names(registry=None):
    table = _BUILTIN_SPECIES if registry is None else registry
    return sorted(table)


def load_species_registry(path) -> dict:
    """Extend the built-in registry from a JSON config file.

    Schema: a list of objects with keys
        name (str), mass_u (number), charge (int, optional, default 1),
        gamma (number in rad/(s T), optional).
    Returns a new registry dict; the built-in table is never mutated.
    """
    with open(path, "r", encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise DomainError("species config must be a JSON list of objects")
    table = dict(_BUILTIN_SPECIES)
    for i, entry in enumerate(entries):
        try:
            species = IonSpecies(
                name=str(entry["name"]),
                mass_u=float(entry["mass_u"]),
                charge_multiple=int(entry.get("charge", 1)),
                gamma=None if entry.get("gamma") is None else float(entry["gamma"]),
            )
        except KeyError as exc:
            raise DomainError(f"species config entry {i}: missing field {exc}") from None
        table[species.name] = species
    return table


# ---------------------------------------------------------------------------
# Unit conversions (pure, mutually inverse)

def mhz_to_angular(f_mhz):
    """Ordinary frequency in MHz -> angular frequency in rad/s."""
    return TWO_PI * 1e6 * f_mhz


def angular_to_mhz(omega):
    """Angular frequency in rad/s -> ordinary frequency in MHz."""
    return omega / (TWO_PI * 1e6)


def um_to_m(x_um):
    return 1e-6 * x_um


def m_to_um(x_m):
    return 1e6 * x_m


# Free-electron gyromagnetic ratio in the e/m_e approximation used for
# order-of-magnitude dipole-dipole estimates.
GAMMA_ELECTRON = CONST.elementary_charge / CONST.electron_mass
