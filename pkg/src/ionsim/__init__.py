"""ionsim: numerical toolkit for trapped-ion quantum simulation scenarios.

Subpackages cover chain statics, magnetic-gradient spin-spin coupling,
small-N spin dynamics, a trapped-ion Hopfield memory, the transverse-phonon
Bose-Hubbard model, the Frenkel-Kontorova ion model, a truncated-Fock-space
engine for sideband physics, and relativistic analogue experiments, all
behind one batch CLI (`ionsim`).
"""

__version__ = "0.1.0"

from .constants import (
    CONST,
    Constants,
    IonSpecies,
    TrapConfig,
    species_lookup,
    trap_from_mhz,
)

__all__ = [
    "CONST",
    "Constants",
    "IonSpecies",
    "TrapConfig",
    "species_lookup",
    "trap_from_mhz",
    "__version__",
]
