"""Statics of a linear Coulomb chain: equilibrium positions and normal modes.

Positions are found by Newton iteration on the dimensionless potential

    V(u) = sum_i w_i (u_i - c_i)^2 / 2 + sum_{i<j} 1 / |u_i - u_j|,

where u = z / zeta and zeta = (e^2 / (4 pi eps0 m nu_z^2))^(1/3) is the
characteristic length of the chain. w_i = 1 for a uniform harmonic trap;
segmented (per-ion) potentials enter through w_i and the centres c_i.
The axial Hessian of the same potential yields the normal modes, and its
radial analogue (with the -1/|d|^3 off-diagonal structure) the transverse
modes used by the phonon-lattice machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import CONST, COULOMB, IonSpecies, TrapConfig
from .errors import ConvergenceError, DomainError, InstabilityError

_NEWTON_RTOL = 1e-12   # target residual relative to the stiffest force scale
_NEWTON_ACCEPT = 1e-10  # contract: net force below 1e-10 of m nu_z^2 zeta
_MAX_NEWTON = 200


def length_scale(species: IonSpecies, nu1: float) -> float:
    """Characteristic inter-ion length zeta = (e^2/(4 pi eps0 m nu1^2))^(1/3)."""
    if nu1 <= 0.0:
        raise DomainError("nu1 must be positive")
    q2 = species.charge_multiple**2
    return (q2 * COULOMB / (species.mass * nu1**2)) ** (1.0 / 3.0)


def spacing_estimate(n: int, zeta: float) -> float:
    """Empirical minimum inter-ion spacing 2 N^(-0.56) zeta (fit, ~10% level)."""
    return zeta * 2.0 * n ** (-0.56)


def ground_state_spread(species: IonSpecies, nu_n) -> float:
    """RMS ground-state extension sqrt(hbar / (2 m nu_n)) of one mode."""
    nu_n = np.asarray(nu_n, dtype=float)
    if np.any(nu_n <= 0.0):
        raise DomainError("mode frequency must be positive")
    return np.sqrt(CONST.reduced_planck / (2.0 * species.mass * nu_n))


@dataclass(frozen=True)
class SegmentedPotential:
    """Per-ion quadratic axial potentials, V_i = m nu_i^2 (z - c_i)^2 / 2.

    Models microtrap arrays and segmented-electrode shaping. nu_per_ion are
    angular frequencies (rad/s); centers are in metres (default 0 for all).
    """

    nu_per_ion: np.ndarray
    centers: np.ndarray | None = None

    def weights(self, nu_ref: float, n: int) -> np.ndarray:
        nu = np.asarray(self.nu_per_ion, dtype=float)
        if nu.shape != (n,):
            raise DomainError(f"expected {n} per-ion frequencies, got {nu.shape}")
        if np.any(nu <= 0.0):
            raise DomainError("per-ion frequencies must be positive")
        return (nu / nu_ref) ** 2

    def centers_scaled(self, zeta: float, n: int) -> np.ndarray:
        if self.centers is None:
            return np.zeros(n)
        c = np.asarray(self.centers, dtype=float)
        if c.shape != (n,):
            raise DomainError(f"expected {n} centers, got {c.shape}")
        return c / zeta


@dataclass(frozen=True)
class ChainEquilibrium:
    """Converged equilibrium of an N-ion chain."""

    positions: np.ndarray          # m, sorted ascending
    length_scale_zeta: float       # m
    species: IonSpecies
    trap: TrapConfig
    weights: np.ndarray            # dimensionless per-ion trap weights
    centers_u: np.ndarray          # trap centres in units of zeta
    gradient_norm: float = 0.0

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def positions_scaled(self) -> np.ndarray:
        return self.positions / self.length_scale_zeta

    def min_spacing(self) -> float:
        return float(np.min(np.diff(self.positions)))


@dataclass(frozen=True)
class NormalModes:
    """Normal-mode decomposition of a chain along one axis.

    frequencies are ascending (rad/s); mode_matrix columns are the
    orthonormal eigenvectors S[:, n]; ground_state_spreads are the
    per-mode Delta z_n = sqrt(hbar / (2 m nu_n)).
    """

    frequencies: np.ndarray
    mode_matrix: np.ndarray
    ground_state_spreads: np.ndarray
    axis: str = "axial"
    species: IonSpecies = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.frequencies)


def _coulomb_terms(u):
    d = u[:, None] - u[None, :]
    np.fill_diagonal(d, np.inf)
    inv = 1.0 / d
    return d, inv


def _potential(u, w, c):
    _, inv = _coulomb_terms(u)
    pair = np.sum(np.triu(np.abs(inv), k=1))
    return 0.5 * np.sum(w * (u - c) ** 2) + pair


def _gradient(u, w, c):
    d, inv = _coulomb_terms(u)
    # d/du_i of sum_{k<l} 1/|u_k - u_l| = -sum_{j != i} sign(d_ij)/d_ij^2
    return w * (u - c) - np.sum(np.sign(d) * inv**2, axis=1)


def _hessian(u, w, c):
    d, inv = _coulomb_terms(u)
    inv3 = np.abs(inv) ** 3
    h = -2.0 * inv3
    np.fill_diagonal(h, 0.0)
    np.fill_diagonal(h, w - np.sum(h, axis=1))
    return h


def equilibrium_positions(
    n: int,
    species: IonSpecies,
    trap: TrapConfig,
    potential: SegmentedPotential | None = None,
    initial_guess=None,
) -> ChainEquilibrium:
    """Minimise trap + Coulomb energy for n ions on the trap axis.

    Newton iteration with analytic gradient/Hessian, seeded from uniform
    spacing at the empirical 2 N^(-0.56) estimate; falls back to damped
    gradient descent whenever a Newton step fails to reduce the residual.
    """
    if n < 1:
        raise DomainError("need at least one ion")
    trap.require_linear_chain()
    zeta = length_scale(species, trap.nu_z)

    if potential is None:
        w = np.ones(n)
        c = np.zeros(n)
    else:
        w = potential.weights(trap.nu_z, n)
        c = potential.centers_scaled(zeta, n)

    if initial_guess is not None:
        u = np.sort(np.asarray(initial_guess, dtype=float) / zeta)
    elif n == 1:
        u = c.copy()
    else:
        du = spacing_estimate(n, zeta) / zeta
        u = c + du * (np.arange(n) - 0.5 * (n - 1))
        u.sort()

    scale = max(1.0, float(np.max(w)))
    tol = _NEWTON_RTOL * scale
    gnorm = np.linalg.norm(_gradient(u, w, c))
    for _ in range(_MAX_NEWTON):
        if gnorm < tol:
            break
        g = _gradient(u, w, c)
        h = _hessian(u, w, c)
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            step = g
        # backtracking on the residual norm keeps the iteration ordered
        alpha = 1.0
        for _ in range(40):
            trial = u - alpha * step
            if np.all(np.diff(trial) > 0) or n == 1:
                tnorm = np.linalg.norm(_gradient(trial, w, c))
                if tnorm < gnorm:
                    u, gnorm = trial, tnorm
                    break
            alpha *= 0.5
        else:
            # damped gradient descent fallback
            alpha = 1e-3
            for _ in range(40):
                trial = u - alpha * g
                if (np.all(np.diff(trial) > 0) or n == 1) and np.linalg.norm(
                    _gradient(trial, w, c)
                ) < gnorm:
                    u = trial
                    gnorm = np.linalg.norm(_gradient(u, w, c))
                    break
                alpha *= 0.5
            else:
                if gnorm < _NEWTON_ACCEPT * scale:
                    break  # at the floating-point floor, well within contract
                raise ConvergenceError(
                    f"equilibrium stalled at residual {gnorm:.3e}", residual=gnorm
                )
    else:
        if not gnorm < _NEWTON_ACCEPT * scale:
            raise ConvergenceError(
                f"equilibrium did not converge, residual {gnorm:.3e}", residual=gnorm
            )

    return ChainEquilibrium(
        positions=u * zeta,
        length_scale_zeta=zeta,
        species=species,
        trap=trap,
        weights=w,
        centers_u=c,
        gradient_norm=gnorm,
    )


def axial_hessian_scaled(eq: ChainEquilibrium) -> np.ndarray:
    """Axial Hessian in units of m nu_z^2 (dimensionless)."""
    return _hessian(eq.positions_scaled, eq.weights, eq.centers_u)


def radial_hessian_scaled(eq: ChainEquilibrium, nu_r: float) -> np.ndarray:
    """Radial Hessian in units of m nu_z^2.

    Transverse displacements soften by -1/|d|^3 Coulomb terms; the
    off-diagonal entries carry the opposite sign of the axial case.
    """
    u = eq.positions_scaled
    d = u[:, None] - u[None, :]
    np.fill_diagonal(d, np.inf)
    inv3 = 1.0 / np.abs(d) ** 3
    h = inv3.copy()
    np.fill_diagonal(h, 0.0)
    diag = (nu_r / eq.trap.nu_z) ** 2 - np.sum(inv3, axis=1)
    np.fill_diagonal(h, diag)
    return h


def _modes_from_hessian(h_scaled, nu_ref, species, axis):
    lam, vec = np.linalg.eigh(h_scaled)
    if lam[0] <= 0.0:
        raise InstabilityError(
            f"{axis} Hessian not positive definite (lowest eigenvalue "
            f"{lam[0]:.3e} m nu_z^2): chain unstable along this axis"
        )
    freqs = nu_ref * np.sqrt(lam)
    # deterministic sign convention: largest-magnitude component positive
    for k in range(vec.shape[1]):
        col = vec[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            vec[:, k] = -col
    spreads = np.sqrt(CONST.reduced_planck / (2.0 * species.mass * freqs))
    return NormalModes(
        frequencies=freqs,
        mode_matrix=vec,
        ground_state_spreads=spreads,
        axis=axis,
        species=species,
    )


def normal_modes(eq: ChainEquilibrium, axis: str = "axial", nu_r: float | None = None) -> NormalModes:
    """Normal modes of the chain along the requested axis.

    axis='axial' uses the trap's nu_z; axis='radial' uses nu_r (default
    trap.nu_x). Frequencies come back ascending; for the uniform harmonic
    axial case the lowest mode is the centre-of-mass at exactly nu_z with
    eigenvector (1, ..., 1)/sqrt(N).
    """
    if axis == "axial":
        h = axial_hessian_scaled(eq)
    elif axis == "radial":
        if nu_r is None:
            nu_r = eq.trap.nu_x
        h = radial_hessian_scaled(eq, nu_r)
    else:
        raise DomainError(f"unknown axis {axis!r}")
    return _modes_from_hessian(h, eq.trap.nu_z, eq.species, axis)
