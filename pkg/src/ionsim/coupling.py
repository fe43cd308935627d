"""Magnetic-gradient mediated spin-spin coupling for an ion chain.

A static field B = B0 + b z shifts each ion's spin resonance linearly with
position. The state-dependent force F_z = (hbar/2) d_z(omega) <sigma_z>
displaces the ion, and the Coulomb-coupled motion turns that displacement
into an effective pairwise sigma_z sigma_z interaction

    J_ij = sum_n nu_n eps_in eps_jn,
    eps_in = (Delta z_n * d_z(omega_i) / nu_n) * S_in,

the coefficient of -(hbar/2) sum_{i<j} J_ij sigma_z sigma_z in the
transformed Hamiltonian. Diagonal self-energies are computed but excluded
from the exported coupling; transverse-mode contributions are omitted by
default (feed radial modes explicitly to include them for comparison).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainEquilibrium, NormalModes, ground_state_spread
from .constants import CONST, IonSpecies
from .errors import DomainError


@dataclass(frozen=True)
class GradientField:
    """Static field B0 + b z along the trap axis (T, T/m)."""

    offset_b0: float = 0.0
    gradient_b: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.gradient_b) or not np.isfinite(self.offset_b0):
            raise DomainError("field parameters must be finite")


@dataclass(frozen=True)
class FrequencyGradients:
    """Per-ion spin resonance frequencies and their axial gradients."""

    omega: np.ndarray        # rad/s at the equilibrium positions
    domega_dz: np.ndarray    # rad/(s m)

    def __post_init__(self):
        if np.shape(self.omega) != np.shape(self.domega_dz):
            raise DomainError("omega and gradient arrays must have equal length")

    @property
    def n(self) -> int:
        return len(self.omega)


@dataclass(frozen=True)
class CouplingMatrix:
    """Exported J (rad/s, symmetric, zero diagonal) plus the eps matrix.

    j_self holds the masked diagonal terms for inspection; they are part of
    the unitary transformation's self-energy, not of the spin-spin coupling.
    """

    j: np.ndarray
    epsilon: np.ndarray
    j_self: np.ndarray

    @property
    def n(self) -> int:
        return self.j.shape[0]


def dipole_dipole_shift(gamma1, gamma2, separation, theta=0.0):
    """Direct magnetic dipole-dipole shift (rad/s) of two fixed spins.

    Delta omega = (hbar/4)(mu0/4 pi) gamma1 gamma2 (3 cos^2 theta - 1) / dz^3.
    For two electron-like spins 5 um apart this is ~2 pi x 0.2 mHz: the
    direct interaction is negligible at trap scales.
    """
    if separation <= 0.0:
        raise DomainError("separation must be positive")
    mu0_4pi = CONST.vacuum_permeability / (4.0 * np.pi)
    angular = 3.0 * np.cos(theta) ** 2 - 1.0
    return (
        0.25 * CONST.reduced_planck * mu0_4pi * gamma1 * gamma2 * angular / separation**3
    )


def gradients_from_field(
    eq: ChainEquilibrium, field: GradientField, gamma: float
) -> FrequencyGradients:
    """Zeeman frequencies omega_n = gamma (B0 + b z_n) and gradients gamma b."""
    omega = gamma * (field.offset_b0 + field.gradient_b * eq.positions)
    grads = np.full(eq.n, gamma * field.gradient_b)
    return FrequencyGradients(omega=omega, domega_dz=grads)


def epsilon_matrix(modes: NormalModes, grads: FrequencyGradients) -> np.ndarray:
    """Dimensionless spin-mode couplings eps_in = Dz_n d_z(omega_i) S_in / nu_n."""
    if grads.n != modes.n:
        raise DomainError("gradient and mode dimensions disagree")
    dz_over_nu = modes.ground_state_spreads / modes.frequencies  # per mode n
    return grads.domega_dz[:, None] * dz_over_nu[None, :] * modes.mode_matrix


def j_matrix(modes: NormalModes, grads: FrequencyGradients) -> CouplingMatrix:
    """Spin-spin coupling J_ij = sum_n nu_n eps_in eps_jn (rad/s).

    The returned matrix is exactly symmetric with zero diagonal; the
    self-energy diagonal is reported separately on the CouplingMatrix.
    """
    eps = epsilon_matrix(modes, grads)
    full = (eps * modes.frequencies[None, :]) @ eps.T
    full = 0.5 * (full + full.T)
    j_self = np.diag(full).copy()
    j = full.copy()
    np.fill_diagonal(j, 0.0)
    return CouplingMatrix(j=j, epsilon=eps, j_self=j_self)


def single_ion_shift(species: IonSpecies, nu: float, grad: float):
    """Energy shift and effective Lamb-Dicke parameter of one driven ion.

    F_z = (hbar/2) d_z(omega); the equilibrium displacement d = F_z/(m nu^2)
    lowers the internal energy by hbar * shift = -F_z^2/(m nu^2), and
    eta_eff = d / Delta_z measures how strongly a spin flip excites the
    motion. Both scale as (b/nu)^2 and b nu^(-3/2) respectively.
    """
    if nu <= 0.0:
        raise DomainError("nu must be positive")
    f_z = 0.5 * CONST.reduced_planck * grad
    d_z = f_z / (species.mass * nu**2)
    shift = -(f_z**2) / (species.mass * nu**2) / CONST.reduced_planck
    eta_eff = d_z / ground_state_spread(species, nu)
    return shift, eta_eff


# ---------------------------------------------------------------------------
# Brute-force oracle: diagonalise the untransformed spin-motion Hamiltonian
# in a local-oscillator Fock basis and read the sigma_z sigma_z coefficients
# off the spin-configuration dependence of the motional ground energy. This
# route never touches the mode matrix or the eps/J formulas above.

def _local_fock_ground_energy(a_scaled, g_scaled, nu_ref, cutoff):
    """Ground energy of sum p^2/2m + (m/2) sum A_ij q_i q_j - sum g_i q_i.

    a_scaled = A / nu_ref^2 (dimensionless Hessian), g_scaled in units of
    hbar nu_ref / Delta_ref with Delta_ref = sqrt(hbar/(2 m nu_ref)).
    Returns the energy in units of hbar nu_ref.
    """
    from scipy.sparse import eye, kron
    from scipy.sparse import diags
    from scipy.sparse.linalg import eigsh

    n = a_scaled.shape[0]
    dim = cutoff + 1
    ladder = diags(np.sqrt(np.arange(1, dim)), 1)  # annihilation
    adag = ladder.T
    x_op = (ladder + adag).tocsr()        # q_i / Delta_ref
    p2_op = (-(adag - ladder) @ (adag - ladder)).tocsr()  # (p_i / (hbar/2Dz))^2 ~ -(ad-a)^2
    ident = eye(dim, format="csr")

    def embed(op, site):
        mats = [ident] * n
        mats[site] = op
        out = mats[0]
        for m in mats[1:]:
            out = kron(out, m, format="csr")
        return out

    x_ops = [embed(x_op, i) for i in range(n)]
    h = 0.25 * sum(embed(p2_op, i) for i in range(n))
    for i in range(n):
        for j in range(n):
            h = h + 0.25 * a_scaled[i, j] * (x_ops[i] @ x_ops[j])
        h = h - g_scaled[i] * x_ops[i]
    val = eigsh(h, k=1, which="SA", return_eigenvectors=False, tol=1e-12)
    return float(val[0])


def j_matrix_fock_oracle(eq: ChainEquilibrium, grads: FrequencyGradients, cutoff=15):
    """Brute-force J for N <= 3 via Fock-space diagonalisation.

    Builds the full spin-motion Hamiltonian in local coordinates for every
    spin configuration s, takes each motional ground energy E0(s), and
    projects out the pairwise coefficients:
        E0(s) = const - (hbar/2) sum_{i<j} J_ij s_i s_j - (hbar/2) sum omega_i s_i
        => J_ij = -(2/hbar) * 2^-N * sum_s s_i s_j E0(s).
    """
    from .chain import axial_hessian_scaled

    n = eq.n
    if n > 3:
        raise DomainError("oracle is intended for N <= 3")
    nu_ref = eq.trap.nu_z
    a_scaled = axial_hessian_scaled(eq)  # A / nu_ref^2
    delta_ref = ground_state_spread(eq.species, nu_ref)

    configs = [
        np.array([(c >> (n - 1 - i)) & 1 for i in range(n)]) * 2 - 1
        for c in range(2**n)
    ]
    energies = np.empty(len(configs))
    for idx, s in enumerate(configs):
        # spin force term -(hbar/2) domega_i s_i q_i -> g_i = (hbar/2) domega_i s_i
        g = 0.5 * CONST.reduced_planck * grads.domega_dz * s
        g_scaled = g * delta_ref / (CONST.reduced_planck * nu_ref)
        energies[idx] = _local_fock_ground_energy(a_scaled, g_scaled, nu_ref, cutoff)

    j = np.zeros((n, n))
    for i in range(n):
        for k in range(i + 1, n):
            acc = 0.0
            for s, e in zip(configs, energies):
                acc += s[i] * s[k] * e
            # energies are in units of hbar nu_ref
            j[i, k] = j[k, i] = -2.0 * acc / len(configs) * nu_ref
    return j
