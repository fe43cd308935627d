"""Internal-level x truncated-Fock-space engine for sideband physics.

Resonant, rotating-wave, interaction-picture drives on a two-level ion
(basis order (a, b); sigma_z = +1 on a, sigma^+ = |b><a|):

    carrier:       Omega (s+ e^{i phi} + s- e^{-i phi})
    red, order q:  eta^q Omega~ (s+ a^q e^{i phi} + h.c.)
    blue, order q: eta^q Omega~ (s+ a^dag q e^{i phi} + h.c.)

All coefficients are angular frequencies (H/hbar). The q-th sideband
matrix elements carry the exact sqrt(n!/(n-q)!) ladder factors, so pulse
areas calibrate exactly per starting Fock state; a leading_order flag
replaces them by the flat sqrt(q!) factor of the lowest rung for
paper-style comparisons. Population in the top two Fock levels is the
truncation guard: evolution refuses to continue once it grows past 1e-6.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .errors import DomainError, ProtocolError, TruncationError

TRUNCATION_GUARD = 1e-6


def destroy(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)


def fock_state(n: int, cutoff: int) -> np.ndarray:
    if not 0 <= n <= cutoff:
        raise DomainError("Fock index outside cutoff")
    v = np.zeros(cutoff + 1, dtype=complex)
    v[n] = 1.0
    return v


def coherent_state(alpha: complex, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1)
    from scipy.special import gammaln

    log_fact = gammaln(n + 1.0)
    amps = np.exp(-0.5 * abs(alpha) ** 2 + n * np.log(alpha) - 0.5 * log_fact) if alpha != 0 else None
    if alpha == 0:
        return fock_state(0, cutoff)
    v = amps.astype(complex)
    return v / np.linalg.norm(v)


# internal two-level operators, basis order (a, b)
SP = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |b><a|
SM = SP.T.conj()
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
S_IDENT = np.eye(2, dtype=complex)
PROJ_A = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
PROJ_B = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


@dataclass
class HybridState:
    """Internal x motional state with amplitudes of shape (2, cutoff + 1)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.ndim != 2 or self.amplitudes.shape[0] != 2:
            raise DomainError("amplitudes must have shape (2, cutoff+1)")
        if abs(self.norm - 1.0) > 1e-10:
            raise DomainError(f"state norm {self.norm} is not 1")

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[1] - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def top_population(self) -> float:
        return float(np.sum(np.abs(self.amplitudes[:, -2:]) ** 2))

    def check_truncation(self):
        top = self.top_population()
        if top > TRUNCATION_GUARD:
            raise TruncationError(
                f"population {top:.2e} in the top two Fock levels; raise the cutoff"
            )

    def internal_populations(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    def motional_populations(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)

    def expect_motional(self, op: np.ndarray) -> complex:
        rho_m = self.amplitudes.conj().T @ self.amplitudes  # reduced motional
        # rho_m[m, n] = sum_s conj(c[s,m]) c[s,n]; <O> = tr(rho O)
        return complex(np.einsum("mn,nm->", rho_m, op))


def product_hybrid(internal: np.ndarray, motional: np.ndarray) -> HybridState:
    amps = np.outer(np.asarray(internal, dtype=complex), np.asarray(motional, dtype=complex))
    amps /= np.linalg.norm(amps)
    return HybridState(amps)


@dataclass(frozen=True)
class DriveSpec:
    """One resonant drive term."""

    kind: str                  # 'carrier' | 'red' | 'blue'
    rabi: float                # rad/s (Omega for carrier, Omega~ otherwise)
    phase: float = 0.0
    eta: float = 0.0
    order: int = 1
    leading_order: bool = False

    def __post_init__(self):
        if self.kind not in ("carrier", "red", "blue"):
            raise DomainError(f"unknown drive kind {self.kind!r}")
        if self.rabi < 0.0:
            raise DomainError("Rabi frequency must be >= 0")
        if self.kind != "carrier" and self.order < 1:
            raise DomainError("sideband order must be >= 1")


def build_drive(spec: DriveSpec, cutoff: int) -> np.ndarray:
    """Dense Hermitian drive operator (rad/s) on the 2 x (cutoff+1) space."""
    if spec.kind != "carrier" and cutoff < spec.order + 2:
        raise TruncationError("cutoff must exceed sideband order + 2")
    a = destroy(cutoff)
    if spec.kind == "carrier":
        coupling = spec.rabi * np.eye(cutoff + 1)
    else:
        ladder = np.linalg.matrix_power(a, spec.order)
        if spec.kind == "blue":
            ladder = ladder.T
        if spec.leading_order:
            # flatten the factorial ratios to the lowest-rung value
            from math import factorial

            flat = np.sqrt(float(factorial(spec.order)))
            ladder = np.where(np.abs(ladder) > 0, flat * np.sign(np.abs(ladder)), 0.0)
        coupling = spec.rabi * spec.eta**spec.order * ladder
    phase = np.exp(1j * spec.phase)
    h = np.kron(SP, phase * coupling)
    h = h + h.conj().T
    return h


def sideband_element(spec: DriveSpec, n_start: int) -> float:
    """Coupling matrix element out of |., n_start> for the given drive.

    carrier: Omega; red q: eta^q Omega~ sqrt(n!/(n-q)!) from |a, n> (n = row
    of the lower level); blue q: same factor landing on n_start + q.
    """
    from math import factorial

    if spec.kind == "carrier":
        return spec.rabi
    q = spec.order
    if spec.leading_order:
        ratio = float(factorial(q))
    elif spec.kind == "red":
        if n_start < q:
            return 0.0
        ratio = float(factorial(n_start)) / float(factorial(n_start - q))
    else:
        ratio = float(factorial(n_start + q)) / float(factorial(n_start))
    return spec.rabi * spec.eta**q * np.sqrt(ratio)


def pulse_duration(spec: DriveSpec, area: float, n_start: int) -> float:
    """Time for a pulse of the given area (pi = full transfer) on the
    two-level block starting from Fock level n_start."""
    elem = sideband_element(spec, n_start)
    if elem == 0.0:
        raise DomainError("drive does not couple out of this Fock level")
    return 0.5 * area / elem


def evolve_hybrid(state: HybridState, drives, duration: float, checkpoints: int = 4) -> HybridState:
    """Unitary evolution under the summed static drive Hamiltonians.

    The truncation guard is monitored at intermediate checkpoints, not just
    at the end, so transient leakage to the top of the Fock space raises
    TruncationError instead of silently folding back.
    """
    cutoff = state.cutoff
    h = sum(build_drive(d, cutoff) for d in drives)
    asym = np.max(np.abs(h - h.conj().T))
    if asym > 1e-12 * max(1.0, np.max(np.abs(h))):
        raise DomainError("drive Hamiltonian lost hermiticity")
    vals, vecs = eigh(h)
    psi = state.vector
    out = None
    for k in range(1, checkpoints + 1):
        t = duration * k / checkpoints
        phase = np.exp(-1j * vals * t)
        out = HybridState(((vecs * phase) @ (vecs.conj().T @ psi)).reshape(2, -1))
        out.check_truncation()
    return out


# ---------------------------------------------------------------------------
# nonlinear Mach-Zehnder

def free_phase(state: HybridState, phi: float) -> HybridState:
    """Accumulate phase n phi on Fock level n (trap-frequency offset arm)."""
    n = np.arange(state.cutoff + 1)
    return HybridState(state.amplitudes * np.exp(-1j * n * phi)[None, :])


def nonlinear_mz(order: int, phi: float, rabi: float, eta: float, cutoff: int = 24):
    """Nonlinear Mach-Zehnder fringe: returns the detection probability.

    Sequence on the input |b, 0> (internal excited, motional vacuum):
    pi/2 pulse on the order-q sideband, free phase n phi, second pi/2 on
    the same sideband, then detection of the internal excited state. At
    exact pulse areas P_b = (1 - cos(q phi)) / 2.
    """
    if order < 1:
        raise DomainError("sideband order must be >= 1")
    drive = DriveSpec(kind="red", rabi=rabi, phase=0.0, eta=eta, order=order)
    state = product_hybrid(np.array([0.0, 1.0]), fock_state(0, cutoff))
    t_half = pulse_duration(drive, np.pi / 2.0, n_start=order)  # |a, q> rung
    state = evolve_hybrid(state, [drive], t_half)
    state = free_phase(state, phi)
    state = evolve_hybrid(state, [drive], t_half)
    return float(state.internal_populations()[1])


def mz_fringe_scan(order: int, phis, rabi: float, eta: float, cutoff: int = 24):
    return np.array([nonlinear_mz(order, p, rabi, eta, cutoff) for p in phis])


def fringe_frequency(phis, signal) -> float:
    """Dominant fringe frequency (per radian of phi) of a scan by FFT peak
    with quadratic interpolation."""
    phis = np.asarray(phis, dtype=float)
    y = np.asarray(signal, dtype=float) - np.mean(signal)
    spacing = phis[1] - phis[0]
    amps = np.abs(np.fft.rfft(y))
    k = int(np.argmax(amps[1:])) + 1
    if 1 <= k < len(amps) - 1:
        denom = amps[k - 1] - 2 * amps[k] + amps[k + 1]
        delta = 0.5 * (amps[k - 1] - amps[k + 1]) / denom if denom != 0 else 0.0
    else:
        delta = 0.0
    return (k + delta) / (len(phis) * spacing) * 2.0 * np.pi


# ---------------------------------------------------------------------------
# generalized quadrature measurement

def quadrature_operator(phi: float, cutoff: int) -> np.ndarray:
    """Hermitian generalized quadrature (a e^{-i phi} - a^dag e^{i phi})/(2i).

    phi = -pi/2 gives x/(2 Delta); phi = 0 gives Delta p / hbar. The
    anti-Hermitian textbook form differs by the factor i; this convention
    is the one the slope protocol below actually measures.
    """
    a = destroy(cutoff)
    return (a * np.exp(-1j * phi) - a.T * np.exp(1j * phi)) / 2j


def quadrature_direct(motional: np.ndarray, phi: float) -> float:
    """Route A: direct expectation of the quadrature on a motional state."""
    op = quadrature_operator(phi, len(motional) - 1)
    return float(np.real(np.conj(motional) @ op @ motional))


def quadrature_slope(motional: np.ndarray, phi: float, rabi: float, eta: float,
                     tau: float = 1e-3) -> float:
    """Route B: slope of P_b under a Jaynes-Cummings coupling at tau = 0.

    Prepare (|a> + e^{i phi}|b>)/sqrt(2) x motional state, couple with the
    first red sideband at phase 0, and take dP_b/d(tau) at tau = 0 in the
    dimensionless time tau = eta Omega~ t; a central difference makes the
    estimate O(tau^2) accurate.
    """
    motional = np.asarray(motional, dtype=complex)
    if abs(np.linalg.norm(motional) - 1.0) > 1e-10:
        raise ProtocolError("motional state must be normalised")
    internal = np.array([1.0, np.exp(1j * phi)]) / np.sqrt(2.0)
    state = product_hybrid(internal, motional)
    drive = DriveSpec(kind="red", rabi=rabi, eta=eta, order=1)
    dt = tau / (eta * rabi)
    p_plus = evolve_hybrid(state, [drive], dt).internal_populations()[1]
    p_minus = evolve_hybrid(state, [drive], -dt).internal_populations()[1]
    return float((p_plus - p_minus) / (2.0 * tau))
