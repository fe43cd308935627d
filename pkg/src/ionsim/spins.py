"""Dense exact spin dynamics for small chains (N <= 14).

Hamiltonians follow the convention (all coefficients in rad/s, i.e. H/hbar)

    H = -(1/2) sum_alpha sum_{i>j} J^alpha_ij sigma_i^alpha sigma_j^alpha
        - sum_i B'_i . sigma_i,

the anisotropic coupling form realised by state-dependent forces on an ion
chain; the transverse Ising model is the special case J_x = J_y = 0 with a
global B'_x. Basis: sigma_z eigenbasis, spin 0 most significant bit,
bit value 0 = up (+1).

Time evolution uses a per-step matrix exponential of the midpoint
Hamiltonian (2nd-order Magnus), which is unitary to roundoff regardless of
step size; accuracy is controlled by the step count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .chain import NormalModes
from .coupling import FrequencyGradients
from .errors import AccuracyError, CapacityError, DomainError

HARD_CAP = 14

SIGMA = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}
IDENT2 = np.eye(2, dtype=complex)

UP = np.array([1.0, 0.0], dtype=complex)
DOWN = np.array([0.0, 1.0], dtype=complex)
PLUS_X = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
MINUS_X = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)


def single_site(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a 2x2 operator on `site` (0 = most significant) into 2^n."""
    out = np.array([[1.0 + 0.0j]])
    for k in range(n):
        out = np.kron(out, op if k == site else IDENT2)
    return out


def pauli(axis: str, site: int, n: int) -> np.ndarray:
    return single_site(SIGMA[axis], site, n)


def product_state(single_states) -> np.ndarray:
    out = np.array([1.0 + 0.0j])
    for s in single_states:
        out = np.kron(out, np.asarray(s, dtype=complex))
    return out


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.abs(np.vdot(a, b)) ** 2)


@dataclass(frozen=True)
class SpinHamiltonian:
    """Couplings (rad/s, symmetric, zero diagonal) and local fields."""

    n: int
    jx: np.ndarray | None = None
    jy: np.ndarray | None = None
    jz: np.ndarray | None = None
    local_fields: np.ndarray | None = None  # shape (n, 3)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("need at least one spin")
        if self.n > HARD_CAP:
            raise CapacityError(f"N={self.n} exceeds dense cap {HARD_CAP}")
        for name in ("jx", "jy", "jz"):
            m = getattr(self, name)
            if m is None:
                continue
            m = np.asarray(m, dtype=float)
            if m.shape != (self.n, self.n):
                raise DomainError(f"{name} must be {self.n}x{self.n}")
            if not np.allclose(m, m.T, atol=1e-12):
                raise DomainError(f"{name} must be symmetric")
            if np.any(np.abs(np.diag(m)) > 0):
                raise DomainError(f"{name} must have zero diagonal")
        if self.local_fields is not None and np.shape(self.local_fields) != (self.n, 3):
            raise DomainError("local_fields must have shape (n, 3)")

    @property
    def dim(self) -> int:
        return 2**self.n


def build_hamiltonian(spec: SpinHamiltonian) -> np.ndarray:
    """Dense Hermitian operator (rad/s) for the spin model above."""
    n, dim = spec.n, spec.dim
    h = np.zeros((dim, dim), dtype=complex)
    for axis, mat in (("x", spec.jx), ("y", spec.jy), ("z", spec.jz)):
        if mat is None:
            continue
        mat = np.asarray(mat, dtype=float)
        ops = [pauli(axis, i, n) for i in range(n)]
        for i in range(n):
            for j in range(i):
                if mat[i, j] != 0.0:
                    h -= 0.5 * mat[i, j] * ops[i] @ ops[j]
    if spec.local_fields is not None:
        bf = np.asarray(spec.local_fields, dtype=float)
        for i in range(n):
            for k, axis in enumerate("xyz"):
                if bf[i, k] != 0.0:
                    h -= bf[i, k] * pauli(axis, i, n)
    return h


def transverse_drive(rabi: float, phase: float = 0.0, detuning: float = 0.0) -> np.ndarray:
    """Effective local field (rad/s) from a resonant or detuned spin drive.

    B' = (Omega_R/2)(cos phi, -sin phi, 0) + (detuning/2) z_hat in the
    -sigma.B' convention of build_hamiltonian; phi = 0 at zero detuning
    gives a pure x field of magnitude Omega_R/2.
    """
    return np.array(
        [
            0.5 * rabi * np.cos(phase),
            -0.5 * rabi * np.sin(phase),
            0.5 * detuning,
        ]
    )


# ---------------------------------------------------------------------------
# time evolution

@dataclass(frozen=True)
class Profile:
    """Scalar time profile on [0, duration]; linear or exponential in t."""

    kind: str
    start: float
    end: float
    duration: float

    def __post_init__(self):
        if self.duration <= 0.0:
            raise DomainError("profile duration must be positive")
        if self.kind not in ("linear", "exponential", "constant"):
            raise DomainError(f"unknown profile kind {self.kind!r}")
        if not (np.isfinite(self.start) and np.isfinite(self.end)):
            raise DomainError("profile endpoints must be finite")

    def __call__(self, t):
        s = np.clip(t / self.duration, 0.0, 1.0)
        if self.kind == "constant":
            return self.start * np.ones_like(np.asarray(s, dtype=float))
        if self.kind == "linear":
            return self.start + (self.end - self.start) * s
        # exponential-in-time interpolation; handles start == 0 by ramping
        # the *complement* exponentially so the profile stays finite
        tau = 5.0
        rise = (np.exp(tau * s) - 1.0) / (np.exp(tau) - 1.0)
        return self.start + (self.end - self.start) * rise


@dataclass(frozen=True)
class RampSchedule:
    """Time-dependent coefficients for a parametrised spin Hamiltonian.

    profiles maps a coefficient name to a callable of t; builder receives
    the evaluated coefficients and returns the SpinHamiltonian at time t.
    """

    duration: float
    steps: int
    profiles: dict
    builder: object = field(repr=False, default=None)

    def __post_init__(self):
        if self.duration <= 0.0:
            raise DomainError("schedule duration must be positive")
        if self.steps < 1:
            raise DomainError("need at least one step")

    def coefficients(self, t):
        return {name: float(p(t)) for name, p in self.profiles.items()}

    def hamiltonian(self, t) -> np.ndarray:
        spec = self.builder(**self.coefficients(t))
        if isinstance(spec, SpinHamiltonian):
            return build_hamiltonian(spec)
        return np.asarray(spec)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), dim)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _step_unitary(h: np.ndarray, dt: float) -> np.ndarray:
    vals, vecs = eigh(h)
    return (vecs * np.exp(-1j * vals * dt)) @ vecs.conj().T


def evolve(
    state: np.ndarray,
    schedule: RampSchedule,
    sample_times=None,
    norm_tol: float = 1e-6,
) -> Trajectory:
    """Midpoint-Magnus evolution of a state under a ramp schedule.

    The per-step propagator is exactly unitary; norm drift beyond norm_tol
    (possible only through ill-conditioned eigensolves) raises AccuracyError
    suggesting refinement.
    """
    psi = np.asarray(state, dtype=complex).copy()
    if not np.isclose(np.linalg.norm(psi), 1.0, atol=1e-10):
        raise DomainError("initial state must be normalised")
    if sample_times is None:
        sample_times = np.array([0.0, schedule.duration])
    sample_times = np.asarray(sample_times, dtype=float)

    dt = schedule.duration / schedule.steps
    grid = np.arange(schedule.steps + 1) * dt
    out = np.empty((len(sample_times), psi.size), dtype=complex)
    next_sample = 0

    def record(upto_time):
        nonlocal next_sample
        while next_sample < len(sample_times) and sample_times[next_sample] <= upto_time + 1e-12 * schedule.duration:
            out[next_sample] = psi
            next_sample += 1

    record(0.0)
    for k in range(schedule.steps):
        hmid = schedule.hamiltonian(0.5 * (grid[k] + grid[k + 1]))
        psi = _step_unitary(hmid, dt) @ psi
        drift = abs(np.linalg.norm(psi) - 1.0)
        if drift > norm_tol:
            raise AccuracyError(
                f"norm drift {drift:.2e} exceeded {norm_tol:.1e}; refine steps"
            )
        record(grid[k + 1])
    while next_sample < len(sample_times):
        out[next_sample] = psi
        next_sample += 1
    return Trajectory(times=sample_times, states=out)


def evolve_static(state: np.ndarray, h: np.ndarray, duration: float) -> np.ndarray:
    """Exact evolution under a time-independent Hamiltonian."""
    return _step_unitary(h, duration) @ np.asarray(state, dtype=complex)


# ---------------------------------------------------------------------------
# spectra and observables

def ground_state(h: np.ndarray, degeneracy_tol: float = 1e-9):
    """Lowest eigenpair; returns an orthonormal basis of the ground space.

    The returned array has shape (dim, g) with g >= 1 columns spanning all
    eigenvectors within degeneracy_tol * max(1, |E0|) of the minimum.
    """
    vals, vecs = eigh(h)
    e0 = vals[0]
    cut = degeneracy_tol * max(1.0, abs(e0))
    g = int(np.sum(vals <= e0 + cut))
    return float(e0), vecs[:, :g]


def correlations(state: np.ndarray, axis: str, n: int | None = None):
    """<sigma_i^a sigma_j^a> matrix and magnetisations <sigma_i^a>."""
    psi = np.asarray(state, dtype=complex)
    if n is None:
        n = int(round(np.log2(psi.size)))
    ops = [pauli(axis, i, n) for i in range(n)]
    applied = [op @ psi for op in ops]
    mags = np.array([np.vdot(psi, ap).real for ap in applied])
    corr = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            val = np.vdot(applied[i], applied[j]).real
            corr[i, j] = corr[j, i] = val
    return corr, mags


def spin_boson_couplings(
    grads: FrequencyGradients, modes: NormalModes, ion_index: int
) -> np.ndarray:
    """Per-mode bath couplings C_l = d_z(omega_i) sum_n S_nl for one ion.

    These are the coefficients of (hbar/2) sigma_z sum_l C_l Q_l when the
    chain's modes are viewed as the oscillator bath of a spin-boson model;
    the open-system bath dynamics itself is out of scope here.
    """
    if not 0 <= ion_index < modes.n:
        raise DomainError("ion index out of range")
    column_sums = np.sum(modes.mode_matrix, axis=0)
    return grads.domega_dz[ion_index] * column_sums


# ---------------------------------------------------------------------------
# convenience builders

def ising_spec(n: int, j: np.ndarray | float, bx: float) -> SpinHamiltonian:
    """Transverse Ising model: -(1/2) sum J_ij sz sz - Bx sum sx."""
    if np.isscalar(j):
        jm = np.zeros((n, n))
        for i in range(n - 1):  # nearest neighbours
            jm[i, i + 1] = jm[i + 1, i] = j
    else:
        jm = np.asarray(j, dtype=float)
    fields = np.zeros((n, 3))
    fields[:, 0] = bx
    return SpinHamiltonian(n=n, jz=jm, local_fields=fields)
