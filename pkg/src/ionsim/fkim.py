"""Classical Frenkel-Kontorova physics of an ion chain in an axial lattice.

Dimensionless model: positions in units of the reduced lattice constant
d~ = d / 2 pi, energies in units of e^2 / (4 pi eps0 d~),

    E(z) = sum_i [ nu~^2 z_i^2 / 2 - K~ cos z_i ] + sum_{i<j} 1 / |z_i - z_j|,

with nu~^2 = 4 pi eps0 m nu_z^2 d~^3 / e^2. Below the critical lattice
strength the chain slides (continuous hull function, sound-like spectrum);
above it the positions pin into a staircase, the hull function develops
gaps and the phonon spectrum opens a gap. At the golden-mean density
(centre spacing / lattice period = (sqrt 5 + 1)/2) the transition sits
near K~ ~ 0.05. Everything here is classical; the effective Planck
constant is computed only to document how deep in the semiclassical
regime (hbar_eff << 1) an experiment would run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bhm import LatticeField
from .constants import COULOMB, CONST, IonSpecies, TrapConfig
from .errors import ConvergenceError, DomainError, InstabilityError

GOLDEN = (math.sqrt(5.0) + 1.0) / 2.0


@dataclass(frozen=True)
class FKConfig:
    """Dimensionless Frenkel-Kontorova chain parameters."""

    n: int
    nu_tilde: float
    k_tilde: float
    lattice_period: float        # m, for dimensional I/O
    species: IonSpecies

    def __post_init__(self):
        if self.n < 3:
            raise DomainError("FK chain needs at least 3 ions")
        if self.k_tilde < 0.0:
            raise DomainError("lattice strength must be >= 0")
        if self.nu_tilde <= 0.0:
            raise DomainError("trap frequency must be positive")

    @property
    def energy_unit(self) -> float:
        """e^2/(4 pi eps0 d~) in joules."""
        d_red = self.lattice_period / (2.0 * math.pi)
        return self.species.charge_multiple**2 * COULOMB / d_red


@dataclass(frozen=True)
class FKState:
    """Converged configuration with its diagnostics."""

    positions: np.ndarray       # dimensionless, sorted ascending
    energy: float               # dimensionless
    config: FKConfig
    gradient_norm: float
    hull_samples: np.ndarray | None = field(default=None, repr=False)
    spectrum: np.ndarray | None = field(default=None, repr=False)


def dimensionless_transform(
    species: IonSpecies, trap: TrapConfig, lattice: LatticeField
):
    """Map physical trap + standing wave onto (FKConfig template, hbar_eff).

    The standing wave F cos^2(k z) = F/2 + (F/2) cos(2 k z) contributes a
    sinusoid of amplitude K = F/2 and period d = pi / k_sw. The effective
    Planck constant is hbar over the model's action unit
    e sqrt(m d~ / 4 pi eps0):  hbar_eff = hbar / sqrt((e^2/4pi eps0) m d~).
    """
    d = math.pi / lattice.k_sw
    d_red = d / (2.0 * math.pi)
    energy_unit = species.charge_multiple**2 * COULOMB / d_red
    nu_tilde_sq = species.mass * trap.nu_z**2 * d_red**3 / (
        species.charge_multiple**2 * COULOMB
    )
    k_tilde = 0.5 * lattice.peak_shift_f / energy_unit
    hbar_eff = CONST.reduced_planck / math.sqrt(
        species.charge_multiple**2 * COULOMB * species.mass * d_red
    )
    template = dict(
        nu_tilde=math.sqrt(nu_tilde_sq),
        k_tilde=k_tilde,
        lattice_period=d,
        species=species,
    )
    return template, hbar_eff


def hbar_eff_for_period(species: IonSpecies, d: float) -> float:
    d_red = d / (2.0 * math.pi)
    return CONST.reduced_planck / math.sqrt(
        species.charge_multiple**2 * COULOMB * species.mass * d_red
    )


def beam_angle(wavelength: float, period: float) -> float:
    """Half-angle alpha (rad) of two crossed beams giving an axial period
    d = lambda / (2 cos alpha)."""
    c = wavelength / (2.0 * period)
    if not 0.0 < c <= 1.0:
        raise DomainError("period not reachable at this wavelength")
    return math.acos(c)


# ---------------------------------------------------------------------------
# energy landscape

def fk_energy(z, cfg: FKConfig) -> float:
    d = z[:, None] - z[None, :]
    np.fill_diagonal(d, np.inf)
    coul = np.sum(np.triu(1.0 / np.abs(d), k=1))
    return float(
        0.5 * cfg.nu_tilde**2 * np.sum(z**2) - cfg.k_tilde * np.sum(np.cos(z)) + coul
    )


def fk_gradient(z, cfg: FKConfig) -> np.ndarray:
    d = z[:, None] - z[None, :]
    np.fill_diagonal(d, np.inf)
    inv2 = 1.0 / d**2
    return (
        cfg.nu_tilde**2 * z
        + cfg.k_tilde * np.sin(z)
        - np.sum(np.sign(d) * inv2, axis=1)
    )


def fk_hessian(z, cfg: FKConfig) -> np.ndarray:
    d = z[:, None] - z[None, :]
    np.fill_diagonal(d, np.inf)
    inv3 = 1.0 / np.abs(d) ** 3
    h = -2.0 * inv3
    np.fill_diagonal(h, 0.0)
    np.fill_diagonal(h, cfg.nu_tilde**2 + cfg.k_tilde * np.cos(z) - np.sum(h, axis=1))
    return h


def _initial_positions(cfg: FKConfig) -> np.ndarray:
    # seed from the pure-Coulomb chain scaling: spacing ~ (zeta-like)ing
    # handled by minimising the K~ = 0 problem from a uniform guess
    n = cfg.n
    spacing = 2.0 * n ** (-0.56) * (1.0 / cfg.nu_tilde**2) ** (1.0 / 3.0)
    return spacing * (np.arange(n) - 0.5 * (n - 1))


def ground_state(cfg: FKConfig, seed_positions=None, max_iter: int = 400) -> FKState:
    """Minimise the FK energy; retry along unstable directions at saddles.

    Newton steps with energy backtracking; a converged point whose Hessian
    has a negative eigenvalue is a saddle (the symmetric configuration on
    top of a lattice ridge is the canonical case) and restarts from a kick
    along the unstable direction.
    """
    z = (
        np.sort(np.asarray(seed_positions, dtype=float))
        if seed_positions is not None
        else _initial_positions(cfg)
    )
    for attempt in range(6):
        z, gnorm = _minimise(z, cfg, max_iter)
        hess = fk_hessian(z, cfg)
        lam, vec = np.linalg.eigh(hess)
        if lam[0] > 0.0:
            return FKState(
                positions=z, energy=fk_energy(z, cfg), config=cfg, gradient_norm=gnorm
            )
        # saddle: kick along the most unstable direction and retry
        scale = 0.1 * (attempt + 1)
        z = np.sort(z + scale * vec[:, 0])
    raise InstabilityError("minimiser kept landing on saddle points")


def _minimise(z0, cfg, max_iter):
    z = z0.copy()
    e = fk_energy(z, cfg)
    for _ in range(max_iter):
        g = fk_gradient(z, cfg)
        gnorm = float(np.linalg.norm(g))
        if gnorm < 1e-11 * max(1.0, cfg.nu_tilde**2):
            return z, gnorm
        h = fk_hessian(z, cfg)
        try:
            # regularise indefinite Hessians toward gradient descent
            lam_min = np.linalg.eigvalsh(h)[0]
            shift = max(0.0, 1e-8 - lam_min)
            step = np.linalg.solve(h + shift * np.eye(len(z)), g)
        except np.linalg.LinAlgError:
            step = g
        # trust region: one radian (1/2pi period) per iterate keeps the
        # iteration on its branch instead of hopping lattice wells
        biggest = np.max(np.abs(step))
        if biggest > 1.0:
            step = step / biggest
        alpha = 1.0
        for _ in range(50):
            trial = z - alpha * step
            if np.all(np.diff(trial) > 0):
                e_trial = fk_energy(trial, cfg)
                if e_trial <= e + 1e-15 * abs(e):
                    z, e = trial, e_trial
                    break
            alpha *= 0.5
        else:
            g_now = float(np.linalg.norm(fk_gradient(z, cfg)))
            if g_now < 1e-8 * max(1.0, cfg.nu_tilde**2):
                return z, g_now
            raise ConvergenceError(
                f"FK minimiser stalled at |grad|={g_now:.2e}", residual=g_now
            )
    g_now = float(np.linalg.norm(fk_gradient(z, cfg)))
    if g_now < 1e-8 * max(1.0, cfg.nu_tilde**2):
        return z, g_now
    raise ConvergenceError(f"FK minimiser hit max_iter at |grad|={g_now:.2e}", residual=g_now)


# ---------------------------------------------------------------------------
# density tuning and diagnostics

def _central_third(n: int):
    lo = n // 3
    hi = n - n // 3
    return slice(lo, hi)


def central_spacing(state_or_positions) -> float:
    z = (
        state_or_positions.positions
        if isinstance(state_or_positions, FKState)
        else np.asarray(state_or_positions)
    )
    zc = z[_central_third(len(z))]
    return float(np.mean(np.diff(zc)))


def occupation(state_or_positions) -> float:
    """Mean ions per lattice period over the central third (period = 2 pi)."""
    return 2.0 * math.pi / central_spacing(state_or_positions)


def golden_mean_tuning(cfg: FKConfig, tol: float = 1e-4, max_iter: int = 80) -> FKConfig:
    """Bisect nu~ until the lattice-site occupation is (sqrt 5 + 1)/2.

    Golden-mean density: on average phi = 1.618 ions per lattice period
    over the central third (spacing = period/phi), the incommensurate
    winding used for the pinning transition. Works on the K~ = 0 chain
    (the lattice is ramped up afterwards in an experiment).
    """
    if cfg.n < 12:
        raise DomainError("golden tuning needs N >= 12 for a meaningful centre")
    target = 2.0 * math.pi / GOLDEN  # spacing giving phi ions per period

    def spacing_of(nu):
        c = replace(cfg, nu_tilde=nu, k_tilde=0.0)
        return central_spacing(ground_state(c))

    # spacing is monotone decreasing in nu~: nu_tight gives spacing below
    # target, nu_weak above
    nu_tight, nu_weak = cfg.nu_tilde, cfg.nu_tilde
    for _ in range(60):
        if spacing_of(nu_tight) <= target:
            break
        nu_tight *= 2.0
    else:
        raise ConvergenceError("failed to bracket golden density (tight side)")
    for _ in range(60):
        if spacing_of(nu_weak) >= target:
            break
        nu_weak /= 2.0
    else:
        raise ConvergenceError("failed to bracket golden density (weak side)")
    for _ in range(max_iter):
        mid = math.sqrt(nu_tight * nu_weak)
        s = spacing_of(mid)
        if abs(2.0 * math.pi / s - GOLDEN) < tol:
            return replace(cfg, nu_tilde=mid)
        if s > target:
            nu_weak = mid
        else:
            nu_tight = mid
    raise ConvergenceError("golden-density bisection did not converge")


def golden_period_for_spacing(spacing: float) -> float:
    """Lattice period that puts ions at golden-mean density for a given
    centre spacing (period = spacing / golden ratio)."""
    return spacing / GOLDEN


@dataclass(frozen=True)
class HullDiagnostics:
    """Hull-function samples and its two gap statistics.

    samples: (x, y) pairs, x = unperturbed phase, y = perturbed phase,
    central third, sorted by x. jump_gap: largest circular discontinuity of
    the displacement graph y - x vs x (near zero while the hull map is
    continuous; O(1) once analyticity breaks). range_gap: largest circular
    window left empty by the perturbed phases (O(density spacing) for the
    identity map; grows toward 2 pi as the staircase forbidden zones open).
    """

    samples: np.ndarray
    jump_gap: float
    range_gap: float

    # the operative Aubry statistic
    @property
    def max_gap(self) -> float:
        return self.jump_gap


def hull_function(state: FKState, reference: FKState) -> HullDiagnostics:
    """Compare perturbed to unperturbed positions modulo the lattice period."""
    if state.config.n != reference.config.n:
        raise DomainError("hull comparison needs equal ion numbers")
    sel = _central_third(state.config.n)
    x = np.mod(reference.positions[sel], 2.0 * math.pi)
    y = np.mod(state.positions[sel], 2.0 * math.pi)
    order = np.argsort(x)
    x, y = x[order], y[order]
    samples = np.column_stack([x, y])
    # displacement graph discontinuities (circular, including wrap-around)
    disp = np.angle(np.exp(1j * (y - x)))
    dd = np.diff(np.concatenate([disp, [disp[0]]]))
    jump_gap = float(np.max(np.abs(np.angle(np.exp(1j * dd)))))
    ys = np.sort(y)
    gaps = np.diff(np.concatenate([ys, [ys[0] + 2.0 * math.pi]]))
    range_gap = float(np.max(gaps))
    return HullDiagnostics(samples=samples, jump_gap=jump_gap, range_gap=range_gap)


def phonon_spectrum(state: FKState) -> np.ndarray:
    """Dimensionless mode frequencies at the minimum (all real)."""
    lam = np.linalg.eigvalsh(fk_hessian(state.positions, state.config))
    if lam[0] <= 0.0:
        raise InstabilityError("configuration is not a minimum")
    return np.sqrt(lam)


def form_factor(positions, k_grid) -> np.ndarray:
    """Power spectrum F(k) = |sum_n exp(i k z_n)|^2 / N of one configuration."""
    z = np.asarray(positions, dtype=float)
    k = np.asarray(k_grid, dtype=float)
    amp = np.exp(1j * np.outer(k, z)).sum(axis=1)
    return np.abs(amp) ** 2 / len(z)


# ---------------------------------------------------------------------------
# Aubry scan

@dataclass
class AubryScan:
    k_values: np.ndarray
    max_gaps: np.ndarray        # hull displacement-jump statistic
    range_gaps: np.ndarray      # forbidden-window statistic
    spectral_gaps: np.ndarray   # lowest mode relative to the K~=0 chain
    energies: np.ndarray
    k_critical: float | None
    baseline_gap: float
    states: list = field(default_factory=list, repr=False)


def aubry_scan(
    cfg: FKConfig,
    k_values,
    baseline_k: float = 0.01,
    gap_factor: float = 3.0,
) -> AubryScan:
    """Continuation scan in K~ with hull-gap Aubry detection.

    Each step seeds from the previous minimum (tracks one branch). The
    critical strength is the first K~ whose hull displacement-jump
    statistic exceeds `gap_factor` times its sliding-phase value at
    baseline_k; the factor is calibrated on the N=34 golden-density chain
    so detection coincides with the analyticity break. Spectral gaps are
    reported relative to the K~ = 0 lowest mode.
    """
    k_values = np.sort(np.asarray(k_values, dtype=float))
    ref = ground_state(replace(cfg, k_tilde=0.0))
    base_state = ground_state(replace(cfg, k_tilde=baseline_k), seed_positions=ref.positions)
    gap0 = hull_function(base_state, ref).jump_gap
    w0 = phonon_spectrum(ref)[0]

    gaps, rgaps, sgaps, energies, states = [], [], [], [], []
    k_c = None
    seed = ref.positions
    for k in k_values:
        st = ground_state(replace(cfg, k_tilde=float(k)), seed_positions=seed)
        seed = st.positions
        hull = hull_function(st, ref)
        w = phonon_spectrum(st)[0]
        gaps.append(hull.jump_gap)
        rgaps.append(hull.range_gap)
        sgaps.append(w / w0)
        energies.append(st.energy)
        states.append(st)
        if k_c is None and hull.jump_gap > gap_factor * gap0:
            k_c = float(k)
    return AubryScan(
        k_values=k_values,
        max_gaps=np.array(gaps),
        range_gaps=np.array(rgaps),
        spectral_gaps=np.array(sgaps),
        energies=np.array(energies),
        k_critical=k_c,
        baseline_gap=gap0,
        states=states,
    )
