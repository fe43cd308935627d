"""Hopfield associative memory, including the trapped-ion learning rule.

Patterns are +-1 vectors; sequential updates s_i <- sgn(sum_j J_ij s_j + h_i)
with the sgn(0) tie broken by keeping the current spin, so stored fixed
points stay fixed. Sequential descent on symmetric weights never increases
the energy H = -(1/2) sum_{i != j} J_ij s_i s_j - sum_i h_i s_i, which is
asserted by tests on every trajectory.

The ion variant replaces Hebb's outer products by the vibrational-mode sum
J_ij = (hbar / 2m) domega sum_n S_in S_jn / nu_n^2: near-degenerate low
modes act as stored patterns sgn(S_n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import NormalModes
from .constants import CONST, IonSpecies
from .errors import DomainError


def _check_pattern(p) -> np.ndarray:
    arr = np.asarray(p)
    if not np.all(np.abs(arr) == 1):
        raise DomainError("pattern entries must be +-1")
    return arr.astype(int)


@dataclass(frozen=True)
class Weights:
    """Symmetric couplings with zero diagonal plus per-node thresholds."""

    j: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        j = np.asarray(self.j, dtype=float)
        if j.ndim != 2 or j.shape[0] != j.shape[1]:
            raise DomainError("weight matrix must be square")
        if not np.allclose(j, j.T, atol=1e-12):
            raise DomainError("weights must be symmetric")
        if np.any(np.abs(np.diag(j)) > 0):
            raise DomainError("weights must have zero diagonal")
        if np.shape(self.h) != (j.shape[0],):
            raise DomainError("threshold vector has wrong length")

    @property
    def n(self) -> int:
        return self.j.shape[0]


def hebb_store(patterns, epsilon: float = 1.0, thresholds=None) -> Weights:
    """Batch Hebb rule J_ij = eps sum_mu xi_i xi_j (zero diagonal)."""
    mats = np.array([_check_pattern(p) for p in patterns], dtype=float)
    if mats.ndim != 2 or mats.shape[0] < 1:
        raise DomainError("need at least one pattern")
    n = mats.shape[1]
    j = epsilon * (mats.T @ mats)
    np.fill_diagonal(j, 0.0)
    h = np.zeros(n) if thresholds is None else np.asarray(thresholds, dtype=float)
    return Weights(j=j, h=h)


def hebb_update(weights: Weights | None, pattern, lam: float = 1.0, epsilon: float = 1.0) -> Weights:
    """Incremental rule J <- lam J + eps xi xi^T; None starts an empty memory."""
    xi = _check_pattern(pattern).astype(float)
    n = xi.size
    old = np.zeros((n, n)) if weights is None else weights.j
    h = np.zeros(n) if weights is None else weights.h
    j = lam * old + epsilon * np.outer(xi, xi)
    np.fill_diagonal(j, 0.0)
    return Weights(j=j, h=h)


def update_sequential(state, weights: Weights, order) -> np.ndarray:
    """One full sweep in the given site order, using updated values."""
    s = _check_pattern(state).copy()
    if s.size != weights.n:
        raise DomainError("state length does not match weights")
    for i in order:
        a = weights.j[i] @ s + weights.h[i]
        if a > 0:
            s[i] = 1
        elif a < 0:
            s[i] = -1
        # a == 0: keep current value
    return s


def energy(state, weights: Weights) -> float:
    s = _check_pattern(state).astype(float)
    return float(-0.5 * s @ weights.j @ s - weights.h @ s)


@dataclass
class RecallResult:
    state: np.ndarray
    sweeps: int
    energies: list
    converged: bool


def recall(initial, weights: Weights, max_sweeps: int = 100, rng=None, order=None) -> RecallResult:
    """Iterate sequential sweeps to a fixed point.

    The update order is one fixed random permutation drawn from rng (or the
    explicit `order`), reused every sweep so runs are reproducible.
    """
    s = _check_pattern(initial).copy()
    if order is None:
        rng = np.random.default_rng(0) if rng is None else rng
        order = rng.permutation(weights.n)
    energies = [energy(s, weights)]
    for sweep in range(1, max_sweeps + 1):
        new = update_sequential(s, weights, order)
        energies.append(energy(new, weights))
        if np.array_equal(new, s):
            return RecallResult(state=new, sweeps=sweep, energies=energies, converged=True)
        s = new
    return RecallResult(state=s, sweeps=max_sweeps, energies=energies, converged=False)


# ---------------------------------------------------------------------------
# trapped-ion learning rule

def ion_weights(modes: NormalModes, species: IonSpecies, gradient: float) -> Weights:
    """Vibrational-mode weights J_ij = (hbar/2m) domega sum_n S_in S_jn / nu_n^2.

    The diagonal is zeroed for network use. The 1/nu_n^2 weighting makes the
    lowest (near-degenerate) modes dominate the stored patterns.
    """
    s = modes.mode_matrix
    inv_nu2 = 1.0 / modes.frequencies**2
    j = (s * inv_nu2[None, :]) @ s.T
    j *= 0.5 * CONST.reduced_planck * gradient / species.mass
    j = 0.5 * (j + j.T)
    np.fill_diagonal(j, 0.0)
    return Weights(j=j, h=np.zeros(modes.n))


def mode_pattern(modes: NormalModes, mode_index: int, zero_tol: float = 1e-8):
    """Spin pattern sgn(S_in) of one vibrational mode.

    Returns (pattern, mask) where mask flags components with |S_in| below
    zero_tol; those sites have no defined orientation and are excluded from
    recall comparisons (reported, not silently dropped).
    """
    col = modes.mode_matrix[:, mode_index]
    mask = np.abs(col) < zero_tol
    pattern = np.where(col >= 0.0, 1, -1)
    return pattern, mask


def robustness_experiment(
    modes: NormalModes,
    species: IonSpecies,
    gradient: float,
    flips: int,
    trials: int,
    seed: int,
    pattern_index: int = 1,
    max_sweeps: int = 100,
):
    """Monte Carlo recall probability of a mode pattern after random flips.

    Initialise to the sgn(S_n) pattern of `pattern_index`, flip `flips`
    randomly chosen spins, run zero-temperature sequential recall with the
    ion weights, and count exact returns to the pattern (sites with
    undefined orientation are excluded from the comparison).
    """
    if flips > modes.n:
        raise DomainError("cannot flip more spins than there are ions")
    weights = ion_weights(modes, species, gradient)
    pattern, mask = mode_pattern(modes, pattern_index)
    keep = ~mask
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        s = pattern.copy()
        idx = rng.choice(modes.n, size=flips, replace=False)
        s[idx] *= -1
        result = recall(s, weights, max_sweeps=max_sweeps, rng=rng)
        if np.array_equal(result.state[keep], pattern[keep]):
            hits += 1
    p = hits / trials
    ci = 1.96 * np.sqrt(max(p * (1 - p), 1.0 / trials) / trials)
    return p, ci


def capacity_scan(
    n: int,
    pattern_counts,
    trials: int,
    seed: int,
    cue_flips: int | None = None,
    overlap_threshold: float = 1.0,
    max_sweeps: int = 50,
):
    """Fraction of stored random patterns retrievable from a noisy cue vs p.

    For each p: draw p random patterns, store with eps = 1/N, cue the net
    with one stored pattern corrupted on cue_flips sites (default N/5,
    the 20%-noise regime the memory is supposed to correct), and succeed
    if recall returns the pattern to at least overlap_threshold. The 50%
    crossing of the success rate locates the capacity, near 0.14 N.
    Returns (pattern_counts, success_rates).
    """
    if cue_flips is None:
        cue_flips = n // 5
    rng = np.random.default_rng(seed)
    rates = []
    for p in pattern_counts:
        hits = 0
        for _ in range(trials):
            patterns = rng.choice([-1, 1], size=(p, n))
            weights = hebb_store(patterns, epsilon=1.0 / n)
            target = patterns[rng.integers(p)]
            cue = target.copy()
            if cue_flips:
                idx = rng.choice(n, size=cue_flips, replace=False)
                cue[idx] *= -1
            result = recall(cue, weights, max_sweeps=max_sweeps, rng=rng)
            overlap = abs(np.dot(result.state, target)) / n
            if overlap >= overlap_threshold:
                hits += 1
        rates.append(hits / trials)
    return np.asarray(pattern_counts), np.asarray(rates)


def capacity_crossing(pattern_counts, rates, level: float = 0.5):
    """First p where the success rate crosses below `level` (interpolated)."""
    pattern_counts = np.asarray(pattern_counts, dtype=float)
    rates = np.asarray(rates, dtype=float)
    for k in range(1, len(rates)):
        if rates[k - 1] >= level > rates[k]:
            # linear interpolation between the bracketing points
            p0, p1 = pattern_counts[k - 1], pattern_counts[k]
            r0, r1 = rates[k - 1], rates[k]
            return p0 + (level - r0) * (p1 - p0) / (r1 - r0)
    raise DomainError("success rate never crosses the requested level")
