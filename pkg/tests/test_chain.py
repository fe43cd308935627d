import numpy as np
import pytest

from ionsim.chain import (
    NormalModes,
    SegmentedPotential,
    equilibrium_positions,
    ground_state_spread,
    length_scale,
    normal_modes,
    radial_hessian_scaled,
    spacing_estimate,
)
from ionsim.constants import IonSpecies, TrapConfig, species_lookup, trap_from_mhz
from ionsim.errors import DomainError, InstabilityError

YB = species_lookup("Yb-171")
BE = species_lookup("Be-9")
TRAP = trap_from_mhz(1.0)


def test_length_scale_closed_form():
    # 1.5e-5 (M f^2)^(-1/3) m with M in u, f in MHz
    unit = IonSpecies("unit", 1.0)
    assert length_scale(unit, TRAP.nu_z) == pytest.approx(1.5e-5, rel=0.02)
    assert length_scale(YB, TRAP.nu_z) == pytest.approx(1.5e-5 * 171 ** (-1 / 3), rel=0.02)


def test_length_scale_power_law():
    z1 = length_scale(YB, TRAP.nu_z)
    z2 = length_scale(YB, 2 * TRAP.nu_z)
    assert z2 / z1 == pytest.approx(2 ** (-2 / 3), rel=1e-12)


def test_length_scale_domain_error():
    with pytest.raises(DomainError):
        length_scale(YB, 0.0)


def test_single_ion_at_center():
    eq = equilibrium_positions(1, YB, TRAP)
    assert eq.positions == pytest.approx([0.0], abs=1e-15)


def test_two_ion_analytic():
    # force balance: u = +/- (1/4)^(1/3) in zeta units
    eq = equilibrium_positions(2, YB, TRAP)
    u = eq.positions_scaled
    assert u[1] == pytest.approx(0.25 ** (1 / 3), rel=1e-10)
    assert u[0] == pytest.approx(-(0.25 ** (1 / 3)), rel=1e-10)


def test_paper_separations_within_ten_percent():
    for sp, target_um in ((YB, 3.7), (BE, 9.9)):
        eq = equilibrium_positions(2, sp, TRAP)
        sep = (eq.positions[1] - eq.positions[0]) * 1e6
        assert sep == pytest.approx(target_um, rel=0.10)


def test_positions_symmetric_and_sorted():
    for n in (2, 3, 5, 10, 21):
        eq = equilibrium_positions(n, YB, TRAP)
        u = eq.positions_scaled
        assert np.all(np.diff(u) > 0)
        assert np.max(np.abs(u + u[::-1])) < 1e-9


def test_local_minimum_against_random_perturbations():
    from ionsim.chain import _potential

    rng = np.random.default_rng(11)
    eq = equilibrium_positions(6, YB, TRAP)
    u0 = eq.positions_scaled
    w, c = eq.weights, eq.centers_u
    e0 = _potential(u0, w, c)
    for _ in range(100):
        du = rng.normal(scale=0.01, size=u0.size)
        assert _potential(u0 + du, w, c) >= e0 - 1e-12


def test_positions_scale_with_zeta():
    # equal zeta from different (m, nu) pairs -> identical dimensionless chain
    eq1 = equilibrium_positions(5, YB, TRAP)
    m2 = YB.mass_u / 4.0
    nu2 = TRAP.nu_z * 2.0  # m nu^2 unchanged -> same zeta
    sp2 = IonSpecies("half", m2)
    eq2 = equilibrium_positions(5, sp2, TrapConfig(nu2, 10 * nu2, 10 * nu2))
    assert eq1.length_scale_zeta == pytest.approx(eq2.length_scale_zeta, rel=1e-12)
    assert eq1.positions_scaled == pytest.approx(eq2.positions_scaled, rel=1e-9)


def test_spacing_estimate_close_to_actual_minimum():
    for n in (5, 10, 20):
        eq = equilibrium_positions(n, YB, TRAP)
        assert eq.min_spacing() == pytest.approx(
            spacing_estimate(n, eq.length_scale_zeta), rel=0.10
        )


def test_modes_two_and_three_ions():
    eq2 = equilibrium_positions(2, YB, TRAP)
    f2 = normal_modes(eq2).frequencies / TRAP.nu_z
    assert f2 == pytest.approx([1.0, np.sqrt(3.0)], rel=1e-9)

    eq3 = equilibrium_positions(3, YB, TRAP)
    f3 = normal_modes(eq3).frequencies / TRAP.nu_z
    # frozen from an independent symbolic eigensolve of the 3x3 Hessian:
    # eigenvalues (1, 3, 29/5) in units of nu_z^2
    assert f3 == pytest.approx([1.0, np.sqrt(3.0), np.sqrt(29.0 / 5.0)], rel=1e-9)


def test_com_mode_structure():
    eq = equilibrium_positions(7, YB, TRAP)
    modes = normal_modes(eq)
    n = eq.n
    assert modes.frequencies[0] == pytest.approx(TRAP.nu_z, rel=1e-9)
    assert modes.mode_matrix[:, 0] == pytest.approx(np.ones(n) / np.sqrt(n), abs=1e-9)


def test_mode_matrix_orthogonal_and_roundtrip():
    rng = np.random.default_rng(3)
    for n in (2, 4, 9, 16):
        eq = equilibrium_positions(n, YB, TRAP)
        s = normal_modes(eq).mode_matrix
        assert np.max(np.abs(s.T @ s - np.eye(n))) < 1e-10
        q = rng.normal(size=n)
        assert s @ (s.T @ q) == pytest.approx(q, abs=1e-12)


def test_ground_state_spread_values():
    assert ground_state_spread(BE, TRAP.nu_z) == pytest.approx(24e-9, rel=0.02)
    assert ground_state_spread(YB, TRAP.nu_z) == pytest.approx(5.4e-9, rel=0.02)
    # 7.1e-8 (M f)^(-1/2) closed form
    unit = IonSpecies("unit", 1.0)
    assert ground_state_spread(unit, TRAP.nu_z) == pytest.approx(7.1e-8, rel=0.01)


def test_ground_state_spread_scaling():
    a = ground_state_spread(YB, TRAP.nu_z)
    b = ground_state_spread(YB, 4 * TRAP.nu_z)
    assert b == pytest.approx(a / 2, rel=1e-12)


def test_mode_spreads_match_definition():
    eq = equilibrium_positions(4, YB, TRAP)
    modes = normal_modes(eq)
    assert modes.ground_state_spreads == pytest.approx(
        ground_state_spread(YB, modes.frequencies), rel=1e-12
    )


def test_radial_modes_and_zigzag_instability():
    eq = equilibrium_positions(5, YB, TRAP)
    radial = normal_modes(eq, axis="radial")
    assert np.all(radial.frequencies > 0)
    # highest radial mode is the radial COM at nu_x
    assert radial.frequencies[-1] == pytest.approx(TRAP.nu_x, rel=1e-9)
    # squeezing the radial confinement below the zigzag threshold must raise
    with pytest.raises(InstabilityError):
        normal_modes(eq, axis="radial", nu_r=0.2 * TRAP.nu_z)


def test_radial_hessian_structure():
    eq = equilibrium_positions(3, YB, TRAP)
    h = radial_hessian_scaled(eq, TRAP.nu_x)
    u = eq.positions_scaled
    assert h[0, 1] == pytest.approx(1.0 / abs(u[0] - u[1]) ** 3, rel=1e-12)
    assert np.allclose(h, h.T)


def test_segmented_potential_microtrap_array():
    # strong individual wells at prescribed centres pin each ion near its site
    n = 4
    spacing = 10e-6
    centers = spacing * (np.arange(n) - (n - 1) / 2)
    pot = SegmentedPotential(nu_per_ion=np.full(n, 20 * TRAP.nu_z), centers=centers)
    eq = equilibrium_positions(n, YB, TRAP, potential=pot)
    assert eq.positions == pytest.approx(centers, abs=0.05 * spacing)
    modes = normal_modes(eq)
    # all modes cluster near the local well frequency
    assert np.all(modes.frequencies > 15 * TRAP.nu_z)


def test_segmented_double_well_near_degenerate_pair():
    # two 3-ion clusters in distant wells: lowest two modes nearly degenerate
    n = 6
    half = n // 2
    centers = np.concatenate([np.full(half, -150e-6), np.full(half, 150e-6)])
    pot = SegmentedPotential(nu_per_ion=np.full(n, TRAP.nu_z), centers=centers)
    eq = equilibrium_positions(n, YB, TRAP, potential=pot)
    modes = normal_modes(eq)
    f = modes.frequencies
    assert (f[1] - f[0]) / f[0] < 1e-2
    assert f[2] / f[0] > 1.5


def test_normal_modes_dataclass_has_axis():
    eq = equilibrium_positions(2, YB, TRAP)
    m = normal_modes(eq)
    assert isinstance(m, NormalModes)
    assert m.axis == "axial"
