import numpy as np
import pytest

import openrabi as orb
from openrabi.hilbert import SQRT2, herm_defect
from util import REFERENCE_RATES

PARAMS = orb.RabiParams(omega=1.0, g=0.05, **REFERENCE_RATES)

ALL_SCENARIOS = ["bare", "a", "b", "c", "d"]


def spec_for(scenario, coupling=orb.Coupling.FULL, cutoff=1, params=PARAMS):
    return orb.ModelSpec(
        params=params,
        cutoff=cutoff,
        coupling=coupling,
        parasitic=orb.scenario_parasitic(scenario),
    )


def test_space_dimensions():
    assert orb.build_space(spec_for("bare", cutoff=2)).dim == 6
    assert orb.build_space(spec_for("a", cutoff=2)).dim == 18
    assert orb.build_space(spec_for("c", cutoff=2)).dim == 12


def test_decoupled_hamiltonian_is_diagonal():
    spec = spec_for("bare", params=orb.RabiParams(omega=0.8, g=0.0), cutoff=2)
    h = orb.build_hamiltonian(spec)
    space = orb.build_space(spec)
    expected = orb.excitation_operator(space, "cavity") + 0.8 * orb.excitation_operator(space, "atom")
    np.testing.assert_array_equal(h, expected)


def test_full_minus_rwa_is_the_pair_creating_part():
    # expand p*sigma_y by direct matrix multiplication; dropping the
    # excitation-conserving half must leave +(g/sqrt2)(a^+ s+ + a s-)
    g = 0.05
    spec_full = spec_for("bare", orb.Coupling.FULL)
    spec_rwa = spec_for("bare", orb.Coupling.RWA)
    space = orb.build_space(spec_full)
    a = orb.embed(orb.annihilation(1), space, 1)
    q = orb.qubit_ops()
    sm = orb.embed(q.sm, space, 0)
    sp_ = orb.embed(q.sp, space, 0)
    residual = orb.build_hamiltonian(spec_full) - orb.build_hamiltonian(spec_rwa)
    expected = (g / SQRT2) * (a.conj().T @ sp_ + a @ sm)
    np.testing.assert_allclose(residual, expected, atol=1e-15)


def test_parasitic_mode_coupling_scales_with_sqrt_frequency():
    spec = spec_for("a")  # spectator mode at frequency 2
    space = orb.build_space(spec)
    h = orb.build_hamiltonian(spec)
    bra = orb.basis_ket(space, [1, 0, 1])  # |e, 0_cav, 1_par>
    ket = orb.basis_ket(space, [0, 0, 0])  # |g, 0, 0>
    parasitic_elem = bra.conj() @ h @ ket
    bra_cav = orb.basis_ket(space, [1, 1, 0])
    cavity_elem = bra_cav.conj() @ h @ ket
    assert abs(parasitic_elem) == pytest.approx(np.sqrt(2.0) * 0.05 / SQRT2, rel=1e-14)
    assert abs(parasitic_elem / cavity_elem) == pytest.approx(np.sqrt(2.0), rel=1e-14)


def test_dissipator_lists():
    space = orb.build_space(spec_for("bare"))
    terms = orb.build_dissipators(spec_for("bare"))
    assert [t.rate for t in terms] == [1e-6, 1e-6, 2.5e-7 / 2]
    a = orb.embed(orb.annihilation(1), space, 1)
    np.testing.assert_array_equal(terms[0].operator, a)

    warm = spec_for("bare", params=orb.RabiParams(1.0, 0.05, nbar=0.1, **REFERENCE_RATES))
    terms_warm = orb.build_dissipators(warm)
    assert len(terms_warm) == 5
    assert terms_warm[1].rate == pytest.approx(1e-6 * 0.1)
    np.testing.assert_array_equal(terms_warm[1].operator, a.conj().T)
    assert terms_warm[3].rate == pytest.approx(1e-6 * 0.1)

    terms_a = orb.build_dissipators(spec_for("a"))
    assert len(terms_a) == 4
    assert terms_a[-1].rate == pytest.approx(2.0 * 1e-6)  # nu_t * kappa at nu_t = 2

    terms_c = orb.build_dissipators(spec_for("c"))
    assert len(terms_c) == 5
    assert [t.rate for t in terms_c[-2:]] == [1e-6, 2.5e-7 / 2]


def test_parasitic_elements_damped_at_zero_temperature():
    warm = orb.RabiParams(1.0, 0.05, nbar=0.3, **REFERENCE_RATES)
    terms_mode = orb.build_dissipators(spec_for("a", params=warm))
    # true cavity and atom each get two thermal terms, spectator mode only one
    assert len(terms_mode) == 6
    terms_atom = orb.build_dissipators(spec_for("c", params=warm))
    assert len(terms_atom) == 7


@pytest.mark.parametrize("scenario", ALL_SCENARIOS)
@pytest.mark.parametrize("coupling", [orb.Coupling.FULL, orb.Coupling.RWA])
def test_hamiltonian_hermitian(scenario, coupling):
    h = orb.build_hamiltonian(spec_for(scenario, coupling, cutoff=2))
    assert herm_defect(h) <= 1e-14 * max(np.abs(h).max(), 1.0)


@pytest.mark.parametrize("scenario", ALL_SCENARIOS)
def test_total_excitation_conservation(scenario):
    spec_rwa = spec_for(scenario, orb.Coupling.RWA, cutoff=2)
    space = orb.build_space(spec_rwa)
    n_tot = orb.total_excitation(space)
    h_rwa = orb.build_hamiltonian(spec_rwa)
    assert np.abs(n_tot @ h_rwa - h_rwa @ n_tot).max() <= 1e-14
    h_full = orb.build_hamiltonian(spec_for(scenario, orb.Coupling.FULL, cutoff=2))
    assert np.abs(n_tot @ h_full - h_full @ n_tot).max() > 1e-3


@pytest.mark.parametrize("scenario", ALL_SCENARIOS)
def test_rwa_ground_vacuum_is_dark(scenario):
    spec = spec_for(scenario, orb.Coupling.RWA, cutoff=2)
    space = orb.build_space(spec)
    gen = orb.build_liouvillian(spec)
    ground = orb.basis_ket(space, [0] * len(space.dims))
    rho = np.outer(ground, ground.conj())
    assert np.abs(gen.matrix @ orb.vectorize(rho)).max() <= 1e-12


def test_parameter_validation():
    with pytest.raises(ValueError):
        orb.RabiParams(omega=1.0, g=0.05, kappa=-1e-6)
    with pytest.raises(ValueError):
        orb.ParasiticMode(nu=0.0)
    with pytest.raises(ValueError):
        orb.ModelSpec(params=PARAMS, cutoff=0)
    with pytest.raises(ValueError):
        orb.scenario_parasitic("z")
