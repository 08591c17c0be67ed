import numpy as np
import pytest
import scipy.linalg as la

import openrabi as orb
from util import REFERENCE_RATES


def decaying_cavity(kappa=1.0, cutoff=1):
    space = orb.CompositeSpace((orb.Boson(cutoff, "cavity"),))
    h = orb.number(cutoff)
    terms = [orb.LindbladTerm(orb.annihilation(cutoff), kappa)]
    return orb.unravel(h, terms, space), space, h, terms


def test_unravel_without_dissipation():
    space = orb.CompositeSpace((orb.Qubit("q"),))
    h = orb.qubit_ops().excited.astype(complex)
    unr = orb.unravel(h, [], space)
    np.testing.assert_array_equal(unr.h_eff, h)
    assert unr.jumps == ()


def test_unravel_single_channel():
    unr, _, h, _ = decaying_cavity(kappa=0.8, cutoff=2)
    a = orb.annihilation(2)
    np.testing.assert_allclose(unr.h_eff, h - 0.4j * (a.conj().T @ a), atol=1e-15)
    assert len(unr.jumps) == 1
    np.testing.assert_allclose(unr.jumps[0], np.sqrt(0.8) * a, atol=1e-15)


def test_recombination_identity_scenario_c():
    spec = orb.ModelSpec(
        params=orb.RabiParams(omega=1.0, g=0.05, **REFERENCE_RATES),
        cutoff=2,
        parasitic=orb.scenario_parasitic("c"),
    )
    space = orb.build_space(spec)
    h = orb.build_hamiltonian(spec)
    terms = orb.build_dissipators(spec)
    direct = orb.build_liouvillian(spec)
    rebuilt = orb.recombine(orb.unravel(h, terms, space))
    diff = np.abs((direct.matrix - rebuilt.matrix).toarray()).max()
    assert diff <= 1e-12


def test_identical_seeds_identical_records():
    unr, space, _, _ = decaying_cavity()
    psi0 = orb.basis_ket(space, [1])
    ops = (orb.number(1),)
    rec1 = orb.run_trajectory(unr, psi0, 4.0, 0.1, seed=42, operators=ops)
    rec2 = orb.run_trajectory(unr, psi0, 4.0, 0.1, seed=42, operators=ops)
    np.testing.assert_array_equal(rec1.observables, rec2.observables)
    assert rec1.jump_times == rec2.jump_times
    assert rec1.jump_channels == rec2.jump_channels


def test_zero_rates_pure_schroedinger():
    space = orb.CompositeSpace((orb.Boson(2, "cavity"),))
    x, _ = orb.quadratures(2)
    h = orb.number(2) + 0.3 * x
    unr = orb.unravel(h, [], space)
    psi0 = np.zeros(3, complex)
    psi0[0] = 1.0
    rec = orb.run_trajectory(unr, psi0, 2.0, 0.05, seed=5, operators=(orb.number(2),))
    assert rec.jump_times == []
    exact = la.expm(-1j * h * 2.0) @ psi0
    assert rec.observables[0, -1] == pytest.approx(
        float(np.vdot(exact, orb.number(2) @ exact).real), abs=1e-10
    )


def test_single_photon_decay_jump_statistics():
    # |1> with jump sqrt(kappa) a: at most one jump, first-jump law 1 - exp(-kappa t)
    kappa, t_max, n_traj = 1.0, 3.0, 1500
    unr, space, _, _ = decaying_cavity(kappa)
    psi0 = orb.basis_ket(space, [1])
    jumped_by_half = 0
    for i in range(n_traj):
        rec = orb.run_trajectory(unr, psi0, t_max, 0.25, orb.trajectory_seed(404, i))
        assert len(rec.jump_times) <= 1
        assert all(0 <= t <= t_max for t in rec.jump_times)
        if rec.jump_times and rec.jump_times[0] <= 1.5:
            jumped_by_half += 1
    p = 1.0 - np.exp(-kappa * 1.5)
    sigma = np.sqrt(p * (1 - p) / n_traj)
    assert abs(jumped_by_half / n_traj - p) <= 3 * sigma


def test_ensemble_matches_exponential_decay():
    kappa = 1.0
    unr, space, _, _ = decaying_cavity(kappa)
    psi0 = orb.basis_ket(space, [1])
    t_grid = np.linspace(0.0, 4.0, 9)
    ens = orb.ensemble_average(unr, psi0, t_grid, n_traj=1500, base_seed=808, operators=(orb.number(1),))
    exact = np.exp(-kappa * t_grid)
    for k in range(t_grid.size):
        diff = abs(ens.mean[0, k] - exact[k])
        assert diff <= max(3 * ens.stderr[0, k], 1e-12)


def test_ensemble_matches_master_equation():
    params = orb.RabiParams(omega=1.0, g=0.4, kappa=0.3, lam=0.3, gamma=0.1)
    spec = orb.ModelSpec(params=params, cutoff=1)
    space = orb.build_space(spec)
    h = orb.build_hamiltonian(spec)
    terms = orb.build_dissipators(spec)
    unr = orb.unravel(h, terms, space)
    psi0 = orb.basis_ket(space, [0, 0])
    n_op = orb.excitation_operator(space, "cavity")
    t_grid = np.linspace(0.0, 6.0, 13)
    ens = orb.ensemble_average(unr, psi0, t_grid, n_traj=700, base_seed=99, operators=(n_op,))

    gen = orb.build_liouvillian(spec)
    rho0 = np.outer(psi0, psi0.conj())
    for k, t in enumerate(t_grid[1:], start=1):
        exact = orb.expectation(n_op, orb.evolve(gen, rho0, float(t), tolerance=1e-10)).real
        assert abs(ens.mean[0, k] - exact) <= 3 * ens.stderr[0, k]


def test_error_shrinks_like_inverse_sqrt():
    unr, space, _, _ = decaying_cavity()
    psi0 = orb.basis_ket(space, [1])
    t_grid = np.linspace(0.0, 3.0, 7)
    small = orb.ensemble_average(unr, psi0, t_grid, 400, 31, (orb.number(1),))
    large = orb.ensemble_average(unr, psi0, t_grid, 800, 32, (orb.number(1),))
    ratio = small.stderr[0, 1:].mean() / large.stderr[0, 1:].mean()
    assert np.sqrt(2.0) / 1.5 <= ratio <= np.sqrt(2.0) * 1.5


def test_ensemble_rejects_degenerate_sampling():
    unr, space, _, _ = decaying_cavity()
    psi0 = orb.basis_ket(space, [1])
    with pytest.raises(ValueError):
        orb.ensemble_average(unr, psi0, np.linspace(0, 1, 5), 1, 0, (orb.number(1),))
    with pytest.raises(ValueError):
        orb.run_trajectory(unr, 2 * psi0, 1.0, 0.1, seed=0)


def test_renormalized_norm_after_jumps():
    unr, space, _, _ = decaying_cavity(kappa=2.0, cutoff=2)
    psi0 = orb.basis_ket(space, [2])
    rec = orb.run_trajectory(unr, psi0, 5.0, 0.1, seed=11, operators=(orb.number(2),))
    assert len(rec.jump_times) == 2  # |2> -> |1> -> |0> under pure decay
    assert rec.jump_times == sorted(rec.jump_times)
    assert rec.observables[0, -1] == pytest.approx(0.0, abs=1e-12)
