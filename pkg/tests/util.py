"""Shared helpers for the test suite."""

import numpy as np

import openrabi as orb

#: reference rate set used throughout: kappa = lam = 1e-6, gamma = lam/4
REFERENCE_RATES = dict(kappa=1e-6, lam=1e-6, gamma=2.5e-7)


def steady_means(spec):
    """(cavity <n>, atom <E>, SteadyStateResult) for a model spec."""
    space = orb.build_space(spec)
    result = orb.steady_state(orb.build_liouvillian(spec))
    n = orb.expectation(orb.excitation_operator(space, "cavity"), result.rho).real
    e = orb.expectation(orb.excitation_operator(space, "atom"), result.rho).real
    return n, e, result


def trace_distance(a, b):
    return 0.5 * float(np.abs(np.linalg.eigvalsh(a - b)).sum())


def cavity_only_generator(cutoff, kappa, nbar=0.0):
    """Damped single mode: H = n with thermal jump terms."""
    space = orb.CompositeSpace((orb.Boson(cutoff, "cavity"),))
    a = orb.annihilation(cutoff)
    terms = [orb.LindbladTerm(a, kappa * (1 + nbar))]
    if kappa * nbar > 0:
        terms.append(orb.LindbladTerm(a.conj().T, kappa * nbar))
    return orb.assemble(orb.number(cutoff), terms, space), space
